"""Word lists used as features and lookups.

Each dictionary is a plain data file under ``data/dictionaries``; lines
are lowercase entries.  The country table maps full names to ISO 3166
alpha-2 codes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources


def _read_lines(name: str) -> list[str]:
    path = resources.files("docharvest").joinpath("data/dictionaries", name)
    text = path.read_text(encoding="utf-8")
    return [ln.strip() for ln in text.splitlines() if ln.strip()]


@dataclass(frozen=True)
class Dictionaries:
    countries: dict[str, str]            # full lowercase name -> ISO2
    country_tokens: frozenset[str]
    institution_words: frozenset[str]
    address_words: frozenset[str]
    cities: frozenset[str]
    publisher_words: frozenset[str]
    series_words: frozenset[str]
    source_words: frozenset[str]
    issue_words: frozenset[str]
    pages_words: frozenset[str]
    volume_words: frozenset[str]
    article_types: tuple[str, ...] = field(default=())
    caption_patterns: tuple[str, ...] = field(default=())
    equation_chars: frozenset[str] = field(default=frozenset())

    def country_iso(self, name: str) -> str | None:
        return self.countries.get(" ".join(name.lower().split()))


@lru_cache(maxsize=1)
def load_dictionaries() -> Dictionaries:
    countries: dict[str, str] = {}
    for line in _read_lines("countries.csv"):
        name, _, iso = line.partition(",")
        countries[name.strip()] = iso.strip().upper()
    # Tokens of country names (short fillers like "of" excluded).
    tokens = {w for name in countries for w in name.split() if len(w) >= 3}
    return Dictionaries(
        countries=countries,
        country_tokens=frozenset(tokens),
        institution_words=frozenset(_read_lines("institution_words.txt")),
        address_words=frozenset(_read_lines("address_words.txt")),
        cities=frozenset(_read_lines("cities.txt")),
        publisher_words=frozenset(_read_lines("publisher_words.txt")),
        series_words=frozenset(_read_lines("series_words.txt")),
        source_words=frozenset(_read_lines("source_words.txt")),
        issue_words=frozenset(_read_lines("issue_words.txt")),
        pages_words=frozenset(_read_lines("pages_words.txt")),
        volume_words=frozenset(_read_lines("volume_words.txt")),
        article_types=tuple(_read_lines("article_types.txt")),
        caption_patterns=tuple(_read_lines("caption_patterns.txt")),
        equation_chars=frozenset("".join(_read_lines("equation_chars.txt"))),
    )

"""Small text helpers shared by the extraction stages."""

from __future__ import annotations

import re

LIGATURES = {
    "ﬀ": "ff",
    "ﬁ": "fi",
    "ﬂ": "fl",
    "ﬃ": "ffi",
    "ﬄ": "ffl",
    "ﬅ": "st",
    "ﬆ": "st",
    "Œ": "OE",
    "œ": "oe",
    "Æ": "AE",
    "æ": "ae",
}

_LIGATURE_RE = re.compile("|".join(map(re.escape, LIGATURES)))

EMAIL_RE = re.compile(r"[\w.+-]+@[\w-]+(?:\.[\w-]+)+")

DOI_RE = re.compile(r"10\.\d{4,9}/\S+")

YEAR_RE = re.compile(r"\b(19|20)\d{2}\b")

DASH_CHARS = "-‐‑‒–—−"


def normalize_ligatures(text: str) -> str:
    return _LIGATURE_RE.sub(lambda m: LIGATURES[m.group(0)], text)


def join_hyphenated(parts: list[str]) -> str:
    """Join text fragments with single spaces, undoing end-of-fragment
    hyphenation: a fragment ending in "-" whose successor starts with a
    lowercase letter is merged without the hyphen."""
    out = ""
    for part in parts:
        part = part.strip()
        if not part:
            continue
        if not out:
            out = part
        elif out.endswith("-") and part[:1].islower():
            out = out[:-1] + part
        else:
            out = out + " " + part
    return out


_INLINE_HYPHEN_RE = re.compile(r"(\S)-\s+(\S)")


def dehyphenate(text: str) -> str:
    """Remove end-of-line hyphenation already flattened into one string."""
    def repl(m: re.Match) -> str:
        if m.group(2).islower():
            return m.group(1) + m.group(2)
        return m.group(0)

    return _INLINE_HYPHEN_RE.sub(repl, text)


def find_doi(text: str) -> str | None:
    m = DOI_RE.search(text)
    if not m:
        return None
    return m.group(0).rstrip(".,;:)]}'\"")

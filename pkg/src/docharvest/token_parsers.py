"""Token-level parsing of affiliation and citation strings.

A string is tokenized into letter runs, digit runs, and single other
characters (whitespace only separates).  Each token gets a feature set
(word identity or a rarity marker, case and shape tests, dictionary
hits), every base feature is also copied onto the two neighbors on
each side with a positional prefix, and a chain CRF labels the token
sequence.  Field values are substrings of the raw input recovered from
token spans.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace
from typing import Sequence

from .crf import (CrfModel, CrfTrainReport, crf_model_from_dict,
                  crf_model_to_dict, train_crf, viterbi)
from .dictionaries import Dictionaries, load_dictionaries
from .errors import ConfigError, DocharvestError
from .textutil import (DASH_CHARS, dehyphenate, find_doi, normalize_ligatures)

# A word form becomes a feature of its own once it appears this many
# times in the training data; rarer tokens share a single RARE feature.
RARE_THRESHOLD = 5

AFFILIATION_LABELS = ("institution", "address", "country", "other")

CITATION_LABELS = ("first_name", "surname", "title", "source", "volume",
                   "issue", "page_first", "page_last", "year", "text")

_NEIGHBOR_PREFIXES = ((-2, "prev2:"), (-1, "prev1:"), (1, "next1:"), (2, "next2:"))

_QUOTE_CHARS = "\"'‘’“”„`´"

_YEAR_TOKEN_RE = re.compile(r"(19|20)\d{2}$")


class EmptyInput(DocharvestError):
    """The string to parse contains no tokens."""


@dataclass
class Token:
    text: str
    start: int
    end: int


_TOKEN_RE = re.compile(r"[^\W\d_]+|\d+|\S", re.UNICODE)


def tokenize(text: str) -> list[Token]:
    """Maximal letter runs, maximal digit runs, single other characters."""
    return [Token(m.group(0), m.start(), m.end())
            for m in _TOKEN_RE.finditer(text)]


def build_vocabulary(texts: Sequence[str], min_count: int = RARE_THRESHOLD) -> frozenset[str]:
    counts: dict[str, int] = {}
    for text in texts:
        for tok in tokenize(text):
            w = tok.text.lower()
            counts[w] = counts.get(w, 0) + 1
    return frozenset(w for w, c in counts.items() if c >= min_count)


def _case_features(text: str) -> list[str]:
    feats = []
    if text.isdigit():
        feats.append("NUMBER")
    if text.isalpha():
        if text == text.upper() and text != text.lower():
            feats.append("ALLUPPER")
        if text == text.lower() and text != text.upper():
            feats.append("ALLLOWER")
        if len(text) > 1 and text[0].isupper() and text[1:] == text[1:].lower():
            feats.append("STARTUPPER")
    return feats


def _with_neighbors(base: list[list[str]]) -> list[list[str]]:
    out = []
    n = len(base)
    for i in range(n):
        feats = list(base[i])
        for off, prefix in _NEIGHBOR_PREFIXES:
            j = i + off
            if 0 <= j < n:
                feats.extend(prefix + f for f in base[j])
        out.append(feats)
    return out


def affiliation_features(tokens: Sequence[Token], dicts: Dictionaries,
                         vocab: frozenset[str]) -> list[list[str]]:
    base = []
    for tok in tokens:
        low = tok.text.lower()
        feats = [f"W={low}" if low in vocab else "RARE"]
        feats.extend(_case_features(tok.text))
        if low in dicts.country_tokens:
            feats.append("COUNTRY")
        if low in dicts.institution_words:
            feats.append("INSTITUTION")
        if low in dicts.address_words:
            feats.append("ADDRESS")
        base.append(feats)
    return _with_neighbors(base)


def citation_features(tokens: Sequence[Token], dicts: Dictionaries,
                      vocab: frozenset[str]) -> list[list[str]]:
    base = []
    n = len(tokens)
    for i, tok in enumerate(tokens):
        text = tok.text
        low = text.lower()
        feats = [f"W={low}" if low in vocab else "RARE"]
        if text.isdigit():
            feats.append("ALL_DIGITS")
            if len(text) == 1:
                feats.append("SINGLE_DIGIT")
            if _YEAR_TOKEN_RE.fullmatch(text):
                feats.append("IS_YEAR")
        if text.isalpha():
            feats.append("ALL_LETTERS")
            if text == text.lower():
                feats.append("ALL_LOWER")
                if len(text) == 1:
                    feats.append("SINGLE_LOWER")
            if text == text.upper():
                feats.append("ALL_UPPER")
                if len(text) == 1:
                    feats.append("SINGLE_UPPER")
                if all(c in "IVXLCDM" for c in text):
                    feats.append("ROMAN")
            if text[0].isupper():
                feats.append("START_UPPER")
        if text.isalnum():
            feats.append("ALL_ALNUM")
        if low in dicts.cities:
            feats.append("DICT_CITY")
        if low in dicts.publisher_words:
            feats.append("DICT_PUBLISHER")
        if low in dicts.series_words:
            feats.append("DICT_SERIES")
        if low in dicts.source_words:
            feats.append("DICT_SOURCE")
        if low in dicts.issue_words:
            feats.append("DICT_ISSUE")
        if low in dicts.pages_words:
            feats.append("DICT_PAGES")
        if low in dicts.volume_words:
            feats.append("DICT_VOLUME")
        if text == "(":
            feats.append("OPEN_PAREN")
        if text == ")":
            feats.append("CLOSE_PAREN")
        if text == "[":
            feats.append("OPEN_BRACKET")
        if text == "]":
            feats.append("CLOSE_BRACKET")
        if text == ",":
            feats.append("COMMA")
        if text in DASH_CHARS:
            feats.append("DASH")
            if 0 < i < n - 1 and tokens[i - 1].text.isalpha() and tokens[i + 1].text.isalpha():
                feats.append("DASH_BETWEEN_WORDS")
        if text == ".":
            feats.append("DOT")
        if text in _QUOTE_CHARS:
            feats.append("QUOTE")
            if 0 < i < n - 1 and tokens[i - 1].text.isalnum() and tokens[i + 1].text.isalnum():
                feats.append("QUOTE_BETWEEN_WORDS")
        if text == "/":
            feats.append("SLASH")
        if low == "and" or text == "&":
            feats.append("AND_WORD")
        base.append(feats)
    return _with_neighbors(base)


# --- parsers -----------------------------------------------------------------

@dataclass
class TokenParser:
    """A CRF plus the vocabulary and dictionaries it was trained with."""

    task: str  # "affiliation" | "citation"
    model: CrfModel
    vocab: frozenset[str]
    dicts: Dictionaries = field(default_factory=load_dictionaries, repr=False)

    def featurize(self, tokens: Sequence[Token]) -> list[list[str]]:
        if self.task == "affiliation":
            return affiliation_features(tokens, self.dicts, self.vocab)
        return citation_features(tokens, self.dicts, self.vocab)

    def label(self, text: str) -> tuple[list[Token], list[str]]:
        tokens = tokenize(text)
        if not tokens:
            raise EmptyInput("nothing to parse")
        return tokens, viterbi(self.model, self.featurize(tokens))

    def to_dict(self) -> dict:
        return crf_model_to_dict(self.model,
                                 meta={"task": self.task,
                                       "vocab": sorted(self.vocab)})

    @classmethod
    def from_dict(cls, d: dict) -> "TokenParser":
        meta = d.get("meta", {})
        return cls(task=meta.get("task", "citation"),
                   model=crf_model_from_dict(d),
                   vocab=frozenset(meta.get("vocab", [])))


def train_token_parser(task: str,
                       samples: Sequence[tuple[str, Sequence[str]]],
                       sigma2: float = 10.0, tol: float = 1e-4,
                       max_epochs: int = 200) -> tuple[TokenParser, CrfTrainReport]:
    """Fit a parser on (text, per-token labels) pairs.

    The label set is the full task alphabet, not just the labels seen,
    so rare fields keep their transition weights.
    """
    if task == "affiliation":
        label_set, feature_fn = AFFILIATION_LABELS, affiliation_features
    elif task == "citation":
        label_set, feature_fn = CITATION_LABELS, citation_features
    else:
        raise ConfigError(f"unknown parser task {task!r}")
    if not samples:
        raise EmptyInput("no training samples")
    dicts = load_dictionaries()
    vocab = build_vocabulary([text for text, _ in samples])
    seqs, labs = [], []
    for text, labels in samples:
        tokens = tokenize(text)
        if len(tokens) != len(labels):
            raise ConfigError(
                f"{len(labels)} labels for {len(tokens)} tokens in {text!r}")
        unknown = set(labels) - set(label_set)
        if unknown:
            raise ConfigError(f"labels {sorted(unknown)} outside the {task} alphabet")
        seqs.append(feature_fn(tokens, dicts, vocab))
        labs.append(list(labels))
    model, report = train_crf(seqs, labs, label_set=list(label_set),
                              sigma2=sigma2, tol=tol, max_epochs=max_epochs)
    return TokenParser(task=task, model=model, vocab=vocab, dicts=dicts), report


def save_token_parser(parser: TokenParser, path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(parser.to_dict(), f, sort_keys=True)


def load_token_parser(path: str) -> TokenParser:
    with open(path, "r", encoding="utf-8") as f:
        return TokenParser.from_dict(json.load(f))


def _runs(labels: Sequence[str]) -> list[tuple[str, int, int]]:
    """Maximal runs of equal labels as (label, first index, last index)."""
    runs = []
    for i, lab in enumerate(labels):
        if runs and runs[-1][0] == lab and runs[-1][2] == i - 1:
            runs[-1] = (lab, runs[-1][1], i)
        else:
            runs.append((lab, i, i))
    return runs


@dataclass
class ParsedAffiliation:
    raw: str
    institution: str | None = None
    address: str | None = None
    country: str | None = None
    country_iso: str | None = None
    spans: dict[str, tuple[int, int]] = field(default_factory=dict)


def parse_affiliation(text: str, parser: TokenParser) -> ParsedAffiliation:
    """Label an affiliation string and cut out the first run per field."""
    tokens, labels = parser.label(text)
    result = ParsedAffiliation(raw=text)
    for lab, i0, i1 in _runs(labels):
        if lab in ("institution", "address", "country") and lab not in result.spans:
            span = (tokens[i0].start, tokens[i1].end)
            result.spans[lab] = span
            setattr(result, lab, text[span[0]:span[1]])
    if result.country:
        result.country_iso = parser.dicts.country_iso(result.country)
    return result


@dataclass
class ParsedReference:
    raw: str
    authors: list[tuple[str, str]] = field(default_factory=list)  # (given, surname)
    title: str | None = None
    source: str | None = None
    volume: str | None = None
    issue: str | None = None
    pages: tuple[str, str] | None = None
    year: str | None = None
    doi: str | None = None
    type: str | None = None


def parse_citation(text: str, parser: TokenParser) -> ParsedReference:
    """Label a reference string and assemble the metadata fields."""
    tokens, labels = parser.label(text)
    runs = _runs(labels)

    def span_text(i0: int, i1: int) -> str:
        return text[tokens[i0].start:tokens[i1].end]

    ref = ParsedReference(raw=text)

    # Authors: adjacent name runs pair up in order; an unpaired run
    # becomes an author with the other part empty.
    name_runs = [(lab, i0, i1) for lab, i0, i1 in runs
                 if lab in ("first_name", "surname")]
    i = 0
    while i < len(name_runs):
        lab, i0, i1 = name_runs[i]
        nxt = name_runs[i + 1] if i + 1 < len(name_runs) else None
        if nxt is not None and nxt[0] != lab:
            given = span_text(i0, i1) if lab == "first_name" else span_text(nxt[1], nxt[2])
            surname = span_text(nxt[1], nxt[2]) if lab == "first_name" else span_text(i0, i1)
            ref.authors.append((given, surname))
            i += 2
        elif lab == "first_name":
            ref.authors.append((span_text(i0, i1), ""))
            i += 1
        else:
            ref.authors.append(("", span_text(i0, i1)))
            i += 1

    titles = [span_text(i0, i1) for lab, i0, i1 in runs if lab == "title"]
    if titles:
        ref.title = " ".join(titles)
    sources = [span_text(i0, i1) for lab, i0, i1 in runs if lab == "source"]
    if sources:
        ref.source = " ".join(sources)

    def first(label: str) -> str | None:
        for lab, i0, i1 in runs:
            if lab == label:
                return span_text(i0, i1)
        return None

    ref.volume = first("volume")
    ref.issue = first("issue")
    ref.year = first("year")
    page_first = first("page_first")
    page_last = first("page_last")
    if page_first is not None:
        ref.pages = (page_first, page_last if page_last is not None else page_first)
    return ref


_CONFERENCE_RE = re.compile(r"proceedings|conference|conf\.|symposium|workshop",
                            re.IGNORECASE)
_REPORT_RE = re.compile(r"technical\s+report|tech\.?\s*rep|\bTR-", re.IGNORECASE)


def clean_reference(ref: ParsedReference) -> ParsedReference:
    """Normalize ligatures and hyphenation in the text fields, pull the
    DOI out of the raw string, and assign a reference type from keyword
    hits (raw text itself stays untouched)."""

    def fix(s: str | None) -> str | None:
        if s is None:
            return None
        return dehyphenate(normalize_ligatures(s))

    if _CONFERENCE_RE.search(ref.raw):
        kind = "conference proceedings"
    elif _REPORT_RE.search(ref.raw):
        kind = "technical report"
    elif ref.source:
        kind = "journal paper"
    else:
        kind = ref.type
    return replace(
        ref,
        authors=[(fix(g) or "", fix(s) or "") for g, s in ref.authors],
        title=fix(ref.title),
        source=fix(ref.source),
        doi=ref.doi or find_doi(ref.raw),
        type=kind,
    )

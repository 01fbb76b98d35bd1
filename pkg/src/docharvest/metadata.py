"""Front-matter assembly.

Labeled metadata zones are turned into a structured record: title,
authors, parsed affiliations, author-affiliation and author-email
relations, keywords, abstract, and the bibliographic numbers (journal,
volume, issue, pages, year, DOI).

Two author layouts exist.  In the grouped layout the author names sit
in their own zones and point at shared affiliation zones through index
markers (digits, stars, daggers, single letters, usually superscript).
In the per-zone layout each affiliation zone is self-contained: first
line the author, an email line, the rest the affiliation.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from statistics import median

from .dictionaries import load_dictionaries
from .errors import DocharvestError
from .geom import Document, Line, Word, Zone
from .textutil import (EMAIL_RE, YEAR_RE, find_doi, join_hyphenated,
                       normalize_ligatures)
from .token_parsers import ParsedAffiliation, TokenParser, parse_affiliation

MARKER_SYMBOLS = set("*†‡§")

# Superscript: char top above the line's median top by this fraction of
# the median char height.
_SUPERSCRIPT_RAISE = 0.2

_VOLUME_RE = re.compile(r"vol(?:ume)?s?\.?\s*(\d+)", re.IGNORECASE)
_ISSUE_RE = re.compile(r"(?:no|issue|number)\.?\s*:?\s*(\d+)", re.IGNORECASE)
_VOL_ISSUE_RE = re.compile(r"(\d+)\s*\(\s*(\d+)\s*\)")
_PAGES_RE = re.compile(r"(\d+)\s*[-–—]\s*(\d+)")

# Printed page numbers are small; anything in the year range is not one.
_MAX_PRINTED_PAGE = 1899


class NoAuthors(DocharvestError):
    """The document has no author information to extract."""


@dataclass
class AuthorExtraction:
    layout: str  # "grouped" | "per_zone"
    authors: list[str] = field(default_factory=list)
    affiliation_strings: list[str] = field(default_factory=list)
    relations: list[tuple[int, int]] = field(default_factory=list)
    emails: list[str] = field(default_factory=list)
    author_email: list[tuple[int, int]] = field(default_factory=list)


@dataclass
class DocumentFront:
    title: str | None = None
    authors: list[str] = field(default_factory=list)
    affiliations: list[ParsedAffiliation] = field(default_factory=list)
    author_affiliation: list[tuple[int, int]] = field(default_factory=list)
    emails: list[str] = field(default_factory=list)
    author_email: list[tuple[int, int]] = field(default_factory=list)
    abstract: str | None = None
    keywords: list[str] = field(default_factory=list)
    journal: str | None = None
    volume: str | None = None
    issue: str | None = None
    pages: tuple[str, str] | None = None
    year: str | None = None
    doi: str | None = None


def _zones_with_label(doc: Document, label: str) -> list[Zone]:
    return [z for z in doc.zones() if z.label == label]


def detect_author_layout(doc: Document) -> str:
    """Per-zone when at least two affiliation zones share a row."""
    affs = _zones_with_label(doc, "affiliation")
    for i in range(len(affs)):
        for j in range(i + 1, len(affs)):
            a, b = affs[i].box, affs[j].box
            overlap = a.vertical_overlap(b)
            if overlap >= 0.5 * min(a.height, b.height):
                return "per_zone"
    return "grouped"


# --- marker handling ---------------------------------------------------------

def _line_superscript_flags(line: Line) -> dict[int, bool]:
    """id(char) -> raised above the median top of the line."""
    chars = list(line.chars())
    tops = [c.box.y1 for c in chars]
    heights = [c.box.height for c in chars]
    med_top = median(tops)
    med_h = median(heights)
    cut = med_top - _SUPERSCRIPT_RAISE * med_h
    return {id(c): c.box.y1 < cut for c in chars}


def _is_marker_text(text: str) -> bool:
    if text.isdigit():
        return True
    if len(text) == 1 and (text in MARKER_SYMBOLS or text.islower()):
        return True
    return False


def _split_word_markers(word: Word, raised: dict[int, bool]) -> tuple[str, list[str]]:
    """Word text with superscript marker symbols removed, plus the markers."""
    base: list[str] = []
    markers: list[str] = []
    run = ""
    for c in word.chars:
        is_marker = raised.get(id(c), False) and (c.text.isdigit()
                                                  or _is_marker_text(c.text))
        if is_marker:
            if c.text.isdigit() and run.isdigit() and run:
                run += c.text
            else:
                if run:
                    markers.append(run)
                run = c.text
        else:
            base.append(c.text)
    if run:
        markers.append(run)
    return "".join(base), markers


def _extract_grouped_authors(author_zones: list[Zone]) -> list[tuple[str, list[str]]]:
    """(author name, markers) list from the author zones' word stream.

    Authors are separated by commas, semicolons, "and", and "&";
    superscript marker symbols attach to the author being accumulated.
    """
    authors: list[tuple[str, list[str]]] = []
    words: list[str] = []
    markers: list[str] = []

    def flush() -> None:
        nonlocal words, markers
        name = " ".join(words).strip()
        if name:
            authors.append((name, markers))
        words, markers = [], []

    for zone in author_zones:
        for line in zone.lines:
            raised = _line_superscript_flags(line)
            for word in line.words:
                base, found = _split_word_markers(word, raised)
                markers.extend(found)
                stripped = base.strip()
                if stripped.lower() in ("and", "&"):
                    flush()
                    continue
                boundary = stripped.endswith((",", ";"))
                stripped = stripped.rstrip(",;").strip()
                if stripped:
                    words.append(stripped)
                if boundary:
                    flush()
    flush()
    return authors


def _split_affiliation_zone(zone: Zone) -> list[tuple[str | None, str]]:
    """(marker, affiliation text) pairs; a line starting with a marker
    token begins a new affiliation, other lines continue the current."""
    parts: list[tuple[str | None, list[str]]] = []
    for line in zone.lines:
        raised = _line_superscript_flags(line)
        line_words = []
        leading_marker: str | None = None
        for wi, word in enumerate(line.words):
            base, found = _split_word_markers(word, raised)
            if wi == 0:
                if found and len(line.words) > 1:
                    leading_marker = found[0]
                elif (_is_marker_text(base.strip()) and len(line.words) > 1):
                    leading_marker = base.strip()
                    base = ""
            text = base.strip()
            if text:
                line_words.append(text)
        line_text = " ".join(line_words)
        if leading_marker is not None or not parts:
            parts.append((leading_marker, [line_text] if line_text else []))
        elif line_text:
            parts[-1][1].append(line_text)
    return [(m, join_hyphenated(ls)) for m, ls in parts if ls]


def extract_authors_grouped(author_zones: list[Zone],
                            affiliation_zones: list[Zone]) -> AuthorExtraction:
    result = AuthorExtraction(layout="grouped")
    named = _extract_grouped_authors(author_zones)
    result.authors = [name for name, _ in named]

    aff_markers: list[str | None] = []
    for zone in affiliation_zones:
        for marker, text in _split_affiliation_zone(zone):
            aff_markers.append(marker)
            result.affiliation_strings.append(text)

    marker_to_aff = {m: i for i, m in enumerate(aff_markers) if m is not None}
    any_author_markers = any(ms for _, ms in named)
    for ai, (_, ms) in enumerate(named):
        for m in ms:
            if m in marker_to_aff:
                result.relations.append((ai, marker_to_aff[m]))
    if (not any_author_markers and not marker_to_aff
            and len(result.affiliation_strings) == 1):
        result.relations = [(ai, 0) for ai in range(len(result.authors))]
    return result


def extract_authors_per_zone(zones: list[Zone]) -> AuthorExtraction:
    """Self-contained author zones: name line, optional email line, rest
    is the affiliation."""
    result = AuthorExtraction(layout="per_zone")
    for zone in zones:
        if not zone.lines:
            continue
        raised = _line_superscript_flags(zone.lines[0])
        name_words = []
        for word in zone.lines[0].words:
            base, _ = _split_word_markers(word, raised)
            base = base.strip().rstrip(",;")
            if base:
                name_words.append(base)
        name = " ".join(name_words)
        if not name:
            continue
        ai = len(result.authors)
        result.authors.append(name)
        aff_lines = []
        email = None
        for line in zone.lines[1:]:
            m = EMAIL_RE.search(line.text)
            if m and email is None:
                email = m.group(0)
                continue
            aff_lines.append(line.text)
        if aff_lines:
            fi = len(result.affiliation_strings)
            result.affiliation_strings.append(join_hyphenated(aff_lines))
            result.relations.append((ai, fi))
        if email is not None:
            if email not in result.emails:
                result.emails.append(email)
            result.author_email.append((ai, result.emails.index(email)))
    return result


def extract_authors(doc: Document) -> AuthorExtraction:
    layout = detect_author_layout(doc)
    author_zones = _zones_with_label(doc, "author")
    affiliation_zones = _zones_with_label(doc, "affiliation")
    if layout == "per_zone":
        return extract_authors_per_zone(affiliation_zones)
    if not author_zones:
        raise NoAuthors("no author zones in the document")
    return extract_authors_grouped(author_zones, affiliation_zones)


def _match_emails(result: AuthorExtraction, texts: list[str]) -> None:
    """Harvest emails and link them to authors by surname substring."""
    for text in texts:
        for m in EMAIL_RE.finditer(text):
            email = m.group(0)
            if email not in result.emails:
                result.emails.append(email)
    linked = {pair for pair in result.author_email}
    for ei, email in enumerate(result.emails):
        mailbox = email.split("@", 1)[0].lower()
        for ai, name in enumerate(result.authors):
            alpha_parts = [p for p in re.findall(r"[^\W\d_]+", name) if len(p) >= 2]
            if not alpha_parts:
                continue
            surname = alpha_parts[-1].lower()
            if surname in mailbox and (ai, ei) not in linked:
                result.author_email.append((ai, ei))
                linked.add((ai, ei))
    result.author_email.sort()


# --- field cleanup -----------------------------------------------------------

def _clean_title(zones: list[Zone]) -> str | None:
    if not zones:
        return None
    dicts = load_dictionaries()
    lines = [ln.text for z in zones for ln in z.lines]
    first_norm = " ".join(re.findall(r"[a-z]+", lines[0].lower())) if lines else ""
    if first_norm in dicts.article_types:
        lines = lines[1:]
    if not lines:
        return None
    return normalize_ligatures(join_hyphenated(lines))


_ABSTRACT_HEAD_RE = re.compile(r"^\s*(abstract|summary)\s*[:.—-]?\s*",
                               re.IGNORECASE)
_KEYWORDS_HEAD_RE = re.compile(r"^\s*(key\s*words?|index\s+terms)\s*[:.—-]?\s*",
                               re.IGNORECASE)


def _clean_abstract(zones: list[Zone]) -> str | None:
    if not zones:
        return None
    lines = [ln.text for z in zones for ln in z.lines]
    if lines:
        lines[0] = _ABSTRACT_HEAD_RE.sub("", lines[0])
        if not lines[0].strip():
            lines = lines[1:]
    text = normalize_ligatures(join_hyphenated(lines))
    return text or None


def _clean_keywords(zones: list[Zone]) -> list[str]:
    if not zones:
        return []
    text = join_hyphenated([ln.text for z in zones for ln in z.lines])
    text = _KEYWORDS_HEAD_RE.sub("", text)
    parts = re.split(r"[;,]", text)
    return [p.strip().rstrip(".").strip() for p in parts if p.strip().rstrip(".")]


def _infer_pages_from_page_numbers(doc: Document) -> tuple[str, str] | None:
    """Per-page printed numbers forming a step-1 run on >= 80% of pages."""
    npages = len(doc.pages)
    if npages == 0:
        return None
    page_numbers: list[set[int]] = []
    for page in doc.pages:
        nums = set()
        for zone in page.zones:
            text = zone.text.strip()
            if text.isdigit() and int(text) <= _MAX_PRINTED_PAGE:
                nums.add(int(text))
        page_numbers.append(nums)
    candidates = sorted({num - i for i, nums in enumerate(page_numbers)
                         for num in nums})
    for start in candidates:
        if start < 1:
            continue
        hits = sum(1 for i, nums in enumerate(page_numbers) if start + i in nums)
        if hits >= 0.8 * npages:
            return (str(start), str(start + npages - 1))
    return None


def assemble_front(doc: Document, affiliation_parser: TokenParser | None = None
                   ) -> DocumentFront:
    """Build the front-matter record from a label-annotated document."""
    front = DocumentFront()
    front.title = _clean_title(_zones_with_label(doc, "title"))
    front.abstract = _clean_abstract(_zones_with_label(doc, "abstract"))
    front.keywords = _clean_keywords(_zones_with_label(doc, "keywords"))

    try:
        extraction = extract_authors(doc)
    except NoAuthors:
        extraction = AuthorExtraction(layout="grouped")
    email_sources = [z.text for z in _zones_with_label(doc, "correspondence")]
    email_sources += [z.text for z in _zones_with_label(doc, "affiliation")]
    email_sources += [z.text for z in _zones_with_label(doc, "author")]
    _match_emails(extraction, email_sources)

    front.authors = extraction.authors
    front.author_affiliation = sorted(set(extraction.relations))
    front.emails = extraction.emails
    front.author_email = sorted(set(extraction.author_email))
    if affiliation_parser is not None:
        front.affiliations = [parse_affiliation(s, affiliation_parser)
                              for s in extraction.affiliation_strings]
    else:
        front.affiliations = [ParsedAffiliation(raw=s)
                              for s in extraction.affiliation_strings]

    bib_texts = [z.text for z in _zones_with_label(doc, "bib_info")]
    dates_texts = [z.text for z in _zones_with_label(doc, "dates")]

    for text in bib_texts:
        if front.journal is None:
            m = re.match(r"^([^\d]+)", text.strip())
            if m:
                head = m.group(1).strip().rstrip(",;:")
                if len(re.findall(r"[^\W\d_]", head)) >= 3:
                    front.journal = normalize_ligatures(" ".join(head.split()))
        if front.volume is None:
            m = _VOLUME_RE.search(text)
            if m:
                front.volume = m.group(1)
        if front.issue is None:
            m = _ISSUE_RE.search(text)
            if m:
                front.issue = m.group(1)
        if front.volume is None and front.issue is None:
            m = _VOL_ISSUE_RE.search(text)
            if m:
                front.volume, front.issue = m.group(1), m.group(2)
        if front.pages is None:
            m = _PAGES_RE.search(text)
            if m:
                front.pages = (m.group(1), m.group(2))
        if front.doi is None:
            front.doi = find_doi(text)
    if front.pages is None:
        front.pages = _infer_pages_from_page_numbers(doc)
    if front.pages is not None:
        first, last = front.pages
        if first.isdigit() and last.isdigit() and int(first) > int(last):
            front.pages = None
    for text in bib_texts + dates_texts:
        if front.year is None:
            m = YEAR_RE.search(text)
            if m:
                front.year = m.group(0)
    return front

"""Seeded generator for layout-faithful test documents.

Documents come out in three aligned forms: the flat character dump the
pipeline ingests, the ground-truth geometric document (words, lines,
zones with categories and labels, in reading order), and the true
record.  Character metrics are simple multiples of the font size, so
spacing estimation, line building, zone merging, word splitting, and
header detection all have clean targets.

Labeled affiliation and citation strings for sequence-model training
come from the same template banks as the rendered documents.

Filler prose is lowercase except the first word of each paragraph;
this keeps mid-paragraph lines starting lowercase, and the column
breaker nudges any break that would put an uppercase continuation
line at the top of a column, where it would look like a heading.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field, replace

from .dictionaries import load_dictionaries
from .errors import ConfigError
from .geom import BoundingBox, Character, Document, Line, Page, Word, Zone
from .ingest import CharDump, CharDumpPage
from .reading_order import resolve_reading_order

# --- styles ------------------------------------------------------------------

DEFAULT_FONTS = ("serif-regular-10", "serif-bold-12", "serif-bold-11",
                 "serif-title-17", "serif-small-8")

BODY_FONT, H1_FONT, H2_FONT, TITLE_FONT, SMALL_FONT = range(5)

SUPERSCRIPT_RAISE = 1.8  # marker tops sit this far above the line top

_ENUM_OPEN_RE = re.compile(r"(\d+(\.\d+)*\.?|[IVXL]+\.)\s+\S")


@dataclass(frozen=True)
class _Style:
    font: int
    size: float

    @property
    def advance(self) -> float:
        return 0.6 * self.size

    @property
    def glyph(self) -> float:
        return 0.48 * self.size

    @property
    def height(self) -> float:
        return 0.72 * self.size

    @property
    def space(self) -> float:
        # 0.4 em, capped so display-size words stay within the
        # line-join reach set by the page's dominant character spacing.
        return min(0.4 * self.size, 4.2)


def _style_for(fonts: tuple[str, ...], font_id: int) -> _Style:
    name = fonts[font_id]
    try:
        size = float(name.rsplit("-", 1)[1])
    except (IndexError, ValueError):
        size = 10.0
    return _Style(font=font_id, size=size)


# Vertical gaps between line boxes, in points.  Lines whose gap is at
# most 1.8x the taller line share a zone, so paragraph flow stays in
# one zone, headers join the paragraph below them, and distinct blocks
# stay apart.
LINE_GAP = 5.8          # inside a paragraph (10 pt text, 13 pt pitch)
PARA_GAP = 9.8          # between paragraphs of one section block
POST_HEADER_GAP = 10.0  # header joins the paragraph below it
ZONE_GAP = 18.0         # before headers and between separate blocks
REF_GAP = 7.8           # between references inside one zone

FRONT_GAP_FACTOR = 1.9  # front-matter zone gaps: this times the taller line


@dataclass
class SynthSpec:
    """Everything that determines one generated document."""

    seed: int = 0
    columns: int = 2
    page_width: float = 595.0
    page_height: float = 842.0
    margin: float = 50.0
    gutter: float = 25.0
    fonts: tuple[str, ...] = DEFAULT_FONTS
    sections: int = 3
    max_subsections: int = 2
    paragraphs_per_section: int = 2
    references: int = 8
    authors: int = 3
    affiliations: int = 2
    author_layout: str = "grouped"        # "grouped" | "per_zone"
    reference_style: str = "bracket"      # "bracket" | "hanging"
    with_tables: bool = True
    with_page_numbers: bool = True
    with_running_header: bool = True
    with_type_line: bool = False
    with_dates_line: bool = False         # received/accepted line up front
    with_copyright_line: bool = False     # first-page footer notice
    with_page_strips: bool = False        # journal strip atop later pages
    with_issn: bool = False               # ISSN tail on the first-page strip
    with_equations: bool = False          # displayed equation blocks
    with_bullets: bool = False            # bulleted lists inside sections
    with_captions: bool = False           # free-standing figure captions
    with_ack_section: bool = False        # closing acknowledgment section
    centered_front: bool = False          # center title/author/affiliation
    indent_paragraphs: bool = False       # indent paragraph first lines
    all_caps_title: bool = False

    def to_dict(self) -> dict:
        return {k: (list(v) if isinstance(v, tuple) else v)
                for k, v in self.__dict__.items()}

    @classmethod
    def from_dict(cls, d: dict) -> "SynthSpec":
        spec = cls()
        for k, v in d.items():
            if not hasattr(spec, k):
                raise ConfigError(f"unknown generator option {k!r}")
            if isinstance(getattr(spec, k), tuple):
                v = tuple(v)
            setattr(spec, k, v)
        return spec

    def validate(self) -> None:
        if self.columns < 1:
            raise ConfigError("need at least one column")
        if self.authors < 1 or self.affiliations < 1:
            raise ConfigError("need at least one author and affiliation")
        if self.author_layout not in ("grouped", "per_zone"):
            raise ConfigError(f"unknown author layout {self.author_layout!r}")
        if self.author_layout == "per_zone" and self.authors < 2:
            raise ConfigError("per_zone layout needs at least two authors")
        if self.reference_style not in ("bracket", "hanging"):
            raise ConfigError(
                f"unknown reference style {self.reference_style!r}")
        if len(self.fonts) < 5:
            raise ConfigError("the font inventory needs five entries")


# --- word banks --------------------------------------------------------------

_PROSE = (
    "the a of in and to for with from under between during results values "
    "samples measurements observed obtained indicate suggest increase "
    "decrease significant relative average standard deviation method "
    "procedure analysis experiment control group temperature pressure "
    "solution reaction compound fraction signal response effect model "
    "estimate parameter interval test series case ratio curve slope "
    "baseline protocol stable linear present higher lower initial final "
    "density gradient sample residual uniform repeated"
).split()

_TOPIC = (
    "rapid stability thermal analysis synthesis evaluation assessment "
    "methods properties effects patterns models signals responses dynamics "
    "structures networks samples variation growth decay transport binding "
    "kinetics imaging detection screening mapping clustering estimation"
).split()

_GIVEN = ("Alice", "Bruno", "Carol", "Daniel", "Elena", "Farid", "Grace",
          "Hiro", "Irene", "Jonas", "Karin", "Liam", "Mira", "Noor",
          "Omar", "Priya", "Rosa", "Stefan", "Tara", "Viktor")

# Pairwise substring-free (lowercased), so email-to-author linking by
# surname containment is unambiguous.
_SURNAMES = ("Karlsson", "Tanaka", "Ahmed", "Ivanova", "Okafor", "Almeida",
             "Novak", "Haddad", "Bergstrom", "Castillo", "Duarte", "Eriksen",
             "Fontaine", "Grigore", "Hansen", "Iqbal", "Kowalski",
             "Lindgren", "Moreau", "Petrova")

_JOURNAL_HEADS = ("Journal of", "Acta", "Annals of", "Archives of",
                  "Bulletin of", "Transactions on")

_JOURNAL_TAILS = ("Applied Documents", "Synthetic Research",
                  "Document Analysis", "Layout Studies", "Applied Methods",
                  "Structural Records")

_TYPE_LINES = ("Research Article", "Original Article", "Short Communication",
               "Review Article")

_ACRONYMS = ("ANOVA", "DNA", "NMR", "PCR", "RMSE", "SNR")

_COMPOUNDS = ("well-defined", "cross-linked", "time-resolved", "two-phase",
              "steady-state", "long-term")

_RATIOS = ("signal/noise", "mass/charge", "surface/volume")

_MONTH_NAMES = ("January", "February", "March", "April", "May", "June",
                "July", "August", "September", "October", "November",
                "December")

# Short clauses that drop domain vocabulary into filler prose: months,
# plain counting words that double as volume/issue/page cues, citation
# pointers, place names, and so on.  All lowercase so mid-paragraph
# lines keep starting lowercase.
_FLAVOR_CLAUSES = (
    "with no further drift",
    "the volume of the solution was held fixed",
    "a known issue with the earlier batch",
    "as cited in prior reports",
    "consistent with a case study of the same material",
    "in summary the effect persisted",
    "after approval by the university board",
)


def _cap(text: str) -> str:
    return text[:1].upper() + text[1:]


def _sentence(rng: random.Random, lo: int = 6, hi: int = 12,
              cite: bool = True) -> str:
    """One lowercase filler sentence with occasional texture.

    Inserted tokens never take position 0, so a capitalized copy still
    starts with a letter.  ``cite`` gates bracketed reference markers
    (off for abstracts).
    """
    words = [rng.choice(_PROSE) for _ in range(rng.randint(lo, hi))]

    def insert(*tokens: str) -> None:
        at = rng.randint(1, len(words))
        words[at:at] = list(tokens)

    if rng.random() < 0.35:
        k = rng.randrange(len(words) - 1)
        words[k] += ","
    if rng.random() < 0.08:
        k = rng.randrange(len(words) - 1)
        words[k] += ";"
    if rng.random() < 0.18:
        insert("of", str(rng.randint(2, 96)), "samples")
    if rng.random() < 0.12:
        insert(f"({rng.randint(2, 40)}", "runs)")
    if rng.random() < 0.12:
        insert("by", f"{rng.randint(2, 60)}%")
    if rng.random() < 0.05:
        insert(str(rng.randint(5, 40)), "±", str(rng.randint(1, 4)))
    if rng.random() < 0.12:
        insert(rng.choice(_COMPOUNDS))
    if rng.random() < 0.08:
        insert(rng.choice(_RATIOS), "ratio")
    if rng.random() < 0.10:
        insert("the", rng.choice(_ACRONYMS), "estimate")
    if rng.random() < 0.06:
        insert("within", f"{rng.choice((12, 24, 48, 72))}h")
    if rng.random() < 0.06:
        insert("since", str(rng.randint(1996, 2021)))
    if rng.random() < 0.05:
        insert("in", rng.choice(_MONTH_NAMES).lower())
    if rng.random() < 0.06:
        insert("in", _cap(rng.choice(_country_bank())[0].split()[0]))
    if rng.random() < 0.05:
        insert("at", "the", _cap(rng.choice(_city_bank())), "site")
    if rng.random() < 0.08:
        k = rng.randrange(1, len(words))
        words[k] = f'"{words[k].rstrip(",;")}"'
    if rng.random() < 0.10:
        insert(rng.choice(_FLAVOR_CLAUSES))
    if cite and rng.random() < 0.22:
        words.append(f"[{rng.randint(1, 9)}]")
    return " ".join(words) + "."


def _paragraph(rng: random.Random, sentences: int | None = None,
               cite: bool = True) -> str:
    n = sentences if sentences is not None else rng.randint(2, 4)
    return _cap(" ".join(_sentence(rng, cite=cite) for _ in range(n)))


def _topic_phrase(rng: random.Random, lo: int, hi: int) -> str:
    return " ".join(rng.sample(_TOPIC, rng.randint(lo, hi)))


def _journal_name(rng: random.Random) -> str:
    return f"{rng.choice(_JOURNAL_HEADS)} {rng.choice(_JOURNAL_TAILS)}"


# --- labeled segments --------------------------------------------------------

def _segments_to_tokens(segments: list[tuple[str, str]],
                        default: str) -> tuple[str, list[str]]:
    """Join (fragment, label) pieces and label the resulting tokens.

    Fragments never split a letter or digit run, so every token falls
    inside exactly one fragment.
    """
    from .token_parsers import tokenize

    text = "".join(frag for frag, _ in segments)
    bounds: list[tuple[int, str]] = []
    pos = 0
    for frag, label in segments:
        bounds.append((pos + len(frag), label or default))
        pos += len(frag)
    labels = []
    for token in tokenize(text):
        for end, label in bounds:
            if token.start < end:
                labels.append(label)
                break
    return text, labels


@dataclass
class SynthAffiliation:
    text: str
    labels: list[str]
    institution: str | None
    address: str | None
    country: str | None
    country_iso: str | None


@dataclass
class SynthCitation:
    text: str
    labels: list[str]
    fields: dict = field(default_factory=dict)


def _city_bank() -> list[str]:
    return sorted(load_dictionaries().cities)


def _country_bank() -> list[tuple[str, str]]:
    return sorted(load_dictionaries().countries.items())


def make_affiliation(rng: random.Random) -> SynthAffiliation:
    city = _cap(rng.choice(_city_bank()))
    country_name, iso = rng.choice(_country_bank())
    country = country_name.title()
    topic = _cap(_topic_phrase(rng, 1, 2)).title()

    form = rng.randrange(5)
    if form == 0:
        institution = f"Department of {topic}, University of {city}"
    elif form == 1:
        institution = f"Faculty of {topic}, {city} Polytechnic"
    elif form == 2:
        institution = f"Centre for {topic} Research, University of {city}"
    elif form == 3:
        institution = f"{topic} Institute"
    else:
        institution = f"National Laboratory of {topic}"

    address: str | None
    aform = rng.randrange(4)
    if aform == 0:
        address = f"{city}-{rng.randint(1000, 9999)}"
    elif aform == 1:
        address = f"{rng.randint(1, 220)} {_cap(rng.choice(_TOPIC))} Street"
    elif aform == 2:
        address = f"P.O. Box {rng.randint(100, 999)}, {city}"
    else:
        address = None

    segments: list[tuple[str, str]] = [(institution, "institution")]
    if address is not None:
        segments += [(", ", "other"), (address, "address")]
    segments += [(", ", "other"), (country, "country")]
    if rng.random() < 0.3:
        segments.append((".", "other"))
    text, labels = _segments_to_tokens(segments, "other")
    return SynthAffiliation(text=text, labels=labels, institution=institution,
                            address=address, country=country,
                            country_iso=iso.upper())


def _author_name(rng: random.Random) -> tuple[str, str]:
    """(given, surname); given is an initial or a full first name."""
    given = rng.choice(_GIVEN)
    if rng.random() < 0.5:
        given = given[0] + "."
    if rng.random() < 0.4:
        given += f" {rng.choice(_GIVEN)[0]}."
    return given, rng.choice(_SURNAMES)


def make_citation(rng: random.Random, compact: bool = False,
                  marker: str | None = None) -> SynthCitation:
    """One labeled reference string plus its true fields.

    ``marker`` overrides the leading enumeration text (including any
    trailing space); None draws one at random.
    """
    n_authors = rng.randint(1, 2 if compact else 3)
    authors = [_author_name(rng) for _ in range(n_authors)]
    title = _cap(_topic_phrase(rng, 2, 3 if compact else 6))
    year = str(rng.randint(1990, 2023))
    p1 = rng.randint(1, 400)
    pages = (str(p1), str(p1 + rng.randint(4, 15)))
    kind = rng.choice(("journal", "journal", "journal", "conference",
                       "report"))
    style = rng.choice(("acm", "springer")) if kind == "journal" else "acm"

    segments: list[tuple[str, str]] = []
    fields: dict = {"authors": [list(a) for a in authors], "title": title,
                    "source": None, "volume": None, "issue": None,
                    "pages": list(pages), "year": year, "doi": None}

    if marker is None:
        marker = f"[{rng.randint(1, 40)}] " if rng.random() < 0.5 else ""
    if marker:
        segments.append((marker, "text"))

    def add_authors_given_first() -> None:
        for i, (given, surname) in enumerate(authors):
            if i:
                segments.append((" and " if i == len(authors) - 1 else ", ",
                                 "text"))
            segments.append((given, "first_name"))
            segments.append((" ", "text"))
            segments.append((surname, "surname"))

    def add_authors_surname_first() -> None:
        for i, (given, surname) in enumerate(authors):
            if i:
                segments.append((", ", "text"))
            segments.append((surname, "surname"))
            segments.append((", ", "text"))
            segments.append((given, "first_name"))

    if kind == "journal" and style == "springer":
        volume = str(rng.randint(1, 80))
        issue = str(rng.randint(1, 12)) if rng.random() < 0.7 else None
        source = _journal_name(rng)
        fields.update(source=source, volume=volume, issue=issue,
                      type="journal paper")
        add_authors_surname_first()
        segments += [(": ", "text"), (title, "title"), (". ", "text"),
                     (source, "source"), (" ", "text"), (volume, "volume")]
        if issue is not None:
            segments += [("(", "text"), (issue, "issue"), (")", "text")]
        segments += [(", ", "text"), (pages[0], "page_first"), ("-", "text"),
                     (pages[1], "page_last"), (" (", "text"), (year, "year"),
                     (").", "text")]
    elif kind == "journal":
        volume = str(rng.randint(1, 80))
        issue = str(rng.randint(1, 12)) if rng.random() < 0.5 else None
        source = _journal_name(rng)
        fields.update(source=source, volume=volume, issue=issue,
                      type="journal paper")
        add_authors_given_first()
        segments += [(", ", "text"), (title, "title"), (", ", "text"),
                     (source, "source"), (", vol. ", "text"),
                     (volume, "volume")]
        if issue is not None:
            segments += [(", no. ", "text"), (issue, "issue")]
        segments += [(", pp. ", "text"), (pages[0], "page_first"),
                     ("-", "text"), (pages[1], "page_last"), (", ", "text"),
                     (year, "year"), (".", "text")]
    elif kind == "conference":
        source = (f"Proceedings of the {rng.randint(2, 30)}th International "
                  f"Conference on {_cap(_topic_phrase(rng, 1, 2)).title()}")
        fields.update(source=source, type="conference proceedings")
        add_authors_given_first()
        segments += [(", ", "text"), (title, "title"), (", in ", "text"),
                     (source, "source"), (", pp. ", "text"),
                     (pages[0], "page_first"), ("-", "text"),
                     (pages[1], "page_last"), (", ", "text"), (year, "year"),
                     (".", "text")]
    else:
        source = f"Technical Report TR-{rng.randint(10, 999)}"
        institution = f"University of {_cap(rng.choice(_city_bank()))}"
        fields.update(source=source, pages=None, type="technical report")
        add_authors_given_first()
        segments += [(", ", "text"), (title, "title"), (", ", "text"),
                     (source, "source"), (", ", "text"),
                     (institution, "text"), (", ", "text"), (year, "year"),
                     (".", "text")]

    if kind == "journal" and rng.random() < 0.2:
        doi = f"10.{rng.randint(1000, 9999)}/synth.{rng.randint(100, 999)}"
        # Trailing period keeps the end-of-reference cue; the doi
        # normalizer strips it when the field is read back.
        segments += [(" doi:", "text"), (doi, "text"), (".", "text")]
        fields["doi"] = doi

    text, labels = _segments_to_tokens(segments, "text")
    return SynthCitation(text=text, labels=labels, fields=fields)


def generate_affiliation_corpus(n: int, seed: int = 0) -> list[SynthAffiliation]:
    rng = random.Random(seed)
    return [make_affiliation(rng) for _ in range(n)]


def generate_citation_corpus(n: int, seed: int = 0,
                             compact: bool = False) -> list[SynthCitation]:
    rng = random.Random(seed)
    return [make_citation(rng, compact=compact) for _ in range(n)]


# --- geometry builders -------------------------------------------------------

@dataclass
class _Piece:
    text: str
    style: _Style
    raise_by: float = 0.0


def _build_line(word_pieces: list[list[_Piece]], x: float, y: float,
                base: _Style) -> Line:
    """Place words left to right at ``x`` with unraised tops at ``y``."""
    words = []
    for pieces in word_pieces:
        chars = []
        for piece in pieces:
            for ch in piece.text:
                top = y - piece.raise_by
                chars.append(Character(
                    text=ch,
                    box=BoundingBox(x, top, x + piece.style.glyph,
                                    top + piece.style.height),
                    font=piece.style.font))
                x += piece.style.advance
        words.append(Word(chars=chars))
        x += base.space  # inter-word space
    return Line(words=words)


def _plain_words(text: str, style: _Style) -> list[list[_Piece]]:
    return [[_Piece(w, style)] for w in text.split()]


def _word_width(pieces: list[_Piece]) -> float:
    width = 0.0
    last_pad = 0.0
    for piece in pieces:
        width += len(piece.text) * piece.style.advance
        last_pad = piece.style.advance - piece.style.glyph
    return width - last_pad


def _wrap(word_pieces: list[list[_Piece]], base: _Style,
          max_width: float) -> list[list[list[_Piece]]]:
    """Greedy fill: lines of words whose drawn width stays in bounds."""
    lines: list[list[list[_Piece]]] = [[]]
    x = 0.0
    for pieces in word_pieces:
        w = _word_width(pieces)
        if lines[-1] and x + w > max_width:
            lines.append([])
            x = 0.0
        lines[-1].append(pieces)
        x += w + (base.advance - base.glyph) + base.space
    return [ln for ln in lines if ln]


def _line_width(word_pieces: list[list[_Piece]], base: _Style) -> float:
    """Drawn width of a line: first glyph left edge to last glyph right."""
    x = 0.0
    for pieces in word_pieces:
        for piece in pieces:
            x += len(piece.text) * piece.style.advance
        x += base.space
    last = word_pieces[-1][-1]
    return x - base.space - (last.style.advance - last.style.glyph)


def _line_raise(word_pieces: list[list[_Piece]]) -> float:
    return max((p.raise_by for wp in word_pieces for p in wp), default=0.0)


def _line_height(word_pieces: list[list[_Piece]], base: _Style) -> float:
    """Box height of the placed line, raises included."""
    tops = [-p.raise_by for wp in word_pieces for p in wp]
    bottoms = [p.style.height - p.raise_by
               for wp in word_pieces for p in wp]
    if not tops:
        return base.height
    return max(bottoms) - min(tops)


# --- flow layout -------------------------------------------------------------

@dataclass
class _FlowLine:
    word_pieces: list[list[_Piece]]
    base: _Style
    gap_before: float          # below the previous line in the same column
    zone_break: bool           # start a new zone even without a column break
    kind: str                  # "h1" | "h2" | "para" | "other" | "ref"
    category: str = "body"
    label: str | None = "body_content"
    indent: float = 0.0

    @property
    def starts_upper(self) -> bool:
        for pieces in self.word_pieces:
            for piece in pieces:
                if piece.text:
                    return piece.text[0].isupper()
        return False

    @property
    def opens_enumerated(self) -> bool:
        # Digit or roman-numeral openings read as section or reference
        # enumerations downstream, so they are as awkward at a zone top
        # as an uppercase word.
        words = []
        for pieces in self.word_pieces:
            text = "".join(p.text for p in pieces)
            if text:
                words.append(text)
            if len(words) == 2:
                break
        return bool(_ENUM_OPEN_RE.match(" ".join(words)))


class _PageSink:
    """Accumulates placed zones page by page."""

    def __init__(self, spec: SynthSpec):
        self.spec = spec
        self.pages: list[list[Zone]] = []

    def ensure_page(self, index: int) -> list[Zone]:
        while len(self.pages) <= index:
            self.pages.append([])
        return self.pages[index]

    def add_zone(self, page: int, lines: list[Line], category: str,
                 label: str | None) -> None:
        self.ensure_page(page).append(
            Zone(lines=lines, category=category, label=label))


def _nudge_break(flow: list[_FlowLine], column: list[int], i: int) -> int:
    """Move a column break earlier until its first line reads naturally.

    Breaking a paragraph or reference before an uppercase word would
    open the next column with a line that looks like a heading, so the
    break point shifts up through the block until the pending line
    starts lowercase.  A break between a heading and its paragraph
    takes the heading along instead of orphaning it.
    """
    while len(column) > 1:
        line = flow[i]
        prev = flow[i - 1]
        is_awkward_flow = (
            line.kind in ("para", "ref") and not line.zone_break
            and (line.starts_upper or line.opens_enumerated)
            and ((prev.kind == line.kind and not prev.zone_break)
                 or (line.kind == "para" and prev.kind in ("h1", "h2"))))
        is_split_heading = line.kind in ("h1", "h2") and not line.zone_break
        if not (is_awkward_flow or is_split_heading):
            break
        column.pop()
        i -= 1
    return i


def _flow_into_columns(flow: list[_FlowLine], sink: _PageSink,
                       start_page: int, start_y: float) -> None:
    """Lay flow lines into columns, breaking pages as needed."""
    spec = sink.spec
    col_width = (spec.page_width - 2 * spec.margin
                 - (spec.columns - 1) * spec.gutter) / spec.columns
    bottom = spec.page_height - spec.margin

    def col_x(col: int) -> float:
        return spec.margin + col * (col_width + spec.gutter)

    def top_for(page: int) -> float:
        return start_y if page == start_page else spec.margin

    # Assign lines to columns first, so break points can be adjusted.
    columns: list[list[int]] = [[]]
    positions: list[tuple[int, int]] = []
    page, col = start_page, 0
    y = top_for(page)
    i = 0
    while i < len(flow):
        line = flow[i]
        height = _line_height(line.word_pieces, line.base)
        if columns[-1] and y + line.gap_before + height > bottom:
            i = _nudge_break(flow, columns[-1], i)
            line = flow[i]
            height = _line_height(line.word_pieces, line.base)
            positions.append((page, col))
            col += 1
            if col >= spec.columns:
                col = 0
                page += 1
            columns.append([])
            y = top_for(page)
        elif columns[-1]:
            y += line.gap_before
        y += height
        columns[-1].append(i)
        i += 1
    positions.append((page, col))

    # Materialize each column chunk: zones split on breaks and on
    # category or label changes.
    for chunk, (page, col) in zip(columns, positions):
        if not chunk:
            continue
        x0 = col_x(col)
        y = top_for(page)
        zone_lines: list[Line] = []
        zone_meta: tuple[str, str | None] = ("body", "body_content")
        for n, idx in enumerate(chunk):
            line = flow[idx]
            if n:
                y += line.gap_before
            meta = (line.category, line.label)
            if zone_lines and (line.zone_break or meta != zone_meta):
                sink.add_zone(page, zone_lines, *zone_meta)
                zone_lines = []
            zone_lines.append(_build_line(line.word_pieces,
                                          x0 + line.indent, y, line.base))
            zone_meta = meta
            y += _line_height(line.word_pieces, line.base)
        if zone_lines:
            sink.add_zone(page, zone_lines, *zone_meta)


# --- body and reference flows ------------------------------------------------

def _flow_text_block(text: str, base: _Style, first_gap: float,
                     zone_break: bool, kind: str, max_width: float,
                     category: str = "body",
                     label: str | None = "body_content",
                     indent_rest: float = 0.0,
                     first_indent: float = 0.0) -> list[_FlowLine]:
    words = _plain_words(text, base)
    if first_indent and words:
        first: list[list[_Piece]] = []
        x = 0.0
        i = 0
        while i < len(words):
            w = _word_width(words[i])
            if first and x + w > max_width - first_indent:
                break
            first.append(words[i])
            x += w + (base.advance - base.glyph) + base.space
            i += 1
        lines = [first] + _wrap(words[i:], base, max_width)
    else:
        lines = _wrap(words, base, max_width)
    out = []
    for i, wp in enumerate(lines):
        out.append(_FlowLine(
            word_pieces=wp, base=base,
            gap_before=first_gap if i == 0 else LINE_GAP,
            zone_break=zone_break and i == 0, kind=kind,
            category=category, label=label,
            indent=first_indent if i == 0 else indent_rest))
    return out


def _device_blocks(spec: SynthSpec, rng: random.Random,
                   counters: dict[str, int]) -> list[tuple[str, object]]:
    """One displayed block plus the lowercase prose that resumes after it.

    The resumption keeps every zone that opens after a display block
    starting lowercase, which is what separates headers from ordinary
    zone-opening lines downstream.
    """
    choices = []
    if spec.with_equations:
        choices.append("equation")
    if spec.with_bullets:
        choices.append("bullets")
    if spec.with_captions:
        choices.append("caption")
    if not choices or rng.random() > 0.55:
        return []
    kind = rng.choice(choices)
    if kind == "equation":
        counters["equation"] += 1
        n = counters["equation"]
        a, b = rng.randint(1, 9) / 10, rng.randint(10, 49) / 10
        text = f"r(t) = {a} sin(2 π f t) + {b} ({n})"
        resume = (f"equation ({n}) relates the response to the control "
                  f"signal. {_sentence(rng)}")
        return [("equation", text), ("para_cont", resume)]
    if kind == "caption":
        counters["figure"] += 1
        n = counters["figure"]
        text = f"Figure {n}: {' '.join(rng.sample(_PROSE, 5))}"
        resume = (f"figure {n} shows the measured curves for both groups. "
                  f"{_sentence(rng)}")
        return [("caption", text), ("para_cont", resume)]
    items = [f"{' '.join(rng.sample(_PROSE, rng.randint(3, 5)))}."
             for _ in range(rng.randint(2, 3))]
    resume = f"these steps were repeated for every run. {_sentence(rng)}"
    return [("bullets", items), ("para_cont", resume)]


def _section_plan(spec: SynthSpec, rng: random.Random) -> list[dict]:
    """Logical section tree; each section is a list of typed blocks."""
    counters = {"figure": 0, "table": 0, "equation": 0}

    def blocks_for() -> list[tuple[str, object]]:
        blocks: list[tuple[str, object]] = [
            ("para", _paragraph(rng))
            for _ in range(spec.paragraphs_per_section)]
        device = _device_blocks(spec, rng, counters)
        if device:
            at = rng.randint(1, len(blocks))
            blocks[at:at] = device
        if spec.with_tables and rng.random() < 0.25:
            counters["table"] += 1
            blocks.append(("table", counters["table"]))
        return blocks

    plan = []
    for si in range(1, spec.sections + 1):
        section = {
            "level": 1,
            "title": f"{si}. {_cap(_topic_phrase(rng, 1, 2)).title()}",
            "blocks": blocks_for(),
            "children": [],
        }
        for sj in range(1, rng.randint(0, spec.max_subsections) + 1):
            section["children"].append({
                "level": 2,
                "title":
                    f"{si}.{sj}. {_cap(_topic_phrase(rng, 1, 2)).title()}",
                "blocks": blocks_for(),
                "children": [],
            })
        plan.append(section)
    if spec.with_ack_section:
        country = _cap(rng.choice(_country_bank())[0].split()[0])
        ack = (f"This work was supported by grant no. "
               f"{rng.randint(1000, 99999)} from the National Research "
               f"Council of {country}. {_sentence(rng, cite=False)}")
        plan.append({"level": 1, "title": "Acknowledgments",
                     "blocks": [("para", ack)], "children": []})
    return plan


def _section_truth(plan: list[dict]) -> list[dict]:
    """Section tree as the body extractor reports it.

    Displayed blocks (equations, captions, tables) sit outside the
    content stream; bulleted lines stay in it, one marker per item.
    """
    def content(blocks: list[tuple[str, object]]) -> str:
        parts = []
        for kind, payload in blocks:
            if kind in ("para", "para_cont"):
                parts.append(payload)
            elif kind == "bullets":
                parts.extend(f"• {item}" for item in payload)
        return " ".join(parts)

    def node(sec: dict) -> dict:
        return {"level": sec["level"], "title": sec["title"],
                "content": content(sec["blocks"]),
                "children": [node(ch) for ch in sec["children"]]}
    return [node(sec) for sec in plan]


def _table_block(rng: random.Random, number: int,
                 base: _Style) -> list[_FlowLine]:
    rows = [f"Table {number}: {' '.join(rng.sample(_PROSE, 3))}"]
    for _ in range(2):
        rows.append("  ".join(f"{rng.uniform(0, 99):.1f}" for _ in range(4)))
    out = []
    for i, row in enumerate(rows):
        out.append(_FlowLine(
            word_pieces=_plain_words(row, base), base=base,
            gap_before=ZONE_GAP if i == 0 else LINE_GAP,
            zone_break=i == 0, kind="other",
            category="body", label="body_other"))
    return out


def _body_flow(plan: list[dict], spec: SynthSpec, rng: random.Random,
               styles: dict[str, _Style], col_width: float) -> list[_FlowLine]:
    flow: list[_FlowLine] = []
    body, small = styles["body"], styles["small"]
    indent = 10.0 if spec.indent_paragraphs else 0.0

    def add_section(sec: dict) -> None:
        style = styles["h1"] if sec["level"] == 1 else styles["h2"]
        flow.extend(_flow_text_block(
            sec["title"], style, ZONE_GAP, True,
            "h1" if sec["level"] == 1 else "h2", col_width))
        prev_kind = "header"
        for kind, payload in sec["blocks"]:
            if kind == "para":
                flow.extend(_flow_text_block(
                    payload, body,
                    POST_HEADER_GAP if prev_kind == "header" else PARA_GAP,
                    False, "para", col_width,
                    first_indent=indent if prev_kind == "para" else 0.0))
            elif kind == "para_cont":
                flow.extend(_flow_text_block(
                    payload, body, ZONE_GAP, True, "para", col_width))
            elif kind == "equation":
                wp = _plain_words(payload, body)
                pad = max(0.0, (col_width - _line_width(wp, body)) / 2)
                flow.append(_FlowLine(
                    word_pieces=wp, base=body, gap_before=ZONE_GAP,
                    zone_break=True, kind="other", category="body",
                    label="body_other", indent=pad))
            elif kind == "caption":
                flow.extend(_flow_text_block(
                    payload, small, ZONE_GAP, True, "other", col_width,
                    label="body_other"))
            elif kind == "bullets":
                for bi, item in enumerate(payload):
                    flow.extend(_flow_text_block(
                        f"• {item}", body,
                        ZONE_GAP if bi == 0 else LINE_GAP,
                        bi == 0, "para", col_width))
            elif kind == "table":
                flow.extend(_table_block(rng, payload, small))
            prev_kind = kind if kind != "para_cont" else "para"
        for child in sec["children"]:
            add_section(child)

    for sec in plan:
        add_section(sec)
    return flow


def _reference_flow(citations: list[SynthCitation], spec: SynthSpec,
                    styles: dict[str, _Style],
                    col_width: float) -> list[_FlowLine]:
    flow: list[_FlowLine] = []
    hang = 14.4 if spec.reference_style == "hanging" else 0.0
    for ri, cit in enumerate(citations):
        flow.extend(_flow_text_block(
            cit.text, styles["body"],
            ZONE_GAP if ri == 0 else REF_GAP,
            ri == 0, "ref", col_width - hang,
            category="references", label=None, indent_rest=hang))
    return flow


# --- front matter --------------------------------------------------------------

def _author_line_pieces(authors: list[tuple[str, str]],
                        markers: list[str] | None, base: _Style,
                        marker_style: _Style) -> list[list[_Piece]]:
    """Author list words; markers ride the surnames as superscripts."""
    word_pieces: list[list[_Piece]] = []
    for i, (given, surname) in enumerate(authors):
        for part in given.split():
            word_pieces.append([_Piece(part, base)])
        tail: list[_Piece] = [_Piece(surname, base)]
        if markers is not None:
            tail.append(_Piece(markers[i], marker_style,
                               raise_by=SUPERSCRIPT_RAISE))
        if i < len(authors) - 2:
            tail.append(_Piece(",", base))
        word_pieces.append(tail)
        if i == len(authors) - 2:
            word_pieces.append([_Piece("and", base)])
    return word_pieces


class _FrontLayout:
    """Stacks full-width zones on page 0.

    Tracks the running bottom edge and sizes every inter-zone gap from
    the taller of the two adjacent lines, raises included, so each
    boundary clears the zone-joining threshold.
    """

    def __init__(self, sink: _PageSink, x: float, y: float, width: float):
        self.sink = sink
        self.x = x
        self.width = width
        self.bottom = y
        self.prev_height = 0.0
        self.first = True

    def add(self, lines: list[list[list[_Piece]]], base: _Style,
            pitch: float, category: str, label: str | None,
            center: bool = False) -> None:
        first_h = _line_height(lines[0], base)
        if self.first:
            y = self.bottom + _line_raise(lines[0])
            self.first = False
        else:
            gap = FRONT_GAP_FACTOR * max(self.prev_height, first_h)
            y = self.bottom + gap + _line_raise(lines[0])
        built = []
        for i, wp in enumerate(lines):
            x = self.x
            if center:
                x += max(0.0, (self.width - _line_width(wp, base)) / 2)
            built.append(_build_line(wp, x, y, base))
            if i < len(lines) - 1:
                y += pitch
        self.bottom = y + max(p.style.height - p.raise_by
                              for wp in lines[-1] for p in wp)
        self.prev_height = _line_height(lines[-1], base)
        self.sink.pages[0].append(Zone(lines=built, category=category,
                                       label=label))


def _zone_key(zone: Zone) -> tuple[float, float, float, float]:
    box = zone.box
    return (round(box.x1, 4), round(box.y1, 4),
            round(box.x2, 4), round(box.y2, 4))


def generate_synthetic(spec: SynthSpec) -> tuple[CharDump, Document, dict]:
    """Render one document: chardump, ground truth, and true record.

    Layouts are re-rolled until the geometric reading order agrees with
    the logical flow of the content zones, so the record's field order
    and section contents describe the ground document exactly.
    """
    spec.validate()
    rng = random.Random(spec.seed)
    for _ in range(25):
        dump, doc, record, ordered = _generate_attempt(spec, rng)
        if ordered:
            return dump, doc, record
    raise ConfigError(
        "document layout did not settle into canonical reading order")


def _generate_attempt(
        spec: SynthSpec,
        rng: random.Random) -> tuple[CharDump, Document, dict, bool]:
    styles = {
        "body": _style_for(spec.fonts, BODY_FONT),
        "h1": _style_for(spec.fonts, H1_FONT),
        "h2": _style_for(spec.fonts, H2_FONT),
        "title": _style_for(spec.fonts, TITLE_FONT),
        "small": _style_for(spec.fonts, SMALL_FONT),
    }
    marker_style = _Style(font=SMALL_FONT, size=7.5)
    body, small, title_style = styles["body"], styles["small"], styles["title"]

    full_width = spec.page_width - 2 * spec.margin
    col_width = (full_width - (spec.columns - 1) * spec.gutter) / spec.columns

    sink = _PageSink(spec)
    sink.ensure_page(0)

    journal = _journal_name(rng)
    volume = str(rng.randint(1, 40))
    issue = str(rng.randint(1, 12))
    start_page = rng.randint(1, 180)
    year = str(rng.randint(2000, 2023))
    doi = f"10.{rng.randint(1000, 9999)}/synth.{rng.randint(1000, 9999)}"

    issn = (f"{rng.randint(1000, 9999)}-{rng.randint(0, 9999):04d}"
            if spec.with_issn else None)

    title_text = _cap(_topic_phrase(rng, 3, 6))
    if spec.all_caps_title:
        title_text = title_text.upper()
    authors = [_author_name(rng) for _ in range(spec.authors)]
    seen: set[str] = set()
    for i, (g, s) in enumerate(authors):
        while s in seen:
            s = rng.choice(_SURNAMES)
        seen.add(s)
        authors[i] = (g, s)

    grouped = spec.author_layout == "grouped"
    rendered = authors if grouped else authors[:2]
    author_names = [f"{g} {s}" for g, s in rendered]
    affiliations = [make_affiliation(rng) for _ in range(spec.affiliations)]
    owner = rng.randrange(len(rendered))
    email = f"{rendered[owner][1].lower()}@synthmail.org"

    front = _FrontLayout(sink, spec.margin, spec.margin, full_width)
    centered = spec.centered_front

    # Journal strip; the page range is patched in once the page count
    # is known (the stand-in does not change the vertical layout).
    # The ISSN tail sits behind the page range so the first hyphenated
    # digit pair in the strip is always the page range.
    def strip_line(page_range: str) -> str:
        tail = f" ISSN {issn}." if issn else ""
        return (f"{journal} {volume}({issue}): {page_range}, {year}.{tail}"
                f" doi:{doi}")

    front.add([_plain_words(strip_line("PAGES"), small)], small, 10.0,
              "metadata", "bib_info")

    title_lines = _wrap(_plain_words(title_text, title_style), title_style,
                        full_width)
    if spec.with_type_line:
        type_line = rng.choice(_TYPE_LINES)
        front.add([_plain_words(type_line, small)] + title_lines,
                  title_style, 21.0, "metadata", "title", center=centered)
    else:
        front.add(title_lines, title_style, 21.0, "metadata", "title",
                  center=centered)

    markers = [str(rng.randint(1, spec.affiliations))
               for _ in range(len(rendered))]
    for fi in range(min(spec.affiliations, len(rendered))):
        markers[fi] = str(fi + 1)

    if grouped:
        front.add([_author_line_pieces(rendered, markers, body,
                                       marker_style)],
                  body, 13.0, "metadata", "author", center=centered)

        aff_lines: list[list[list[_Piece]]] = []
        for fi, aff in enumerate(affiliations):
            words: list[list[_Piece]] = [[_Piece(str(fi + 1), marker_style,
                                                 raise_by=SUPERSCRIPT_RAISE)]]
            words += _plain_words(aff.text, body)
            aff_lines.extend(_wrap(words, body, full_width))
        front.add(aff_lines, body, 13.0, "metadata", "affiliation",
                  center=centered)

        front.add([_plain_words(f"Corresponding author. E-mail: {email}",
                                small)],
                  small, 10.0, "metadata", "correspondence")
    else:
        # Side-by-side self-contained author blocks.
        block_width = (full_width - spec.gutter) / 2
        y0 = (front.bottom
              + FRONT_GAP_FACTOR * max(front.prev_height, body.height))
        block_bottom = y0
        for ai, (g, s) in enumerate(rendered):
            bx = spec.margin + ai * (block_width + spec.gutter)
            aff = affiliations[ai % len(affiliations)]
            lines = [_plain_words(f"{g} {s}", body)]
            lines += _wrap(_plain_words(aff.text, body), body, block_width)
            if ai == owner:
                lines.append(_plain_words(email, body))
            by = y0
            built = []
            for i, wp in enumerate(lines):
                built.append(_build_line(wp, bx, by, body))
                by += 13.0 if i < len(lines) - 1 else body.height
            sink.pages[0].append(Zone(lines=built, category="metadata",
                                      label="affiliation"))
            block_bottom = max(block_bottom, by)
        front.bottom = block_bottom
        front.prev_height = body.height

    abstract_text = _paragraph(rng, sentences=rng.randint(3, 5), cite=False)
    front.add(_wrap(_plain_words(f"Abstract. {abstract_text}", body), body,
                    full_width),
              body, 13.0, "metadata", "abstract")

    keywords = [_topic_phrase(rng, 1, 2) for _ in range(rng.randint(3, 5))]
    kw_text = "Key words: " + "; ".join(keywords) + "."
    front.add(_wrap(_plain_words(kw_text, body), body, full_width),
              body, 13.0, "metadata", "keywords")

    if spec.with_dates_line:
        received_year = int(year) - (1 if rng.random() < 0.4 else 0)
        dates_text = (f"Received {rng.randint(1, 28)} "
                      f"{rng.choice(_MONTH_NAMES)} {received_year}; "
                      f"accepted {rng.randint(1, 28)} "
                      f"{rng.choice(_MONTH_NAMES)} {year}")
        front.add([_plain_words(dates_text, small)], small, 10.0,
                  "metadata", "dates", center=centered)

    plan = _section_plan(spec, rng)
    flow = _body_flow(plan, spec, rng, styles, col_width)
    citations = []
    for ri in range(spec.references):
        marker = (f"[{ri + 1}] " if spec.reference_style == "bracket"
                  else f"{ri + 1}. ")
        citations.append(make_citation(rng, compact=True, marker=marker))
    flow += _reference_flow(citations, spec, styles, col_width)

    if flow:
        start_y = (front.bottom + FRONT_GAP_FACTOR
                   * max(front.prev_height,
                         _line_height(flow[0].word_pieces, flow[0].base)))
        flow[0] = replace(flow[0], gap_before=0.0)
        _flow_into_columns(flow, sink, 0, start_y)

    n_pages = len(sink.pages)
    pages_last = str(start_page + n_pages - 1)

    real_strip = strip_line(f"{start_page}-{pages_last}")
    strip_zone = sink.pages[0][0]
    sink.pages[0][0] = Zone(
        lines=[_build_line(_plain_words(real_strip, small), spec.margin,
                           spec.margin, small)],
        category=strip_zone.category, label=strip_zone.label)

    # Flow order of the content zones, captured before the floating
    # furniture (running headers, page strips, numbers, notices) joins
    # the pages.  The record describes content in this order, so the
    # canonical zone order must visit these zones the same way.
    flow_keys = [[_zone_key(z) for z in zs] for zs in sink.pages]

    if spec.with_copyright_line:
        # Two short lines in the bottom margin; the width stays clear
        # of the centered page number so the zones never merge.
        notice = [_plain_words(f"© {year} {journal}.", small),
                  _plain_words("All rights reserved.", small)]
        cy = spec.page_height - 36.0
        built = [_build_line(notice[0], spec.margin, cy, small),
                 _build_line(notice[1], spec.margin, cy + 8.0, small)]
        sink.pages[0].append(Zone(lines=built, category="metadata",
                                  label="bib_info"))

    page_strip = f"{journal}, vol. {volume}, no. {issue}, {year}"
    for pi in range(n_pages):
        if spec.with_running_header and pi >= 1:
            header_line = _build_line(_plain_words(journal, small),
                                      spec.margin, 26.0, small)
            sink.pages[pi].insert(0, Zone(lines=[header_line],
                                          category="other", label=None))
        if spec.with_page_strips and pi >= 1:
            wp = _plain_words(page_strip, small)
            sx = spec.page_width - spec.margin - _line_width(wp, small)
            strip_ln = _build_line(wp, sx, 26.0, small)
            sink.pages[pi].append(Zone(lines=[strip_ln],
                                       category="metadata",
                                       label="bib_info"))
        if spec.with_page_numbers:
            number = str(start_page + pi)
            width = _word_width([_Piece(number, small)])
            num_line = _build_line(_plain_words(number, small),
                                   (spec.page_width - width) / 2,
                                   spec.page_height - 30.0, small)
            sink.pages[pi].append(Zone(lines=[num_line], category="other",
                                       label=None))

    pages = [Page(width=spec.page_width, height=spec.page_height, zones=zs)
             for zs in sink.pages]
    # Canonical zone order, so ground documents are fixed points of the
    # reading-order stage and sequence features line up at train time.
    doc = resolve_reading_order(Document(pages=pages, fonts=list(spec.fonts)))

    ordered = True
    for pi, page in enumerate(doc.pages):
        wanted = set(flow_keys[pi])
        got = [k for k in (_zone_key(z) for z in page.zones) if k in wanted]
        if got != flow_keys[pi]:
            ordered = False
            break

    # Character dump: the same characters, shuffled within each page.
    dump_pages = []
    for page in pages:
        chars = list(page.chars())
        rng.shuffle(chars)
        dump_pages.append(CharDumpPage(width=page.width, height=page.height,
                                       chars=chars))
    dump = CharDump(pages=dump_pages, fonts=list(spec.fonts))

    if grouped:
        relations = sorted({(ai, int(markers[ai]) - 1)
                            for ai in range(len(rendered))})
        record_affs = affiliations
    else:
        relations = [(ai, ai) for ai in range(len(rendered))]
        record_affs = [affiliations[ai % len(affiliations)]
                       for ai in range(len(rendered))]

    record = {
        "front": {
            "title": title_text,
            "authors": author_names,
            "affiliations": [{
                "raw": a.text, "institution": a.institution,
                "address": a.address, "country": a.country,
                "country_iso": a.country_iso,
            } for a in record_affs],
            "author_affiliation": [list(r) for r in relations],
            "emails": [email],
            "author_email": [[owner, 0]],
            "abstract": abstract_text,
            "keywords": keywords,
            "journal": journal,
            "volume": volume,
            "issue": issue,
            "pages": [str(start_page), pages_last],
            "year": year,
            "doi": doi,
        },
        "body": _section_truth(plan),
        "back": [{
            "raw": c.text, "authors": c.fields["authors"],
            "title": c.fields["title"], "source": c.fields["source"],
            "volume": c.fields["volume"], "issue": c.fields["issue"],
            "pages": c.fields["pages"], "year": c.fields["year"],
            "doi": c.fields["doi"], "type": c.fields.get("type"),
        } for c in citations],
        "warnings": [],
    }
    return dump, doc, record, ordered


def varied_spec(seed: int, base: SynthSpec | None = None) -> SynthSpec:
    """Document spec whose layout knobs are drawn from the seed."""
    rng = random.Random(seed * 7919 + 13)
    spec = replace(base) if base is not None else SynthSpec()
    spec.seed = seed
    spec.columns = 1 if rng.random() < 0.25 else 2
    if rng.random() < 0.3:
        spec.page_width, spec.page_height = 612.0, 792.0
    spec.sections = rng.randint(2, 4)
    spec.max_subsections = rng.randint(0, 2)
    spec.paragraphs_per_section = rng.randint(1, 3)
    spec.references = rng.randint(5, 10)
    spec.authors = rng.randint(2, 4)
    spec.affiliations = rng.randint(1, min(3, spec.authors))
    spec.author_layout = rng.choice(("grouped", "grouped", "per_zone"))
    spec.reference_style = rng.choice(("bracket", "hanging"))
    spec.with_tables = rng.random() < 0.3
    spec.with_page_numbers = rng.random() < 0.7
    spec.with_running_header = rng.random() < 0.5
    spec.with_type_line = rng.random() < 0.5
    spec.with_dates_line = rng.random() < 0.7
    spec.with_copyright_line = rng.random() < 0.55
    spec.with_page_strips = rng.random() < 0.45
    spec.with_issn = rng.random() < 0.4
    spec.with_equations = rng.random() < 0.4
    spec.with_bullets = rng.random() < 0.35
    spec.with_captions = rng.random() < 0.4
    spec.with_ack_section = rng.random() < 0.5
    spec.centered_front = rng.random() < 0.5
    spec.indent_paragraphs = rng.random() < 0.5
    spec.all_caps_title = rng.random() < 0.15
    return spec


def generate_corpus(count: int, seed: int = 0, base: SynthSpec | None = None
                    ) -> list[tuple[CharDump, Document, dict]]:
    """Render ``count`` documents with per-document layout variation."""
    return [generate_synthetic(varied_spec(seed + i, base))
            for i in range(count)]

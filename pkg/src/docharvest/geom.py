"""Geometric document model.

A document is a tree: pages hold zones, zones hold lines, lines hold
words, words hold characters.  Characters are the atomic unit; the box
of every higher element is the componentwise min/max union of its
children's boxes.  Coordinates are typographic points (1/72 inch) with
the origin at the top-left corner of the page, y growing downward.

The sibling order inside each container is meaningful: after reading
order resolution it is the natural reading order of the document.
Instances are treated as immutable after construction; annotation
passes build new trees instead of mutating existing ones.
"""

from __future__ import annotations

import json
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from functools import cached_property
from typing import IO, Iterable, Iterator

from .errors import DocharvestError, InvalidModel, ParseError

CATEGORIES = ("metadata", "body", "references", "other")

METADATA_LABELS = (
    "abstract",
    "affiliation",
    "author",
    "bib_info",
    "correspondence",
    "dates",
    "editor",
    "keywords",
    "title",
    "type",
)

BODY_LABELS = ("body_content", "body_other")

ZONE_LABELS = METADATA_LABELS + BODY_LABELS


class EmptyGroup(DocharvestError):
    """A box union was requested for an empty collection."""


@dataclass
class BoundingBox:
    """Axis-aligned rectangle in page coordinates."""

    x1: float
    y1: float
    x2: float
    y2: float

    @property
    def width(self) -> float:
        return self.x2 - self.x1

    @property
    def height(self) -> float:
        return self.y2 - self.y1

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def center(self) -> tuple[float, float]:
        return ((self.x1 + self.x2) / 2.0, (self.y1 + self.y2) / 2.0)

    def union(self, other: "BoundingBox") -> "BoundingBox":
        return BoundingBox(
            min(self.x1, other.x1),
            min(self.y1, other.y1),
            max(self.x2, other.x2),
            max(self.y2, other.y2),
        )

    def intersection_area(self, other: "BoundingBox") -> float:
        w = min(self.x2, other.x2) - max(self.x1, other.x1)
        h = min(self.y2, other.y2) - max(self.y1, other.y1)
        if w <= 0.0 or h <= 0.0:
            return 0.0
        return w * h

    def horizontal_overlap(self, other: "BoundingBox") -> float:
        """Length of the overlap of the two x-intervals (<= 0 means a gap)."""
        return min(self.x2, other.x2) - max(self.x1, other.x1)

    def vertical_overlap(self, other: "BoundingBox") -> float:
        """Length of the overlap of the two y-intervals (<= 0 means a gap)."""
        return min(self.y2, other.y2) - max(self.y1, other.y1)


def union_box(boxes: Iterable[BoundingBox]) -> BoundingBox:
    """Componentwise min/max union of boxes.

    Raises:
        EmptyGroup: if ``boxes`` is empty.
    """
    it = iter(boxes)
    try:
        first = next(it)
    except StopIteration:
        raise EmptyGroup("cannot take the union of zero boxes") from None
    x1, y1, x2, y2 = first.x1, first.y1, first.x2, first.y2
    for b in it:
        x1 = min(x1, b.x1)
        y1 = min(y1, b.y1)
        x2 = max(x2, b.x2)
        y2 = max(y2, b.y2)
    return BoundingBox(x1, y1, x2, y2)


@dataclass
class Character:
    """A single glyph with its box and an interned font id."""

    text: str
    box: BoundingBox
    font: int = 0


@dataclass
class Word:
    chars: list[Character]

    @cached_property
    def box(self) -> BoundingBox:
        return union_box(c.box for c in self.chars)

    @cached_property
    def text(self) -> str:
        return "".join(c.text for c in self.chars)


@dataclass
class Line:
    words: list[Word]

    @cached_property
    def box(self) -> BoundingBox:
        return union_box(w.box for w in self.words)

    @cached_property
    def text(self) -> str:
        return " ".join(w.text for w in self.words)

    def chars(self) -> Iterator[Character]:
        for w in self.words:
            yield from w.chars


@dataclass
class Zone:
    lines: list[Line]
    category: str | None = None
    label: str | None = None

    @cached_property
    def box(self) -> BoundingBox:
        return union_box(ln.box for ln in self.lines)

    @cached_property
    def text(self) -> str:
        return "\n".join(ln.text for ln in self.lines)

    def chars(self) -> Iterator[Character]:
        for ln in self.lines:
            yield from ln.chars()

    def words(self) -> Iterator[Word]:
        for ln in self.lines:
            yield from ln.words


@dataclass
class Page:
    width: float
    height: float
    zones: list[Zone] = field(default_factory=list)

    def lines(self) -> Iterator[Line]:
        for z in self.zones:
            yield from z.lines

    def words(self) -> Iterator[Word]:
        for z in self.zones:
            yield from z.words()

    def chars(self) -> Iterator[Character]:
        for z in self.zones:
            yield from z.chars()


@dataclass
class Document:
    pages: list[Page] = field(default_factory=list)
    fonts: list[str] = field(default_factory=list)

    def zones(self) -> Iterator[Zone]:
        for p in self.pages:
            yield from p.zones

    def lines(self) -> Iterator[Line]:
        for p in self.pages:
            yield from p.lines()

    def chars(self) -> Iterator[Character]:
        for p in self.pages:
            yield from p.chars()

    def font_name(self, font_id: int) -> str:
        if 0 <= font_id < len(self.fonts):
            return self.fonts[font_id]
        return ""


_KEEP = object()


def replace_zone_annotations(zone: Zone, category=_KEEP, label=_KEEP) -> Zone:
    """New zone with the same lines and updated annotations."""
    return Zone(
        lines=zone.lines,
        category=zone.category if category is _KEEP else category,
        label=zone.label if label is _KEEP else label,
    )


def validate_document(doc: Document) -> None:
    """Check structural invariants, raising InvalidModel on violation.

    Derived boxes are computed from children and therefore correct by
    construction; what remains is well-formed leaf boxes, non-empty
    containers below the page level, and font ids inside the table.
    """
    nfonts = len(doc.fonts)
    for pi, page in enumerate(doc.pages):
        if page.width <= 0 or page.height <= 0:
            raise InvalidModel(f"page {pi} has non-positive size")
        for zi, zone in enumerate(page.zones):
            where = f"page {pi} zone {zi}"
            if not zone.lines:
                raise InvalidModel(f"{where} has no lines")
            if zone.category is not None and zone.category not in CATEGORIES:
                raise InvalidModel(f"{where} has unknown category {zone.category!r}")
            if zone.label is not None and zone.label not in ZONE_LABELS:
                raise InvalidModel(f"{where} has unknown label {zone.label!r}")
            for li, line in enumerate(zone.lines):
                if not line.words:
                    raise InvalidModel(f"{where} line {li} has no words")
                for wi, word in enumerate(line.words):
                    if not word.chars:
                        raise InvalidModel(f"{where} line {li} word {wi} has no chars")
                    for ci, ch in enumerate(word.chars):
                        at = f"{where} line {li} word {wi} char {ci}"
                        if not ch.text:
                            raise InvalidModel(f"{at} has empty text")
                        if ch.box.x1 > ch.box.x2 or ch.box.y1 > ch.box.y2:
                            raise InvalidModel(f"{at} has an inverted box")
                        if not (0 <= ch.font < max(nfonts, 1)):
                            raise InvalidModel(f"{at} font id {ch.font} out of range")


# --- model-json serialization -------------------------------------------

def _char_to_dict(c: Character) -> dict:
    return {
        "t": c.text,
        "x1": c.box.x1,
        "y1": c.box.y1,
        "x2": c.box.x2,
        "y2": c.box.y2,
        "font": c.font,
    }


def document_to_dict(doc: Document) -> dict:
    pages = []
    for page in doc.pages:
        zones = []
        for zone in page.zones:
            zd: dict = {}
            if zone.category is not None:
                zd["category"] = zone.category
            if zone.label is not None:
                zd["label"] = zone.label
            zd["lines"] = [
                {"words": [{"chars": [_char_to_dict(c) for c in w.chars]}
                           for w in ln.words]}
                for ln in zone.lines
            ]
            zones.append(zd)
        pages.append({"width": page.width, "height": page.height, "zones": zones})
    return {"pages": pages, "fonts": list(doc.fonts)}


def _need(d: dict, key: str, kind, path: str):
    if not isinstance(d, dict) or key not in d:
        raise ParseError(f"missing field {key!r}", path)
    v = d[key]
    if kind is float:
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            raise ParseError(f"field {key!r} must be a number", path)
        return float(v)
    if not isinstance(v, kind):
        raise ParseError(f"field {key!r} has wrong type", path)
    return v


def document_from_dict(data: dict) -> Document:
    if not isinstance(data, dict):
        raise ParseError("document must be a JSON object", "$")
    fonts = data.get("fonts", [])
    if not isinstance(fonts, list) or not all(isinstance(f, str) for f in fonts):
        raise ParseError("'fonts' must be a list of strings", "$.fonts")
    pages = []
    for pi, pd in enumerate(_need(data, "pages", list, "$")):
        ppath = f"$.pages[{pi}]"
        width = _need(pd, "width", float, ppath)
        height = _need(pd, "height", float, ppath)
        zones = []
        for zi, zd in enumerate(_need(pd, "zones", list, ppath)):
            zpath = f"{ppath}.zones[{zi}]"
            lines = []
            for li, ld in enumerate(_need(zd, "lines", list, zpath)):
                lpath = f"{zpath}.lines[{li}]"
                words = []
                for wi, wd in enumerate(_need(ld, "words", list, lpath)):
                    wpath = f"{lpath}.words[{wi}]"
                    chars = []
                    for ci, cd in enumerate(_need(wd, "chars", list, wpath)):
                        cpath = f"{wpath}.chars[{ci}]"
                        chars.append(Character(
                            text=_need(cd, "t", str, cpath),
                            box=BoundingBox(
                                _need(cd, "x1", float, cpath),
                                _need(cd, "y1", float, cpath),
                                _need(cd, "x2", float, cpath),
                                _need(cd, "y2", float, cpath),
                            ),
                            font=int(_need(cd, "font", int, cpath)),
                        ))
                    words.append(Word(chars))
                lines.append(Line(words))
            category = zd.get("category")
            label = zd.get("label")
            zones.append(Zone(lines, category=category, label=label))
        pages.append(Page(width=width, height=height, zones=zones))
    doc = Document(pages=pages, fonts=list(fonts))
    validate_document(doc)
    return doc


# --- TrueViz import ------------------------------------------------------

def _trueviz_box(elem: ET.Element, corners_tag: str, path: str) -> BoundingBox:
    corners = elem.find(corners_tag)
    if corners is None:
        raise ParseError(f"missing {corners_tag}", path)
    xs, ys = [], []
    for v in corners.findall("Vertex"):
        try:
            xs.append(float(v.get("x", "")))
            ys.append(float(v.get("y", "")))
        except ValueError:
            raise ParseError("Vertex with non-numeric coordinates", path) from None
    if not xs:
        raise ParseError(f"{corners_tag} has no vertices", path)
    return BoundingBox(min(xs), min(ys), max(xs), max(ys))


def _document_from_trueviz(root: ET.Element) -> Document:
    fonts: list[str] = []
    font_ids: dict[str, int] = {}

    def intern(name: str) -> int:
        if name not in font_ids:
            font_ids[name] = len(fonts)
            fonts.append(name)
        return font_ids[name]

    pages = []
    for pi, pelem in enumerate(root.iter("Page")):
        zones = []
        for zi, zelem in enumerate(pelem.findall("Zone")):
            zpath = f"Page[{pi}]/Zone[{zi}]"
            lines = []
            for li, lelem in enumerate(zelem.findall("Line")):
                words = []
                for wi, welem in enumerate(lelem.findall("Word")):
                    chars = []
                    for ci, celem in enumerate(welem.findall("Character")):
                        cpath = f"{zpath}/Line[{li}]/Word[{wi}]/Character[{ci}]"
                        gt = celem.find("GT_Text")
                        text = gt.get("Value", "") if gt is not None else ""
                        if not text:
                            raise ParseError("Character without GT_Text", cpath)
                        felem = celem.find("Font")
                        fname = felem.get("Value", "unknown") if felem is not None else "unknown"
                        chars.append(Character(
                            text=text,
                            box=_trueviz_box(celem, "CharacterCorners", cpath),
                            font=intern(fname),
                        ))
                    if chars:
                        words.append(Word(chars))
                if words:
                    lines.append(Line(words))
            if not lines:
                continue
            category = label = None
            cls = zelem.find("Classification/Category")
            if cls is not None:
                value = (cls.get("Value") or "").strip().lower()
                if value in ZONE_LABELS:
                    label = value
                    category = ("body" if value in BODY_LABELS else "metadata")
                elif value in CATEGORIES:
                    category = value
            zones.append(Zone(lines, category=category, label=label))
        width = float(pelem.get("Width", 0.0))
        height = float(pelem.get("Height", 0.0))
        if width <= 0 or height <= 0:
            # Page size is optional in the dialect; fall back to content extent.
            boxes = [c.box for z in zones for c in z.chars()]
            if boxes:
                bb = union_box(boxes)
                width, height = max(width, bb.x2), max(height, bb.y2)
            else:
                width, height = max(width, 1.0), max(height, 1.0)
        pages.append(Page(width=width, height=height, zones=zones))
    doc = Document(pages=pages, fonts=fonts or ["unknown"])
    validate_document(doc)
    return doc


# --- public load/store ---------------------------------------------------

def load_model(source: str | bytes | IO, format: str = "model-json") -> Document:
    """Read a document model.

    Args:
        source: JSON/XML text, bytes, or a readable file object.
        format: "model-json" (canonical) or "trueviz-xml" (import only).
    """
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    if format == "model-json":
        try:
            data = json.loads(source)
        except json.JSONDecodeError as e:
            raise ParseError(f"invalid JSON: {e.msg}", f"offset {e.pos}") from None
        return document_from_dict(data)
    if format == "trueviz-xml":
        try:
            root = ET.fromstring(source)
        except ET.ParseError as e:
            raise ParseError(f"invalid XML: {e}", None) from None
        return _document_from_trueviz(root)
    raise ParseError(f"unknown model format {format!r}")


def store_model(doc: Document, format: str = "model-json") -> bytes:
    """Serialize a document model; only "model-json" is writable."""
    if format != "model-json":
        raise ParseError(f"format {format!r} is not writable; use 'model-json'")
    validate_document(doc)
    return json.dumps(document_to_dict(doc), ensure_ascii=False,
                      sort_keys=True).encode("utf-8")

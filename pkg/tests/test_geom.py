"""Document model: boxes, invariants, serialization round-trips."""

import io
import json
import random

import pytest

from docharvest.errors import InvalidModel, ParseError
from docharvest.geom import (BoundingBox, Character, Document, EmptyGroup,
                             Line, Page, Word, Zone, document_from_dict,
                             document_to_dict, load_model, store_model,
                             union_box, validate_document)
from helpers import bb, make_char, make_doc, make_line, make_page, make_zone

TOL = 1e-9


def test_box_dimensions():
    box = bb(1.0, 2.0, 4.0, 7.0)
    assert box.width == 3.0
    assert box.height == 5.0
    assert box.area == 15.0
    assert box.center == (2.5, 4.5)


def test_union_singleton_identity():
    box = bb(0, 0, 1, 1)
    assert union_box([box]) == box


def test_union_pair():
    assert union_box([bb(0, 0, 1, 1), bb(2, 3, 4, 5)]) == bb(0, 0, 4, 5)


def test_union_empty_raises():
    with pytest.raises(EmptyGroup):
        union_box([])


def test_union_matches_pairwise_fold():
    # Oracle: left fold of the two-box union over the same list.
    rng = random.Random(7)
    boxes = []
    for _ in range(100):
        x1, y1 = rng.uniform(0, 500), rng.uniform(0, 700)
        boxes.append(bb(x1, y1, x1 + rng.uniform(0.1, 90), y1 + rng.uniform(0.1, 40)))
    folded = boxes[0]
    for box in boxes[1:]:
        folded = folded.union(box)
    got = union_box(boxes)
    for a, g in zip((folded.x1, folded.y1, folded.x2, folded.y2),
                    (got.x1, got.y1, got.x2, got.y2)):
        assert abs(a - g) <= TOL


def test_intersection_and_overlaps():
    a = bb(0, 0, 10, 10)
    b = bb(5, 5, 15, 15)
    assert a.intersection_area(b) == 25.0
    assert a.intersection_area(bb(20, 20, 30, 30)) == 0.0
    assert a.horizontal_overlap(b) == 5.0
    assert a.vertical_overlap(bb(0, 12, 10, 20)) == -2.0


def test_derived_boxes_are_child_unions():
    zone = make_zone(["ab cd", "efg"], x=10, y=20)
    for line in zone.lines:
        for word in line.words:
            assert word.box == union_box(c.box for c in word.chars)
        assert line.box == union_box(w.box for w in line.words)
    assert zone.box == union_box(ln.box for ln in zone.lines)


def test_text_assembly():
    line = make_line("ab cd", 0, 0)
    assert line.text == "ab cd"
    zone = make_zone(["ab", "cd"], 0, 0)
    assert zone.text == "ab\ncd"


def test_char_enumeration_matches_nested_order():
    doc = make_doc([make_page([make_zone(["ab cd", "ef"], 10, 10),
                               make_zone(["gh"], 10, 100)])])
    via_doc = [c.text for c in doc.chars()]
    via_levels = [c.text
                  for page in doc.pages
                  for zone in page.zones
                  for line in zone.lines
                  for word in line.words
                  for c in word.chars]
    assert via_doc == via_levels == list("abcdefgh")


def test_validate_accepts_wellformed():
    doc = make_doc([make_page([make_zone(["ok"], 5, 5, category="body",
                                         label="body_content")])])
    validate_document(doc)


def test_validate_rejects_empty_line_list():
    doc = make_doc([make_page([Zone(lines=[])])])
    with pytest.raises(InvalidModel):
        validate_document(doc)


def test_validate_rejects_bad_annotations_and_boxes():
    with pytest.raises(InvalidModel):
        validate_document(make_doc([make_page(
            [make_zone(["x"], 0, 0, category="nope")])]))
    with pytest.raises(InvalidModel):
        validate_document(make_doc([make_page(
            [make_zone(["x"], 0, 0, label="nope")])]))
    bad_char = Character(text="x", box=bb(5, 5, 1, 6))
    doc = make_doc([make_page([Zone(lines=[Line(words=[Word(chars=[bad_char])])])])])
    with pytest.raises(InvalidModel):
        validate_document(doc)
    with pytest.raises(InvalidModel):
        validate_document(make_doc([make_page([make_zone(["x"], 0, 0, font=3)])]))


def _random_doc(rng):
    pages = []
    fonts = ["serif,10", "serif,12", "sans,9"]
    for _ in range(rng.randint(1, 3)):
        zones = []
        for zi in range(rng.randint(0, 3)):
            texts = [" ".join("abcdefg"[: rng.randint(1, 6)]
                              for _ in range(rng.randint(1, 4)))
                     for _ in range(rng.randint(1, 3))]
            zone = make_zone(texts, x=rng.uniform(0, 300),
                             y=rng.uniform(0, 600),
                             font=rng.randrange(len(fonts)),
                             category=rng.choice([None, "metadata", "body"]),
                             label=rng.choice([None, "title", "body_content"]))
            zones.append(zone)
        pages.append(make_page(zones, width=595, height=842))
    return Document(pages=pages, fonts=fonts)


def _assert_same_tree(a: Document, b: Document):
    assert a.fonts == b.fonts
    assert len(a.pages) == len(b.pages)
    for pa, pb in zip(a.pages, b.pages):
        assert pa.width == pb.width and pa.height == pb.height
        assert len(pa.zones) == len(pb.zones)
        for za, zb in zip(pa.zones, pb.zones):
            assert za.category == zb.category
            assert za.label == zb.label
            ca, cb = list(za.chars()), list(zb.chars())
            assert len(ca) == len(cb)
            for x, y in zip(ca, cb):
                assert x.text == y.text
                assert x.font == y.font
                for u, v in ((x.box.x1, y.box.x1), (x.box.y1, y.box.y1),
                             (x.box.x2, y.box.x2), (x.box.y2, y.box.y2)):
                    assert abs(u - v) <= TOL


def test_model_json_round_trip_random_documents():
    rng = random.Random(11)
    for _ in range(10):
        doc = _random_doc(rng)
        back = load_model(store_model(doc))
        _assert_same_tree(doc, back)


def test_minimal_one_char_document():
    data = {"pages": [{"width": 100.0, "height": 100.0, "zones": [
        {"lines": [{"words": [{"chars": [
            {"t": "A", "x1": 1.0, "y1": 2.0, "x2": 3.0, "y2": 4.0, "font": 0}
        ]}]}]}]}], "fonts": ["serif,10"]}
    doc = load_model(io.BytesIO(json.dumps(data).encode()))
    assert len(doc.pages) == 1
    assert len(doc.pages[0].zones) == 1
    zone = doc.pages[0].zones[0]
    assert len(zone.lines) == 1
    assert len(zone.lines[0].words) == 1
    assert zone.text == "A"


def test_empty_document_round_trips():
    buf = io.BytesIO()
    store_model(Document(pages=[], fonts=[]), buf)
    buf.seek(0)
    doc = load_model(buf)
    assert doc.pages == []


def test_annotations_survive_round_trip():
    doc = make_doc([make_page([make_zone(["t"], 0, 0, category="metadata",
                                         label="title"),
                               make_zone(["b"], 0, 50, category="body",
                                         label="body_content")])])
    back = document_from_dict(document_to_dict(doc))
    got = [(z.category, z.label) for z in back.pages[0].zones]
    assert got == [("metadata", "title"), ("body", "body_content")]


def test_load_rejects_malformed_with_location():
    data = {"pages": [{"width": 100.0, "zones": []}], "fonts": []}
    with pytest.raises(ParseError):
        load_model(io.BytesIO(json.dumps(data).encode()))
    with pytest.raises(ParseError):
        load_model(io.BytesIO(b"not json"))


def test_store_rejects_invalid_document():
    doc = make_doc([make_page([Zone(lines=[])])])
    with pytest.raises(InvalidModel):
        store_model(doc, io.BytesIO())

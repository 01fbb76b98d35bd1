"""Builders for small document trees used across the test modules.

Characters are laid out on a left-to-right baseline grid so box-derived
quantities (heights, gaps, margins) are easy to reason about by hand.
"""

from docharvest.geom import (BoundingBox, Character, Document, Line, Page,
                             Word, Zone)

CHAR_W = 5.0
CHAR_H = 10.0


def bb(x1, y1, x2, y2):
    return BoundingBox(x1, y1, x2, y2)


def make_char(text, x, y, w=CHAR_W, h=CHAR_H, font=0):
    return Character(text=text, box=BoundingBox(x, y, x + w, y + h), font=font)


def make_word(text, x, y, w=CHAR_W, h=CHAR_H, font=0):
    chars = [make_char(ch, x + i * w, y, w, h, font)
             for i, ch in enumerate(text)]
    return Word(chars=chars)


def make_line(text, x, y, w=CHAR_W, h=CHAR_H, font=0, space=None):
    """One line; words split on spaces, separated by one space advance."""
    if space is None:
        space = w
    words = []
    cursor = x
    for part in text.split(" "):
        if not part:
            cursor += space
            continue
        words.append(make_word(part, cursor, y, w, h, font))
        cursor += len(part) * w + space
    return Line(words=words)


def make_zone(texts, x, y, leading=14.0, w=CHAR_W, h=CHAR_H, font=0,
              category=None, label=None):
    """A zone of stacked lines with fixed leading."""
    lines = [make_line(t, x, y + i * leading, w, h, font)
             for i, t in enumerate(texts)]
    return Zone(lines=lines, category=category, label=label)


def make_page(zones, width=595.0, height=842.0):
    return Page(width=width, height=height, zones=list(zones))


def make_doc(pages, fonts=("serif,10",)):
    return Document(pages=list(pages), fonts=list(fonts))


def one_zone_doc(texts, x=50.0, y=50.0, **kw):
    zone = make_zone(texts, x, y, **kw)
    return make_doc([make_page([zone])])


def doc_chars(doc):
    return list(doc.chars())

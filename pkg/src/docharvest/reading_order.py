"""Reading order resolution.

Within lines and words the order is a plain geometric sort.  Zones are
ordered by building a binary tree bottom-up: the closest pair of zone
groups (by a distance that strongly prefers vertically stacked
neighbors, so columns stay together) is merged until one group
remains, then an in-order traversal emits the zones, swapping the two
children of a node when the right one should be read first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

from .geom import BoundingBox, Document, Line, Page, Word, Zone, union_box


def _slope_cosine(p: tuple[float, float], q: tuple[float, float]) -> float:
    """Cosine of the angle between segment pq and the horizontal axis.

    1.0 for a horizontal segment, 0.0 for a vertical one or when the
    points coincide.
    """
    dx = q[0] - p[0]
    dy = q[1] - p[1]
    norm = math.hypot(dx, dy)
    if norm == 0.0:
        return 0.0
    return abs(dx) / norm


def zone_distance(a: BoundingBox, b: BoundingBox) -> float:
    """Distance between two zone boxes used for grouping.

    The area the pair would add to a merged bounding box, weighted so
    that vertically aligned pairs (cosine near 0) cost half as much as
    horizontally aligned ones.  Never negative: overlapping pairs score
    zero.
    """
    extra = a.union(b).area - a.area - b.area
    left_a = (a.x1, (a.y1 + a.y2) / 2.0)
    left_b = (b.x1, (b.y1 + b.y2) / 2.0)
    cos_left = _slope_cosine(left_a, left_b)
    cos_mid = _slope_cosine(a.center, b.center)
    return max(0.0, extra * (0.5 + min(cos_left, cos_mid)))


@dataclass
class ZoneGroup:
    """Node of the zone grouping tree; leaves carry a zone index."""

    box: BoundingBox
    zone_index: int | None = None
    left: "ZoneGroup | None" = None
    right: "ZoneGroup | None" = None
    min_leaf: int = 0

    def leaves(self) -> list[int]:
        if self.zone_index is not None:
            return [self.zone_index]
        return self.left.leaves() + self.right.leaves()


def cluster_zones(boxes: Sequence[BoundingBox]) -> ZoneGroup:
    """Agglomerate zones into a binary tree by repeatedly merging the
    closest pair of groups; ties go to the pair with the lowest zone
    indices."""
    if not boxes:
        raise ValueError("cannot cluster zero zones")
    groups = [ZoneGroup(box=b, zone_index=i, min_leaf=i)
              for i, b in enumerate(boxes)]
    while len(groups) > 1:
        groups.sort(key=lambda g: g.min_leaf)
        best = None
        best_d = math.inf
        for i in range(len(groups)):
            for j in range(i + 1, len(groups)):
                d = zone_distance(groups[i].box, groups[j].box)
                if d < best_d:
                    best_d = d
                    best = (i, j)
        i, j = best
        merged = ZoneGroup(
            box=groups[i].box.union(groups[j].box),
            left=groups[i], right=groups[j],
            min_leaf=min(groups[i].min_leaf, groups[j].min_leaf),
        )
        groups = [g for k, g in enumerate(groups) if k not in (i, j)]
        groups.append(merged)
    return groups[0]


def should_swap(left: BoundingBox, right: BoundingBox) -> bool:
    """Whether the right child of a grouping node should be read first.

    Clearly separated pairs are ordered left-to-right, then
    top-to-bottom; for overlapping pairs the sum of the center
    differences decides.
    """
    if left.x2 <= right.x1:
        return False
    if right.x2 <= left.x1:
        return True
    if left.y2 <= right.y1:
        return False
    if right.y2 <= left.y1:
        return True
    dx = right.center[0] - left.center[0]
    dy = right.center[1] - left.center[1]
    return dx + dy < 0.0


def _traverse(node: ZoneGroup, out: list[int]) -> None:
    if node.zone_index is not None:
        out.append(node.zone_index)
        return
    first, second = node.left, node.right
    if should_swap(first.box, second.box):
        first, second = second, first
    _traverse(first, out)
    _traverse(second, out)


def order_zones(boxes: Sequence[BoundingBox]) -> list[int]:
    """Reading order of zones given their boxes, as a permutation."""
    if len(boxes) <= 1:
        return list(range(len(boxes)))
    order: list[int] = []
    _traverse(cluster_zones(boxes), order)
    return order


def resolve_reading_order(doc: Document) -> Document:
    """Return a copy of the document with every level sorted for reading.

    Characters and words are ordered left to right, lines top to
    bottom, zones by the grouping-tree traversal.  The operation is
    idempotent.
    """
    pages = []
    for page in doc.pages:
        zones = []
        for zone in page.zones:
            lines = []
            for line in zone.lines:
                words = [Word(sorted(w.chars, key=lambda c: (c.box.x1, c.box.y1)))
                         for w in line.words]
                words.sort(key=lambda w: (w.box.x1, w.box.y1))
                lines.append(Line(words))
            lines.sort(key=lambda ln: (ln.box.y1, ln.box.x1))
            zones.append(replace(zone, lines=lines))
        order = order_zones([z.box for z in zones])
        pages.append(Page(width=page.width, height=page.height,
                          zones=[zones[i] for i in order]))
    return Document(pages=pages, fonts=list(doc.fonts))

"""Bibliography extraction.

Reference sections rarely mark where one reference ends and the next
begins.  The splitter clusters the pooled reference lines into two
groups with 2-means over five layout features; the cluster holding the
first line is taken to be the set of reference-opening lines, and each
opening line collects the following lines until the next one.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .geom import Document, Line, Zone
from .textutil import join_hyphenated
from .token_parsers import (EmptyInput, ParsedReference, TokenParser,
                            clean_reference, parse_citation)

# Line starts that enumerate references, each its own pattern family.
_ENUM_RES = (
    ("bracket", re.compile(r"^\[(\d+)\]")),
    ("dotted", re.compile(r"^(\d+)\.")),
    ("paren", re.compile(r"^\((\d+)\)")),
)

INDENT_THRESHOLD = 1.5          # pt beyond the modal left margin
GAP_FACTOR = 1.15               # of the minimum inter-line gap


@dataclass
class RefLineFeatures:
    enum_chain: float
    prev_ends_dot: float
    prev_length_ratio: float
    indented: float
    large_gap: float

    def vector(self) -> list[float]:
        return [self.enum_chain, self.prev_ends_dot,
                self.prev_length_ratio, self.indented, self.large_gap]


def _enum_key(line: Line) -> tuple[str, int] | None:
    text = line.text.lstrip()
    for family, pattern in _ENUM_RES:
        m = pattern.match(text)
        if m:
            return family, int(m.group(1))
    return None


def reference_line_features(lines: list[Line],
                            zones: list[Zone]) -> list[RefLineFeatures]:
    """Five layout features per pooled reference line.

    ``zones[i]`` is the zone containing ``lines[i]``.  The first line
    of the pool has no predecessor, but it necessarily opens the first
    reference, so its previous-line features read as maximally
    separating; anything else would park an outlier next to the
    continuation cluster and poison the 2-means initialization.
    """
    if len(lines) != len(zones):
        raise ConfigError("each line needs its containing zone")
    if not lines:
        return []

    keys = [_enum_key(ln) for ln in lines]
    modal_left: dict[int, float] = {}
    for zone in set(map(id, zones)):
        xs = [round(ln.box.x1, 1) for ln, z in zip(lines, zones)
              if id(z) == zone]
        modal_left[zone] = Counter(xs).most_common(1)[0][0]

    gaps = [lines[i].box.y1 - lines[i - 1].box.y2
            for i in range(1, len(lines))]
    positive = [g for g in gaps if g > 0]
    gap_cut = GAP_FACTOR * min(positive) if positive else float("inf")

    feats = []
    for i, line in enumerate(lines):
        enum_chain = 0.0
        if keys[i] is not None:
            family, n = keys[i]
            before = any(keys[j] == (family, n - 1) for j in range(i))
            after = any(keys[j] == (family, n + 1)
                        for j in range(i + 1, len(lines)))
            enum_chain = 1.0 if before or after else 0.0
        if i == 0:
            prev_dot, ratio, gap_flag = 1.0, 0.0, 1.0
        else:
            prev = lines[i - 1]
            prev_dot = 1.0 if prev.text.rstrip().endswith(".") else 0.0
            width = zones[i - 1].box.width
            ratio = prev.box.width / width if width > 0 else 0.0
            gap_flag = 1.0 if gaps[i - 1] > gap_cut else 0.0
        indented = 1.0 if line.box.x1 > modal_left[id(zones[i])] + INDENT_THRESHOLD else 0.0
        feats.append(RefLineFeatures(enum_chain, prev_dot, ratio,
                                     indented, gap_flag))
    return feats


def kmeans(vectors: np.ndarray, k: int,
           init: np.ndarray | None = None) -> np.ndarray:
    """Lloyd iterations to an assignment fixed point.

    ``init`` holds starting centroids (default: first k vectors).  Ties
    go to the lowest cluster index; empty clusters keep their centroid.
    """
    vectors = np.asarray(vectors, dtype=float)
    n = vectors.shape[0]
    if n < k:
        raise ConfigError(f"cannot form {k} clusters from {n} vectors")
    centroids = np.array(init if init is not None else vectors[:k], dtype=float)
    assignment = np.full(n, -1)
    while True:
        d2 = ((vectors[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        new_assignment = d2.argmin(axis=1)
        if np.array_equal(new_assignment, assignment):
            return assignment
        assignment = new_assignment
        for c in range(k):
            members = vectors[assignment == c]
            if len(members):
                centroids[c] = members.mean(axis=0)


def _farthest_init(vectors: np.ndarray) -> np.ndarray:
    d2 = ((vectors - vectors[0]) ** 2).sum(axis=1)
    return np.stack([vectors[0], vectors[int(d2.argmax())]])


def split_reference_lines(lines: list[Line], zones: list[Zone]) -> list[list[Line]]:
    """Group the pooled lines into one list per reference."""
    if not lines:
        return []
    if len(lines) == 1:
        return [lines]
    feats = np.array([f.vector() for f in reference_line_features(lines, zones)])
    assignment = kmeans(feats, 2, init=_farthest_init(feats))
    first_cluster = assignment[0]
    groups: list[list[Line]] = []
    for line, cluster in zip(lines, assignment):
        if cluster == first_cluster:
            groups.append([line])
        else:
            groups[-1].append(line)
    return groups


def _pooled_reference_lines(doc: Document) -> tuple[list[Line], list[Zone]]:
    lines: list[Line] = []
    zones: list[Zone] = []
    for page in doc.pages:
        for zone in page.zones:
            if zone.category == "references":
                for line in zone.lines:
                    lines.append(line)
                    zones.append(zone)
    return lines, zones


def extract_reference_strings(doc: Document) -> list[str]:
    """Raw reference strings in document order."""
    lines, zones = _pooled_reference_lines(doc)
    return [join_hyphenated([ln.text for ln in group])
            for group in split_reference_lines(lines, zones)]


def extract_bibliography(doc: Document, parser: TokenParser) -> list[ParsedReference]:
    """Split, parse and clean every reference in the document."""
    refs = []
    for raw in extract_reference_strings(doc):
        try:
            parsed = parse_citation(raw, parser)
        except EmptyInput:
            parsed = ParsedReference(raw=raw)
        refs.append(clean_reference(parsed))
    return refs

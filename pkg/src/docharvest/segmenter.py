"""Bottom-up page segmentation.

Characters are grouped into lines, lines into zones, and line chars
into words, using nearest-neighbor statistics: the dominant angle of
neighbor pairs gives the text orientation, and smoothed histograms of
pair distances give the within-line and between-line spacing.  All
grouping thresholds scale with those estimates, so the segmenter has
no fixed page-size assumptions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DocharvestError
from .geom import Character, Line, Page, Word, Zone, union_box
from .ingest import CharDump

# Vertical offset between same-line characters, as a fraction of the
# within-line spacing.
_SAME_LINE_OFFSET_FACTOR = 0.5


class NoData(DocharvestError):
    """Not enough input to estimate a statistic."""


@dataclass
class SegmenterConfig:
    neighbor_count: int = 5
    angle_hist_bin: float = math.pi / 256
    spacing_hist_bin: float = 0.5
    gauss_sigma_bins: float = 2.0
    angle_tolerance: float = math.pi / 12
    within_line_max_dist_factor: float = 2.5
    zone_line_dist_factor: float = 1.8
    zone_overlap_merge_threshold: float = 0.9
    word_space_factor: float = 0.6


@dataclass
class NeighborPair:
    """Directed pair: character ``a`` has ``b`` among its nearest neighbors."""

    a: int
    b: int
    distance: float
    angle: float  # folded into (-pi/2, pi/2]


@dataclass
class Spacings:
    """Estimated character spacings; a component is None when the
    corresponding filtered pair set was empty (no data)."""

    within: float | None
    between: float | None


def fold_angle(angle: float) -> float:
    """Normalize an angle to (-pi/2, pi/2]; direction is irrelevant."""
    while angle <= -math.pi / 2:
        angle += math.pi
    while angle > math.pi / 2:
        angle -= math.pi
    return angle


def angle_between(a: float, b: float) -> float:
    """Distance between two folded angles on the half-circle."""
    d = abs(a - b) % math.pi
    return min(d, math.pi - d)


class _DisjointSet:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, i: int) -> int:
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)

    def groups(self) -> list[list[int]]:
        """Members per root, groups ordered by smallest member."""
        by_root: dict[int, list[int]] = {}
        for i in range(len(self.parent)):
            by_root.setdefault(self.find(i), []).append(i)
        return [by_root[r] for r in sorted(by_root)]


# --- nearest neighbors ----------------------------------------------------

def nearest_neighbors(chars: Sequence[Character], k: int = 5) -> list[NeighborPair]:
    """For every character, its min(k, n-1) nearest others.

    Distances are Euclidean between box centers; ties are broken by the
    lower character index (comparison uses squared distances, which is
    exact for the tie cases that matter).  Pairs for one source
    character are sorted by distance, then index.
    """
    n = len(chars)
    if n < 2:
        return []
    centers = np.array([c.box.center for c in chars], dtype=np.float64)
    k = min(k, n - 1)
    pairs: list[NeighborPair] = []
    indices = np.arange(n)
    block = max(1, min(n, 2_000_000 // max(n, 1)))
    for start in range(0, n, block):
        rows = np.arange(start, min(start + block, n))
        diff = centers[rows, None, :] - centers[None, :, :]
        d2 = np.einsum("ijk,ijk->ij", diff, diff)
        d2[rows - start, rows] = np.inf
        idx_key = np.broadcast_to(indices, d2.shape)
        order = np.lexsort((idx_key, d2), axis=1)[:, :k]
        for r, i in enumerate(rows):
            ci = centers[i]
            for j in order[r]:
                j = int(j)
                dx = centers[j, 0] - ci[0]
                dy = centers[j, 1] - ci[1]
                pairs.append(NeighborPair(
                    a=int(i), b=j,
                    distance=math.hypot(dx, dy),
                    angle=fold_angle(math.atan2(dy, dx)),
                ))
    return pairs


# --- histograms -----------------------------------------------------------

@dataclass
class Histogram:
    origin: float
    bin_width: float
    counts: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, values: Sequence[float], bin_width: float,
              origin: float | None = None) -> "Histogram":
        if len(values) == 0:
            raise NoData("cannot build a histogram from no values")
        if bin_width <= 0:
            raise ValueError("bin_width must be positive")
        arr = np.asarray(values, dtype=np.float64)
        if origin is None:
            origin = math.floor(arr.min() / bin_width) * bin_width
        nbins = int(math.floor((arr.max() - origin) / bin_width)) + 1
        idx = np.floor((arr - origin) / bin_width).astype(int)
        idx = np.clip(idx, 0, nbins - 1)
        counts = np.bincount(idx, minlength=nbins).astype(np.float64)
        return cls(origin=origin, bin_width=bin_width, counts=counts)

    def smooth(self, sigma_bins: float) -> "Histogram":
        """Convolve with a renormalized Gaussian truncated at +-3 sigma.

        The histogram is extended on both sides so the total mass is
        conserved.
        """
        if sigma_bins <= 0:
            return Histogram(self.origin, self.bin_width, self.counts.copy())
        radius = int(math.ceil(3.0 * sigma_bins))
        j = np.arange(-radius, radius + 1, dtype=np.float64)
        kernel = np.exp(-(j * j) / (2.0 * sigma_bins * sigma_bins))
        kernel /= kernel.sum()
        counts = np.convolve(self.counts, kernel, mode="full")
        return Histogram(origin=self.origin - radius * self.bin_width,
                         bin_width=self.bin_width, counts=counts)

    def peak(self) -> float:
        """Center of the highest bin; ties go to the lower bin."""
        i = int(np.argmax(self.counts))
        return self.origin + (i + 0.5) * self.bin_width


def histogram_peak(values: Sequence[float], bin_width: float,
                   sigma_bins: float, origin: float | None = None) -> float:
    return Histogram.build(values, bin_width, origin).smooth(sigma_bins).peak()


# --- spacing and orientation estimates -------------------------------------

def estimate_orientation(pairs: Sequence[NeighborPair],
                         cfg: SegmenterConfig | None = None) -> float:
    """Dominant neighbor-pair angle (the text line orientation)."""
    cfg = cfg or SegmenterConfig()
    if not pairs:
        raise NoData("no neighbor pairs to estimate orientation from")
    return histogram_peak([p.angle for p in pairs], cfg.angle_hist_bin,
                          cfg.gauss_sigma_bins, origin=-math.pi / 2)


def estimate_spacings(pairs: Sequence[NeighborPair], theta: float,
                      cfg: SegmenterConfig | None = None) -> Spacings:
    """Within-line and between-line spacing estimates.

    Within-line spacing is the histogram peak of distances of pairs
    aligned with ``theta``; between-line spacing uses pairs
    perpendicular to it.  A component is None when its pair set is
    empty.
    """
    cfg = cfg or SegmenterConfig()
    perp = fold_angle(theta + math.pi / 2)
    within_d = [p.distance for p in pairs
                if angle_between(p.angle, theta) <= cfg.angle_tolerance]
    between_d = [p.distance for p in pairs
                 if angle_between(p.angle, perp) <= cfg.angle_tolerance]

    def peak(ds: list[float]) -> float | None:
        if not ds:
            return None
        return histogram_peak(ds, cfg.spacing_hist_bin, cfg.gauss_sigma_bins,
                              origin=0.0)

    return Spacings(within=peak(within_d), between=peak(between_d))


# --- grouping --------------------------------------------------------------

def build_lines(chars: Sequence[Character], pairs: Sequence[NeighborPair],
                theta: float, within: float,
                cfg: SegmenterConfig | None = None) -> list[list[int]]:
    """Group characters into line segments (lists of char indices).

    Neighbor pairs aligned with ``theta`` are joined transitively when
    their center offset, projected into line coordinates, is at most
    ``within * within_line_max_dist_factor`` along the line and
    ``within * 0.5`` across it.
    """
    cfg = cfg or SegmenterConfig()
    ds = _DisjointSet(len(chars))
    cos_t, sin_t = math.cos(theta), math.sin(theta)
    max_along = within * cfg.within_line_max_dist_factor
    max_across = within * _SAME_LINE_OFFSET_FACTOR
    centers = [c.box.center for c in chars]
    for p in pairs:
        if angle_between(p.angle, theta) > cfg.angle_tolerance:
            continue
        dx = centers[p.b][0] - centers[p.a][0]
        dy = centers[p.b][1] - centers[p.a][1]
        along = dx * cos_t + dy * sin_t
        across = -dx * sin_t + dy * cos_t
        if abs(along) <= max_along and abs(across) <= max_across:
            ds.union(p.a, p.b)
    segments = ds.groups()
    for seg in segments:
        seg.sort(key=lambda i: (chars[i].box.x1, chars[i].box.y1))
    return segments


def _vertical_gap(a, b) -> float:
    return max(0.0, max(a.y1, b.y1) - min(a.y2, b.y2))


def build_zones(segments: Sequence[Sequence[int]], chars: Sequence[Character],
                between: float | None,
                cfg: SegmenterConfig | None = None) -> list[list[int]]:
    """Group line segments into zones (lists of segment indices).

    Two segments go in one zone when their boxes overlap horizontally
    and the vertical gap between them is at most
    ``zone_line_dist_factor`` times the taller segment's height.
    Afterwards zones whose boxes overlap almost entirely are merged.
    """
    cfg = cfg or SegmenterConfig()
    boxes = [union_box(chars[i].box for i in seg) for seg in segments]
    ds = _DisjointSet(len(segments))
    for i in range(len(segments)):
        for j in range(i + 1, len(segments)):
            bi, bj = boxes[i], boxes[j]
            if bi.horizontal_overlap(bj) <= 0.0:
                continue
            height = max(bi.height, bj.height)
            if height <= 0.0:
                height = between if between else 0.0
            if _vertical_gap(bi, bj) <= cfg.zone_line_dist_factor * height:
                ds.union(i, j)
    zones = ds.groups()

    # Merge zones that nearly coincide.
    changed = True
    while changed:
        changed = False
        zboxes = [union_box(boxes[s] for s in z) for z in zones]
        for i in range(len(zones)):
            for j in range(i + 1, len(zones)):
                small = min(zboxes[i].area, zboxes[j].area)
                if small <= 0.0:
                    continue
                inter = zboxes[i].intersection_area(zboxes[j])
                if inter >= cfg.zone_overlap_merge_threshold * small:
                    zones[i] = zones[i] + zones[j]
                    del zones[j]
                    changed = True
                    break
            if changed:
                break
    return [sorted(z) for z in zones]


def merge_line_segments(zone_segments: Sequence[Sequence[int]],
                        chars: Sequence[Character]) -> list[list[int]]:
    """Merge segments of one zone that share a baseline into single lines.

    Segments whose vertical overlap is at least half the smaller
    segment height are one line; the merged chars are ordered left to
    right.
    """
    boxes = [union_box(chars[i].box for i in seg) for seg in zone_segments]
    ds = _DisjointSet(len(zone_segments))
    for i in range(len(zone_segments)):
        for j in range(i + 1, len(zone_segments)):
            overlap = boxes[i].vertical_overlap(boxes[j])
            if overlap >= 0.5 * min(boxes[i].height, boxes[j].height):
                ds.union(i, j)
    lines = []
    for group in ds.groups():
        members = [i for seg_idx in group for i in zone_segments[seg_idx]]
        members.sort(key=lambda i: (chars[i].box.x1, chars[i].box.y1))
        lines.append(members)
    lines.sort(key=lambda m: (min(chars[i].box.y1 for i in m),
                              min(chars[i].box.x1 for i in m)))
    return lines


def detect_words(line_chars: Sequence[int], chars: Sequence[Character],
                 within: float, cfg: SegmenterConfig | None = None) -> list[list[int]]:
    """Split a line's chars (sorted left to right) into words at gaps
    wider than ``within * word_space_factor``."""
    cfg = cfg or SegmenterConfig()
    threshold = within * cfg.word_space_factor
    words: list[list[int]] = []
    current: list[int] = []
    reach = -math.inf  # rightmost edge seen so far
    for i in line_chars:
        b = chars[i].box
        if current and b.x1 - reach > threshold:
            words.append(current)
            current = []
        current.append(i)
        reach = max(reach, b.x2)
    if current:
        words.append(current)
    return words


# --- page assembly ----------------------------------------------------------

def _fallback_page(chars: Sequence[Character], width: float, height: float) -> Page:
    ordered = sorted(range(len(chars)), key=lambda i: (chars[i].box.x1, chars[i].box.y1))
    word = Word([chars[i] for i in ordered])
    return Page(width=width, height=height,
                zones=[Zone([Line([word])])])


def segment_page(chars: Sequence[Character], width: float, height: float,
                 cfg: SegmenterConfig | None = None,
                 warnings: list[str] | None = None) -> Page:
    """Segment one page of characters into zones, lines, and words.

    When the spacing statistics cannot be estimated (too few
    characters), the page degrades to a single zone with a single line
    and a warning is recorded.
    """
    cfg = cfg or SegmenterConfig()
    chars = list(chars)
    if not chars:
        return Page(width=width, height=height, zones=[])

    pairs = nearest_neighbors(chars, cfg.neighbor_count)
    try:
        if not pairs:
            raise NoData("page has a single character")
        theta = estimate_orientation(pairs, cfg)
        spacings = estimate_spacings(pairs, theta, cfg)
        if spacings.within is None:
            raise NoData("no within-line neighbor pairs")
    except NoData as e:
        if warnings is not None:
            warnings.append(f"segmentation fallback: {e}")
        return _fallback_page(chars, width, height)

    segments = build_lines(chars, pairs, theta, spacings.within, cfg)
    zone_groups = build_zones(segments, chars, spacings.between, cfg)

    zones = []
    for group in zone_groups:
        line_groups = merge_line_segments([segments[i] for i in group], chars)
        lines = []
        for line_chars in line_groups:
            word_groups = detect_words(line_chars, chars, spacings.within, cfg)
            lines.append(Line([Word([chars[i] for i in w]) for w in word_groups]))
        zones.append(Zone(lines))
    zones.sort(key=lambda z: (z.box.y1, z.box.x1))
    return Page(width=width, height=height, zones=zones)


def segment_document(dump: CharDump, cfg: SegmenterConfig | None = None,
                     warnings: list[str] | None = None):
    """Segment every page of a cleaned character dump into a Document."""
    from .geom import Document

    cfg = cfg or SegmenterConfig()
    pages = []
    for pi, page in enumerate(dump.pages):
        page_warnings: list[str] = []
        pages.append(segment_page(page.chars, page.width, page.height, cfg,
                                  page_warnings))
        if warnings is not None:
            warnings.extend(f"page {pi}: {w}" for w in page_warnings)
    return Document(pages=pages, fonts=list(dump.fonts))

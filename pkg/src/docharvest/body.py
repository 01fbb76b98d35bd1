"""Section structure from body text.

Header lines are outliers among the body_content line population, so
each line gets standard scores for height, length, x-coordinate,
distance from the previous line, and font id.  First header lines are
seeded from zone-opening lines, pruned by outlier and content checks,
extended through header-specific fonts, and re-pruned.  Follower lines
complete multi-line headers, and headers are grouped into up to three
hierarchy levels by shared style.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from statistics import mean, pstdev

from .dictionaries import load_dictionaries
from .geom import Document, Line
from .svm import SvmModel
from .textutil import join_hyphenated, normalize_ligatures
from .zone_classify import classify_zones

_HEADER_ENUM_RE = re.compile(r"^(\d+(\.\d+)*\.?|[IVXL]+\.)\s+\S")
_LETTER_RUN_RE = re.compile(r"[^\W\d_]{4}", re.UNICODE)

# Two lines have "similar" height (or a follower counts as "noticeably
# shorter") when the smaller/larger ratio crosses this bound.
SIMILAR_HEIGHT_RATIO = 0.9
INDENT_DIFFERENCE = 1.5  # pt


@dataclass
class HeaderConfig:
    max_zl: float = 1.0
    min_zh: float = -0.3
    typicality: float = 0.35
    soft_typicality: float = 0.7
    font_outlier: float = 0.5


@dataclass
class LineStats:
    height: float
    length: float
    x: float
    distance: float | None  # None for the first line on a page
    font: int
    z_h: float = 0.0
    z_l: float = 0.0
    z_x: float = 0.0
    z_d: float = 0.0
    z_f: float = 0.0


@dataclass
class SectionNode:
    level: int
    title: str
    content: str = ""
    children: list["SectionNode"] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"level": self.level, "title": self.title,
                "content": self.content,
                "children": [c.to_dict() for c in self.children]}


@dataclass
class _BodyLine:
    line: Line
    page: int
    zone_id: int
    first_in_zone: bool
    page_first: bool

    @property
    def text(self) -> str:
        return self.line.text


def dominant_font(line: Line) -> int:
    counts = Counter(c.font for c in line.chars())
    best = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return best[0][0] if best else 0


def _collect_body_lines(doc: Document) -> list[_BodyLine]:
    labeled = any(z.label in ("body_content", "body_other") for z in doc.zones())
    records: list[_BodyLine] = []
    zone_id = 0
    for pi, page in enumerate(doc.pages):
        seen_on_page = False
        for zone in page.zones:
            if labeled:
                wanted = zone.label == "body_content"
            else:
                wanted = zone.category == "body"
            if not wanted:
                continue
            for li, line in enumerate(zone.lines):
                records.append(_BodyLine(line=line, page=pi, zone_id=zone_id,
                                         first_in_zone=(li == 0),
                                         page_first=not seen_on_page))
                seen_on_page = True
            zone_id += 1
    return records


def _zscore(value: float, mu: float, sigma: float) -> float:
    return 0.0 if sigma == 0.0 else (value - mu) / sigma


def compute_line_zscores(records: list[_BodyLine]) -> list[LineStats]:
    """Standard scores over the document's own body line population."""
    stats: list[LineStats] = []
    prev: _BodyLine | None = None
    for rec in records:
        distance = None
        if not rec.page_first and prev is not None:
            distance = rec.line.box.y1 - prev.line.box.y2
        stats.append(LineStats(height=rec.line.box.height,
                               length=rec.line.box.width,
                               x=rec.line.box.x1,
                               distance=distance,
                               font=dominant_font(rec.line)))
        prev = rec
    if len(records) < 2:
        return stats
    for attr, zattr in (("height", "z_h"), ("length", "z_l"),
                        ("x", "z_x"), ("font", "z_f")):
        values = [getattr(s, attr) for s in stats]
        mu, sigma = mean(values), pstdev(values)
        for s in stats:
            setattr(s, zattr, _zscore(getattr(s, attr), mu, sigma))
    distances = [s.distance for s in stats if s.distance is not None]
    if len(distances) >= 2:
        mu, sigma = mean(distances), pstdev(distances)
        for s in stats:
            if s.distance is not None:
                s.z_d = _zscore(s.distance, mu, sigma)
    return stats


def _starts_upper(text: str) -> bool:
    stripped = text.lstrip()
    return bool(stripped) and stripped[0].isupper()


def _matches_header_start(text: str) -> bool:
    return _starts_upper(text) or bool(_HEADER_ENUM_RE.match(text.lstrip()))


def _violates_criteria(idx: int, records: list[_BodyLine],
                       stats: list[LineStats], cfg: HeaderConfig,
                       typicality: float) -> bool:
    s = stats[idx]
    text = records[idx].text
    if s.z_l > cfg.max_zl:
        return True
    if s.z_h < cfg.min_zh:
        return True
    if (abs(s.z_f) < typicality and abs(s.z_d) < typicality
            and abs(s.z_x) < typicality):
        return True
    dicts = load_dictionaries()
    lowered = text.strip().lower()
    if any(re.search(p, lowered) for p in dicts.caption_patterns):
        return True
    if any(ch in dicts.equation_chars for ch in text):
        return True
    solid = [c for c in text if not c.isspace()]
    if solid and sum(c.isalpha() for c in solid) < 0.5 * len(solid):
        return True
    if not _LETTER_RUN_RE.search(text):
        return True
    following = records[idx + 1:idx + 6]
    if following and not any(_starts_upper(r.text) for r in following):
        return True
    return False


def detect_first_header_lines(records: list[_BodyLine],
                              stats: list[LineStats],
                              cfg: HeaderConfig | None = None) -> list[int]:
    """Indices of the lines that open headers, in reading order."""
    cfg = cfg or HeaderConfig()
    candidates = {i for i, rec in enumerate(records)
                  if rec.first_in_zone and _matches_header_start(rec.text)}
    candidates = {i for i in candidates
                  if not _violates_criteria(i, records, stats, cfg,
                                            cfg.typicality)}
    font_counts = Counter(stats[i].font for i in candidates)
    header_fonts = {f for f, n in font_counts.items()
                    if n >= 3 and any(abs(stats[i].z_f) > cfg.font_outlier
                                      for i in candidates
                                      if stats[i].font == f)}
    for i, rec in enumerate(records):
        if stats[i].font in header_fonts and _matches_header_start(rec.text):
            candidates.add(i)
    candidates = {i for i in candidates
                  if not _violates_criteria(i, records, stats, cfg,
                                            cfg.soft_typicality)}
    return sorted(candidates)


def _similar_height(a: float, b: float) -> bool:
    if a == b:
        return True
    lo, hi = min(a, b), max(a, b)
    return hi > 0 and lo / hi >= SIMILAR_HEIGHT_RATIO


def extend_headers(first_lines: list[int], records: list[_BodyLine],
                   stats: list[LineStats]) -> list[list[int]]:
    """Grow each first header line into its full line group."""
    firsts = set(first_lines)
    groups: list[list[int]] = []
    for i in sorted(first_lines):
        followers: list[int] = []
        j = i + 1
        while j < len(records) and len(followers) < 3:
            if j in firsts:
                break
            if stats[j].font != stats[i].font:
                break
            if not _similar_height(stats[j].height, stats[i].height):
                break
            followers.append(j)
            j += 1
        group = [i]
        if followers:
            last = followers[-1]
            nxt = last + 1 if last + 1 < len(records) else None
            conditions = [
                stats[last].length < SIMILAR_HEIGHT_RATIO * stats[i].length,
                nxt is not None and abs(stats[last].x - stats[nxt].x)
                > INDENT_DIFFERENCE,
                nxt is not None and _starts_upper(records[nxt].text),
                nxt is not None and stats[nxt].font != stats[last].font,
            ]
            if sum(conditions) >= 2:
                group += followers
        groups.append(group)
    return groups


def _header_clusters(groups: list[list[int]],
                     stats: list[LineStats]) -> list[int]:
    """Greedy style clusters over the first lines, in appearance order."""
    reps: list[tuple[int, float]] = []  # (font, height) per cluster
    assignment = []
    for group in groups:
        s = stats[group[0]]
        for ci, (font, height) in enumerate(reps):
            if s.font == font and _similar_height(s.height, height):
                assignment.append(ci)
                break
        else:
            assignment.append(len(reps))
            reps.append((s.font, s.height))
    return assignment


def _header_levels(groups: list[list[int]],
                   stats: list[LineStats]) -> list[tuple[list[int], int]]:
    """(group, level) pairs after cluster-based level assignment."""
    clusters = _header_clusters(groups, stats)
    kept = [(g, c) for g, c in zip(groups, clusters) if c < 3]
    if not kept:
        return []
    top = kept[0][1]
    spans: list[list[tuple[list[int], int]]] = []
    for g, c in kept:
        if c == top or not spans:
            spans.append([])
        spans[-1].append((g, c))
    out: list[tuple[list[int], int]] = []
    for span in spans:
        second = span[1][1] if len(span) > 1 else None
        for pos, (g, c) in enumerate(span):
            if pos == 0 and c == top:
                out.append((g, 1))
            elif c == second:
                out.append((g, 2))
            else:
                out.append((g, 3 if c != top else 1))
    return out


def build_section_hierarchy(groups: list[list[int]], records: list[_BodyLine],
                            stats: list[LineStats]) -> list[SectionNode]:
    """Assemble the section tree and distribute content lines."""
    if not records:
        return []
    leveled = _header_levels(groups, stats)
    header_of: dict[int, int] = {}
    for gi, (group, _) in enumerate(leveled):
        for idx in group:
            header_of[idx] = gi

    roots: list[SectionNode] = []
    last: dict[int, SectionNode] = {}
    current: SectionNode | None = None
    pending: list[str] = []

    def flush_content() -> None:
        nonlocal pending, current
        if not pending:
            return
        text = normalize_ligatures(join_hyphenated(pending))
        if current is None:
            node = SectionNode(level=1, title="", content=text)
            roots.append(node)
            last[1] = node
        else:
            if current.content:
                current.content += "\n" + text
            else:
                current.content = text
        pending = []

    i = 0
    while i < len(records):
        gi = header_of.get(i)
        if gi is None or leveled[gi][0][0] != i:
            if gi is None:
                pending.append(records[i].text)
            i += 1
            continue
        flush_content()
        group, level = leveled[gi]
        title = normalize_ligatures(
            join_hyphenated([records[j].text for j in group]))
        node = SectionNode(level=level, title=title)
        parent = None
        for up in range(level - 1, 0, -1):
            if up in last:
                parent = last[up]
                break
        if parent is None and level > 1:
            node = SectionNode(level=1, title=title)
            level = 1
        if level == 1:
            roots.append(node)
        else:
            parent.children.append(node)
        last[level] = node
        for deeper in range(level + 1, 4):
            last.pop(deeper, None)
        current = node
        i = max(group) + 1
    flush_content()
    return roots


def extract_body(doc: Document, body_model: SvmModel | None = None
                 ) -> list[SectionNode]:
    """Full body path: content filtering, headers, hierarchy, cleaning."""
    if body_model is not None:
        doc = classify_zones(doc, body_model, "body")
    records = _collect_body_lines(doc)
    if not records:
        return []
    stats = compute_line_zscores(records)
    firsts = detect_first_header_lines(records, stats)
    groups = extend_headers(firsts, records, stats)
    return build_section_hierarchy(groups, records, stats)

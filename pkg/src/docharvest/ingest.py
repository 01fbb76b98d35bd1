"""Character-dump ingest and cleaning.

The extraction pipeline starts from a flat per-page list of characters
with boxes and font names ("chardump").  Before segmentation the dump
is cleaned: characters outside the page are dropped, exact duplicates
are removed, and on implausibly dense pages the characters inside any
over-dense window are discarded.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field, replace
from typing import IO

from .errors import ParseError
from .geom import BoundingBox, Character, _need

logger = logging.getLogger(__name__)

# Box coordinates closer than this are considered equal when deduplicating.
DUPLICATE_TOLERANCE = 1e-6


@dataclass
class CharDumpPage:
    width: float
    height: float
    chars: list[Character] = field(default_factory=list)


@dataclass
class CharDump:
    pages: list[CharDumpPage] = field(default_factory=list)
    fonts: list[str] = field(default_factory=list)


@dataclass
class CleaningConfig:
    """Thresholds for the density-based cleanup.

    Densities are characters per square point.  The window is square,
    ``window`` points on a side, stepped by ``step`` points.
    """

    window: float = 50.0
    step: float = 25.0
    max_window_density: float = 0.15
    max_page_density: float = 0.012


def load_chardump(source: str | bytes | IO) -> CharDump:
    """Parse chardump-json.  Font names are interned to integer ids."""
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    try:
        data = json.loads(source)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e.msg}", f"offset {e.pos}") from None
    if not isinstance(data, dict):
        raise ParseError("chardump must be a JSON object", "$")

    fonts: list[str] = []
    font_ids: dict[str, int] = {}
    pages = []
    for pi, pd in enumerate(_need(data, "pages", list, "$")):
        ppath = f"$.pages[{pi}]"
        width = _need(pd, "width", float, ppath)
        height = _need(pd, "height", float, ppath)
        if width <= 0 or height <= 0:
            raise ParseError("page size must be positive", ppath)
        chars = []
        for ci, cd in enumerate(_need(pd, "chars", list, ppath)):
            cpath = f"{ppath}.chars[{ci}]"
            text = _need(cd, "t", str, cpath)
            if not text:
                raise ParseError("character with empty text", cpath)
            fname = _need(cd, "font", str, cpath)
            if fname not in font_ids:
                font_ids[fname] = len(fonts)
                fonts.append(fname)
            box = BoundingBox(
                _need(cd, "x1", float, cpath),
                _need(cd, "y1", float, cpath),
                _need(cd, "x2", float, cpath),
                _need(cd, "y2", float, cpath),
            )
            if box.x1 > box.x2 or box.y1 > box.y2:
                raise ParseError("inverted character box", cpath)
            chars.append(Character(text=text, box=box, font=font_ids[fname]))
        pages.append(CharDumpPage(width=width, height=height, chars=chars))
    return CharDump(pages=pages, fonts=fonts)


def store_chardump(dump: CharDump) -> bytes:
    pages = []
    for page in dump.pages:
        pages.append({
            "width": page.width,
            "height": page.height,
            "chars": [
                {"t": c.text, "x1": c.box.x1, "y1": c.box.y1,
                 "x2": c.box.x2, "y2": c.box.y2,
                 "font": dump.fonts[c.font] if 0 <= c.font < len(dump.fonts) else "unknown"}
                for c in page.chars
            ],
        })
    return json.dumps({"pages": pages}, ensure_ascii=False,
                      sort_keys=True).encode("utf-8")


def _inside_page(c: Character, width: float, height: float) -> bool:
    eps = DUPLICATE_TOLERANCE
    b = c.box
    return (b.x1 >= -eps and b.y1 >= -eps
            and b.x2 <= width + eps and b.y2 <= height + eps)


def _dedupe(chars: list[Character]) -> list[Character]:
    """Drop characters with the same text and box; first occurrence wins."""
    seen: set[tuple] = set()
    out = []
    for c in chars:
        key = (c.text,
               round(c.box.x1, 6), round(c.box.y1, 6),
               round(c.box.x2, 6), round(c.box.y2, 6))
        if key in seen:
            continue
        seen.add(key)
        out.append(c)
    return out


def _window_positions(extent: float, window: float, step: float) -> list[float]:
    """Window origins covering [0, extent], last window flush with the edge."""
    if extent <= window:
        return [0.0]
    positions = []
    pos = 0.0
    while pos + window < extent:
        positions.append(pos)
        pos += step
    positions.append(extent - window)
    return positions


def _drop_dense_windows(page: CharDumpPage, cfg: CleaningConfig) -> list[Character]:
    area = page.width * page.height
    if area <= 0 or len(page.chars) / area <= cfg.max_page_density:
        return page.chars
    window_area = cfg.window * cfg.window
    centers = [c.box.center for c in page.chars]
    doomed: set[int] = set()
    for wx in _window_positions(page.width, cfg.window, cfg.step):
        for wy in _window_positions(page.height, cfg.window, cfg.step):
            inside = [i for i, (cx, cy) in enumerate(centers)
                      if wx <= cx <= wx + cfg.window and wy <= cy <= wy + cfg.window]
            if inside and len(inside) / window_area > cfg.max_window_density:
                doomed.update(inside)
    if doomed:
        logger.warning("density cleanup removed %d characters", len(doomed))
    return [c for i, c in enumerate(page.chars) if i not in doomed]


def clean_characters(dump: CharDump, cfg: CleaningConfig | None = None) -> CharDump:
    """Remove out-of-page characters, duplicates, and over-dense regions.

    The operation is idempotent: running it on its own output changes
    nothing.
    """
    cfg = cfg or CleaningConfig()
    pages = []
    for page in dump.pages:
        chars = [c for c in page.chars if _inside_page(c, page.width, page.height)]
        chars = _dedupe(chars)
        page2 = replace(page, chars=chars)
        chars = _drop_dense_windows(page2, cfg)
        pages.append(CharDumpPage(width=page.width, height=page.height, chars=chars))
    return CharDump(pages=pages, fonts=list(dump.fonts))

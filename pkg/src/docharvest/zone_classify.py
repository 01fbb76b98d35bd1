"""Zone classification: features, feature selection, model selection.

Every zone is described by a canonical vector of 103 named features in
five groups (geometric, sequential, formatting, lexical, heuristic).
Classifiers are one-vs-one SVMs over a named subset of that schema;
three targets exist: the zone category (metadata / body / references /
other), the metadata label, and the body label.

Feature selection drops constant features, prunes one member of every
highly Pearson-correlated pair, ranks the rest by the Goodman-Kruskal
tau association with the labels, and can trace cross-validated F
against the number of kept features.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Sequence

import numpy as np

from .dictionaries import load_dictionaries
from .errors import ConfigError
from .geom import (BODY_LABELS, CATEGORIES, METADATA_LABELS, Document, Page,
                   Zone, replace_zone_annotations)
from .svm import (KernelSpec, SvmModel, train_multiclass_svm)
from .textutil import DOI_RE, EMAIL_RE, YEAR_RE

_MONTHS = ("january", "february", "march", "april", "may", "june", "july",
           "august", "september", "october", "november", "december",
           "jan", "feb", "mar", "apr", "jun", "jul", "aug", "sep", "sept",
           "oct", "nov", "dec")

_ACK_TERMS = ("acknowledgment", "acknowledgments", "acknowledgement",
              "acknowledgements", "funding", "grant", "grants", "supported")
_ABSTRACT_TERMS = ("abstract", "summary")
_KEYWORD_TERMS = ("keywords", "keyword")
_DATE_TERMS = _MONTHS + ("received", "accepted", "revised", "published")
_REFERENCE_TERMS = ("references", "bibliography", "cited")
_CORRESPONDENCE_TERMS = ("corresponding", "correspondence", "email", "tel",
                         "fax", "phone")
_COPYRIGHT_TERMS = ("copyright", "©", "rights")
_ISSN_TERMS = ("issn", "isbn")
_FIGURE_TERMS = ("figure", "fig")
_TABLE_TERMS = ("table", "tab")
_EQUATION_TERMS = ("equation", "eq")
_PAGE_PHRASES = ("pp", "pages")
_VOLUME_PHRASES = ("vol", "volume")
_ISSUE_PHRASES = ("no", "issue", "number")

_ENUM_RE = re.compile(r"^\s*(\[\d+\]|\(\d+\)|\d+(\.\d+)*\.?)(\s|$)")
_BULLET_RE = re.compile(r"^\s*[•–—-]\s")
_URL_RE = re.compile(r"https?://|www\.", re.IGNORECASE)

_PUNCT = set(".,;:!?()[]{}\"'`-/–—‘’“”")
_BRACKETS = set("()[]{}")
_QUOTES = set("\"'‘’“”`")


def _names(prefix: str, items: Sequence[str]) -> list[str]:
    return [f"{prefix}_{x}" for x in items]


GEOMETRIC_FEATURES = _names("geo", [
    "height", "width", "aspect_ratio", "rel_height", "rel_width",
    "area_frac", "x_center_rel", "y_center_rel", "x_left_rel", "y_top_rel",
    "x_right_rel", "y_bottom_rel", "at_page_top", "at_page_bottom",
    "in_left_half", "in_right_half", "nearest_zone_gap", "space_above",
    "space_below", "mean_line_height", "mean_line_gap",
    "mean_line_width_ratio", "mean_line_indent", "line_alignment_spread",
])

SEQUENTIAL_FEATURES = _names("seq", [
    "prev_metadata", "prev_body", "prev_references", "prev_other",
    "prev_none", "first_page", "last_page", "page_index_rel",
    "repeated_on_adjacent_page", "zone_index_rel",
])

FORMATTING_FEATURES = _names("fmt", [
    "font_size_rel_doc", "font_size_rel_prev", "font_size_rel_next",
    "dominant_font_share", "distinct_font_count", "blank_space_frac",
    "mean_char_width", "max_char_height",
])

LEXICAL_FEATURES = _names("lex", [
    "affiliation_term", "acknowledgment_term", "abstract_term",
    "keywords_term", "dates_term", "references_term", "article_type_term",
    "correspondence_term", "email_present", "doi_present", "url_present",
    "page_phrase", "volume_phrase", "issue_phrase", "year_present",
    "copyright_term", "issn_term", "figure_term", "table_term",
    "equation_term", "country_term", "city_term", "enum_start",
    "bullet_start",
])

HEURISTIC_FEATURES = _names("heu", [
    "n_chars", "n_words", "n_lines", "mean_word_length",
    "mean_words_per_line", "digit_frac", "letter_frac", "upper_letter_frac",
    "lower_letter_frac", "punct_frac", "bracket_frac", "comma_frac",
    "dot_frac", "dash_frac", "slash_frac", "colon_frac", "semicolon_frac",
    "paren_frac", "quote_frac", "special_frac", "whitespace_frac",
    "uppercase_word_frac", "capitalized_word_frac", "digit_word_frac",
    "mixed_word_frac", "single_char_word_frac", "short_word_frac",
    "long_word_frac", "starts_uppercase", "all_caps_zone",
    "digits_only_zone", "letters_only_zone", "year_token_count",
    "number_token_count", "max_word_length", "first_line_word_count",
    "last_line_ends_dot",
])

CANONICAL_FEATURES: list[str] = (GEOMETRIC_FEATURES + SEQUENTIAL_FEATURES
                                 + FORMATTING_FEATURES + LEXICAL_FEATURES
                                 + HEURISTIC_FEATURES)

FEATURE_GROUPS = {
    "geometric": GEOMETRIC_FEATURES,
    "sequential": SEQUENTIAL_FEATURES,
    "formatting": FORMATTING_FEATURES,
    "lexical": LEXICAL_FEATURES,
    "heuristic": HEURISTIC_FEATURES,
}

_INDEX = {name: i for i, name in enumerate(CANONICAL_FEATURES)}

CLASSIFIER_TARGETS = ("category", "metadata", "body")


def _norm_text(text: str) -> str:
    return "".join(ch for ch in text.lower() if ch.isalnum())


@dataclass
class DocumentContext:
    """Per-document precomputations shared by all zone extractions."""

    doc: Document
    page_zone_texts: list[set[str]] = field(default_factory=list)
    doc_mean_char_height: float = 0.0

    @classmethod
    def build(cls, doc: Document) -> "DocumentContext":
        texts = [{_norm_text(z.text) for z in page.zones} for page in doc.pages]
        heights = [c.box.height for c in doc.chars()]
        mean_h = float(np.mean(heights)) if heights else 0.0
        return cls(doc=doc, page_zone_texts=texts, doc_mean_char_height=mean_h)


def _zone_mean_char_height(zone: Zone) -> float:
    heights = [c.box.height for c in zone.chars()]
    return float(np.mean(heights)) if heights else 0.0


def _word_tokens(zone: Zone) -> list[str]:
    return [w.text for w in zone.words()]


def extract_zone_features(zone: Zone, page: Page, page_index: int,
                          zone_index: int, ctx: DocumentContext,
                          prev_category: str | None) -> np.ndarray:
    """Canonical 103-element feature vector for one zone."""
    dicts = load_dictionaries()
    out = np.zeros(len(CANONICAL_FEATURES))

    def put(name: str, value: float) -> None:
        out[_INDEX[name]] = float(value)

    box = zone.box
    pw, ph = page.width, page.height
    # -- geometric
    put("geo_height", box.height)
    put("geo_width", box.width)
    put("geo_aspect_ratio", box.height / box.width if box.width > 0 else 0.0)
    put("geo_rel_height", box.height / ph if ph > 0 else 0.0)
    put("geo_rel_width", box.width / pw if pw > 0 else 0.0)
    put("geo_area_frac", box.area / (pw * ph) if pw * ph > 0 else 0.0)
    cx, cy = box.center
    put("geo_x_center_rel", cx / pw if pw > 0 else 0.0)
    put("geo_y_center_rel", cy / ph if ph > 0 else 0.0)
    put("geo_x_left_rel", box.x1 / pw if pw > 0 else 0.0)
    put("geo_y_top_rel", box.y1 / ph if ph > 0 else 0.0)
    put("geo_x_right_rel", box.x2 / pw if pw > 0 else 0.0)
    put("geo_y_bottom_rel", box.y2 / ph if ph > 0 else 0.0)
    put("geo_at_page_top", box.y1 <= 0.15 * ph)
    put("geo_at_page_bottom", box.y2 >= 0.85 * ph)
    put("geo_in_left_half", cx < pw / 2)
    put("geo_in_right_half", cx >= pw / 2)
    others = [z for i, z in enumerate(page.zones) if i != zone_index]
    if others:
        gaps = []
        for oz in others:
            ox, oy = oz.box.center
            gaps.append(float(np.hypot(ox - cx, oy - cy)))
        put("geo_nearest_zone_gap", min(gaps))
    above = [oz.box.y2 for oz in others
             if oz.box.y2 <= box.y1 and oz.box.horizontal_overlap(box) > 0]
    put("geo_space_above", box.y1 - max(above) if above else box.y1)
    below = [oz.box.y1 for oz in others
             if oz.box.y1 >= box.y2 and oz.box.horizontal_overlap(box) > 0]
    put("geo_space_below", min(below) - box.y2 if below else ph - box.y2)
    lheights = [ln.box.height for ln in zone.lines]
    put("geo_mean_line_height", float(np.mean(lheights)))
    if len(zone.lines) > 1:
        lines_sorted = sorted(zone.lines, key=lambda ln: ln.box.y1)
        gaps = [max(0.0, b.box.y1 - a.box.y2)
                for a, b in zip(lines_sorted, lines_sorted[1:])]
        put("geo_mean_line_gap", float(np.mean(gaps)))
    if box.width > 0:
        put("geo_mean_line_width_ratio",
            float(np.mean([ln.box.width for ln in zone.lines])) / box.width)
    put("geo_mean_line_indent",
        float(np.mean([ln.box.x1 - box.x1 for ln in zone.lines])))
    put("geo_line_alignment_spread",
        float(np.std([ln.box.x1 for ln in zone.lines])))

    # -- sequential
    prev_name = prev_category if prev_category in CATEGORIES else "none"
    put(f"seq_prev_{prev_name}", 1.0)
    npages = len(ctx.doc.pages)
    put("seq_first_page", page_index == 0)
    put("seq_last_page", page_index == npages - 1)
    put("seq_page_index_rel", page_index / (npages - 1) if npages > 1 else 0.0)
    norm = _norm_text(zone.text)
    repeated = False
    for adj in (page_index - 1, page_index + 1):
        if 0 <= adj < npages and norm and norm in ctx.page_zone_texts[adj]:
            repeated = True
    put("seq_repeated_on_adjacent_page", repeated)
    nzones = len(page.zones)
    put("seq_zone_index_rel", zone_index / (nzones - 1) if nzones > 1 else 0.0)

    # -- formatting
    zh = _zone_mean_char_height(zone)
    put("fmt_font_size_rel_doc", zh - ctx.doc_mean_char_height)
    if zone_index > 0:
        put("fmt_font_size_rel_prev",
            zh - _zone_mean_char_height(page.zones[zone_index - 1]))
    if zone_index < nzones - 1:
        put("fmt_font_size_rel_next",
            zh - _zone_mean_char_height(page.zones[zone_index + 1]))
    fonts = [c.font for c in zone.chars()]
    counts = np.bincount(fonts) if fonts else np.array([0])
    put("fmt_dominant_font_share", counts.max() / len(fonts) if fonts else 0.0)
    put("fmt_distinct_font_count", len(set(fonts)))
    char_area = sum(c.box.area for c in zone.chars())
    put("fmt_blank_space_frac",
        max(0.0, 1.0 - char_area / box.area) if box.area > 0 else 0.0)
    widths = [c.box.width for c in zone.chars()]
    put("fmt_mean_char_width", float(np.mean(widths)) if widths else 0.0)
    put("fmt_max_char_height",
        max((c.box.height for c in zone.chars()), default=0.0))

    # -- lexical
    text = zone.text
    low = text.lower()
    words_lower = {w.lower() for w in _word_tokens(zone)}
    word_stems = {w.strip(".,;:()[]") for w in words_lower}

    def any_term(terms) -> bool:
        return any(t in word_stems or t in words_lower for t in terms)

    put("lex_affiliation_term",
        bool(word_stems & dicts.institution_words))
    put("lex_acknowledgment_term", any_term(_ACK_TERMS))
    put("lex_abstract_term", any_term(_ABSTRACT_TERMS))
    put("lex_keywords_term", any_term(_KEYWORD_TERMS) or "key words" in low)
    put("lex_dates_term", any_term(_DATE_TERMS))
    put("lex_references_term", any_term(_REFERENCE_TERMS))
    put("lex_article_type_term",
        any(t in low for t in dicts.article_types))
    put("lex_correspondence_term",
        any_term(_CORRESPONDENCE_TERMS) or "e-mail" in low)
    put("lex_email_present", bool(EMAIL_RE.search(text)))
    put("lex_doi_present", bool(DOI_RE.search(text)))
    put("lex_url_present", bool(_URL_RE.search(text)))
    put("lex_page_phrase", any_term(_PAGE_PHRASES))
    put("lex_volume_phrase", any_term(_VOLUME_PHRASES))
    put("lex_issue_phrase", any_term(_ISSUE_PHRASES))
    put("lex_year_present", bool(YEAR_RE.search(text)))
    put("lex_copyright_term", any_term(_COPYRIGHT_TERMS) or "©" in text)
    put("lex_issn_term", any_term(_ISSN_TERMS))
    put("lex_figure_term", any_term(_FIGURE_TERMS))
    put("lex_table_term", any_term(_TABLE_TERMS))
    put("lex_equation_term", any_term(_EQUATION_TERMS))
    put("lex_country_term", bool(word_stems & dicts.country_tokens))
    put("lex_city_term", bool(word_stems & dicts.cities))
    first_line_text = zone.lines[0].text if zone.lines else ""
    put("lex_enum_start", bool(_ENUM_RE.match(first_line_text)))
    put("lex_bullet_start", bool(_BULLET_RE.match(first_line_text)))

    # -- heuristic
    chars = [c.text for c in zone.chars()]
    joined = "".join(chars)
    n_chars = len(joined)
    words = _word_tokens(zone)
    n_words = len(words)
    n_lines = len(zone.lines)
    put("heu_n_chars", n_chars)
    put("heu_n_words", n_words)
    put("heu_n_lines", n_lines)
    put("heu_mean_word_length",
        float(np.mean([len(w) for w in words])) if words else 0.0)
    put("heu_mean_words_per_line", n_words / n_lines if n_lines else 0.0)
    if n_chars:
        letters = sum(1 for ch in joined if ch.isalpha())
        digits = sum(1 for ch in joined if ch.isdigit())
        put("heu_digit_frac", digits / n_chars)
        put("heu_letter_frac", letters / n_chars)
        if letters:
            put("heu_upper_letter_frac",
                sum(1 for ch in joined if ch.isalpha() and ch.isupper()) / letters)
            put("heu_lower_letter_frac",
                sum(1 for ch in joined if ch.isalpha() and ch.islower()) / letters)
        put("heu_punct_frac",
            sum(1 for ch in joined if ch in _PUNCT) / n_chars)
        put("heu_bracket_frac",
            sum(1 for ch in joined if ch in _BRACKETS) / n_chars)
        put("heu_comma_frac", joined.count(",") / n_chars)
        put("heu_dot_frac", joined.count(".") / n_chars)
        put("heu_dash_frac",
            sum(1 for ch in joined if ch in "-–—−") / n_chars)
        put("heu_slash_frac", joined.count("/") / n_chars)
        put("heu_colon_frac", joined.count(":") / n_chars)
        put("heu_semicolon_frac", joined.count(";") / n_chars)
        put("heu_paren_frac",
            sum(1 for ch in joined if ch in "()") / n_chars)
        put("heu_quote_frac",
            sum(1 for ch in joined if ch in _QUOTES) / n_chars)
        put("heu_special_frac",
            sum(1 for ch in joined
                if not ch.isalnum() and ch not in _PUNCT) / n_chars)
        spaces = sum(max(0, len(ln.words) - 1) for ln in zone.lines)
        put("heu_whitespace_frac", spaces / (n_chars + spaces))
        put("heu_starts_uppercase", joined[0].isalpha() and joined[0].isupper())
        put("heu_all_caps_zone",
            letters > 0 and all(ch.isupper() for ch in joined if ch.isalpha()))
        put("heu_digits_only_zone", digits == n_chars)
        put("heu_letters_only_zone", letters == n_chars)
    if words:
        put("heu_uppercase_word_frac",
            sum(1 for w in words if w.isalpha() and w == w.upper()) / n_words)
        put("heu_capitalized_word_frac",
            sum(1 for w in words if w[:1].isupper()) / n_words)
        put("heu_digit_word_frac",
            sum(1 for w in words if w.isdigit()) / n_words)
        put("heu_mixed_word_frac",
            sum(1 for w in words
                if any(c.isdigit() for c in w) and any(c.isalpha() for c in w))
            / n_words)
        put("heu_single_char_word_frac",
            sum(1 for w in words if len(w) == 1) / n_words)
        put("heu_short_word_frac",
            sum(1 for w in words if len(w) <= 3) / n_words)
        put("heu_long_word_frac",
            sum(1 for w in words if len(w) >= 8) / n_words)
        put("heu_year_token_count",
            sum(1 for w in words if re.fullmatch(r"(19|20)\d{2}", w)))
        put("heu_number_token_count", sum(1 for w in words if w.isdigit()))
        put("heu_max_word_length", max(len(w) for w in words))
    put("heu_first_line_word_count",
        len(zone.lines[0].words) if zone.lines else 0)
    put("heu_last_line_ends_dot",
        bool(zone.lines) and zone.lines[-1].text.rstrip().endswith("."))
    return out


def document_zone_features(doc: Document,
                           prev_categories: Sequence[str | None] | None = None
                           ) -> tuple[np.ndarray, list[Zone]]:
    """Canonical feature matrix for every zone of a document in order.

    ``prev_categories`` supplies the previous-zone category per zone
    (reading order, page-local); when omitted the zones' own annotated
    categories are chained, which is what training on ground truth
    needs.
    """
    ctx = DocumentContext.build(doc)
    rows = []
    zones = []
    flat_index = 0
    for pi, page in enumerate(doc.pages):
        prev: str | None = None
        for zi, zone in enumerate(page.zones):
            if prev_categories is not None:
                prev_cat = prev_categories[flat_index]
            else:
                prev_cat = prev
            rows.append(extract_zone_features(zone, page, pi, zi, ctx, prev_cat))
            zones.append(zone)
            prev = zone.category
            flat_index += 1
    matrix = np.vstack(rows) if rows else np.zeros((0, len(CANONICAL_FEATURES)))
    return matrix, zones


def subset_features(matrix: np.ndarray, names: Sequence[str]) -> np.ndarray:
    """Select named columns from a canonical matrix."""
    try:
        idx = [_INDEX[n] for n in names]
    except KeyError as e:
        raise ConfigError(f"unknown feature name {e.args[0]!r}") from None
    return matrix[:, idx]


# --- feature selection -------------------------------------------------------

def goodman_kruskal_tau(feature: np.ndarray, labels: Sequence[str],
                        max_categories: int = 10) -> float:
    """Association of a feature with the labels, in [0, 1].

    Continuous features (more than ``max_categories`` distinct values)
    are bucketed into deciles first.  Returns 0 when the labels do not
    vary.
    """
    feature = np.asarray(feature, dtype=np.float64)
    labels = np.asarray(labels)
    values = np.unique(feature)
    if len(values) > max_categories:
        edges = np.quantile(feature, np.linspace(0.1, 0.9, 9))
        cats = np.searchsorted(edges, feature, side="right")
    else:
        cats = np.searchsorted(values, feature)

    n = len(labels)
    _, label_idx = np.unique(labels, return_inverse=True)
    pi = np.bincount(label_idx) / n
    v_l = 1.0 - float(np.sum(pi * pi))
    if v_l == 0.0:
        return 0.0
    expected = 0.0
    for cat in np.unique(cats):
        mask = cats == cat
        p_s = mask.sum() / n
        sub = np.bincount(label_idx[mask]) / mask.sum()
        expected += p_s * (1.0 - float(np.sum(sub * sub)))
    return (v_l - expected) / v_l


@dataclass
class SelectionReport:
    kept: list[str]
    ranked: list[str]                       # kept features, best tau first
    tau: dict[str, float]
    dropped_constant: list[str] = field(default_factory=list)
    dropped_correlated: list[tuple[str, str, float]] = field(default_factory=list)
    curve: list[tuple[int, float]] = field(default_factory=list)


def _pearson_prune(x: np.ndarray, names: list[str], threshold: float
                   ) -> tuple[list[int], list[tuple[str, str, float]]]:
    """Iteratively drop one member of the most correlated pair."""
    alive = list(range(len(names)))
    dropped = []
    while len(alive) > 1:
        sub = x[:, alive]
        corr = np.corrcoef(sub, rowvar=False)
        np.fill_diagonal(corr, 0.0)
        abs_corr = np.abs(corr)
        best = np.unravel_index(int(np.argmax(abs_corr)), abs_corr.shape)
        if abs_corr[best] <= threshold:
            break
        i, j = sorted(best)
        mean_i = float(abs_corr[i].mean())
        mean_j = float(abs_corr[j].mean())
        # Drop the feature more correlated with everything else; on a
        # tie keep the earlier one.
        victim = j if mean_j >= mean_i else i
        keeper = i if victim == j else j
        dropped.append((names[alive[victim]], names[alive[keeper]],
                        float(corr[i, j])))
        del alive[victim]
    return alive, dropped


def select_features(x: np.ndarray, y: Sequence[str],
                    names: Sequence[str] | None = None,
                    corr_threshold: float = 0.9,
                    compute_curve: bool = False,
                    folds: int = 5, seed: int = 0,
                    curve_kernel: KernelSpec | None = None,
                    curve_c: float = 1.0) -> SelectionReport:
    """Constant-feature drop, correlation pruning, tau ranking, and an
    optional cross-validated F curve over the ranked prefix sizes."""
    x = np.asarray(x, dtype=np.float64)
    if names is None:
        names = [f"f{i}" for i in range(x.shape[1])]
    names = list(names)

    variances = x.var(axis=0)
    keep = [i for i in range(x.shape[1]) if variances[i] > 0.0]
    dropped_constant = [names[i] for i in range(x.shape[1]) if variances[i] == 0.0]

    sub_names = [names[i] for i in keep]
    alive_local, dropped_corr = _pearson_prune(x[:, keep], sub_names,
                                               corr_threshold)
    kept_idx = [keep[i] for i in alive_local]

    tau = {names[i]: goodman_kruskal_tau(x[:, i], y) for i in kept_idx}
    ranked = sorted((names[i] for i in kept_idx),
                    key=lambda n: (-tau[n], names.index(n)))

    curve: list[tuple[int, float]] = []
    if compute_curve and ranked:
        kernel = curve_kernel or KernelSpec(kind="linear")
        name_to_idx = {n: i for i, n in enumerate(names)}
        for count in range(1, len(ranked) + 1):
            cols = [name_to_idx[n] for n in ranked[:count]]
            score = cross_val_f(x[:, cols], y, curve_c, kernel,
                                folds=folds, seed=seed)
            curve.append((count, score))

    return SelectionReport(kept=[names[i] for i in kept_idx], ranked=ranked,
                           tau=tau, dropped_constant=dropped_constant,
                           dropped_correlated=dropped_corr, curve=curve)


# --- model selection ---------------------------------------------------------

def mean_f_over_classes(y_true: Sequence[str], y_pred: Sequence[str],
                        labels: Sequence[str] | None = None) -> float:
    """Mean F over classes; a class with zero precision+recall scores 0."""
    if labels is None:
        labels = sorted(set(y_true))
    total = 0.0
    for lab in labels:
        tp = sum(1 for t, p in zip(y_true, y_pred) if t == lab and p == lab)
        npred = sum(1 for p in y_pred if p == lab)
        ntrue = sum(1 for t in y_true if t == lab)
        p = tp / npred if npred else 0.0
        r = tp / ntrue if ntrue else 0.0
        total += (2 * p * r / (p + r)) if (p + r) > 0 else 0.0
    return total / len(labels) if labels else 0.0


def stratified_folds(y: Sequence[str], folds: int, seed: int = 0) -> list[np.ndarray]:
    """Deterministic stratified fold assignment (round-robin per class)."""
    rng = np.random.default_rng(seed)
    assignment = np.zeros(len(y), dtype=int)
    y = np.asarray(y)
    for label in sorted(set(y.tolist())):
        idx = np.nonzero(y == label)[0]
        rng.shuffle(idx)
        for pos, sample in enumerate(idx):
            assignment[sample] = pos % folds
    return [np.nonzero(assignment == f)[0] for f in range(folds)]


def cross_val_f(x: np.ndarray, y: Sequence[str], c: float, kernel: KernelSpec,
                folds: int = 5, seed: int = 0) -> float:
    """Mean over folds of the mean per-class F."""
    y = list(y)
    fold_idx = stratified_folds(y, folds, seed)
    labels = sorted(set(y))
    scores = []
    for val in fold_idx:
        if len(val) == 0:
            continue
        val_set = set(val.tolist())
        train = np.array([i for i in range(len(y)) if i not in val_set])
        y_train = [y[i] for i in train]
        if len(set(y_train)) < 2:
            scores.append(0.0)
            continue
        model = train_multiclass_svm(x[train], y_train, c, kernel)
        pred = model.predict(x[val])
        truth = [y[i] for i in val]
        present = [lab for lab in labels if lab in truth]
        scores.append(mean_f_over_classes(truth, pred, present))
    return float(np.mean(scores)) if scores else 0.0


def _powers(lo: int, hi: int) -> tuple[float, ...]:
    return tuple(2.0 ** i for i in range(lo, hi + 1))


@dataclass
class GridSearchSpec:
    """Search space; the defaults span the full reference grid."""

    c_values: tuple[float, ...] = _powers(-5, 15)
    gamma_values: tuple[float, ...] = _powers(-15, 3)
    coef0_values: tuple[float, ...] = (-100.0, -10.0, -1.0, 0.0, 1.0, 10.0, 100.0)
    degree_values: tuple[int, ...] = (2, 3, 4)
    kernels: tuple[str, ...] = ("linear", "polynomial", "rbf", "sigmoid")
    folds: int = 5
    seed: int = 0

    def points(self):
        for kind in self.kernels:
            if kind == "linear":
                for c in self.c_values:
                    yield c, KernelSpec(kind="linear")
            elif kind == "polynomial":
                for d, g, r, c in itertools.product(
                        self.degree_values, self.gamma_values,
                        self.coef0_values, self.c_values):
                    yield c, KernelSpec(kind="polynomial", gamma=g, coef0=r, degree=d)
            elif kind == "rbf":
                for g, c in itertools.product(self.gamma_values, self.c_values):
                    yield c, KernelSpec(kind="rbf", gamma=g)
            elif kind == "sigmoid":
                for g, r, c in itertools.product(
                        self.gamma_values, self.coef0_values, self.c_values):
                    yield c, KernelSpec(kind="sigmoid", gamma=g, coef0=r)
            else:
                raise ConfigError(f"unknown kernel {kind!r}")


@dataclass
class GridPoint:
    c: float
    kernel: KernelSpec
    mean_f: float


@dataclass
class GridSearchReport:
    points: list[GridPoint]
    best: GridPoint


def grid_search(x: np.ndarray, y: Sequence[str],
                spec: GridSearchSpec | None = None) -> GridSearchReport:
    """Evaluate every grid point by stratified cross-validation and
    return all scores plus the best point (first wins ties)."""
    spec = spec or GridSearchSpec()
    x = np.asarray(x, dtype=np.float64)
    points = []
    best = None
    for c, kernel in spec.points():
        score = cross_val_f(x, y, c, kernel, folds=spec.folds, seed=spec.seed)
        point = GridPoint(c=c, kernel=kernel, mean_f=score)
        points.append(point)
        if best is None or score > best.mean_f:
            best = point
    if best is None:
        raise ConfigError("empty grid")
    return GridSearchReport(points=points, best=best)


# Reference kernel configurations used when no search is requested.
DEFAULT_SVM_PARAMS: dict[str, tuple[float, KernelSpec]] = {
    "category": (2.0 ** 5, KernelSpec(kind="rbf", gamma=2.0 ** -2)),
    "metadata": (2.0 ** -4, KernelSpec(kind="polynomial", gamma=1.0,
                                       coef0=0.0, degree=3)),
    "body": (2.0 ** 3, KernelSpec(kind="polynomial", gamma=2.0 ** -3,
                                  coef0=1.0, degree=4)),
}


def load_default_schema(target: str) -> list[str]:
    """Feature subset shipped for a classifier target."""
    if target not in CLASSIFIER_TARGETS:
        raise ConfigError(f"unknown classifier target {target!r}")
    path = resources.files("docharvest").joinpath("data/schemas", f"{target}.json")
    return json.loads(path.read_text(encoding="utf-8"))


# --- training and application ------------------------------------------------

def _zone_target_rows(doc: Document, target: str) -> list[tuple[int, str | None]]:
    """Flat zone indices participating in a target, with gold labels."""
    rows = []
    flat = 0
    for page in doc.pages:
        for zone in page.zones:
            if target == "category":
                rows.append((flat, zone.category))
            elif target == "metadata":
                if zone.category == "metadata":
                    rows.append((flat, zone.label))
            elif target == "body":
                if zone.category == "body":
                    rows.append((flat, zone.label))
            flat += 1
    return rows


def train_zone_classifier(docs: Sequence[Document], target: str, c: float,
                          kernel: KernelSpec,
                          schema: Sequence[str] | None = None) -> SvmModel:
    """Fit a zone classifier on ground-annotated documents."""
    if target not in CLASSIFIER_TARGETS:
        raise ConfigError(f"unknown classifier target {target!r}")
    if schema is None:
        schema = load_default_schema(target)
    xs, ys = [], []
    for doc in docs:
        matrix, _ = document_zone_features(doc)
        for flat, label in _zone_target_rows(doc, target):
            if label is None:
                continue
            xs.append(matrix[flat])
            ys.append(label)
    if not xs:
        raise ConfigError(f"no labeled zones for target {target!r}")
    x = subset_features(np.vstack(xs), schema)
    return train_multiclass_svm(x, ys, c, kernel, feature_names=schema)


def classify_zones(doc: Document, model: SvmModel, target: str) -> Document:
    """Annotate zones with predicted categories or labels.

    The category pass feeds each prediction into the next zone's
    previous-label feature; the metadata and body passes only touch
    zones of the matching category.
    """
    if target not in CLASSIFIER_TARGETS:
        raise ConfigError(f"unknown classifier target {target!r}")
    ctx = DocumentContext.build(doc)
    pages = []
    for pi, page in enumerate(doc.pages):
        new_zones = []
        prev: str | None = None
        for zi, zone in enumerate(page.zones):
            if target == "category":
                vec = extract_zone_features(zone, page, pi, zi, ctx, prev)
                row = subset_features(vec[None, :], model.feature_names)
                category = model.predict(row)[0]
                new_zones.append(replace_zone_annotations(zone, category=category))
                prev = category
            else:
                wanted = "metadata" if target == "metadata" else "body"
                if zone.category == wanted:
                    vec = extract_zone_features(zone, page, pi, zi, ctx, prev)
                    row = subset_features(vec[None, :], model.feature_names)
                    label = model.predict(row)[0]
                    new_zones.append(replace_zone_annotations(zone, label=label))
                else:
                    new_zones.append(zone)
                prev = zone.category
        pages.append(Page(width=page.width, height=page.height, zones=new_zones))
    return Document(pages=pages, fonts=list(doc.fonts))

"""Scoring and statistics for extraction output.

Segmentation is scored by character-set equality of rebuilt words,
lines and zones against ground truth.  Record fields are compared with
per-category rules (normalized equality, token alignment similarity, or
token cosine), folded into per-document precision/recall/F with null
handling, and aggregated as means over the non-null values.  Paired
system comparisons use McNemar's test for single-valued categories and
the Wilcoxon signed-rank test for list-valued ones, with Bonferroni
correction across tests.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass

import numpy as np
from scipy.stats import binom, chi2, norm

from .errors import ConfigError, DocharvestError
from .geom import Document

# Declared thresholds: alignment similarity for title-like strings,
# token cosine for affiliation-like strings.
SW_THRESHOLD = 0.85
COSINE_THRESHOLD = 0.75

EXACT_BINOMIAL_LIMIT = 25   # below this, McNemar uses the exact test
EXACT_WILCOXON_LIMIT = 20   # below this, Wilcoxon enumerates sign flips


class IncomparableDocuments(DocharvestError):
    """The two documents do not contain the same characters."""


# --- segmentation ------------------------------------------------------------

def _char_key(char) -> tuple:
    return (char.text, round(char.box.x1, 6), round(char.box.y1, 6),
            round(char.box.x2, 6), round(char.box.y2, 6))


def _level_sets(doc: Document, level: str) -> list[frozenset]:
    out = []
    for page in doc.pages:
        for zone in page.zones:
            if level == "zone":
                out.append(frozenset(_char_key(c) for c in zone.chars()))
                continue
            for line in zone.lines:
                if level == "line":
                    out.append(frozenset(_char_key(c) for c in line.chars()))
                    continue
                for word in line.words:
                    out.append(frozenset(_char_key(c) for c in word.chars))
    return out


def segmentation_scores(ground: Document, test: Document) -> dict[str, float | None]:
    """Fraction of ground words/lines/zones rebuilt with the exact same
    character set.  Both documents must contain the same characters."""
    ground_chars = Counter(_char_key(c) for c in ground.chars())
    test_chars = Counter(_char_key(c) for c in test.chars())
    if ground_chars != test_chars:
        raise IncomparableDocuments("documents hold different character sets")
    scores: dict[str, float | None] = {}
    for level in ("word", "line", "zone"):
        truth = _level_sets(ground, level)
        if not truth:
            scores[level] = None
            continue
        built = set(_level_sets(test, level))
        correct = sum(1 for t in truth if t in built)
        scores[level] = correct / len(truth)
    return scores


# --- string comparison -------------------------------------------------------

def eval_tokens(text: str) -> list[str]:
    return re.findall(r"[a-z0-9]+", text.lower())


def smith_waterman_similarity(s1: list[str], s2: list[str]) -> float:
    """Best local alignment (match 1, mismatch -1, gap -1), normalized
    by the average sequence length."""
    if not s1 and not s2:
        return 1.0
    if not s1 or not s2:
        return 0.0
    rows, cols = len(s1), len(s2)
    h = np.zeros((rows + 1, cols + 1))
    best = 0.0
    for i in range(1, rows + 1):
        for j in range(1, cols + 1):
            match = 1.0 if s1[i - 1] == s2[j - 1] else -1.0
            h[i, j] = max(0.0, h[i - 1, j - 1] + match,
                          h[i - 1, j] - 1.0, h[i, j - 1] - 1.0)
            best = max(best, h[i, j])
    return 2.0 * best / (rows + cols)


def cosine_similarity(s1: list[str], s2: list[str]) -> float:
    if not s1 or not s2:
        return 1.0 if not s1 and not s2 else 0.0
    c1, c2 = Counter(s1), Counter(s2)
    dot = sum(c1[t] * c2[t] for t in c1.keys() & c2.keys())
    n1 = math.sqrt(sum(v * v for v in c1.values()))
    n2 = math.sqrt(sum(v * v for v in c2.values()))
    return dot / (n1 * n2)


def _alnum(text: str) -> str:
    return "".join(c for c in text.lower() if c.isalnum())


def _letters(text: str) -> str:
    return "".join(c for c in text.lower() if c.isalpha())


_EMAIL_PREFIX_RE = re.compile(r"^\s*(e[-\s]?mail|mail|email address)\s*[:.]?\s*",
                              re.IGNORECASE)


def _norm_email(text: str) -> str:
    text = _EMAIL_PREFIX_RE.sub("", text)
    return "".join(c for c in text.lower() if c.isalnum() or c == "@")


def _is_subsequence(needle: str, hay: str) -> bool:
    it = iter(hay)
    return all(c in it for c in needle)


def _eq_fuzzy_string(a: str, b: str) -> bool:
    if _alnum(a) == _alnum(b) and _alnum(a):
        return True
    return smith_waterman_similarity(eval_tokens(a), eval_tokens(b)) > SW_THRESHOLD


def _eq_keyword(a: str, b: str) -> bool:
    return a.strip().lower() == b.strip().lower()


def _eq_author(a: str, b: str) -> bool:
    return _letters(a) == _letters(b) and bool(_letters(a))


def _eq_cosine(a: str, b: str) -> bool:
    return cosine_similarity(eval_tokens(a), eval_tokens(b)) > COSINE_THRESHOLD


def _eq_email(a: str, b: str) -> bool:
    return _norm_email(a) == _norm_email(b) and bool(_norm_email(a))


def _eq_journal(extracted: str, truth: str) -> bool:
    needle = _letters(extracted)
    return bool(needle) and _is_subsequence(needle, _letters(truth))


def _eq_exact(a, b) -> bool:
    return bool(a) and a == b


def _eq_pages(a, b) -> bool:
    return (isinstance(a, (tuple, list)) and isinstance(b, (tuple, list))
            and len(a) == 2 and len(b) == 2
            and str(a[0]) == str(b[0]) and str(a[1]) == str(b[1]))


def _eq_relation_factory(eq_first, eq_second):
    def eq(a, b):
        return eq_first(a[0], b[0]) and eq_second(a[1], b[1])
    return eq


def _eq_header_level(a, b) -> bool:
    return a[0] == b[0] and _eq_fuzzy_string(a[1], b[1])


_COMPARATORS = {
    "title": _eq_fuzzy_string,
    "abstract": _eq_fuzzy_string,
    "keywords": _eq_keyword,
    "authors": _eq_author,
    "affiliations": _eq_cosine,
    "emails": _eq_email,
    "author_affiliation": _eq_relation_factory(_eq_author, _eq_cosine),
    "author_email": _eq_relation_factory(_eq_author, _eq_email),
    "journal": _eq_journal,
    "volume": _eq_exact,
    "issue": _eq_exact,
    "pages": _eq_pages,
    "year": _eq_exact,
    "doi": _eq_exact,
    "references": _eq_cosine,
    "headers": _eq_fuzzy_string,
    "header_levels": _eq_header_level,
}

EVAL_CATEGORIES = tuple(_COMPARATORS)


def compare_category(extracted: list, truth: list, category: str) -> int:
    """Size of the matched intersection; each truth item used once."""
    if category not in _COMPARATORS:
        raise ConfigError(f"unknown comparison category {category!r}")
    eq = _COMPARATORS[category]
    remaining = list(truth)
    matched = 0
    for item in extracted:
        for i, t in enumerate(remaining):
            if eq(item, t):
                matched += 1
                del remaining[i]
                break
    return matched


@dataclass
class Prf:
    precision: float | None
    recall: float | None
    f: float | None


def prf(truth: list, extracted: list, category: str) -> Prf:
    """Per-document scores with null cases for missing sides."""
    matched = compare_category(extracted, truth, category)
    p = None if not extracted else matched / len(extracted)
    r = None if not truth else matched / len(truth)
    if p is None and r is None:
        f = None
    elif p is None or r is None:
        f = 0.0
    elif p * r == 0:
        f = 0.0
    else:
        f = 2.0 / (1.0 / p + 1.0 / r)
    return Prf(p, r, f)


def aggregate_prf(scores: list[Prf]) -> Prf:
    """Mean over non-null values, independently per component."""
    def mean_of(values: list[float]) -> float | None:
        return sum(values) / len(values) if values else None
    return Prf(mean_of([s.precision for s in scores if s.precision is not None]),
               mean_of([s.recall for s in scores if s.recall is not None]),
               mean_of([s.f for s in scores if s.f is not None]))


# --- statistics --------------------------------------------------------------

def mcnemar(b: int, c: int) -> dict[str, float]:
    """Paired nominal test over discordant counts b and c."""
    n = b + c
    if n == 0:
        return {"statistic": 0.0, "p_value": 1.0}
    statistic = (abs(b - c) - 1) ** 2 / n
    if n < EXACT_BINOMIAL_LIMIT:
        p = min(1.0, 2.0 * float(binom.cdf(min(b, c), n, 0.5)))
    else:
        p = float(chi2.sf(statistic, 1))
    return {"statistic": statistic, "p_value": p}


def _rank_with_ties(values: list[float]) -> tuple[list[float], list[int]]:
    """Mid-ranks (1-based) and the tie-group sizes."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    tie_sizes = []
    i = 0
    while i < len(order):
        j = i
        while j < len(order) and values[order[j]] == values[order[i]]:
            j += 1
        mid = (i + 1 + j) / 2.0
        for k in range(i, j):
            ranks[order[k]] = mid
        tie_sizes.append(j - i)
        i = j
    return ranks, tie_sizes


def _exact_wilcoxon_p(ranks: list[float], w_plus: float) -> float:
    # Doubled ranks keep mid-ranks integral for the DP table.
    doubled = [round(2 * r) for r in ranks]
    total = sum(doubled)
    counts = np.zeros(total + 1, dtype=float)
    counts[0] = 1.0
    for d in doubled:
        shifted = np.zeros_like(counts)
        shifted[d:] = counts[:len(counts) - d]
        counts = counts + shifted
    counts /= counts.sum()
    w2 = round(2 * w_plus)
    lower = counts[:w2 + 1].sum()
    upper = counts[w2:].sum()
    return min(1.0, 2.0 * min(lower, upper))


def wilcoxon_signed_rank(diffs: list[float]) -> dict[str, float]:
    """Two-sided paired test; zero differences are dropped."""
    nonzero = [d for d in diffs if d != 0]
    if not nonzero:
        return {"W": 0.0, "p_value": 1.0}
    ranks, tie_sizes = _rank_with_ties([abs(d) for d in nonzero])
    w_plus = sum(r for r, d in zip(ranks, nonzero) if d > 0)
    n = len(nonzero)
    if n < EXACT_WILCOXON_LIMIT:
        p = _exact_wilcoxon_p(ranks, w_plus)
    else:
        mu = n * (n + 1) / 4.0
        var = n * (n + 1) * (2 * n + 1) / 24.0
        var -= sum(t ** 3 - t for t in tie_sizes) / 48.0
        z = (w_plus - mu) / math.sqrt(var)
        p = min(1.0, 2.0 * float(norm.sf(abs(z))))
    return {"W": w_plus, "p_value": p}


def bonferroni(alpha: float, m: int) -> float:
    if m < 1:
        raise ConfigError("number of tests must be at least 1")
    return alpha / m


def confusion_matrix(truth: list[str], predicted: list[str]) -> dict:
    """Rows are true labels, columns predicted; labels sorted."""
    if len(truth) != len(predicted):
        raise ConfigError("label sequences differ in length")
    labels = sorted(set(truth) | set(predicted))
    index = {lab: i for i, lab in enumerate(labels)}
    matrix = [[0] * len(labels) for _ in labels]
    for t, p in zip(truth, predicted):
        matrix[index[t]][index[p]] += 1
    total = len(truth)
    correct = sum(matrix[i][i] for i in range(len(labels)))
    return {"labels": labels, "matrix": matrix,
            "accuracy": correct / total if total else None}


# --- record comparison -------------------------------------------------------

def _section_titles(sections: list[dict], acc: list[tuple[int, str]]) -> None:
    for node in sections:
        if node.get("title"):
            acc.append((node.get("level", 1), node["title"]))
        _section_titles(node.get("children", []), acc)


def record_instances(record: dict, category: str) -> list:
    """Instances of a metadata category from a record-json dict."""
    front = record.get("front", {})
    if category in ("title", "abstract", "journal", "volume", "issue",
                    "year", "doi"):
        value = front.get(category)
        return [value] if value else []
    if category == "pages":
        value = front.get("pages")
        return [tuple(value)] if value else []
    if category == "keywords":
        return list(front.get("keywords", []))
    if category == "authors":
        return list(front.get("authors", []))
    if category == "emails":
        return list(front.get("emails", []))
    if category == "affiliations":
        return [a.get("raw", "") for a in front.get("affiliations", [])]
    if category == "author_affiliation":
        authors = front.get("authors", [])
        affs = [a.get("raw", "") for a in front.get("affiliations", [])]
        return [(authors[ai], affs[fi])
                for ai, fi in front.get("author_affiliation", [])
                if ai < len(authors) and fi < len(affs)]
    if category == "author_email":
        authors = front.get("authors", [])
        emails = front.get("emails", [])
        return [(authors[ai], emails[ei])
                for ai, ei in front.get("author_email", [])
                if ai < len(authors) and ei < len(emails)]
    if category == "references":
        return [r.get("raw", "") for r in record.get("back", [])]
    if category in ("headers", "header_levels"):
        pairs: list[tuple[int, str]] = []
        _section_titles(record.get("body", []), pairs)
        if category == "headers":
            return [title for _, title in pairs]
        return pairs
    raise ConfigError(f"unknown comparison category {category!r}")


def evaluate_records(truth_records: list[dict], extracted_records: list[dict],
                     categories: tuple[str, ...] = EVAL_CATEGORIES) -> dict:
    """Corpus-level report: per-category P/R/F means over non-null."""
    if len(truth_records) != len(extracted_records):
        raise ConfigError("truth and extracted record counts differ")
    report: dict = {"documents": len(truth_records), "categories": {}}
    for category in categories:
        per_doc = [prf(record_instances(t, category),
                       record_instances(e, category), category)
                   for t, e in zip(truth_records, extracted_records)]
        agg = aggregate_prf(per_doc)
        report["categories"][category] = {
            "precision": agg.precision, "recall": agg.recall, "f": agg.f,
            "documents_scored": sum(1 for s in per_doc if s.f is not None),
        }
    return report

#!/usr/bin/env python3
"""Regenerate the shipped per-target feature schemas.

Runs the selection pipeline (constant drop, correlation pruning at
|r| > 0.9, Goodman-Kruskal tau ranking) over a generated document
corpus and freezes the top-ranked prefix for each classifier target
into src/docharvest/data/schemas/<target>.json.

Usage: python3 scripts/build_default_schemas.py [--docs N] [--seed S]
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from docharvest.synth import generate_corpus
from docharvest.zone_classify import (CANONICAL_FEATURES, _zone_target_rows,
                                      document_zone_features, select_features)

# Shipped schema sizes, one per classifier target.
TARGET_SIZES = {"category": 54, "metadata": 53, "body": 63}

SCHEMA_DIR = Path(__file__).resolve().parent.parent / "src/docharvest/data/schemas"


def dataset(docs, target):
    xs, ys = [], []
    for doc in docs:
        matrix, _ = document_zone_features(doc)
        for flat, label in _zone_target_rows(doc, target):
            if label is None:
                continue
            xs.append(matrix[flat])
            ys.append(label)
    return np.vstack(xs), ys


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--docs", type=int, default=40)
    ap.add_argument("--seed", type=int, default=20)
    args = ap.parse_args()

    print(f"generating {args.docs} documents (seed {args.seed})")
    docs = [doc for _, doc, _ in generate_corpus(args.docs, args.seed)]
    SCHEMA_DIR.mkdir(parents=True, exist_ok=True)

    for target, size in TARGET_SIZES.items():
        x, y = dataset(docs, target)
        report = select_features(x, y, names=CANONICAL_FEATURES)
        print(f"{target}: {len(y)} zones, {len(set(y))} classes; "
              f"{len(report.dropped_constant)} constant, "
              f"{len(report.dropped_correlated)} correlated dropped, "
              f"{len(report.ranked)} survivors")
        if len(report.ranked) < size:
            print(f"  need {size} features but only {len(report.ranked)} "
                  "survive selection; enrich the corpus", file=sys.stderr)
            return 1
        schema = report.ranked[:size]
        out = SCHEMA_DIR / f"{target}.json"
        out.write_text(json.dumps(schema, indent=2) + "\n", encoding="utf-8")
        print(f"  wrote {out.relative_to(Path.cwd())} ({size} features, "
              f"tau range {report.tau[schema[0]]:.3f}..{report.tau[schema[-1]]:.3f})")
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Generator invariants: round-trips that must hold exactly.

Checks, per varied document:
  1. segmenting the character dump reproduces the ground truth
     geometry (line, word, and zone boxes);
  2. the ground document is a fixed point of reading-order resolution;
  3. front-matter assembly on true labels recovers the true record
     fields;
  4. body extraction on true labels recovers the section tree.
"""

import argparse
import sys

sys.path.insert(0, "src")

from docharvest.bib import extract_reference_strings
from docharvest.body import extract_body
from docharvest.ingest import clean_characters
from docharvest.metadata import assemble_front
from docharvest.reading_order import resolve_reading_order
from docharvest.segmenter import segment_document
from docharvest.synth import generate_corpus


def boxes(items):
    return sorted((round(i.box.x1, 4), round(i.box.y1, 4),
                   round(i.box.x2, 4), round(i.box.y2, 4)) for i in items)


def compare_geometry(doc, truth):
    errs = []
    for pi, (got, want) in enumerate(zip(doc.pages, truth.pages)):
        for kind, getter in (("zone", lambda p: p.zones),
                             ("line", lambda p: [ln for z in p.zones
                                                 for ln in z.lines]),
                             ("word", lambda p: [w for z in p.zones
                                                 for ln in z.lines
                                                 for w in ln.words])):
            g, w = boxes(getter(got)), boxes(getter(want))
            if g != w:
                matched = len(set(g) & set(w))
                errs.append(f"page {pi}: {kind} {matched}/{len(w)}")
    return errs


def front_errors(front, want):
    errs = []
    checks = {
        "title": front.title, "abstract": want["abstract"],
        "journal": front.journal, "volume": front.volume,
        "issue": front.issue, "year": front.year, "doi": front.doi,
    }
    if front.title != want["title"]:
        errs.append(f"title: {front.title!r} != {want['title']!r}")
    if front.abstract != want["abstract"]:
        errs.append("abstract mismatch")
    if front.keywords != want["keywords"]:
        errs.append(f"keywords: {front.keywords} != {want['keywords']}")
    for key in ("journal", "volume", "issue", "year", "doi"):
        if checks.get(key) is None or getattr(front, key) != want[key]:
            errs.append(f"{key}: {getattr(front, key)!r} != {want[key]!r}")
    if front.pages != tuple(want["pages"]):
        errs.append(f"pages: {front.pages} != {want['pages']}")
    if front.authors != want["authors"]:
        errs.append(f"authors: {front.authors} != {want['authors']}")
    if [a.raw for a in front.affiliations] != [a["raw"] for a in
                                               want["affiliations"]]:
        errs.append("affiliation raw mismatch")
    if front.author_affiliation != [tuple(r) for r in
                                    want["author_affiliation"]]:
        errs.append(f"relations: {front.author_affiliation} "
                    f"!= {want['author_affiliation']}")
    if front.emails != want["emails"]:
        errs.append(f"emails: {front.emails} != {want['emails']}")
    return errs


def tree_dicts(nodes):
    return [n.to_dict() for n in nodes]


def strip_content(nodes):
    return [{"level": n["level"], "title": n["title"],
             "children": strip_content(n["children"])} for n in nodes]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--docs", type=int, default=16)
    ap.add_argument("--seed", type=int, default=100)
    args = ap.parse_args()

    bad = 0
    for i, (dump, truth, record) in enumerate(
            generate_corpus(args.docs, seed=args.seed)):
        errs = []

        segmented = segment_document(clean_characters(dump), warnings=[])
        errs += compare_geometry(segmented, truth)

        ordered = resolve_reading_order(truth)
        for pi, (a, b) in enumerate(zip(ordered.pages, truth.pages)):
            got = [z.box for z in a.zones]
            want = [z.box for z in b.zones]
            if [(-1, b.x1, b.y1) for b in got] != [(-1, b.x1, b.y1)
                                                   for b in want]:
                errs.append(f"page {pi}: reading order not a fixed point")

        front = assemble_front(truth)
        errs += front_errors(front, record["front"])

        tree = tree_dicts(extract_body(truth))
        if tree != record["body"]:
            if strip_content(tree) == strip_content(record["body"]):
                errs.append("section contents mismatch (titles fine)")
            else:
                errs.append(f"section tree mismatch: "
                            f"{strip_content(tree)} != "
                            f"{strip_content(record['body'])}")

        refs = extract_reference_strings(truth)
        want_refs = [r["raw"] for r in record["back"]]
        if refs != want_refs:
            matched = sum(a == b for a, b in zip(refs, want_refs))
            errs.append(f"references: {matched}/{len(want_refs)} exact "
                        f"(split into {len(refs)})")

        if errs:
            bad += 1
            print(f"doc {i}: FAIL")
            for e in errs[:6]:
                print(f"   {e}")
        else:
            print(f"doc {i}: ok")
    print(f"{args.docs - bad}/{args.docs} documents clean")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())

"""Command-line surface: extraction, training, generation, evaluation.

Exit codes: 0 success, 2 unusable input, 3 unusable models bundle,
4 internal stage failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path
from typing import Sequence

from .errors import DocharvestError, StageError
from .evaluation import EVAL_CATEGORIES, evaluate_records
from .geom import load_model, store_model
from .ingest import clean_characters, load_chardump, store_chardump
from .pipeline import (EMIT_FORMATS, emit, extract, load_bundle,
                       reference_to_dict, resolve_models_path, save_bundle,
                       train_bundle)
from .reading_order import resolve_reading_order
from .segmenter import segment_document
from .svm import KernelSpec, save_svm_model
from .synth import (SynthSpec, generate_affiliation_corpus,
                    generate_citation_corpus, generate_corpus,
                    generate_synthetic, varied_spec)
from .token_parsers import (TokenParser, clean_reference, parse_affiliation,
                            parse_citation, save_token_parser,
                            train_token_parser)
from .zone_classify import (CLASSIFIER_TARGETS, DEFAULT_SVM_PARAMS,
                            train_zone_classifier)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_MODELS = 3
EXIT_STAGE = 4


class _Fail(Exception):
    def __init__(self, code: int, message: str):
        self.code = code
        self.message = message
        super().__init__(message)


# --- small IO helpers --------------------------------------------------------

def _read_bytes(path: str) -> bytes:
    try:
        if path == "-":
            return sys.stdin.buffer.read()
        return Path(path).read_bytes()
    except OSError as e:
        raise _Fail(EXIT_INPUT, f"cannot read {path}: {e}")


def _write_bytes(path: str, data: bytes) -> None:
    try:
        if path == "-":
            sys.stdout.buffer.write(data)
            sys.stdout.buffer.flush()
        else:
            Path(path).write_bytes(data)
    except OSError as e:
        raise _Fail(EXIT_INPUT, f"cannot write {path}: {e}")


def _write_json(path: str, data) -> None:
    text = json.dumps(data, ensure_ascii=False, indent=2, sort_keys=True)
    _write_bytes(path, (text + "\n").encode("utf-8"))


def _load_records(path: str) -> list[dict]:
    """Record list from a JSON array file or JSON-lines file."""
    raw = _read_bytes(path).decode("utf-8")
    stripped = raw.lstrip()
    try:
        if stripped.startswith("["):
            records = json.loads(raw)
        else:
            records = [json.loads(line) for line in raw.splitlines()
                       if line.strip()]
    except json.JSONDecodeError as e:
        raise _Fail(EXIT_INPUT, f"unreadable records in {path}: {e}")
    if not isinstance(records, list):
        raise _Fail(EXIT_INPUT, f"{path} does not hold a list of records")
    return records


def _load_extract_input(path: str, skip_segmentation: bool):
    raw = _read_bytes(path)
    try:
        if skip_segmentation:
            return load_model(raw)
        return load_chardump(raw)
    except DocharvestError as e:
        raise _Fail(EXIT_INPUT, str(e))


def _load_models(path_arg: str | None):
    try:
        return load_bundle(resolve_models_path(path_arg))
    except (DocharvestError, OSError) as e:
        raise _Fail(EXIT_MODELS, str(e))


def _ground_documents(paths: Sequence[str]):
    """Annotated documents from model-json files or directories of them."""
    files: list[Path] = []
    for p in paths:
        path = Path(p)
        if path.is_dir():
            found = sorted(path.glob("*.model.json")) or sorted(path.glob("*.json"))
            if not found:
                raise _Fail(EXIT_INPUT, f"no model-json files under {path}")
            files.extend(found)
        else:
            files.append(path)
    docs = []
    for f in files:
        raw = _read_bytes(str(f))
        try:
            docs.append(load_model(raw))
        except DocharvestError as e:
            raise _Fail(EXIT_INPUT, f"{f}: {e}")
    return docs


def _parser_from_args(args, task: str):
    if getattr(args, "parser", None):
        raw = _read_bytes(args.parser)
        try:
            return TokenParser.from_dict(json.loads(raw))
        except (json.JSONDecodeError, KeyError, ValueError) as e:
            raise _Fail(EXIT_MODELS, f"unusable parser file: {e}")
    bundle = _load_models(args.models)
    return getattr(bundle, task)


# --- commands ----------------------------------------------------------------

def cmd_extract(args) -> int:
    source = _load_extract_input(args.input, args.skip_segmentation)
    bundle = _load_models(args.models)
    try:
        record = extract(source, bundle)
    except StageError as e:
        raise _Fail(EXIT_STAGE, str(e))
    _write_bytes(args.out, emit(record, args.format))
    return EXIT_OK


def cmd_segment(args) -> int:
    raw = _read_bytes(args.input)
    try:
        dump = load_chardump(raw)
    except DocharvestError as e:
        raise _Fail(EXIT_INPUT, str(e))
    warnings: list[str] = []
    doc = resolve_reading_order(
        segment_document(clean_characters(dump), warnings=warnings))
    _write_bytes(args.out, store_model(doc))
    for note in warnings:
        print(f"docharvest: {note}", file=sys.stderr)
    return EXIT_OK


def cmd_train_svm(args) -> int:
    docs = _ground_documents(args.docs)
    default_c, default_kernel = DEFAULT_SVM_PARAMS[args.target]
    kernel = KernelSpec(
        kind=args.kernel or default_kernel.kind,
        gamma=args.gamma if args.gamma is not None else default_kernel.gamma,
        coef0=args.coef0 if args.coef0 is not None else default_kernel.coef0,
        degree=args.degree if args.degree is not None else default_kernel.degree)
    c = args.c if args.c is not None else default_c
    schema = None
    if args.schema:
        schema = json.loads(_read_bytes(args.schema).decode("utf-8"))
    model = train_zone_classifier(docs, args.target, c, kernel, schema=schema)
    save_svm_model(model, args.out)
    return EXIT_OK


def cmd_train_crf(args) -> int:
    if args.synthetic:
        if args.task == "affiliation":
            corpus = generate_affiliation_corpus(args.synthetic, args.seed)
        else:
            corpus = generate_citation_corpus(args.synthetic, args.seed)
        samples = [(item.text, item.labels) for item in corpus]
    elif args.data:
        rows = _load_records(args.data)
        try:
            samples = [(row["text"], row["labels"]) for row in rows]
        except (TypeError, KeyError):
            raise _Fail(EXIT_INPUT,
                        "training rows need 'text' and 'labels' fields")
    else:
        raise _Fail(EXIT_INPUT, "pass --data or --synthetic N")
    parser, report = train_token_parser(args.task, samples,
                                        sigma2=args.sigma2,
                                        max_epochs=args.max_epochs)
    save_token_parser(parser, args.out)
    final = report.objective[-1] if report.objective else float("nan")
    print(f"trained {args.task} parser on {len(samples)} strings "
          f"({report.epochs} epochs, final objective {final:.3f})")
    return EXIT_OK


def cmd_train_bundle(args) -> int:
    corpus = generate_corpus(args.docs, args.seed)
    docs = [doc for _, doc, _ in corpus]
    affs = generate_affiliation_corpus(args.affiliations, args.seed + 1)
    cits = generate_citation_corpus(args.citations, args.seed + 2)
    bundle = train_bundle(
        docs,
        [(a.text, a.labels) for a in affs],
        [(c.text, c.labels) for c in cits],
        max_epochs=args.max_epochs,
        info={"trained_on": "synthetic", "seed": args.seed,
              "documents": args.docs, "affiliations": args.affiliations,
              "citations": args.citations})
    save_bundle(bundle, args.out)
    print(f"models bundle written to {args.out}")
    return EXIT_OK


def cmd_parse_citation(args) -> int:
    parser = _parser_from_args(args, "citation")
    try:
        ref = clean_reference(parse_citation(args.text, parser))
    except DocharvestError as e:
        raise _Fail(EXIT_INPUT, str(e))
    if args.format == "bibtex":
        _write_bytes(args.out, emit({"back": [reference_to_dict(ref)]},
                                    "bibtex-refs"))
    else:
        _write_json(args.out, reference_to_dict(ref))
    return EXIT_OK


def cmd_parse_affiliation(args) -> int:
    parser = _parser_from_args(args, "affiliation")
    try:
        parsed = parse_affiliation(args.text, parser)
    except DocharvestError as e:
        raise _Fail(EXIT_INPUT, str(e))
    _write_json(args.out, {
        "raw": parsed.raw, "institution": parsed.institution,
        "address": parsed.address, "country": parsed.country,
        "country_iso": parsed.country_iso,
    })
    return EXIT_OK


def cmd_evaluate(args) -> int:
    truth = _load_records(args.truth)
    extracted = _load_records(args.extracted)
    categories = EVAL_CATEGORIES
    if args.categories:
        categories = tuple(name.strip() for name in args.categories.split(","))
    try:
        report = evaluate_records(truth, extracted, categories)
    except DocharvestError as e:
        raise _Fail(EXIT_INPUT, str(e))
    _write_json(args.report, report)
    return EXIT_OK


def cmd_synth(args) -> int:
    base = None
    if args.spec:
        raw = _read_bytes(args.spec).decode("utf-8")
        try:
            base = SynthSpec.from_dict(json.loads(raw))
        except (json.JSONDecodeError, DocharvestError) as e:
            raise _Fail(EXIT_INPUT, f"bad generator spec: {e}")
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for i in range(args.count):
        if args.vary:
            spec = varied_spec(args.seed + i, base)
        else:
            spec = replace(base) if base else SynthSpec()
            spec.seed = args.seed + i
        dump, doc, record = generate_synthetic(spec)
        stem = out_dir / f"doc-{i:03d}"
        _write_bytes(f"{stem}.chardump.json", store_chardump(dump))
        _write_bytes(f"{stem}.model.json", store_model(doc))
        _write_json(f"{stem}.record.json", record)
    print(f"{args.count} document(s) written under {out_dir}")
    return EXIT_OK


# --- argument parsing ---------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="docharvest",
        description="Structured metadata, body, and bibliography "
                    "extraction from positioned-character documents.")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="run the full pipeline on one document")
    p.add_argument("--in", dest="input", required=True,
                   help="chardump json (or model json with --skip-segmentation); - for stdin")
    p.add_argument("--out", default="-", help="output path; - for stdout")
    p.add_argument("--format", choices=EMIT_FORMATS, default="record-json")
    p.add_argument("--models", default=None,
                   help="models bundle directory (default: $DOCHARVEST_MODELS)")
    p.add_argument("--skip-segmentation", action="store_true",
                   help="input is already a segmented model-json document")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("segment", help="segment a chardump into a model-json document")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_segment)

    train = sub.add_parser("train", help="fit models").add_subparsers(
        dest="train_command", required=True)

    p = train.add_parser("svm", help="fit one zone classifier")
    p.add_argument("--target", choices=CLASSIFIER_TARGETS, required=True)
    p.add_argument("--docs", nargs="+", required=True,
                   help="annotated model-json files or directories")
    p.add_argument("--out", required=True)
    p.add_argument("--c", type=float, default=None)
    p.add_argument("--kernel", choices=("linear", "polynomial", "rbf", "sigmoid"),
                   default=None)
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--coef0", type=float, default=None)
    p.add_argument("--degree", type=int, default=None)
    p.add_argument("--schema", default=None,
                   help="json list of feature names to train on")
    p.set_defaults(func=cmd_train_svm)

    p = train.add_parser("crf", help="fit one token parser")
    p.add_argument("--task", choices=("affiliation", "citation"), required=True)
    p.add_argument("--data", default=None,
                   help="json/jsonl rows with 'text' and 'labels'")
    p.add_argument("--synthetic", type=int, default=0,
                   help="train on N template-generated strings instead")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--sigma2", type=float, default=10.0)
    p.add_argument("--max-epochs", type=int, default=200)
    p.set_defaults(func=cmd_train_crf)

    p = train.add_parser("bundle",
                         help="fit all five models on generated documents")
    p.add_argument("--out", required=True)
    p.add_argument("--docs", type=int, default=12)
    p.add_argument("--affiliations", type=int, default=400)
    p.add_argument("--citations", type=int, default=600)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-epochs", type=int, default=150)
    p.set_defaults(func=cmd_train_bundle)

    p = sub.add_parser("parse-citation", help="parse one reference string")
    p.add_argument("--text", required=True)
    p.add_argument("--models", default=None)
    p.add_argument("--parser", default=None, help="a single saved parser file")
    p.add_argument("--format", choices=("json", "bibtex"), default="json")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_parse_citation)

    p = sub.add_parser("parse-affiliation", help="parse one affiliation string")
    p.add_argument("--text", required=True)
    p.add_argument("--models", default=None)
    p.add_argument("--parser", default=None)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_parse_affiliation)

    p = sub.add_parser("evaluate", help="score extracted records against truth")
    p.add_argument("--truth", required=True)
    p.add_argument("--extracted", required=True)
    p.add_argument("--report", default="-")
    p.add_argument("--categories", default=None,
                   help="comma-separated subset of comparison categories")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("synth", help="generate seeded test documents")
    p.add_argument("--out", required=True)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--spec", default=None, help="generator options as json")
    p.add_argument("--vary", action="store_true",
                   help="vary layout knobs per document")
    p.set_defaults(func=cmd_synth)

    return top


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _Fail as e:
        print(f"docharvest: {e.message}", file=sys.stderr)
        return e.code
    except StageError as e:
        print(f"docharvest: {e}", file=sys.stderr)
        return EXIT_STAGE
    except DocharvestError as e:
        print(f"docharvest: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

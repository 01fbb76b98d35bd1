"""End-to-end extraction: characters in, one structured record out.

The pipeline chains cleaning, page segmentation, reading order
resolution, zone categorization, and three per-category extraction
paths (front matter, body sections, bibliography).  The paths are
independent: each consumes only zones of its own category, so
disabling one cannot change the others' output.

Trained models travel as a bundle directory (three zone classifiers,
two token parsers, a manifest) shared read-only by any number of
pipeline runs.
"""

from __future__ import annotations

import json
import os
import xml.etree.ElementTree as ET
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .bib import extract_bibliography
from .body import SectionNode, extract_body
from .errors import ConfigError, DocharvestError, StageError
from .geom import Document
from .ingest import CharDump, clean_characters
from .metadata import DocumentFront, assemble_front
from .reading_order import resolve_reading_order
from .segmenter import SegmenterConfig, segment_document
from .svm import SvmModel, load_svm_model, save_svm_model
from .token_parsers import (ParsedReference, TokenParser, load_token_parser,
                            save_token_parser, train_token_parser)
from .zone_classify import (DEFAULT_SVM_PARAMS, classify_zones,
                            train_zone_classifier)

MODELS_ENV_VAR = "DOCHARVEST_MODELS"
BUNDLE_FORMAT = "docharvest-models"
BUNDLE_VERSION = 1
EMIT_FORMATS = ("record-json", "jats-xml", "bibtex-refs")
EXTRACTION_PATHS = ("front", "body", "back")

_BUNDLE_FILES = {
    "category": "category.svm.json",
    "metadata": "metadata.svm.json",
    "body": "body.svm.json",
    "affiliation": "affiliation.crf.json",
    "citation": "citation.crf.json",
}


# --- document record ---------------------------------------------------------

@dataclass
class DocumentRecord:
    """Everything extracted from one document; every field may be empty."""

    front: DocumentFront = field(default_factory=DocumentFront)
    body: list[SectionNode] = field(default_factory=list)
    back: list[ParsedReference] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "front": front_to_dict(self.front),
            "body": [node.to_dict() for node in self.body],
            "back": [reference_to_dict(ref) for ref in self.back],
            "warnings": list(self.warnings),
        }


def front_to_dict(front: DocumentFront) -> dict:
    return {
        "title": front.title,
        "authors": list(front.authors),
        "affiliations": [{
            "raw": a.raw, "institution": a.institution, "address": a.address,
            "country": a.country, "country_iso": a.country_iso,
        } for a in front.affiliations],
        "author_affiliation": [list(pair) for pair in front.author_affiliation],
        "emails": list(front.emails),
        "author_email": [list(pair) for pair in front.author_email],
        "abstract": front.abstract,
        "keywords": list(front.keywords),
        "journal": front.journal,
        "volume": front.volume,
        "issue": front.issue,
        "pages": list(front.pages) if front.pages else None,
        "year": front.year,
        "doi": front.doi,
    }


def reference_to_dict(ref: ParsedReference) -> dict:
    return {
        "raw": ref.raw,
        "authors": [list(pair) for pair in ref.authors],
        "title": ref.title,
        "source": ref.source,
        "volume": ref.volume,
        "issue": ref.issue,
        "pages": list(ref.pages) if ref.pages else None,
        "year": ref.year,
        "doi": ref.doi,
        "type": ref.type,
    }


# --- models bundle -----------------------------------------------------------

@dataclass
class ModelsBundle:
    """The five trained models one extraction run needs."""

    category: SvmModel
    metadata: SvmModel
    body: SvmModel
    affiliation: TokenParser
    citation: TokenParser
    info: dict = field(default_factory=dict)


def save_bundle(bundle: ModelsBundle, path: str | Path) -> None:
    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)
    save_svm_model(bundle.category, str(root / _BUNDLE_FILES["category"]))
    save_svm_model(bundle.metadata, str(root / _BUNDLE_FILES["metadata"]))
    save_svm_model(bundle.body, str(root / _BUNDLE_FILES["body"]))
    save_token_parser(bundle.affiliation, str(root / _BUNDLE_FILES["affiliation"]))
    save_token_parser(bundle.citation, str(root / _BUNDLE_FILES["citation"]))
    manifest = {
        "format": BUNDLE_FORMAT,
        "version": BUNDLE_VERSION,
        "files": dict(_BUNDLE_FILES),
        "info": dict(bundle.info),
    }
    with open(root / "manifest.json", "w", encoding="utf-8") as f:
        json.dump(manifest, f, sort_keys=True, indent=2)
        f.write("\n")


def load_bundle(path: str | Path) -> ModelsBundle:
    root = Path(path)
    manifest_path = root / "manifest.json"
    if not manifest_path.is_file():
        raise ConfigError(f"no models manifest at {manifest_path}")
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigError(f"unreadable models manifest: {e}") from e
    if manifest.get("format") != BUNDLE_FORMAT:
        raise ConfigError(f"not a models bundle: {root}")
    if int(manifest.get("version", 0)) > BUNDLE_VERSION:
        raise ConfigError(f"models bundle version {manifest['version']} "
                          f"is newer than supported ({BUNDLE_VERSION})")
    files = manifest.get("files", _BUNDLE_FILES)
    loaded: dict = {}
    for key, default_name in _BUNDLE_FILES.items():
        file_path = root / files.get(key, default_name)
        if not file_path.is_file():
            raise ConfigError(f"models bundle misses {file_path.name}")
        try:
            if key in ("category", "metadata", "body"):
                loaded[key] = load_svm_model(str(file_path))
            else:
                loaded[key] = load_token_parser(str(file_path))
        except (json.JSONDecodeError, KeyError, ValueError) as e:
            raise ConfigError(f"corrupt model file {file_path.name}: {e}") from e
    return ModelsBundle(info=manifest.get("info", {}), **loaded)


def resolve_models_path(explicit: str | None = None) -> str:
    """Pick the bundle directory: explicit argument, then environment."""
    if explicit:
        return explicit
    env = os.environ.get(MODELS_ENV_VAR)
    if env:
        return env
    raise ConfigError(
        f"no models bundle given: pass --models or set {MODELS_ENV_VAR}")


def train_bundle(docs: Sequence[Document],
                 affiliation_samples: Sequence[tuple[str, Sequence[str]]],
                 citation_samples: Sequence[tuple[str, Sequence[str]]],
                 svm_params: dict | None = None,
                 sigma2: float = 10.0, max_epochs: int = 200,
                 info: dict | None = None) -> ModelsBundle:
    """Fit all five models from annotated documents and labeled strings."""
    params = dict(DEFAULT_SVM_PARAMS)
    if svm_params:
        params.update(svm_params)
    classifiers = {target: train_zone_classifier(docs, target, c, kernel)
                   for target, (c, kernel) in params.items()}
    affiliation, _ = train_token_parser("affiliation", affiliation_samples,
                                        sigma2=sigma2, max_epochs=max_epochs)
    citation, _ = train_token_parser("citation", citation_samples,
                                     sigma2=sigma2, max_epochs=max_epochs)
    return ModelsBundle(category=classifiers["category"],
                        metadata=classifiers["metadata"],
                        body=classifiers["body"],
                        affiliation=affiliation, citation=citation,
                        info=info or {})


# --- extraction --------------------------------------------------------------

@contextmanager
def _stage(name: str):
    """Convert any stage failure into a StageError naming the stage."""
    try:
        yield
    except StageError:
        raise
    except DocharvestError as e:
        raise StageError(name, str(e)) from e
    except Exception as e:
        raise StageError(name, f"{type(e).__name__}: {e}") from e


def extract(source: CharDump | Document, bundle: ModelsBundle,
            segmenter_config: SegmenterConfig | None = None,
            paths: Sequence[str] = EXTRACTION_PATHS) -> DocumentRecord:
    """Run the full pipeline on a character dump or a segmented document.

    A Document input skips cleaning and segmentation.  ``paths``
    selects which extraction paths run; a skipped path leaves its
    record field empty.
    """
    unknown = set(paths) - set(EXTRACTION_PATHS)
    if unknown:
        raise ConfigError(f"unknown extraction paths {sorted(unknown)}")
    record = DocumentRecord()
    if isinstance(source, Document):
        doc = source
    else:
        with _stage("clean"):
            source = clean_characters(source)
        with _stage("segment"):
            doc = segment_document(source, segmenter_config,
                                   warnings=record.warnings)
    with _stage("reading-order"):
        doc = resolve_reading_order(doc)
    with _stage("classify-category"):
        doc = classify_zones(doc, bundle.category, "category")
    if "front" in paths:
        with _stage("front"):
            labeled = classify_zones(doc, bundle.metadata, "metadata")
            record.front = assemble_front(labeled, bundle.affiliation)
    if "body" in paths:
        with _stage("body"):
            record.body = extract_body(doc, bundle.body)
    if "back" in paths:
        with _stage("back"):
            record.back = extract_bibliography(doc, bundle.citation)
    return record


# --- output formats ----------------------------------------------------------

def emit(record: DocumentRecord | dict, format: str = "record-json") -> bytes:
    """Serialize a record (or its dict form) to one of the output formats."""
    data = record.to_dict() if isinstance(record, DocumentRecord) else record
    if format == "record-json":
        text = json.dumps(data, ensure_ascii=False, indent=2, sort_keys=True)
        return (text + "\n").encode("utf-8")
    if format == "jats-xml":
        return _emit_jats(data)
    if format == "bibtex-refs":
        return _emit_bibtex(data)
    raise ConfigError(f"unknown output format {format!r}")


def _sub(parent: ET.Element, tag: str, text: str | None = None,
         **attrs: str) -> ET.Element:
    elem = ET.SubElement(parent, tag, dict(attrs))
    if text is not None:
        elem.text = text
    return elem


def _jats_front(front: dict, parent: ET.Element) -> None:
    journal_meta = _sub(parent, "journal-meta")
    if front.get("journal"):
        group = _sub(journal_meta, "journal-title-group")
        _sub(group, "journal-title", front["journal"])
    meta = _sub(parent, "article-meta")
    if front.get("doi"):
        _sub(meta, "article-id", front["doi"], **{"pub-id-type": "doi"})
    if front.get("title"):
        _sub(_sub(meta, "title-group"), "article-title", front["title"])

    authors = front.get("authors", [])
    aff_of_author: dict[int, list[int]] = {}
    for ai, fi in front.get("author_affiliation", []):
        aff_of_author.setdefault(ai, []).append(fi)
    emails = front.get("emails", [])
    email_of_author: dict[int, list[int]] = {}
    for ai, ei in front.get("author_email", []):
        email_of_author.setdefault(ai, []).append(ei)
    if authors:
        contribs = _sub(meta, "contrib-group")
        for ai, name in enumerate(authors):
            contrib = _sub(contribs, "contrib", **{"contrib-type": "author"})
            _sub(contrib, "string-name", name)
            for fi in sorted(aff_of_author.get(ai, [])):
                _sub(contrib, "xref", **{"ref-type": "aff", "rid": f"aff{fi}"})
            for ei in sorted(email_of_author.get(ai, [])):
                if ei < len(emails):
                    _sub(contrib, "email", emails[ei])
    for fi, aff in enumerate(front.get("affiliations", [])):
        _sub(meta, "aff", aff.get("raw", ""), id=f"aff{fi}")
    linked = {ei for pairs in email_of_author.values() for ei in pairs}
    loose = [e for ei, e in enumerate(emails) if ei not in linked]
    if loose:
        corresp = _sub(_sub(meta, "author-notes"), "corresp")
        for email in loose:
            _sub(corresp, "email", email)
    if front.get("year"):
        _sub(_sub(meta, "pub-date"), "year", front["year"])
    if front.get("volume"):
        _sub(meta, "volume", front["volume"])
    if front.get("issue"):
        _sub(meta, "issue", front["issue"])
    pages = front.get("pages")
    if pages:
        _sub(meta, "fpage", pages[0])
        _sub(meta, "lpage", pages[1])
    if front.get("abstract"):
        _sub(_sub(meta, "abstract"), "p", front["abstract"])
    keywords = front.get("keywords", [])
    if keywords:
        group = _sub(meta, "kwd-group")
        for kwd in keywords:
            _sub(group, "kwd", kwd)


def _jats_section(node: dict, parent: ET.Element) -> None:
    sec = _sub(parent, "sec")
    _sub(sec, "title", node.get("title", ""))
    if node.get("content"):
        _sub(sec, "p", node["content"])
    for child in node.get("children", []):
        _jats_section(child, sec)


def _emit_jats(data: dict) -> bytes:
    article = ET.Element("article")
    front = ET.SubElement(article, "front")
    _jats_front(data.get("front", {}), front)
    body = ET.SubElement(article, "body")
    for node in data.get("body", []):
        _jats_section(node, body)
    back = ET.SubElement(article, "back")
    ref_list = ET.SubElement(back, "ref-list")
    for i, ref in enumerate(data.get("back", []), start=1):
        holder = _sub(ref_list, "ref", id=f"ref{i}")
        _sub(holder, "mixed-citation", ref.get("raw", ""))
    tree = ET.ElementTree(article)
    ET.indent(tree, space="  ")
    return ET.tostring(article, encoding="utf-8", xml_declaration=True) + b"\n"


_BIBTEX_KINDS = {
    "conference proceedings": "inproceedings",
    "technical report": "techreport",
}


def _emit_bibtex(data: dict) -> bytes:
    entries = []
    for i, ref in enumerate(data.get("back", []), start=1):
        kind = _BIBTEX_KINDS.get(ref.get("type") or "", "article")
        source_field = {"inproceedings": "booktitle",
                        "techreport": "institution"}.get(kind, "journal")
        fields: list[tuple[str, str]] = []
        names = [", ".join(part for part in (surname, given) if part)
                 for given, surname in ref.get("authors", [])]
        names = [n for n in names if n]
        if names:
            fields.append(("author", " and ".join(names)))
        if ref.get("title"):
            fields.append(("title", ref["title"]))
        if ref.get("source"):
            fields.append((source_field, ref["source"]))
        if ref.get("volume"):
            fields.append(("volume", ref["volume"]))
        if ref.get("issue"):
            fields.append(("number", ref["issue"]))
        if ref.get("pages"):
            fields.append(("pages", "--".join(ref["pages"])))
        if ref.get("year"):
            fields.append(("year", ref["year"]))
        if ref.get("doi"):
            fields.append(("doi", ref["doi"]))
        body = ",\n".join(f"  {name} = {{{value}}}" for name, value in fields)
        entries.append(f"@{kind}{{ref{i},\n{body}\n}}\n")
    return "\n".join(entries).encode("utf-8")

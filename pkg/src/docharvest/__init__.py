"""Extraction of structured metadata, body sections, and references
from positioned-character renderings of scholarly documents."""

__version__ = "0.1.0"

from .bib import extract_bibliography, extract_reference_strings
from .body import SectionNode, extract_body
from .errors import (ConfigError, DocharvestError, InvalidModel, ParseError,
                     StageError)
from .geom import (BoundingBox, Character, Document, Line, Page, Word, Zone,
                   load_model, store_model, validate_document)
from .ingest import (CharDump, CharDumpPage, CleaningConfig, clean_characters,
                     load_chardump, store_chardump)
from .metadata import DocumentFront, assemble_front
from .pipeline import (DocumentRecord, ModelsBundle, emit, extract,
                       load_bundle, save_bundle, train_bundle)
from .reading_order import resolve_reading_order
from .segmenter import SegmenterConfig, segment_document, segment_page
from .synth import SynthSpec, generate_corpus, generate_synthetic
from .token_parsers import (ParsedAffiliation, ParsedReference, TokenParser,
                            parse_affiliation, parse_citation,
                            train_token_parser)
from .zone_classify import classify_zones, select_features, train_zone_classifier

__all__ = [
    "BoundingBox", "Character", "CharDump", "CharDumpPage", "CleaningConfig",
    "ConfigError", "DocharvestError", "Document", "DocumentFront",
    "DocumentRecord", "InvalidModel", "Line", "ModelsBundle", "Page",
    "ParseError", "ParsedAffiliation", "ParsedReference", "SectionNode",
    "SegmenterConfig", "StageError", "SynthSpec", "TokenParser", "Word",
    "Zone", "assemble_front", "classify_zones", "clean_characters", "emit",
    "extract", "extract_bibliography", "extract_body",
    "extract_reference_strings", "generate_corpus", "generate_synthetic",
    "load_bundle", "load_chardump", "load_model", "parse_affiliation",
    "parse_citation", "resolve_reading_order", "save_bundle",
    "segment_document", "segment_page", "select_features", "store_chardump",
    "store_model", "train_bundle", "train_token_parser",
    "train_zone_classifier", "validate_document",
]

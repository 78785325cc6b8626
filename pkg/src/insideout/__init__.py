"""Insider threat modeling for BPMN 2.0 business process diagrams.

Workflow: parse a diagram, extract its human-interaction assets, pair them
with catalog threats filtered by security objectives, triage the candidates
with accept/reject verdicts, and export the accepted threat model as JSON,
Markdown, or an SVG overlay.
"""

from .bpmn import (
    ANALYZABLE_KINDS,
    AnalyzableAsset,
    Bounds,
    BpmnError,
    DuplicateId,
    ElementKind,
    LaneRecord,
    MalformedXml,
    NotBpmn,
    ProcessElement,
    ProcessModel,
    extract_assets,
    parse_bpmn,
    serialize_model,
)
from .catalog import (
    ALL_PRINCIPLES,
    CatalogError,
    DuplicateThreat,
    EmptyMapping,
    EmptyObjectives,
    Finding,
    KnowledgeBase,
    SchemaViolation,
    SecurityPrinciple,
    ThreatSpec,
    load_knowledge_base,
    parse_principle,
    query,
    resolve_catalog_path,
    seed_catalog_path,
    validate_catalog,
    validate_catalog_data,
)
from .engine import (
    AcceptedThreat,
    CandidateThreat,
    Decision,
    EngineError,
    MissingRationale,
    Objectives,
    Session,
    SessionSummary,
    StaleCatalog,
    ThreatModel,
    UnknownCandidate,
    Verdict,
    apply_script,
    decide,
    finalize,
    identify,
    load_session,
    objectives_from_names,
    save_session,
    start_session,
    summarize,
)
from .report import (
    DEFAULT_COLOR_SCALE,
    ColorBucket,
    ColorScale,
    ReportDocument,
    SerializationFailure,
    build_report,
    export_json,
    export_markdown,
    export_svg_overlay,
    installed_version,
    report_from_json,
)

__version__ = installed_version()

__all__ = [
    "ANALYZABLE_KINDS",
    "ALL_PRINCIPLES",
    "AcceptedThreat",
    "AnalyzableAsset",
    "Bounds",
    "BpmnError",
    "CandidateThreat",
    "CatalogError",
    "ColorBucket",
    "ColorScale",
    "DEFAULT_COLOR_SCALE",
    "Decision",
    "DuplicateId",
    "DuplicateThreat",
    "ElementKind",
    "EmptyMapping",
    "EmptyObjectives",
    "EngineError",
    "Finding",
    "KnowledgeBase",
    "LaneRecord",
    "MalformedXml",
    "MissingRationale",
    "NotBpmn",
    "Objectives",
    "ProcessElement",
    "ProcessModel",
    "ReportDocument",
    "SchemaViolation",
    "SecurityPrinciple",
    "SerializationFailure",
    "Session",
    "SessionSummary",
    "StaleCatalog",
    "ThreatModel",
    "ThreatSpec",
    "UnknownCandidate",
    "Verdict",
    "apply_script",
    "build_report",
    "decide",
    "export_json",
    "export_markdown",
    "export_svg_overlay",
    "extract_assets",
    "finalize",
    "identify",
    "installed_version",
    "load_knowledge_base",
    "load_session",
    "objectives_from_names",
    "parse_bpmn",
    "parse_principle",
    "query",
    "report_from_json",
    "resolve_catalog_path",
    "save_session",
    "seed_catalog_path",
    "serialize_model",
    "start_session",
    "summarize",
    "validate_catalog",
    "validate_catalog_data",
]

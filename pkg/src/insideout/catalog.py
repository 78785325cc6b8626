"""Threat catalog: YAML-backed knowledge base of insider threats, keyed by
security principle and by the element kinds a threat can enter through."""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Iterable

import yaml

from .bpmn import ANALYZABLE_KINDS, ElementKind


class CatalogError(Exception):
    """Base class for catalog failures."""


class SchemaViolation(CatalogError):
    """Catalog data does not match the expected schema."""


class DuplicateThreat(CatalogError):
    """Two catalog entries share an id or an abbreviation."""


class EmptyMapping(CatalogError):
    """A threat maps to no principle or no entry point."""


class EmptyObjectives(CatalogError):
    """A query or analysis was attempted with no security principles selected."""


class SecurityPrinciple(str, Enum):
    CONFIDENTIALITY = "Confidentiality"
    INTEGRITY = "Integrity"
    AVAILABILITY = "Availability"
    AUTHENTICITY = "Authenticity"
    ACCOUNTABILITY = "Accountability"


ALL_PRINCIPLES: frozenset[SecurityPrinciple] = frozenset(SecurityPrinciple)

_PRINCIPLE_BY_LOWER = {member.value.lower(): member for member in SecurityPrinciple}
_KIND_BY_LOWER = {kind.value.lower(): kind for kind in ElementKind}

# Send/receive tasks are interchangeable with message throw/catch events for
# catalog purposes: both model the same message surface.
_CANONICAL_KIND: dict[ElementKind, ElementKind] = {
    ElementKind.MESSAGE_CATCH_EVENT: ElementKind.RECEIVE_TASK,
    ElementKind.MESSAGE_THROW_EVENT: ElementKind.SEND_TASK,
}


def parse_principle(text: str) -> SecurityPrinciple:
    """Parse a principle name case-insensitively; raises ValueError."""
    member = _PRINCIPLE_BY_LOWER.get(text.strip().lower())
    if member is None:
        raise ValueError(f"unknown security principle {text!r}")
    return member


def canonical_kind(kind: ElementKind) -> ElementKind:
    return _CANONICAL_KIND.get(kind, kind)


@dataclass(frozen=True)
class ThreatSpec:
    """One catalog entry."""

    id: str
    abbreviation: str
    name: str
    description: str
    principles: frozenset[SecurityPrinciple]
    entry_points: frozenset[ElementKind]
    sources: tuple[str, ...]
    tags: tuple[str, ...] = ()
    provenance: str | None = None

    def applies_to(self, kind: ElementKind) -> bool:
        wanted = canonical_kind(kind)
        return any(canonical_kind(ep) == wanted for ep in self.entry_points)


@dataclass(frozen=True)
class KnowledgeBase:
    """Validated threat catalog plus the digest of the bytes it came from."""

    name: str
    schema_version: str
    threats: tuple[ThreatSpec, ...]
    source_digest: str

    def threat_by_id(self, threat_id: str) -> ThreatSpec | None:
        for threat in self.threats:
            if threat.id == threat_id:
                return threat
        return None


@dataclass(frozen=True)
class Finding:
    """One validation problem. ``rule`` names the error class the problem
    maps to when loading ("SchemaViolation", "DuplicateThreat", "EmptyMapping")."""

    rule: str
    message: str
    threat_id: str | None = None


_RULE_ERRORS: dict[str, type[CatalogError]] = {
    "SchemaViolation": SchemaViolation,
    "DuplicateThreat": DuplicateThreat,
    "EmptyMapping": EmptyMapping,
}

_TOP_LEVEL_REQUIRED = ("schema_version", "catalog_name", "threats")
_THREAT_REQUIRED = (
    "id",
    "abbreviation",
    "name",
    "description",
    "principles",
    "entry_points",
    "sources",
)
_THREAT_OPTIONAL = ("tags", "provenance")

SCHEMA_VERSION = "1"


def _is_nonempty_str(value: object) -> bool:
    return isinstance(value, str) and bool(value.strip())


def _check_string_list(
    entry_id: str, field: str, value: object, findings: list[Finding]
) -> None:
    if not isinstance(value, list) or not value:
        findings.append(
            Finding(
                "SchemaViolation",
                f"threat {entry_id!r}: {field} must be a non-empty list of strings",
                entry_id,
            )
        )
        return
    for item in value:
        if not _is_nonempty_str(item):
            findings.append(
                Finding(
                    "SchemaViolation",
                    f"threat {entry_id!r}: {field} entries must be non-empty strings",
                    entry_id,
                )
            )
            return


def _validate_threat_entry(entry: object, position: int, findings: list[Finding]) -> None:
    if not isinstance(entry, dict):
        findings.append(
            Finding("SchemaViolation", f"threats[{position}] is not a mapping")
        )
        return
    entry_id = entry.get("id") if _is_nonempty_str(entry.get("id")) else None
    label = entry_id or f"threats[{position}]"

    for field in _THREAT_REQUIRED:
        if field not in entry:
            findings.append(
                Finding(
                    "SchemaViolation",
                    f"threat {label!r}: missing required field {field!r}",
                    entry_id,
                )
            )
    for field in entry:
        if field not in _THREAT_REQUIRED and field not in _THREAT_OPTIONAL:
            findings.append(
                Finding(
                    "SchemaViolation",
                    f"threat {label!r}: unknown field {field!r}",
                    entry_id,
                )
            )

    if "id" in entry and not entry_id:
        findings.append(
            Finding("SchemaViolation", f"threats[{position}]: id must be a non-empty string")
        )
    for field in ("abbreviation", "name", "description"):
        if field in entry and not _is_nonempty_str(entry[field]):
            findings.append(
                Finding(
                    "SchemaViolation",
                    f"threat {label!r}: {field} must be a non-empty string",
                    entry_id,
                )
            )

    if "principles" in entry:
        principles = entry["principles"]
        if not isinstance(principles, list):
            findings.append(
                Finding(
                    "SchemaViolation",
                    f"threat {label!r}: principles must be a list",
                    entry_id,
                )
            )
        elif not principles:
            findings.append(
                Finding(
                    "EmptyMapping",
                    f"threat {label!r}: maps to no security principle",
                    entry_id,
                )
            )
        else:
            seen: set[SecurityPrinciple] = set()
            for item in principles:
                if not isinstance(item, str):
                    findings.append(
                        Finding(
                            "SchemaViolation",
                            f"threat {label!r}: principle entries must be strings",
                            entry_id,
                        )
                    )
                    continue
                try:
                    principle = parse_principle(item)
                except ValueError:
                    findings.append(
                        Finding(
                            "SchemaViolation",
                            f"threat {label!r}: unknown principle {item!r}",
                            entry_id,
                        )
                    )
                    continue
                if principle in seen:
                    findings.append(
                        Finding(
                            "SchemaViolation",
                            f"threat {label!r}: duplicate principle {principle.value!r}",
                            entry_id,
                        )
                    )
                seen.add(principle)

    if "entry_points" in entry:
        entry_points = entry["entry_points"]
        if not isinstance(entry_points, list):
            findings.append(
                Finding(
                    "SchemaViolation",
                    f"threat {label!r}: entry_points must be a list",
                    entry_id,
                )
            )
        elif not entry_points:
            findings.append(
                Finding(
                    "EmptyMapping",
                    f"threat {label!r}: maps to no entry point",
                    entry_id,
                )
            )
        else:
            seen_kinds: set[ElementKind] = set()
            for item in entry_points:
                kind = (
                    _KIND_BY_LOWER.get(item.strip().lower())
                    if isinstance(item, str)
                    else None
                )
                if kind is None or kind not in ANALYZABLE_KINDS:
                    findings.append(
                        Finding(
                            "SchemaViolation",
                            f"threat {label!r}: {item!r} is not an analyzable element kind",
                            entry_id,
                        )
                    )
                    continue
                if kind in seen_kinds:
                    findings.append(
                        Finding(
                            "SchemaViolation",
                            f"threat {label!r}: duplicate entry point {kind.value!r}",
                            entry_id,
                        )
                    )
                seen_kinds.add(kind)

    if "sources" in entry:
        _check_string_list(label, "sources", entry["sources"], findings)
    if "tags" in entry:
        _check_string_list(label, "tags", entry["tags"], findings)
    if "provenance" in entry and not _is_nonempty_str(entry["provenance"]):
        findings.append(
            Finding(
                "SchemaViolation",
                f"threat {label!r}: provenance must be a non-empty string",
                entry_id,
            )
        )


def validate_catalog_data(raw: object) -> list[Finding]:
    """Validate parsed catalog data. Returns findings instead of raising so
    callers can report every problem at once."""
    findings: list[Finding] = []
    if not isinstance(raw, dict):
        return [Finding("SchemaViolation", "catalog root must be a mapping")]

    for field in _TOP_LEVEL_REQUIRED:
        if field not in raw:
            findings.append(
                Finding("SchemaViolation", f"missing required field {field!r}")
            )
    for field in raw:
        if field not in _TOP_LEVEL_REQUIRED:
            findings.append(Finding("SchemaViolation", f"unknown field {field!r}"))

    if "schema_version" in raw and str(raw["schema_version"]) != SCHEMA_VERSION:
        findings.append(
            Finding(
                "SchemaViolation",
                f"unsupported schema_version {raw['schema_version']!r} "
                f"(expected {SCHEMA_VERSION!r})",
            )
        )
    if "catalog_name" in raw and not _is_nonempty_str(raw["catalog_name"]):
        findings.append(
            Finding("SchemaViolation", "catalog_name must be a non-empty string")
        )

    threats = raw.get("threats")
    if "threats" in raw:
        if not isinstance(threats, list):
            findings.append(Finding("SchemaViolation", "threats must be a list"))
        elif not threats:
            findings.append(Finding("SchemaViolation", "threats list is empty"))
        else:
            seen_ids: dict[str, int] = {}
            seen_abbrevs: dict[str, str] = {}
            for position, entry in enumerate(threats):
                _validate_threat_entry(entry, position, findings)
                if not isinstance(entry, dict):
                    continue
                entry_id = entry.get("id")
                if _is_nonempty_str(entry_id):
                    if entry_id in seen_ids:
                        findings.append(
                            Finding(
                                "DuplicateThreat",
                                f"threat id {entry_id!r} appears more than once",
                                entry_id,
                            )
                        )
                    seen_ids[entry_id] = position
                abbrev = entry.get("abbreviation")
                if _is_nonempty_str(abbrev):
                    owner = seen_abbrevs.get(abbrev)
                    if owner is not None:
                        findings.append(
                            Finding(
                                "DuplicateThreat",
                                f"abbreviation {abbrev!r} is used by more than one threat",
                                entry_id if _is_nonempty_str(entry_id) else None,
                            )
                        )
                    elif _is_nonempty_str(entry_id):
                        seen_abbrevs[abbrev] = entry_id
                    else:
                        seen_abbrevs[abbrev] = f"threats[{position}]"
    return findings


def _build_threat(entry: dict) -> ThreatSpec:
    return ThreatSpec(
        id=entry["id"],
        abbreviation=entry["abbreviation"],
        name=entry["name"],
        description=entry["description"],
        principles=frozenset(parse_principle(p) for p in entry["principles"]),
        entry_points=frozenset(
            _KIND_BY_LOWER[k.strip().lower()] for k in entry["entry_points"]
        ),
        sources=tuple(entry["sources"]),
        tags=tuple(entry.get("tags", ())),
        provenance=entry.get("provenance"),
    )


def knowledge_base_from_data(
    raw: dict, *, source_digest: str = "", validate: bool = True
) -> KnowledgeBase:
    """Build a KnowledgeBase from parsed data. With validate=True the first
    finding is raised as its error class; validate=False builds permissively
    so a bad catalog can still be inspected with validate_catalog()."""
    if validate:
        findings = validate_catalog_data(raw)
        if findings:
            first = findings[0]
            raise _RULE_ERRORS[first.rule](first.message)
    return KnowledgeBase(
        name=str(raw.get("catalog_name", "")),
        schema_version=str(raw.get("schema_version", SCHEMA_VERSION)),
        threats=tuple(_build_threat(entry) for entry in raw.get("threats", ())),
        source_digest=source_digest,
    )


def load_knowledge_base(path: str | Path) -> KnowledgeBase:
    """Load and validate a YAML threat catalog from disk."""
    data = Path(path).read_bytes()
    digest = hashlib.sha256(data).hexdigest()
    try:
        raw = yaml.safe_load(data)
    except yaml.YAMLError as exc:
        raise SchemaViolation(f"catalog is not valid YAML: {exc}") from exc
    return knowledge_base_from_data(raw, source_digest=digest)


def validate_catalog(kb: KnowledgeBase) -> list[Finding]:
    """Re-check invariants on an already-built knowledge base."""
    findings: list[Finding] = []
    seen_ids: set[str] = set()
    seen_abbrevs: set[str] = set()
    for threat in kb.threats:
        if threat.id in seen_ids:
            findings.append(
                Finding(
                    "DuplicateThreat",
                    f"threat id {threat.id!r} appears more than once",
                    threat.id,
                )
            )
        seen_ids.add(threat.id)
        if threat.abbreviation in seen_abbrevs:
            findings.append(
                Finding(
                    "DuplicateThreat",
                    f"abbreviation {threat.abbreviation!r} is used by more than one threat",
                    threat.id,
                )
            )
        seen_abbrevs.add(threat.abbreviation)
        if not threat.principles:
            findings.append(
                Finding(
                    "EmptyMapping",
                    f"threat {threat.id!r}: maps to no security principle",
                    threat.id,
                )
            )
        if not threat.entry_points:
            findings.append(
                Finding(
                    "EmptyMapping",
                    f"threat {threat.id!r}: maps to no entry point",
                    threat.id,
                )
            )
        if not threat.sources:
            findings.append(
                Finding(
                    "SchemaViolation",
                    f"threat {threat.id!r}: sources must be a non-empty list of strings",
                    threat.id,
                )
            )
    return findings


def query(
    kb: KnowledgeBase,
    kind: ElementKind,
    principles: Iterable[SecurityPrinciple],
) -> list[ThreatSpec]:
    """Return catalog threats that can enter through ``kind`` and touch at
    least one of the selected principles, sorted by abbreviation then id.

    Raises ValueError for a non-analyzable kind and EmptyObjectives when no
    principle is selected.
    """
    if kind not in ANALYZABLE_KINDS:
        raise ValueError(f"element kind {kind.value!r} is not analyzable")
    wanted = frozenset(principles)
    if not wanted:
        raise EmptyObjectives("at least one security principle must be selected")
    for principle in wanted:
        if not isinstance(principle, SecurityPrinciple):
            raise ValueError(f"not a security principle: {principle!r}")
    hits = [
        threat
        for threat in kb.threats
        if threat.applies_to(kind) and wanted & threat.principles
    ]
    hits.sort(key=lambda threat: (threat.abbreviation, threat.id))
    return hits


CATALOG_ENV = "INSIDEOUT_CATALOG"


def seed_catalog_path() -> Path:
    """Path of the packaged default catalog."""
    return Path(resources.files("insideout") / "fixtures" / "seed_catalog.yaml")


def resolve_catalog_path(explicit: str | Path | None = None) -> Path:
    """Pick the catalog to use: explicit argument, then $INSIDEOUT_CATALOG,
    then the packaged seed catalog."""
    if explicit:
        return Path(explicit)
    from_env = os.environ.get(CATALOG_ENV)
    if from_env:
        return Path(from_env)
    return seed_catalog_path()

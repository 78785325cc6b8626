"""Threat identification and triage: pair catalog threats with the assets of a
parsed model, record accept/reject verdicts, and keep the whole exchange in a
session that survives a round trip through disk."""

from __future__ import annotations

import base64
import hashlib
import json
import shlex
import uuid
from dataclasses import dataclass, field, replace
from datetime import datetime
from enum import Enum
from typing import Iterable, Mapping

from . import clock
from .bpmn import ElementKind, ProcessModel, extract_assets, parse_bpmn
from .catalog import (
    EmptyObjectives,
    KnowledgeBase,
    SecurityPrinciple,
    parse_principle,
    query,
)

SESSION_FORMAT_VERSION = "1"


class EngineError(Exception):
    """Base class for triage failures."""


class UnknownCandidate(EngineError):
    """A decision referenced a candidate id the session does not contain."""


class MissingRationale(EngineError):
    """An accept or reject verdict arrived without a rationale."""


class StaleCatalog(EngineError):
    """The catalog in use no longer matches the one the session was built with."""


class Verdict(str, Enum):
    ACCEPTED = "accepted"
    REJECTED = "rejected"
    PENDING = "pending"


@dataclass(frozen=True)
class Objectives:
    """What the analysis should protect: at least one security principle,
    optionally a display name for the process and free-form notes."""

    principles: frozenset[SecurityPrinciple]
    process_name: str = ""
    notes: str = ""

    def __post_init__(self) -> None:
        if not self.principles:
            raise EmptyObjectives("at least one security principle must be selected")
        for principle in self.principles:
            if not isinstance(principle, SecurityPrinciple):
                raise ValueError(f"not a security principle: {principle!r}")


def objectives_from_names(
    names: Iterable[str], *, process_name: str = "", notes: str = ""
) -> Objectives:
    """Build Objectives from principle names (case-insensitive)."""
    principles = frozenset(parse_principle(name) for name in names)
    return Objectives(principles=principles, process_name=process_name, notes=notes)


@dataclass(frozen=True)
class CandidateThreat:
    """One threat/asset pairing proposed for human review."""

    candidate_id: str
    threat_id: str
    abbreviation: str
    threat_name: str
    element_id: str
    element_name: str
    element_kind: ElementKind
    matched_principles: frozenset[SecurityPrinciple]


@dataclass(frozen=True)
class Decision:
    candidate_id: str
    verdict: Verdict
    rationale: str
    decided_at: str


@dataclass(frozen=True)
class Session:
    """Immutable triage state. decide() returns a new Session; the mapping of
    decisions only ever holds the latest verdict per candidate."""

    session_id: str
    created_at: str
    updated_at: str
    process_name: str
    objectives: Objectives
    model: ProcessModel
    catalog_digest: str
    catalog_name: str
    candidates: tuple[CandidateThreat, ...]
    decisions: Mapping[str, Decision] = field(default_factory=dict)

    @property
    def model_digest(self) -> str:
        return self.model.source_digest

    def candidate_by_id(self, candidate_id: str) -> CandidateThreat | None:
        for candidate in self.candidates:
            if candidate.candidate_id == candidate_id:
                return candidate
        return None

    def verdict_for(self, candidate_id: str) -> Verdict:
        decision = self.decisions.get(candidate_id)
        return decision.verdict if decision else Verdict.PENDING


def identify(
    model: ProcessModel, kb: KnowledgeBase, objectives: Objectives
) -> tuple[CandidateThreat, ...]:
    """Pair every analyzable asset with the catalog threats that can enter
    through its kind and touch a selected principle.

    Output order is deterministic: assets in model order, threats sorted by
    abbreviation within each asset.
    """
    candidates = []
    for asset in extract_assets(model):
        for threat in query(kb, asset.kind, objectives.principles):
            candidates.append(
                CandidateThreat(
                    candidate_id=f"{threat.id}:{asset.element_id}",
                    threat_id=threat.id,
                    abbreviation=threat.abbreviation,
                    threat_name=threat.name,
                    element_id=asset.element_id,
                    element_name=asset.name,
                    element_kind=asset.kind,
                    matched_principles=threat.principles & objectives.principles,
                )
            )
    return tuple(candidates)


def derive_process_name(model: ProcessModel) -> str:
    """Best display name for a model: process name, then pool name, then id."""
    for name in model.process_names:
        return name
    for lane in model.lanes:
        if lane.kind == "pool" and lane.name.strip():
            return lane.name.strip()
    return model.model_id


def start_session(
    model: ProcessModel,
    kb: KnowledgeBase,
    objectives: Objectives,
    *,
    session_id: str | None = None,
    now: datetime | None = None,
) -> Session:
    """Run identification and open a triage session over the result."""
    stamp = clock.format_timestamp(now or clock.now_utc())
    return Session(
        session_id=session_id or uuid.uuid4().hex,
        created_at=stamp,
        updated_at=stamp,
        process_name=objectives.process_name.strip() or derive_process_name(model),
        objectives=objectives,
        model=model,
        catalog_digest=kb.source_digest,
        catalog_name=kb.name,
        candidates=identify(model, kb, objectives),
        decisions={},
    )


def decide(
    session: Session,
    candidate_id: str,
    verdict: Verdict | str,
    rationale: str = "",
    *,
    catalog_digest: str | None = None,
    now: datetime | None = None,
) -> Session:
    """Record one verdict and return the updated session.

    Accept and reject require a rationale; a pending verdict clears any
    earlier decision. Passing catalog_digest asserts the caller is still
    working against the catalog the session was built with.
    """
    if catalog_digest is not None and catalog_digest != session.catalog_digest:
        raise StaleCatalog(
            "catalog has changed since this session was created "
            f"(session has {session.catalog_digest[:12]}, caller has {catalog_digest[:12]})"
        )
    if session.candidate_by_id(candidate_id) is None:
        raise UnknownCandidate(f"no candidate with id {candidate_id!r}")
    if isinstance(verdict, str):
        try:
            verdict = Verdict(verdict.strip().lower())
        except ValueError:
            raise ValueError(f"unknown verdict {verdict!r}") from None
    rationale = rationale.strip()
    if verdict is not Verdict.PENDING and not rationale:
        raise MissingRationale(
            f"verdict {verdict.value!r} on {candidate_id!r} requires a rationale"
        )

    stamp = clock.format_timestamp(now or clock.now_utc())
    decisions = dict(session.decisions)
    if verdict is Verdict.PENDING:
        decisions.pop(candidate_id, None)
    else:
        decisions[candidate_id] = Decision(candidate_id, verdict, rationale, stamp)
    return replace(session, decisions=decisions, updated_at=stamp)


def apply_script(
    session: Session,
    script: str,
    *,
    catalog_digest: str | None = None,
    now: datetime | None = None,
) -> Session:
    """Apply a triage script: one `accept|reject <candidateId> "<rationale>"`
    per line, blank lines and #-comments ignored."""
    for number, line in enumerate(script.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            tokens = shlex.split(stripped)
        except ValueError as exc:
            raise ValueError(f"triage script line {number}: {exc}") from exc
        if len(tokens) != 3:
            raise ValueError(
                f"triage script line {number}: expected "
                f'`accept|reject <candidateId> "<rationale>"`, got {stripped!r}'
            )
        verb, candidate_id, rationale = tokens
        if verb not in ("accept", "reject"):
            raise ValueError(
                f"triage script line {number}: unknown verb {verb!r}"
            )
        verdict = Verdict.ACCEPTED if verb == "accept" else Verdict.REJECTED
        session = decide(
            session,
            candidate_id,
            verdict,
            rationale,
            catalog_digest=catalog_digest,
            now=now,
        )
    return session


@dataclass(frozen=True)
class AcceptedThreat:
    candidate_id: str
    threat_id: str
    abbreviation: str
    threat_name: str
    element_id: str
    element_name: str
    element_kind: ElementKind
    rationale: str


@dataclass(frozen=True)
class ThreatModel:
    """Finalized outcome of a triage session: the accepted pairings plus the
    headline numbers derived from them. Counts cover every analyzable asset,
    including those where nothing was accepted."""

    process_name: str
    model_digest: str
    catalog_digest: str
    accepted: tuple[AcceptedThreat, ...]
    per_element_counts: Mapping[str, int]
    unique_threat_count: int
    asset_count: int


def finalize(session: Session) -> ThreatModel:
    """Collapse a session into its accepted threat model."""
    accepted = []
    counts: dict[str, int] = {
        asset.element_id: 0 for asset in extract_assets(session.model)
    }
    for candidate in session.candidates:
        decision = session.decisions.get(candidate.candidate_id)
        if decision is None or decision.verdict is not Verdict.ACCEPTED:
            continue
        accepted.append(
            AcceptedThreat(
                candidate_id=candidate.candidate_id,
                threat_id=candidate.threat_id,
                abbreviation=candidate.abbreviation,
                threat_name=candidate.threat_name,
                element_id=candidate.element_id,
                element_name=candidate.element_name,
                element_kind=candidate.element_kind,
                rationale=decision.rationale,
            )
        )
        counts[candidate.element_id] = counts.get(candidate.element_id, 0) + 1
    return ThreatModel(
        process_name=session.process_name,
        model_digest=session.model_digest,
        catalog_digest=session.catalog_digest,
        accepted=tuple(accepted),
        per_element_counts=counts,
        unique_threat_count=len({item.threat_id for item in accepted}),
        asset_count=len(counts),
    )


@dataclass(frozen=True)
class ElementSummary:
    element_id: str
    element_name: str
    element_kind: ElementKind
    candidates: int
    accepted: int
    rejected: int
    pending: int


@dataclass(frozen=True)
class SessionSummary:
    rows: tuple[ElementSummary, ...]
    candidates: int
    accepted: int
    rejected: int
    pending: int


def summarize(session: Session) -> SessionSummary:
    """Per-element triage progress, rows in model order."""
    order: list[str] = []
    rows: dict[str, dict] = {}
    for candidate in session.candidates:
        if candidate.element_id not in rows:
            order.append(candidate.element_id)
            rows[candidate.element_id] = {
                "name": candidate.element_name,
                "kind": candidate.element_kind,
                "candidates": 0,
                "accepted": 0,
                "rejected": 0,
                "pending": 0,
            }
        row = rows[candidate.element_id]
        row["candidates"] += 1
        verdict = session.verdict_for(candidate.candidate_id)
        row[verdict.value] += 1
    summaries = tuple(
        ElementSummary(
            element_id=element_id,
            element_name=rows[element_id]["name"],
            element_kind=rows[element_id]["kind"],
            candidates=rows[element_id]["candidates"],
            accepted=rows[element_id]["accepted"],
            rejected=rows[element_id]["rejected"],
            pending=rows[element_id]["pending"],
        )
        for element_id in order
    )
    return SessionSummary(
        rows=summaries,
        candidates=sum(row.candidates for row in summaries),
        accepted=sum(row.accepted for row in summaries),
        rejected=sum(row.rejected for row in summaries),
        pending=sum(row.pending for row in summaries),
    )


def save_session(session: Session) -> bytes:
    """Serialize a session to JSON bytes. The model XML travels inside the
    file (base64) so a session is self-contained; output is deterministic,
    so save(load(data)) == data."""
    payload = {
        "format_version": SESSION_FORMAT_VERSION,
        "session_id": session.session_id,
        "created_at": session.created_at,
        "updated_at": session.updated_at,
        "process_name": session.process_name,
        "objectives": {
            "principles": sorted(p.value for p in session.objectives.principles),
            "process_name": session.objectives.process_name,
            "notes": session.objectives.notes,
        },
        "model_digest": session.model_digest,
        "catalog_digest": session.catalog_digest,
        "catalog_name": session.catalog_name,
        "model_xml": base64.b64encode(session.model.raw_xml).decode("ascii"),
        "candidates": [
            {
                "candidate_id": candidate.candidate_id,
                "threat_id": candidate.threat_id,
                "abbreviation": candidate.abbreviation,
                "threat_name": candidate.threat_name,
                "element_id": candidate.element_id,
                "element_name": candidate.element_name,
                "element_kind": candidate.element_kind.value,
                "matched_principles": sorted(
                    p.value for p in candidate.matched_principles
                ),
            }
            for candidate in session.candidates
        ],
        "decisions": [
            {
                "candidate_id": decision.candidate_id,
                "verdict": decision.verdict.value,
                "rationale": decision.rationale,
                "decided_at": decision.decided_at,
            }
            for decision in sorted(
                session.decisions.values(), key=lambda d: d.candidate_id
            )
        ],
    }
    return (json.dumps(payload, indent=2, sort_keys=True) + "\n").encode("utf-8")


def load_session(data: bytes) -> Session:
    """Rebuild a session from save_session() output.

    The embedded model is re-parsed and its digest checked, so a tampered or
    truncated file fails loudly (ValueError) instead of loading quietly.
    """
    try:
        payload = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ValueError(f"session file is not valid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise ValueError("session file root must be an object")
    version = payload.get("format_version")
    if version != SESSION_FORMAT_VERSION:
        raise ValueError(f"unsupported session format_version {version!r}")

    try:
        model_xml = base64.b64decode(payload["model_xml"], validate=True)
        objectives_raw = payload["objectives"]
        objectives = Objectives(
            principles=frozenset(
                parse_principle(name) for name in objectives_raw["principles"]
            ),
            process_name=objectives_raw.get("process_name", ""),
            notes=objectives_raw.get("notes", ""),
        )
        candidates = tuple(
            CandidateThreat(
                candidate_id=entry["candidate_id"],
                threat_id=entry["threat_id"],
                abbreviation=entry["abbreviation"],
                threat_name=entry["threat_name"],
                element_id=entry["element_id"],
                element_name=entry["element_name"],
                element_kind=ElementKind(entry["element_kind"]),
                matched_principles=frozenset(
                    parse_principle(name) for name in entry["matched_principles"]
                ),
            )
            for entry in payload["candidates"]
        )
        decisions = {
            entry["candidate_id"]: Decision(
                candidate_id=entry["candidate_id"],
                verdict=Verdict(entry["verdict"]),
                rationale=entry["rationale"],
                decided_at=entry["decided_at"],
            )
            for entry in payload["decisions"]
        }
        session = Session(
            session_id=payload["session_id"],
            created_at=payload["created_at"],
            updated_at=payload["updated_at"],
            process_name=payload["process_name"],
            objectives=objectives,
            model=parse_bpmn(model_xml),
            catalog_digest=payload["catalog_digest"],
            catalog_name=payload["catalog_name"],
            candidates=candidates,
            decisions=decisions,
        )
    except (KeyError, TypeError) as exc:
        raise ValueError(f"session file is missing or mistypes a field: {exc}") from exc

    stored_digest = payload["model_digest"]
    if session.model_digest != stored_digest:
        raise ValueError(
            "session model digest mismatch: file claims "
            f"{stored_digest!r} but embedded XML hashes to {session.model_digest!r}"
        )
    for decision in session.decisions.values():
        if session.candidate_by_id(decision.candidate_id) is None:
            raise UnknownCandidate(
                f"session decision references unknown candidate {decision.candidate_id!r}"
            )
    return session


def model_digest_of(xml_bytes: bytes) -> str:
    return hashlib.sha256(xml_bytes).hexdigest()

"""HTTP service exposing the analyze/triage/report workflow under /api/v1.

Sessions are JSON files in a configured directory, so a restart loses
nothing. All mutation goes through POST endpoints; GETs never write.
"""

from __future__ import annotations

import os
import tempfile
import threading
import uuid
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, File, Form, Request, UploadFile
from fastapi.responses import JSONResponse, Response

from . import engine, report as report_mod
from .bpmn import DuplicateId, MalformedXml, NotBpmn, extract_assets, parse_bpmn
from .catalog import (
    ALL_PRINCIPLES,
    EmptyObjectives,
    KnowledgeBase,
    load_knowledge_base,
    resolve_catalog_path,
)
from .engine import (
    MissingRationale,
    Objectives,
    Session,
    StaleCatalog,
    UnknownCandidate,
)

API_PREFIX = "/api/v1"
DEFAULT_UPLOAD_CAP = 5 * 2**20  # 5 MiB


@dataclass(frozen=True)
class ServiceConfig:
    catalog_path: Path | None = None
    session_dir: Path | None = None
    upload_cap_bytes: int = DEFAULT_UPLOAD_CAP


class ApiError(Exception):
    """Carried to the client as {"error": {"code", "message"}}."""

    def __init__(self, status: int, code: str, message: str) -> None:
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


class SessionStore:
    """One JSON file per session, written atomically, with a lock per id."""

    def __init__(self, directory: Path) -> None:
        self.directory = directory
        self._locks: dict[str, threading.Lock] = {}
        self._master = threading.Lock()

    def lock(self, session_id: str) -> threading.Lock:
        with self._master:
            return self._locks.setdefault(session_id, threading.Lock())

    def _path(self, session_id: str) -> Path:
        if not session_id.isalnum():
            raise ApiError(404, "UnknownSession", f"no session {session_id!r}")
        return self.directory / f"{session_id}.session.json"

    def save(self, session: Session) -> None:
        self.directory.mkdir(parents=True, exist_ok=True)
        target = self._path(session.session_id)
        handle, temp_name = tempfile.mkstemp(
            dir=self.directory, suffix=".session.json.tmp"
        )
        try:
            with os.fdopen(handle, "wb") as stream:
                stream.write(engine.save_session(session))
            os.replace(temp_name, target)
        except BaseException:
            if os.path.exists(temp_name):
                os.unlink(temp_name)
            raise

    def load(self, session_id: str) -> Session:
        path = self._path(session_id)
        try:
            data = path.read_bytes()
        except FileNotFoundError:
            raise ApiError(404, "UnknownSession", f"no session {session_id!r}") from None
        try:
            return engine.load_session(data)
        except (ValueError, engine.EngineError) as exc:
            raise ApiError(
                500, "CorruptSession", f"stored session is unreadable: {exc}"
            ) from exc


def _session_links(session_id: str) -> dict:
    base = f"{API_PREFIX}/sessions/{session_id}"
    return {
        "self": base,
        "candidates": f"{base}/candidates",
        "decisions": f"{base}/decisions",
        "report": f"{base}/report",
    }


def _candidates_payload(session: Session, kb: KnowledgeBase) -> dict:
    lanes = {
        asset.element_id: asset.lane_name for asset in extract_assets(session.model)
    }
    candidates = []
    for candidate in session.candidates:
        decision = session.decisions.get(candidate.candidate_id)
        spec = kb.threat_by_id(candidate.threat_id)
        candidates.append(
            {
                "candidateId": candidate.candidate_id,
                "threatId": candidate.threat_id,
                "abbreviation": candidate.abbreviation,
                "name": candidate.threat_name,
                "description": spec.description if spec else "",
                "elementId": candidate.element_id,
                "elementName": candidate.element_name,
                "elementKind": candidate.element_kind.value,
                "laneName": lanes.get(candidate.element_id),
                "matchedPrinciples": sorted(
                    p.value for p in candidate.matched_principles
                ),
                "verdict": (decision.verdict.value if decision else "pending"),
                "rationale": (decision.rationale if decision else ""),
            }
        )
    return {
        "sessionId": session.session_id,
        "processName": session.process_name,
        "catalogDigest": session.catalog_digest,
        "modelDigest": session.model_digest,
        "candidates": candidates,
    }


def _summary_payload(session: Session) -> dict:
    summary = engine.summarize(session)
    return {
        "sessionId": session.session_id,
        "totals": {
            "candidates": summary.candidates,
            "accepted": summary.accepted,
            "rejected": summary.rejected,
            "pending": summary.pending,
        },
        "rows": [
            {
                "elementId": row.element_id,
                "elementName": row.element_name,
                "elementKind": row.element_kind.value,
                "candidates": row.candidates,
                "accepted": row.accepted,
                "rejected": row.rejected,
                "pending": row.pending,
            }
            for row in summary.rows
        ],
    }


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    config = config or ServiceConfig()
    catalog_path = resolve_catalog_path(config.catalog_path)
    kb = load_knowledge_base(catalog_path)
    session_dir = config.session_dir or Path(tempfile.gettempdir()) / "insideout-sessions"
    store = SessionStore(Path(session_dir))

    app = FastAPI(title="insideout", version=report_mod.installed_version())

    @app.exception_handler(ApiError)
    def api_error_handler(request: Request, exc: ApiError) -> JSONResponse:
        return JSONResponse(
            status_code=exc.status,
            content={"error": {"code": exc.code, "message": exc.message}},
        )

    @app.post(f"{API_PREFIX}/sessions", status_code=201)
    def create_session(
        model: UploadFile = File(...),
        principles: str = Form("all"),
        process_name: str = Form(""),
        notes: str = Form(""),
    ) -> dict:
        data = model.file.read(config.upload_cap_bytes + 1)
        if len(data) > config.upload_cap_bytes:
            raise ApiError(
                413,
                "UploadTooLarge",
                f"model exceeds the {config.upload_cap_bytes} byte upload cap",
            )
        try:
            parsed = parse_bpmn(data)
        except MalformedXml as exc:
            raise ApiError(400, "MalformedXml", str(exc)) from exc
        except NotBpmn as exc:
            raise ApiError(400, "NotBpmn", str(exc)) from exc
        except DuplicateId as exc:
            raise ApiError(400, "DuplicateId", str(exc)) from exc
        try:
            if principles.strip().lower() == "all":
                objectives = Objectives(
                    principles=ALL_PRINCIPLES,
                    process_name=process_name,
                    notes=notes,
                )
            else:
                names = [part for part in principles.split(",") if part.strip()]
                objectives = engine.objectives_from_names(
                    names, process_name=process_name, notes=notes
                )
        except (EmptyObjectives, ValueError) as exc:
            raise ApiError(422, "EmptyObjectives", str(exc)) from exc

        session = engine.start_session(
            parsed, kb, objectives, session_id=uuid.uuid4().hex
        )
        with store.lock(session.session_id):
            store.save(session)
        payload = _candidates_payload(session, kb)
        payload["links"] = _session_links(session.session_id)
        return payload

    @app.get(f"{API_PREFIX}/sessions/{{session_id}}")
    def download_session(session_id: str) -> Response:
        # round-trips through load so tampered files 404/fail loudly here
        # rather than when a later triage request touches them
        session = store.load(session_id)
        return Response(
            content=engine.save_session(session),
            media_type="application/json",
            headers={
                "Content-Disposition": (
                    f'attachment; filename="{session.session_id}.session.json"'
                )
            },
        )

    @app.get(f"{API_PREFIX}/sessions/{{session_id}}/candidates")
    def get_candidates(session_id: str) -> dict:
        session = store.load(session_id)
        return _candidates_payload(session, kb)

    @app.post(f"{API_PREFIX}/sessions/{{session_id}}/decisions")
    def post_decisions(session_id: str, body: dict) -> dict:
        decisions = body.get("decisions")
        if not isinstance(decisions, list) or not decisions:
            raise ApiError(
                400, "BadRequest", 'body must be {"decisions": [..]} with at least one entry'
            )
        with store.lock(session_id):
            session = store.load(session_id)
            for entry in decisions:
                if not isinstance(entry, dict):
                    raise ApiError(400, "BadRequest", "each decision must be an object")
                try:
                    session = engine.decide(
                        session,
                        str(entry.get("candidateId", "")),
                        str(entry.get("verdict", "")),
                        str(entry.get("rationale", "")),
                        catalog_digest=kb.source_digest,
                    )
                except UnknownCandidate as exc:
                    raise ApiError(404, "UnknownCandidate", str(exc)) from exc
                except MissingRationale as exc:
                    raise ApiError(400, "MissingRationale", str(exc)) from exc
                except StaleCatalog as exc:
                    raise ApiError(409, "StaleCatalog", str(exc)) from exc
                except ValueError as exc:
                    raise ApiError(400, "BadRequest", str(exc)) from exc
            store.save(session)
        return _summary_payload(session)

    @app.get(f"{API_PREFIX}/sessions/{{session_id}}/report")
    def get_report(session_id: str, format: str = "json") -> Response:
        session = store.load(session_id)
        try:
            document = report_mod.build_report(engine.finalize(session), session, kb)
        except StaleCatalog as exc:
            raise ApiError(409, "StaleCatalog", str(exc)) from exc
        if format == "json":
            return Response(
                content=report_mod.export_json(document),
                media_type="application/json",
            )
        if format == "md":
            return Response(
                content=report_mod.export_markdown(document),
                media_type="text/markdown; charset=utf-8",
            )
        if format == "svg":
            return Response(
                content=report_mod.export_svg_overlay(document, session.model),
                media_type="image/svg+xml",
            )
        raise ApiError(400, "BadRequest", f"unknown report format {format!r}")

    @app.get(f"{API_PREFIX}/catalog")
    def get_catalog() -> dict:
        return {
            "name": kb.name,
            "digest": kb.source_digest,
            "schemaVersion": kb.schema_version,
            "threatCount": len(kb.threats),
            "threats": [
                {
                    "threatId": threat.id,
                    "abbreviation": threat.abbreviation,
                    "name": threat.name,
                    "description": threat.description,
                    "principles": sorted(p.value for p in threat.principles),
                    "entryPoints": sorted(k.value for k in threat.entry_points),
                }
                for threat in kb.threats
            ],
        }

    return app

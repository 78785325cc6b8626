"""Command line interface.

Commands: analyze (identify candidates, open a session), triage (record
verdicts), report (export json/md/svg), validate-kb (check a catalog file),
serve (run the HTTP service). Data goes to stdout or --out; diagnostics go
to stderr. Exit codes: 0 success, 1 input or model errors, 2 catalog errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import yaml

from . import engine, report as report_mod
from .bpmn import BpmnError, extract_assets, parse_bpmn
from .catalog import (
    ALL_PRINCIPLES,
    CatalogError,
    EmptyObjectives,
    Finding,
    KnowledgeBase,
    load_knowledge_base,
    resolve_catalog_path,
    validate_catalog_data,
)
from .engine import EngineError, Objectives, StaleCatalog


def _diag(message: str) -> None:
    print(message, file=sys.stderr)


def _parse_principles(text: str):
    if text.strip().lower() == "all":
        return ALL_PRINCIPLES
    names = [part for part in text.split(",") if part.strip()]
    if not names:
        raise EmptyObjectives("at least one security principle must be selected")
    return frozenset(engine.objectives_from_names(names).principles)


def _load_catalog(args) -> KnowledgeBase:
    return load_knowledge_base(resolve_catalog_path(getattr(args, "catalog", None)))


def _write_data(out: str, data: bytes) -> None:
    if out == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    else:
        report_mod.write_output(out, data)


def cmd_analyze(args) -> int:
    model = parse_bpmn(Path(args.model).read_bytes())
    kb = _load_catalog(args)
    objectives = Objectives(
        principles=_parse_principles(args.principles),
        process_name=args.process_name or "",
        notes=args.notes or "",
    )
    session = engine.start_session(model, kb, objectives)
    out = args.out or f"{Path(args.model).stem}.session.json"
    _write_data(out, engine.save_session(session))
    _diag(f"model: {session.process_name} ({len(extract_assets(model))} assets)")
    _diag(f"candidates: {len(session.candidates)}")
    if out != "-":
        _diag(f"session: {out}")
    return 0


def cmd_triage(args) -> int:
    session = engine.load_session(Path(args.session).read_bytes())
    kb = _load_catalog(args)
    changed = False
    if args.script:
        script = Path(args.script).read_text(encoding="utf-8")
        session = engine.apply_script(
            session, script, catalog_digest=kb.source_digest
        )
        changed = True
    candidate = args.accept or args.reject
    if candidate:
        verdict = engine.Verdict.ACCEPTED if args.accept else engine.Verdict.REJECTED
        session = engine.decide(
            session,
            candidate,
            verdict,
            args.rationale or "",
            catalog_digest=kb.source_digest,
        )
        changed = True

    if changed:
        out = args.out or args.session
        _write_data(out, engine.save_session(session))

    summary = engine.summarize(session)
    if not changed:
        for row in summary.rows:
            _diag(
                f"{row.element_id}  {row.element_name} [{row.element_kind.value}]  "
                f"accepted={row.accepted} rejected={row.rejected} pending={row.pending}"
            )
    _diag(
        f"accepted={summary.accepted} rejected={summary.rejected} "
        f"pending={summary.pending} (of {summary.candidates} candidates)"
    )
    return 0


def cmd_report(args) -> int:
    session = engine.load_session(Path(args.session).read_bytes())
    kb = _load_catalog(args)
    threat_model = engine.finalize(session)
    document = report_mod.build_report(threat_model, session, kb)
    if args.format == "json":
        data: bytes = report_mod.export_json(document)
    elif args.format == "md":
        data = report_mod.export_markdown(document).encode("utf-8")
    else:
        data = report_mod.export_svg_overlay(document, session.model).encode("utf-8")
    _write_data(args.out, data)
    _diag(
        f"report: {threat_model.unique_threat_count} unique threats over "
        f"{threat_model.asset_count} assets"
    )
    return 0


def cmd_validate_kb(args) -> int:
    raw_bytes = Path(args.catalog_file).read_bytes()
    try:
        raw = yaml.safe_load(raw_bytes)
    except yaml.YAMLError as exc:
        findings = [Finding("SchemaViolation", f"catalog is not valid YAML: {exc}")]
    else:
        findings = validate_catalog_data(raw)
    for finding in findings:
        print(f"{finding.rule}: {finding.message}")
    if findings:
        _diag(f"{len(findings)} finding(s)")
        return 2
    name = raw.get("catalog_name", "?")
    _diag(f"catalog ok: {name} ({len(raw['threats'])} threats)")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import ServiceConfig, create_app

    config = ServiceConfig(
        catalog_path=resolve_catalog_path(args.catalog),
        session_dir=Path(args.session_dir),
    )
    app = create_app(config)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="insideout",
        description="Insider threat modeling for BPMN 2.0 process diagrams.",
    )
    parser.add_argument(
        "--version",
        action="version",
        version=f"%(prog)s {report_mod.installed_version()}",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    analyze = commands.add_parser(
        "analyze", help="identify threat candidates and open a triage session"
    )
    analyze.add_argument("model", help="BPMN 2.0 XML file")
    analyze.add_argument(
        "--principles",
        default="all",
        help="comma-separated security principles, or 'all' (default)",
    )
    analyze.add_argument("--catalog", help="threat catalog YAML (default: $INSIDEOUT_CATALOG or built-in)")
    analyze.add_argument("--process-name", help="display name override")
    analyze.add_argument("--notes", help="free-form notes stored with the session")
    analyze.add_argument(
        "--out", help="session file to write (default: <model>.session.json, '-' for stdout)"
    )
    analyze.set_defaults(func=cmd_analyze)

    triage = commands.add_parser("triage", help="record accept/reject verdicts")
    triage.add_argument("session", help="session file from 'analyze'")
    verdict = triage.add_mutually_exclusive_group()
    verdict.add_argument("--accept", metavar="CANDIDATE_ID")
    verdict.add_argument("--reject", metavar="CANDIDATE_ID")
    triage.add_argument("--rationale", help="why the verdict holds (required with --accept/--reject)")
    triage.add_argument(
        "--script",
        help='file with one `accept|reject <candidateId> "<rationale>"` per line',
    )
    triage.add_argument("--catalog", help="catalog the session must still match")
    triage.add_argument("--out", help="write updated session here instead of in place")
    triage.set_defaults(func=cmd_triage)

    rep = commands.add_parser("report", help="export the finalized threat model")
    rep.add_argument("session", help="session file from 'analyze'")
    rep.add_argument("--format", choices=("json", "md", "svg"), default="json")
    rep.add_argument("--catalog", help="catalog the session must still match")
    rep.add_argument("--out", default="-", help="output path ('-' for stdout, default)")
    rep.set_defaults(func=cmd_report)

    validate = commands.add_parser("validate-kb", help="check a catalog file")
    validate.add_argument("catalog_file", help="threat catalog YAML")
    validate.set_defaults(func=cmd_validate_kb)

    serve = commands.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--catalog", help="threat catalog YAML")
    serve.add_argument("--session-dir", default="insideout-sessions")
    serve.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except EmptyObjectives as exc:
        _diag(f"error: {exc}")
        return 1
    except StaleCatalog as exc:
        _diag(f"error: {exc}")
        return 2
    except CatalogError as exc:
        _diag(f"error: {exc}")
        return 2
    except (BpmnError, EngineError, report_mod.SerializationFailure) as exc:
        _diag(f"error: {exc}")
        return 1
    except (OSError, ValueError) as exc:
        _diag(f"error: {exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())

from __future__ import annotations

import json
from pathlib import Path

import pytest

import insideout
from insideout import (
    ALL_PRINCIPLES,
    Objectives,
    apply_script,
    load_knowledge_base,
    parse_bpmn,
    seed_catalog_path,
    start_session,
)
from insideout.clock import parse_timestamp

FIXTURES = Path(insideout.__file__).resolve().parent / "fixtures"
DATA = Path(__file__).resolve().parent / "data"

FROZEN_CREATED = parse_timestamp("2026-08-16T00:00:00Z")
FROZEN_DECIDED = parse_timestamp("2026-08-16T00:00:01Z")


@pytest.fixture(autouse=True)
def _isolated_env(monkeypatch):
    # keep the operator's environment from leaking into test behavior
    monkeypatch.delenv("INSIDEOUT_CLOCK", raising=False)
    monkeypatch.delenv("INSIDEOUT_CATALOG", raising=False)


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def case_study_xml() -> bytes:
    return (FIXTURES / "case_study.bpmn").read_bytes()


@pytest.fixture(scope="session")
def voting_xml() -> bytes:
    return (FIXTURES / "voting.bpmn").read_bytes()


@pytest.fixture(scope="session")
def minimal_xml() -> bytes:
    return (FIXTURES / "minimal.bpmn").read_bytes()


@pytest.fixture(scope="session")
def triage_script() -> str:
    return (FIXTURES / "case_study.triage").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def seed_kb():
    return load_knowledge_base(seed_catalog_path())


@pytest.fixture(scope="session")
def expected() -> dict:
    return json.loads((DATA / "case_study_expected.json").read_text(encoding="utf-8"))


@pytest.fixture()
def case_model(case_study_xml):
    return parse_bpmn(case_study_xml)


@pytest.fixture()
def case_session(case_model, seed_kb):
    return start_session(
        case_model,
        seed_kb,
        Objectives(principles=ALL_PRINCIPLES),
        session_id="casestudysession0001",
        now=FROZEN_CREATED,
    )


@pytest.fixture()
def triaged_session(case_session, seed_kb, triage_script):
    return apply_script(
        case_session,
        triage_script,
        catalog_digest=seed_kb.source_digest,
        now=FROZEN_DECIDED,
    )

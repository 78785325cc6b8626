import json

import pytest

from insideout.cli import main
from tests.conftest import FIXTURES


@pytest.fixture()
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv("INSIDEOUT_CLOCK", "2026-08-16T00:00:00Z")
    return tmp_path


def model_path() -> str:
    return str(FIXTURES / "case_study.bpmn")


def test_analyze_triage_report_happy_path(workdir, capsys, expected):
    session_file = workdir / "case.session.json"
    assert main(["analyze", model_path(), "--out", str(session_file)]) == 0
    err = capsys.readouterr().err
    assert f"candidates: {expected['candidate_count']}" in err
    assert session_file.exists()

    assert (
        main(
            [
                "triage",
                str(session_file),
                "--script",
                str(FIXTURES / "case_study.triage"),
            ]
        )
        == 0
    )
    err = capsys.readouterr().err
    assert "accepted=36 rejected=2 pending=0" in err

    report_file = workdir / "report.json"
    assert main(["report", str(session_file), "--out", str(report_file)]) == 0
    document = json.loads(report_file.read_text())
    assert document["summary"]["uniqueThreatCount"] == 7
    assert document["summary"]["assetCount"] == 13

    md_file = workdir / "report.md"
    assert main(["report", str(session_file), "--format", "md", "--out", str(md_file)]) == 0
    assert md_file.read_text().startswith("# Threat model:")

    svg_file = workdir / "report.svg"
    assert main(["report", str(session_file), "--format", "svg", "--out", str(svg_file)]) == 0
    assert svg_file.read_text().startswith("<svg ")


def test_analyze_default_output_name(workdir):
    assert main(["analyze", model_path()]) == 0
    assert (workdir / "case_study.session.json").exists()


def test_analyze_to_stdout(workdir, capsysbinary):
    assert main(["analyze", model_path(), "--out", "-"]) == 0
    out = capsysbinary.readouterr().out
    payload = json.loads(out)
    assert payload["format_version"] == "1"
    assert len(payload["candidates"]) == 38


def test_analyze_with_principle_subset(workdir, capsys):
    assert main(["analyze", model_path(), "--principles", "availability"]) == 0
    assert "candidates: 10" in capsys.readouterr().err


def test_analyze_missing_file_exits_1(workdir):
    assert main(["analyze", "enoent.bpmn"]) == 1


def test_analyze_non_bpmn_exits_1(workdir):
    bad = workdir / "notes.xml"
    bad.write_text("<notes/>")
    assert main(["analyze", str(bad)]) == 1


def test_analyze_unknown_principle_exits_1(workdir):
    assert main(["analyze", model_path(), "--principles", "privacy"]) == 1


def test_analyze_blank_principles_exits_1(workdir):
    assert main(["analyze", model_path(), "--principles", " , "]) == 1


def test_analyze_with_broken_catalog_exits_2(workdir):
    catalog = workdir / "broken.yaml"
    catalog.write_text("schema_version: '1'\ncatalog_name: x\nthreats: []\n")
    assert main(["analyze", model_path(), "--catalog", str(catalog)]) == 2


def test_catalog_env_var_is_honored(workdir, monkeypatch):
    catalog = workdir / "broken.yaml"
    catalog.write_text("nope: true\n")
    monkeypatch.setenv("INSIDEOUT_CATALOG", str(catalog))
    assert main(["analyze", model_path()]) == 2


def test_triage_single_decisions(workdir, capsys):
    session_file = workdir / "s.json"
    main(["analyze", model_path(), "--out", str(session_file)])
    capsys.readouterr()
    assert (
        main(
            [
                "triage",
                str(session_file),
                "--accept",
                "data-deletion:ds_personal_register",
                "--rationale",
                "write access is broad",
            ]
        )
        == 0
    )
    assert "accepted=1" in capsys.readouterr().err
    assert (
        main(
            [
                "triage",
                str(session_file),
                "--reject",
                "data-view:rt_sign_up_insuree",
                "--rationale",
                "forms are sealed",
            ]
        )
        == 0
    )
    assert "rejected=1" in capsys.readouterr().err


def test_triage_without_rationale_exits_1(workdir):
    session_file = workdir / "s.json"
    main(["analyze", model_path(), "--out", str(session_file)])
    assert main(["triage", str(session_file), "--accept", "data-view:rt_sign_up_insuree"]) == 1


def test_triage_unknown_candidate_exits_1(workdir):
    session_file = workdir / "s.json"
    main(["analyze", model_path(), "--out", str(session_file)])
    assert (
        main(
            [
                "triage",
                str(session_file),
                "--accept",
                "ghost:ghost",
                "--rationale",
                "x",
            ]
        )
        == 1
    )


def test_triage_with_changed_catalog_exits_2(workdir):
    session_file = workdir / "s.json"
    main(["analyze", model_path(), "--out", str(session_file)])
    changed = workdir / "changed.yaml"
    changed.write_text(
        (FIXTURES / "seed_catalog.yaml").read_text() + "\n# local tweak\n"
    )
    assert (
        main(
            [
                "triage",
                str(session_file),
                "--catalog",
                str(changed),
                "--accept",
                "data-view:rt_sign_up_insuree",
                "--rationale",
                "x",
            ]
        )
        == 2
    )


def test_triage_status_only_lists_rows(workdir, capsys):
    session_file = workdir / "s.json"
    main(["analyze", model_path(), "--out", str(session_file)])
    capsys.readouterr()
    assert main(["triage", str(session_file)]) == 0
    err = capsys.readouterr().err
    assert "ds_personal_register" in err
    assert "pending=38" in err


def test_report_to_stdout_by_default(workdir, capsysbinary):
    session_file = workdir / "s.json"
    main(["analyze", model_path(), "--out", str(session_file)])
    capsysbinary.readouterr()
    assert main(["report", str(session_file)]) == 0
    out = capsysbinary.readouterr().out
    assert json.loads(out)["formatVersion"] == "1"


def test_report_with_changed_catalog_exits_2(workdir):
    session_file = workdir / "s.json"
    main(["analyze", model_path(), "--out", str(session_file)])
    changed = workdir / "changed.yaml"
    changed.write_text(
        (FIXTURES / "seed_catalog.yaml").read_text() + "\n# local tweak\n"
    )
    assert main(["report", str(session_file), "--catalog", str(changed)]) == 2


def test_report_corrupt_session_exits_1(workdir):
    bad = workdir / "bad.session.json"
    bad.write_text("{}")
    assert main(["report", str(bad)]) == 1


def test_validate_kb_clean_catalog(workdir, capsys):
    assert main(["validate-kb", str(FIXTURES / "seed_catalog.yaml")]) == 0
    captured = capsys.readouterr()
    assert captured.out == ""
    assert "catalog ok" in captured.err


def test_validate_kb_lists_findings_and_exits_2(workdir, capsys):
    bad = workdir / "bad.yaml"
    bad.write_text(
        "schema_version: '1'\n"
        "catalog_name: broken\n"
        "threats:\n"
        "  - id: a\n"
        "    abbreviation: A\n"
        "    name: A\n"
        "    description: a\n"
        "    principles: []\n"
        "    entry_points: [DataObject]\n"
        "    sources: [s]\n"
    )
    assert main(["validate-kb", str(bad)]) == 2
    captured = capsys.readouterr()
    assert captured.out.startswith("EmptyMapping:")


def test_validate_kb_unparseable_yaml_exits_2(workdir, capsys):
    bad = workdir / "bad.yaml"
    bad.write_text("threats: [unterminated")
    assert main(["validate-kb", str(bad)]) == 2
    assert "SchemaViolation" in capsys.readouterr().out

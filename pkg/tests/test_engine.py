import pytest

from insideout import (
    ALL_PRINCIPLES,
    EmptyObjectives,
    MissingRationale,
    Objectives,
    SecurityPrinciple,
    StaleCatalog,
    UnknownCandidate,
    Verdict,
    apply_script,
    decide,
    finalize,
    identify,
    load_session,
    objectives_from_names,
    parse_bpmn,
    save_session,
    start_session,
    summarize,
)
from tests.conftest import FROZEN_DECIDED


def test_objectives_require_a_principle():
    with pytest.raises(EmptyObjectives):
        Objectives(principles=frozenset())
    with pytest.raises(ValueError):
        Objectives(principles=frozenset({"Confidentiality"}))


def test_objectives_from_names_parses_case_insensitively():
    objectives = objectives_from_names(["confidentiality", "Integrity"])
    assert objectives.principles == frozenset(
        {SecurityPrinciple.CONFIDENTIALITY, SecurityPrinciple.INTEGRITY}
    )


def test_identify_candidate_ids_and_order(case_model, seed_kb, expected):
    candidates = identify(case_model, seed_kb, Objectives(principles=ALL_PRINCIPLES))
    assert len(candidates) == expected["candidate_count"]
    assert sorted(c.candidate_id for c in candidates) == expected["candidates"]
    # assets in model order, threats sorted by abbreviation within an asset
    element_order = []
    for candidate in candidates:
        if candidate.element_id not in element_order:
            element_order.append(candidate.element_id)
    assert element_order == expected["asset_ids"]
    first_element = [c for c in candidates if c.element_id == element_order[0]]
    assert [c.abbreviation for c in first_element] == sorted(
        c.abbreviation for c in first_element
    )


def test_identify_respects_principle_filter(case_model, seed_kb, expected):
    without_availability = identify(
        case_model,
        seed_kb,
        Objectives(principles=ALL_PRINCIPLES - {SecurityPrinciple.AVAILABILITY}),
    )
    assert (
        sorted(c.candidate_id for c in without_availability)
        == expected["candidates_without_availability"]
    )


def test_identify_is_deterministic(case_model, seed_kb):
    objectives = Objectives(principles=ALL_PRINCIPLES)
    assert identify(case_model, seed_kb, objectives) == identify(
        case_model, seed_kb, objectives
    )


def test_session_process_name_derived_from_model(case_session):
    assert case_session.process_name == "Insurance Registration"


def test_decide_records_and_replaces_verdicts(case_session):
    candidate = case_session.candidates[0].candidate_id
    updated = decide(
        case_session, candidate, Verdict.ACCEPTED, "looks real", now=FROZEN_DECIDED
    )
    assert updated.verdict_for(candidate) is Verdict.ACCEPTED
    assert case_session.verdict_for(candidate) is Verdict.PENDING  # original untouched
    changed = decide(updated, candidate, "rejected", "on reflection, no", now=FROZEN_DECIDED)
    assert changed.verdict_for(candidate) is Verdict.REJECTED
    assert changed.decisions[candidate].rationale == "on reflection, no"
    cleared = decide(changed, candidate, Verdict.PENDING, now=FROZEN_DECIDED)
    assert cleared.verdict_for(candidate) is Verdict.PENDING
    assert candidate not in cleared.decisions


def test_decide_requires_rationale(case_session):
    candidate = case_session.candidates[0].candidate_id
    with pytest.raises(MissingRationale):
        decide(case_session, candidate, Verdict.ACCEPTED, "   ")


def test_decide_rejects_unknown_candidate(case_session):
    with pytest.raises(UnknownCandidate):
        decide(case_session, "no-such:thing", Verdict.ACCEPTED, "x")


def test_decide_rejects_unknown_verdict(case_session):
    candidate = case_session.candidates[0].candidate_id
    with pytest.raises(ValueError):
        decide(case_session, candidate, "maybe", "x")


def test_decide_checks_catalog_digest(case_session):
    candidate = case_session.candidates[0].candidate_id
    with pytest.raises(StaleCatalog):
        decide(
            case_session,
            candidate,
            Verdict.ACCEPTED,
            "x",
            catalog_digest="0" * 64,
        )
    ok = decide(
        case_session,
        candidate,
        Verdict.ACCEPTED,
        "x",
        catalog_digest=case_session.catalog_digest,
    )
    assert ok.verdict_for(candidate) is Verdict.ACCEPTED


def test_apply_script_full_run(triaged_session, expected):
    summary = summarize(triaged_session)
    assert summary.accepted == expected["accepted_count"]
    assert summary.rejected == expected["rejected_count"]
    assert summary.pending == 0


def test_apply_script_ignores_comments_and_blanks(case_session):
    candidate = case_session.candidates[0].candidate_id
    session = apply_script(
        case_session,
        f'# header\n\naccept {candidate} "fine"\n',
    )
    assert session.verdict_for(candidate) is Verdict.ACCEPTED


@pytest.mark.parametrize(
    "line",
    [
        'approve x:y "z"',
        "accept x:y",
        'accept x:y "z" extra',
        'accept "unterminated',
    ],
)
def test_apply_script_rejects_bad_lines(case_session, line):
    with pytest.raises(ValueError):
        apply_script(case_session, line)


def test_finalize_counts(triaged_session, expected):
    threat_model = finalize(triaged_session)
    assert threat_model.unique_threat_count == len(expected["unique_accepted_threats"])
    assert threat_model.asset_count == len(expected["asset_ids"])
    assert dict(threat_model.per_element_counts) == expected["accepted_per_element"]
    assert sorted({a.threat_id for a in threat_model.accepted}) == expected[
        "unique_accepted_threats"
    ]
    # rejected candidates never surface in the accepted list
    accepted_ids = {a.candidate_id for a in threat_model.accepted}
    assert "data-corruption:st_send_insurance_card" not in accepted_ids


def test_finalize_keeps_zero_count_assets(case_session):
    threat_model = finalize(case_session)  # nothing decided yet
    assert threat_model.asset_count == 13
    assert set(threat_model.per_element_counts.values()) == {0}
    assert threat_model.unique_threat_count == 0


def test_summarize_rows_in_model_order(triaged_session, expected):
    summary = summarize(triaged_session)
    assert [row.element_id for row in summary.rows] == expected["asset_ids"]
    by_id = {row.element_id: row for row in summary.rows}
    assert by_id["st_send_insurance_card"].accepted == 1
    assert by_id["st_send_insurance_card"].rejected == 1
    assert by_id["ds_personal_register"].candidates == 4


def test_session_round_trip_is_lossless(triaged_session):
    data = save_session(triaged_session)
    loaded = load_session(data)
    assert loaded == triaged_session
    assert save_session(loaded) == data


def test_session_file_is_byte_stable(case_session):
    data = save_session(case_session)
    assert save_session(load_session(data)) == data


def test_load_session_rejects_tampered_model(triaged_session):
    data = save_session(triaged_session)
    tampered = data.replace(
        triaged_session.model_digest.encode(), b"0" * 64, 1
    )
    with pytest.raises(ValueError):
        load_session(tampered)


def test_load_session_rejects_bad_json():
    with pytest.raises(ValueError):
        load_session(b"not json")
    with pytest.raises(ValueError):
        load_session(b'{"format_version": "99"}')


def test_load_session_rejects_decision_for_unknown_candidate(case_session):
    import json

    data = json.loads(save_session(case_session))
    data["decisions"] = [
        {
            "candidate_id": "ghost:ghost",
            "verdict": "accepted",
            "rationale": "x",
            "decided_at": "2026-08-16T00:00:01Z",
        }
    ]
    with pytest.raises(UnknownCandidate):
        load_session(json.dumps(data).encode())


def test_start_session_uses_injected_clock_and_id(case_session):
    assert case_session.session_id == "casestudysession0001"
    assert case_session.created_at == "2026-08-16T00:00:00Z"
    assert case_session.updated_at == "2026-08-16T00:00:00Z"


def test_minimal_model_identifies_user_task_threats(minimal_xml, seed_kb):
    session = start_session(
        parse_bpmn(minimal_xml), seed_kb, Objectives(principles=ALL_PRINCIPLES)
    )
    assert sorted(c.threat_id for c in session.candidates) == [
        "data-corruption",
        "data-deletion",
        "system-control-manipulation",
    ]
    assert session.process_name == "defs_minimal"

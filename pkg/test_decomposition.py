"""
Tests for the case analysis, the 2NF template, illegitimate variants, 3NF synthesis
and the precise 2NF planner
"""
import random

import pytest

from chain_diagnosis import theorem1_verdict
from conftest import decomposition_from
from decomposition import (
    Impossibility,
    analyze_case,
    decompose_2nf,
    plan_precise_2nf,
    reject_illegitimate,
    synthesize_3nf,
)
from fd_errors import AssumptionViolated, VariantInapplicable
from fd_generators import random_schema, two_component_schema
from fd_model import FDSet, Provenance, Schema, attrs
from normal_forms import TWO_NF_STEPS, NormalForm, audit_precise_2nf, classify_database, classify_table
from verification import chase_lossless, preservation_check

OVERLAP_NO_RESIDUAL = Schema(attrs("A1 A2 A3 A4"), FDSet.of("A1 -> A3", "A2 -> A3", "A2 -> A4"))
UNREACHABLE_MEETING = Schema(attrs("A1 A2 A3 A5 A7"), FDSet.of("A1 -> A3", "A3 -> A5", "A5 A2 -> A7"))


def test_case_analysis(partition, no_transitivity, shared_dependent):
    case = analyze_case(partition)
    assert (case.raw_case, case.merged_case) == ("1", "A")
    assert case.alpha1 == attrs("A1 A3") and case.alpha2 == attrs("A2 A4")
    assert case.residual == frozenset()

    case = analyze_case(no_transitivity)
    assert (case.raw_case, case.merged_case) == ("2", "A")
    assert case.residual == attrs("A5")

    case = analyze_case(OVERLAP_NO_RESIDUAL)
    assert (case.raw_case, case.merged_case) == ("3b", "B")

    case = analyze_case(shared_dependent)
    assert (case.raw_case, case.merged_case) == ("4b", "B")
    assert case.overlap == attrs("A3")
    assert case.residual == attrs("A5")
    assert case.alpha2_minus == attrs("A3 A4")
    assert case.to_dict()["components"] == [["A1"], ["A2"]]


def test_template_keeps_a_key_table(partition):
    d = decompose_2nf(partition)
    assert d.tables() == [attrs("A1 A2"), attrs("A1 A3"), attrs("A2 A4")]
    assert d.provenance == (
        Provenance.RESIDUAL_KEY_TABLE,
        Provenance.PARTIAL_DEPENDENCY_SPLIT,
        Provenance.PARTIAL_DEPENDENCY_SPLIT,
    )
    assert chase_lossless(d, partition).lossless


def test_template_on_chain_schema(key_chain):
    d = decompose_2nf(key_chain)
    assert d.tables() == decomposition_from("key_chain_2nf", key_chain).tables()
    assert classify_database(d, key_chain).level == NormalForm.SECOND


def test_template_repeats_the_overlap(shared_dependent):
    d = decompose_2nf(shared_dependent)
    assert d.tables() == [attrs("A1 A2 A5"), attrs("A1 A3"), attrs("A2 A3 A4")]
    assert preservation_check(d, shared_dependent).preserved
    assert chase_lossless(d, shared_dependent).lossless


def test_template_needs_two_component_key(single_key):
    with pytest.raises(AssumptionViolated):
        decompose_2nf(single_key)
    with pytest.raises(AssumptionViolated):
        plan_precise_2nf(single_key)


def test_dropping_the_key_table_is_lossy(partition):
    report = reject_illegitimate(partition, "1-without-R3")
    assert report.decomposition.tables() == [attrs("A1 A3"), attrs("A2 A4")]
    assert report.failures == ["lossy"]
    assert report.spurious is not None
    assert report.spurious.report.spurious_count > 0


def test_overlap_kept_on_one_side_loses_a_dependency(shared_dependent):
    report = reject_illegitimate(shared_dependent, "4a")
    assert report.decomposition.tables() == [attrs("A1 A2 A5"), attrs("A1 A3"), attrs("A2 A4")]
    assert report.lossless
    assert report.failures == ["A2 → A3 lost"]
    assert report.to_dict()["spurious"] is None


def test_overlap_without_key_table_fails_twice():
    report = reject_illegitimate(OVERLAP_NO_RESIDUAL, "3a")
    assert report.failures[:2] == ["lossy", "A2 → A3 lost"]


def test_variants_outside_their_case(partition, shared_dependent):
    with pytest.raises(VariantInapplicable):
        reject_illegitimate(partition, "3a")
    with pytest.raises(VariantInapplicable):
        reject_illegitimate(partition, "4a")
    with pytest.raises(VariantInapplicable):
        reject_illegitimate(shared_dependent, "1-without-R3")
    with pytest.raises(VariantInapplicable):
        reject_illegitimate(shared_dependent, "3a")
    with pytest.raises(VariantInapplicable):
        reject_illegitimate(partition, "5")


def test_synthesis_on_chain_schema(key_chain):
    d = synthesize_3nf(key_chain)
    assert d.tables() == decomposition_from("key_chain_full_split", key_chain).tables()
    assert set(d.provenance) == {Provenance.SYNTHESIS}


def test_synthesis_adds_a_key_table(students):
    d = synthesize_3nf(students)
    assert d.tables() == [attrs("cid cr"), attrs("cid sid"), attrs("cr rd st"), attrs("sid st")]
    label = classify_database(d, students)
    assert label.level == NormalForm.THIRD


def test_synthesis_without_dependencies():
    schema = Schema(attrs("A1 A2 A3"), FDSet())
    assert synthesize_3nf(schema).tables() == [attrs("A1 A2 A3")]


def test_synthesis_is_always_legitimate_3nf():
    rng = random.Random(42)
    for _ in range(1000):
        schema = random_schema(rng, max_attrs=7, max_fds=6)
        d = synthesize_3nf(schema)
        assert d.attributes == schema.universe
        assert chase_lossless(d, schema).lossless, schema
        assert preservation_check(d, schema).preserved, schema
        for rel in d.relations:
            assert classify_table(rel, schema.fds).level == NormalForm.THIRD, (schema, rel)


def test_template_is_legitimate_on_two_component_keys():
    rng = random.Random(8)
    for _ in range(500):
        schema = two_component_schema(rng)
        d = decompose_2nf(schema)
        label = classify_database(d, schema)
        assert label.lossless and label.preserving, schema
        assert label.level.rank >= 2, schema
        assert set(d.provenance) <= set(TWO_NF_STEPS)


def test_planner_keeps_the_template(key_chain):
    outcome = plan_precise_2nf(key_chain)
    assert outcome.succeeded
    assert not outcome.also_3nf
    assert outcome.result.tables() == decomposition_from("key_chain_2nf", key_chain).tables()
    assert audit_precise_2nf(outcome.result, key_chain).precise


def test_planner_notes_trivial_precision(no_transitivity):
    outcome = plan_precise_2nf(no_transitivity)
    assert outcome.succeeded and outcome.also_3nf
    assert "trivial manner" in str(outcome.narrative[-1])


def test_planner_reports_both_placements(minimal_overlap):
    outcome = plan_precise_2nf(minimal_overlap)
    assert not outcome.succeeded
    assert isinstance(outcome.result, Impossibility)
    assert str(outcome.impossibility_witness.meeting) == "{A3, A4} → A5"
    assert outcome.result.reason == "A5 has full dependence on both {A1, A2} and {A3, A4}"
    key_table, meeting = outcome.placements
    assert key_table.failure == "{A3, A4} → A5 lost"
    assert meeting.failure == "R4 is a 3NF decomposition step"
    assert meeting.decomposition.tables()[-1] == attrs("A3 A4 A5")


def test_planner_on_student_schema(students):
    outcome = plan_precise_2nf(students)
    assert not outcome.succeeded
    assert [str(f) for f in outcome.result.lost] == ["{cr, st} → rd"]
    names = [p.name for p in outcome.placements]
    assert names == ["key-table", "meeting-point"]
    meeting = outcome.placements[1]
    assert meeting.lossless and not meeting.lost
    assert meeting.transitivity_tables == ("R3",)


def test_planner_impossible_without_a_chain_pair():
    assert not theorem1_verdict(UNREACHABLE_MEETING).impossible
    outcome = plan_precise_2nf(UNREACHABLE_MEETING)
    assert not outcome.succeeded
    assert outcome.impossibility_witness is None
    assert outcome.result.reason.startswith("the 2NF template loses")
    assert [p.name for p in outcome.placements] == ["key-table"]


def test_planner_agrees_with_the_verdict():
    rng = random.Random(21)
    for _ in range(300):
        schema = two_component_schema(rng)
        verdict = theorem1_verdict(schema)
        outcome = plan_precise_2nf(schema)
        if verdict.impossible:
            assert not outcome.succeeded
            continue
        template_preserved = preservation_check(decompose_2nf(schema), schema).preserved
        assert outcome.succeeded == template_preserved, schema
        if outcome.succeeded:
            assert audit_precise_2nf(outcome.result, schema).precise


def test_planner_keeps_template_when_meeting_point_stays_on_one_side():
    schema = Schema(attrs("A1 A2 A3 A4 A5"), FDSet.of("A1 -> A3", "A2 -> A3", "A2 -> A4", "A3 A4 -> A5"))
    outcome = plan_precise_2nf(schema)
    assert outcome.succeeded
    assert not outcome.also_3nf
    assert outcome.impossibility_witness is None
    assert outcome.result.tables() == [attrs("A1 A2"), attrs("A1 A3"), attrs("A2 A3 A4 A5")]
    assert outcome.placements[0].failure == "none"
    audit = audit_precise_2nf(outcome.result, schema)
    assert audit.precise and audit.label.level == NormalForm.SECOND
    assert not any("fails" in str(step) for step in outcome.narrative)


def test_impossibility_always_names_a_failing_placement():
    rng = random.Random(5)
    for _ in range(300):
        schema = two_component_schema(rng)
        outcome = plan_precise_2nf(schema)
        if not outcome.succeeded:
            assert all(p.failure != "none" for p in outcome.placements), schema

"""
Tests for key components, transitive chains, overlapping chain pairs and the verdict
"""
import random

import pytest

from chain_diagnosis import (
    ChainPair,
    TransitiveChain,
    find_chains,
    find_overlapping_pairs,
    key_components,
    pair_problems,
    proof_branches,
    theorem1_verdict,
)
from decomposition import plan_precise_2nf
from fd_config import AnalysisLimits
from fd_errors import AssumptionViolated, SizeLimitExceeded
from fd_generators import planted_pair_schema, random_renaming, two_component_schema
from fd_model import FD, FDSet, Schema, attrs


def nodes(chain):
    return [sorted(n) for n in chain.nodes]


def test_key_components_of_two_attribute_key(students):
    key, first, second = key_components(students)
    assert key == {"sid", "cid"}
    assert (first, second) == (attrs("cid"), attrs("sid"))


def test_key_components_group_wider_keys():
    schema = Schema(attrs("A B C D E"), FDSet.of("A B -> D", "C -> E"))
    key, first, second = key_components(schema)
    assert key == attrs("A B C")
    assert (first, second) == (attrs("A B"), attrs("C"))


def test_key_components_assumption_failures(single_key):
    with pytest.raises(AssumptionViolated) as info:
        key_components(single_key)
    assert info.value.reason == "key has a single attribute"

    several = Schema(attrs("A B C"), FDSet.of("A -> B", "B -> A"))
    with pytest.raises(AssumptionViolated) as info:
        key_components(several)
    assert info.value.reason == "multiple candidate keys"

    unsplit = Schema(attrs("A B C D"), FDSet.of("A B C -> D"))
    with pytest.raises(AssumptionViolated) as info:
        key_components(unsplit)
    assert info.value.reason == "key does not split into two components"


def test_chains_follow_the_cover(key_chain, students):
    assert [nodes(c) for c in find_chains(key_chain, {"A2"})] == [[["A2"], ["A4"], ["A5"], ["A6"]]]
    assert [nodes(c) for c in find_chains(key_chain, {"A1"})] == [[["A1"], ["A3"]]]
    assert [nodes(c) for c in find_chains(students, {"sid"})] == [[["sid"], ["st"]]]


def test_chain_links_and_rendering(key_chain):
    chain = find_chains(key_chain, {"A2"})[0]
    assert [str(l) for l in chain.links] == ["A2 → A4", "A4 → A5", "A5 → A6"]
    assert str(chain) == "A2 → A4 → A5 → A6"
    assert chain.last == {"A6"}
    assert chain.attributes == {"A2", "A4", "A5", "A6"}


def test_no_chains_without_dependencies():
    schema = Schema(attrs("A1 A2"), FDSet())
    assert find_chains(schema, {"A1"}) == []


def test_find_chains_rejects_bad_origin(key_chain):
    with pytest.raises(ValueError):
        find_chains(key_chain, {"A9"})
    with pytest.raises(ValueError):
        find_chains(key_chain, set())


def test_minimal_overlap_pair(minimal_overlap):
    pairs = find_overlapping_pairs(minimal_overlap)
    assert len(pairs) == 1
    pair = pairs[0]
    assert nodes(pair.chain_a) == [["A1"], ["A3"]]
    assert nodes(pair.chain_b) == [["A2"], ["A4"]]
    assert str(pair.meeting) == "{A3, A4} → A5"
    assert pair.gamma == {"A5"}
    assert pair_problems(pair, minimal_overlap.fds) == []


def test_students_pair(students):
    pairs = find_overlapping_pairs(students)
    assert [(nodes(p.chain_a), nodes(p.chain_b), str(p.meeting)) for p in pairs] == [
        ([["cid"], ["cr"]], [["sid"], ["st"]], "{cr, st} → rd"),
    ]


def test_no_pairs_when_chain_ends_add_nothing(no_transitivity, key_chain, shared_dependent):
    assert find_overlapping_pairs(no_transitivity) == []
    assert find_overlapping_pairs(key_chain) == []
    assert find_overlapping_pairs(shared_dependent) == []


def test_pair_problems_names_each_broken_clause(minimal_overlap):
    pair = ChainPair(
        TransitiveChain.along([attrs("A1"), attrs("A3")]),
        TransitiveChain.along([attrs("A2"), attrs("A3")]),
        FD.parse("A1 -> A5"),
        attrs("A5"),
    )
    problems = pair_problems(pair, minimal_overlap.fds)
    assert "link A2 → A3 is not implied" in problems
    assert "A3 and A3 overlap" in problems
    assert "meeting point A1 → A5 does not join the chain ends" in problems
    assert "meeting point A1 → A5 is not implied" in problems


def test_pair_problems_rejects_partial_meeting_point():
    f = FDSet.of("A1 -> A3", "A2 -> A4", "A3 -> A5")
    pair = ChainPair(
        TransitiveChain.along([attrs("A1"), attrs("A3")]),
        TransitiveChain.along([attrs("A2"), attrs("A4")]),
        FD.parse("A3 A4 -> A5"),
        attrs("A5"),
    )
    assert pair_problems(pair, f) == ["A3 → A5 already holds"]


def test_verdict_on_worked_schemas(minimal_overlap, students, no_transitivity, key_chain):
    for schema in (minimal_overlap, students):
        verdict = theorem1_verdict(schema)
        assert verdict.impossible
        assert verdict.assumption_check.passed
        assert verdict.witness == verdict.pairs[0]
    for schema in (no_transitivity, key_chain):
        verdict = theorem1_verdict(schema)
        assert not verdict.impossible
        assert verdict.witness is None


def test_proof_branches(students):
    pair = find_overlapping_pairs(students)[0]
    assert proof_branches(pair) == (
        "rd kept with the key: {cr, st} → rd is lost",
        "rd placed with {cr, st}: a decomposition based on transitivity took place",
    )


def test_verdict_records_failed_assumption(single_key):
    verdict = theorem1_verdict(single_key)
    assert not verdict.impossible
    assert not verdict.assumption_check.passed
    assert verdict.assumption_check.single_key
    assert verdict.assumption_check.reason.startswith("key has a single attribute")

    several = theorem1_verdict(Schema(attrs("A B C"), FDSet.of("A -> B", "B -> A")))
    assert not several.assumption_check.single_key


def test_verdict_to_dict(minimal_overlap):
    body = theorem1_verdict(minimal_overlap).to_dict()
    assert list(body) == ["impossible", "assumption_check", "witness", "pair_count", "proof_branches"]
    assert body["witness"]["meeting"] == "{A3, A4} → A5"
    assert body["witness"]["gamma"] == ["A5"]
    assert body["assumption_check"]["components"] == [["A1"], ["A2"]]


def test_chain_enumeration_bounds(key_chain):
    with pytest.raises(SizeLimitExceeded):
        find_chains(key_chain, {"A2"}, AnalysisLimits(max_chain_paths=2))
    with pytest.raises(SizeLimitExceeded) as info:
        find_overlapping_pairs(key_chain, exhaustive=True)
    assert info.value.what == "exhaustive chain vocabulary"


def test_planted_pairs_are_always_found():
    rng = random.Random(77)
    for _ in range(200):
        schema = planted_pair_schema(rng)
        verdict = theorem1_verdict(schema)
        assert verdict.impossible, schema
        assert pair_problems(verdict.witness, schema.fds) == []
        outcome = plan_precise_2nf(schema)
        assert not outcome.succeeded
        assert outcome.impossibility_witness is not None


def test_reported_pairs_are_valid_in_both_modes():
    rng = random.Random(13)
    for i in range(60):
        if i % 2:
            schema = two_component_schema(rng, max_extra=3)
        else:
            schema = planted_pair_schema(rng, max_chain=2, max_noise=1)
        default = find_overlapping_pairs(schema)
        exhaustive = find_overlapping_pairs(schema, exhaustive=True)
        for pair in exhaustive:
            assert pair_problems(pair, schema.fds) == [], pair
        assert set(default) <= set(exhaustive)


def test_verdict_is_invariant_under_renaming(students, minimal_overlap, key_chain):
    rng = random.Random(3)
    schemas = [students, minimal_overlap, key_chain] + [planted_pair_schema(rng) for _ in range(30)]
    for schema in schemas:
        renamed = schema.rename(random_renaming(rng, schema))
        before, after = theorem1_verdict(schema), theorem1_verdict(renamed)
        assert before.impossible == after.impossible
        assert len(before.pairs) == len(after.pairs)


def test_verdict_is_deterministic(students):
    assert theorem1_verdict(students).to_dict() == theorem1_verdict(students).to_dict()


ONE_SIDE = Schema(attrs("A1 A2 A3 A4 A5"), FDSet.of("A1 -> A3", "A2 -> A3", "A2 -> A4", "A3 A4 -> A5"))
SHARED_DERIVATION = Schema(
    attrs("A1 A2 A3 A4 A5 A6 A7"),
    FDSet.of("A1 -> A3", "A1 -> A5", "A2 -> A4", "A2 -> A5", "A3 A5 -> A6", "A2 -> A6", "A4 A5 A6 -> A7"),
)


def test_meeting_point_inside_one_closure_is_not_a_pair():
    assert find_overlapping_pairs(ONE_SIDE) == []
    assert find_overlapping_pairs(ONE_SIDE, exhaustive=True) == []
    verdict = theorem1_verdict(ONE_SIDE)
    assert verdict.assumption_check.passed
    assert not verdict.impossible

    pair = ChainPair(
        TransitiveChain.along([attrs("A1"), attrs("A3")]),
        TransitiveChain.along([attrs("A2"), attrs("A4")]),
        FD.parse("A3 A4 -> A5"),
        attrs("A5"),
    )
    assert pair_problems(pair, ONE_SIDE.fds) == ["{A3, A4} lies inside the closure of A2"]


def test_meeting_point_kept_by_component_tables():
    pair = ChainPair(
        TransitiveChain.along([attrs("A1"), attrs("A3")]),
        TransitiveChain.along([attrs("A2"), attrs("A4 A5")]),
        FD.parse("A3 A4 A5 -> A7"),
        attrs("A7"),
    )
    assert pair_problems(pair, SHARED_DERIVATION.fds) == []
    assert find_overlapping_pairs(SHARED_DERIVATION) == []
    assert not theorem1_verdict(SHARED_DERIVATION).impossible
    assert plan_precise_2nf(SHARED_DERIVATION).succeeded

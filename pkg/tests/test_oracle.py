"""暴力預言機、探測函數族與窮舉定理測試"""
from functools import lru_cache

import pytest
from hypothesis import given, settings, strategies as st

from bishop.errors import CarrierTooLarge
from bishop.exactreal import certify_positive
from bishop.group import make_finite_group
from bishop.nbhd import ClosureEvidence, closure_probe, finite_subset
from bishop.space import bic_topology, finite_carrier, full_topology, trivial_topology
from bishop.types import VerdictKind, WitnessChain
from oracle.bruteforce import bruteforce_closure, synthesize_evidence
from oracle.family import build_family
from oracle.suite import all_subsets, exhaustive_theorem_suite, kernel_homs

SUITE_FIXTURES = ["z2_full", "z2_trivial", "z4_full", "z4_trivial", "z6_full", "z6_trivial", "s3_full"]


@lru_cache(maxsize=None)
def topology_and_family(n: int, kind: str):
    carrier = finite_carrier(f"Z{n}", range(n))
    topology = full_topology(carrier) if kind == "full" else trivial_topology(carrier)
    return topology, tuple(build_family(topology))


def engine_closure(topology, family, points):
    target = finite_subset(topology.carrier, points)
    return {x for x in topology.carrier.elements()
            if closure_probe(target, x, family).kind == VerdictKind.IN_CLOSURE}


def test_all_subsets_order():
    subsets = all_subsets(["a", "b", "c"])
    assert len(subsets) == 8
    assert subsets[0] == ()
    assert subsets[1:4] == [("a",), ("b",), ("c",)]
    assert subsets[-1] == ("a", "b", "c")


def test_bruteforce_full_and_trivial():
    full, _ = topology_and_family(4, "full")
    assert bruteforce_closure(full, [0, 2]).points == (0, 2)
    trivial, _ = topology_and_family(4, "trivial")
    assert bruteforce_closure(trivial, [1]).points == (0, 1, 2, 3)
    assert bruteforce_closure(trivial, []).points == ()


def test_bruteforce_refuses_large_or_infinite_carriers():
    full, _ = topology_and_family(4, "full")
    with pytest.raises(CarrierTooLarge):
        bruteforce_closure(full, [0], bound=3)
    with pytest.raises(ValueError):
        bruteforce_closure(bic_topology(), [0])


def test_bruteforce_on_generated_topology(load_fixture):
    ws = load_fixture("generated")
    family = list(ws.family())
    closure = bruteforce_closure(ws.topology, ["c"], family)
    assert closure.family_relative
    assert "c" in closure.points
    assert "a" not in closure.points
    assert "b" not in closure.points


def test_synthesized_evidence_answers_every_query():
    trivial, family = topology_and_family(4, "trivial")
    target = finite_subset(trivial.carrier, [0])
    evidence = synthesize_evidence(target, 1, trivial, family)
    assert isinstance(evidence, ClosureEvidence)
    chain = WitnessChain(theorem="oracle")
    for f in family:
        if certify_positive(f(1), 64).is_positive:
            assert evidence.query(f, chain, 64) == 0
    assert chain.replay(64).accepted


def test_synthesized_evidence_reports_impossible():
    full, family = topology_and_family(4, "full")
    target = finite_subset(full.carrier, [0, 2])
    impossible = synthesize_evidence(target, 1, full, family)
    assert impossible.kind == VerdictKind.IMPOSSIBLE
    assert impossible.witness_fn == "indicator(1)"
    assert impossible.exact
    member = synthesize_evidence(target, 2, full, family)
    assert member.point == 2


def test_reals_family_order():
    family = build_family(bic_topology())
    assert family.names[:4] == ["id", "const(1)", "neg(id)", "abs(id)"]
    assert not family.exact
    assert family.find("abs(id)") is not None
    assert family.audit().accepted


def test_family_respects_cap():
    family = build_family(bic_topology(), depth=3, cap=10)
    assert len(family) == 10
    assert family.truncated


def test_finite_family_is_exact(z4_full):
    family = z4_full.family()
    assert family.exact
    assert family.names[:4] == ["indicator(0)", "indicator(1)", "indicator(2)", "indicator(3)"]


@settings(max_examples=60, deadline=None)
@given(n=st.integers(1, 4), kind=st.sampled_from(["full", "trivial"]), data=st.data())
def test_closure_laws(n, kind, data):
    topology, family = topology_and_family(n, kind)
    elements = list(range(n))
    a = data.draw(st.sets(st.sampled_from(elements)))
    b = data.draw(st.sets(st.sampled_from(elements)))
    closure_a = engine_closure(topology, family, sorted(a))
    closure_b = engine_closure(topology, family, sorted(b))

    assert closure_a == set(bruteforce_closure(topology, sorted(a), family).points)
    assert a <= closure_a
    assert engine_closure(topology, family, sorted(closure_a)) == closure_a
    assert engine_closure(topology, family, sorted(a | b)) == closure_a | closure_b
    if a <= b:
        assert closure_a <= closure_b
    assert engine_closure(topology, family, []) == set()


def test_kernel_homs(load_fixture):
    assert [h.name for h in kernel_homs(make_finite_group(6))] == ["id[Z6]", "mod2", "mod3"]
    s3 = load_fixture("s3_full").require_group()
    assert kernel_homs(s3) == []


def test_suite_refuses_large_group():
    with pytest.raises(CarrierTooLarge):
        exhaustive_theorem_suite(make_finite_group(4), bound=3)


@pytest.mark.parametrize("name", SUITE_FIXTURES)
def test_suite_has_no_discrepancies(name, load_fixture):
    group = load_fixture(name).require_group()
    report = exhaustive_theorem_suite(group)
    assert report.discrepancies == []
    assert report.unreplayable == 0
    assert report.ok
    assert report.subsets_checked == 2 ** len(group.elements())
    assert "closure-probe" in report.checks_run
    assert report.chains_replayed > 0


def test_suite_report_is_deterministic(z4_full):
    group = z4_full.require_group()
    first = exhaustive_theorem_suite(group).model_dump()
    second = exhaustive_theorem_suite(group).model_dump()
    assert first == second

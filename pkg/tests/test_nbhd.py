"""鄰域、閉包證據、閉集建構與 F-補集"""
import pytest

from bishop.errors import EvidenceFailure, PreconditionUnmet
from bishop.exactreal import Dyadic, ExactReal
from bishop.group import make_reals_group
from bishop.morphism import product_topology
from bishop.nbhd import (
    ClosureEvidence, closed_from_finite, closure_probe, complement_of_u, f_complement, finite_subset,
    image_closure_check, image_evidence, intersect_closed, interval_open_check, is_open, member_evidence,
    neighborhood_preimage, open_from_finite, preimage_closed, product_closed, separating_check,
    tightness_suite, u_set, zero_set,
)
from bishop.space import full_topology, finite_carrier
from bishop.types import StepKind, VerdictKind, WitnessChain
from oracle.family import build_family

HALF = Dyadic(1, -1)


@pytest.fixture(scope="module")
def reals_group():
    return make_reals_group()


@pytest.fixture(scope="module")
def bic_family(reals_group):
    return list(build_family(reals_group.topology))


def test_u_set_on_finite_carrier(z4_full):
    opened = u_set(z4_full.fn("bump"))
    assert opened.points == (0, 1, 2, 3)
    single = u_set(z4_full.topology.leaf(1))
    assert single.points == (1,)
    assert single.witness(1, 64).inclusion.accepted
    assert single.witness(0, 64) is None


def test_complement_of_u(z4_full):
    closed = complement_of_u(z4_full.topology.leaf(1))
    assert closed.points == (0, 2, 3)
    assert closed.member_at(1, 64).kind == VerdictKind.NON_MEMBER


def test_zero_set_closure_section(reals_group):
    dist = abs(reals_group.topology.leaf(0))
    closed = zero_set(dist)
    zero = ExactReal.of(0)
    assert closed.member_at(zero, 64).is_member
    result = closed.close(member_evidence(closed, zero, zero))
    assert result.verdict.kind == VerdictKind.MEMBER
    assert result.chain.replay(64).accepted
    with pytest.raises(EvidenceFailure):
        closed.close(member_evidence(closed, ExactReal.of(1), zero))


def test_evidence_checks_every_answer(z4_full):
    target = z4_full.subset("C")
    chain = WitnessChain(theorem="probe")
    f = z4_full.topology.leaf(0)
    evidence = member_evidence(target, 0, 0)
    assert evidence.query(f, chain, 64) == 0
    assert evidence.queries == 1
    assert chain.replay(64).accepted
    liar = ClosureEvidence(0, target, lambda g, pos: 1)
    with pytest.raises(EvidenceFailure):
        liar.query(f, WitnessChain(theorem="probe"), 64)
    outsider = ClosureEvidence(0, target, lambda g, pos: 9)
    with pytest.raises(EvidenceFailure):
        outsider.query(f, WitnessChain(theorem="probe"), 64)
    with pytest.raises(EvidenceFailure):
        evidence.query(z4_full.topology.leaf(1), WitnessChain(theorem="probe"), 64)


def test_closure_probe_on_reals_prefers_nonnegative_excluder(reals_group, bic_family):
    target = finite_subset(reals_group.carrier, [0])
    result = closure_probe(target, ExactReal.of(1), bic_family)
    assert result.kind == VerdictKind.EXCLUDED_BY
    assert result.witness_fn == "abs(id)"
    assert result.bound >= HALF
    inside = closure_probe(target, ExactReal.of(0), bic_family)
    assert inside.kind == VerdictKind.IN_CLOSURE
    assert not inside.exact


def test_closure_probe_on_finite_topologies(z4_full, z4_trivial):
    full_family = list(build_family(z4_full.topology))
    assert closure_probe(z4_full.subset("C"), 1, full_family).kind == VerdictKind.EXCLUDED_BY
    trivial_family = list(build_family(z4_trivial.topology))
    assert closure_probe(z4_trivial.subset("C"), 1, trivial_family).kind == VerdictKind.IN_CLOSURE


@pytest.mark.parametrize("x", [1, 2, -1])
def test_f_complement_of_zero_in_reals(x, reals_group, bic_family):
    target = finite_subset(reals_group.carrier, [0])
    opened = f_complement(target, bic_family)
    point = ExactReal.of(x)
    member = opened.member_at(point, 64)
    assert member.is_member
    assert member.witness_fn == "abs(id)"
    assert member.bound >= HALF
    witness = opened.witness(point, 64)
    assert witness.positivity.is_positive
    assert witness.inclusion.accepted


def test_f_complement_excludes_members(reals_group, bic_family):
    target = finite_subset(reals_group.carrier, [0])
    outside = f_complement(target, bic_family).member_at(ExactReal.of(0), 64)
    assert outside.kind == VerdictKind.NON_MEMBER
    assert not outside.exact


def test_f_complement_on_finite_carrier(z4_full):
    family = list(build_family(z4_full.topology))
    opened = f_complement(z4_full.subset("C"), family, exact_family=True)
    assert opened.points == (1, 3)
    assert opened.member_at(0, 64).exact


def test_separation_and_tightness(z4_full, z4_trivial):
    full_family = list(build_family(z4_full.topology))
    verdicts = separating_check(z4_full.topology, [(0, 1), (2, 3)], full_family)
    assert all(v.kind == VerdictKind.SEPARATED for v in verdicts)
    report = tightness_suite(z4_full.topology, full_family)
    assert report.separating and report.tight and report.singletons_closed
    trivial = tightness_suite(z4_trivial.topology, list(build_family(z4_trivial.topology)))
    assert not trivial.separating
    assert trivial.consistent
    assert "(0, 1)" in trivial.unseparated


def test_open_and_closed_from_finite(z4_full, z4_trivial):
    full_family = list(build_family(z4_full.topology))
    assert is_open(open_from_finite(z4_full.subset("C"), full_family))
    trivial_family = list(build_family(z4_trivial.topology))
    assert not is_open(open_from_finite(z4_trivial.subset("C"), trivial_family))
    closed = closed_from_finite(z4_trivial.subset("C"), trivial_family)
    with pytest.raises(PreconditionUnmet):
        closed.close(member_evidence(closed, 1, 0))


def test_closed_from_finite_refutes_bad_evidence(z4_full):
    family = list(build_family(z4_full.topology))
    closed = closed_from_finite(z4_full.subset("C"), family)
    assert closed.close(member_evidence(closed, 2, 0)).verdict.kind == VerdictKind.MEMBER
    with pytest.raises(EvidenceFailure):
        closed.close(member_evidence(closed, 1, 0))


def test_product_closed():
    z2 = full_topology(finite_carrier("Z2", range(2)))
    family = list(build_family(z2))
    left = closed_from_finite(finite_subset(z2.carrier, [0]), family)
    right = closed_from_finite(finite_subset(z2.carrier, [1]), family)
    square = product_topology(z2, z2)
    closed = product_closed(left, right, square)
    assert closed.points == ((0, 1),)
    assert closed.close(member_evidence(closed, (0, 1), (0, 1))).verdict.kind == VerdictKind.MEMBER
    with pytest.raises(EvidenceFailure):
        closed.close(member_evidence(closed, (1, 1), (0, 1)))


def test_intersect_closed(z4_full):
    family = list(build_family(z4_full.topology))
    left = closed_from_finite(z4_full.subset("{0, 1, 2}"), family)
    right = closed_from_finite(z4_full.subset("{2, 3}"), family)
    both = intersect_closed(left, right)
    assert both.points == (2,)
    assert both.close(member_evidence(both, 2, 2)).verdict.kind == VerdictKind.MEMBER


def test_preimage_closed_along_negation(reals_group):
    shifted = reals_group.topology.leaf(0).shift(-1)
    closed = preimage_closed(reals_group.neg_mor, zero_set(shifted))
    point = ExactReal.of(-1)
    assert closed.member_at(point, 64).is_member
    assert not closed.member_at(ExactReal.of(1), 64).is_member
    result = closed.close(member_evidence(closed, point, point))
    assert result.verdict.kind == VerdictKind.MEMBER


def test_neighborhood_preimage(reals_group):
    g = abs(reals_group.topology.leaf(0).shift(-1))
    assert neighborhood_preimage(reals_group.neg_mor, g).accepted


def test_image_closure_check(z4_full):
    group = z4_full.require_group()
    family = list(build_family(z4_full.topology))
    source = z4_full.subset("{1}")
    evidence = member_evidence(source, 1, 1)
    result = image_closure_check(group.neg_mor, source, 1, evidence, family)
    assert result.kind == VerdictKind.IN_CLOSURE
    assert result.point == "3"


def test_interval_is_open(reals_group):
    assert interval_open_check(-1, 2, reals_group.topology).accepted
    assert interval_open_check(HALF, 3, reals_group.topology).accepted


def test_image_evidence_records_pulled_back_queries(z4_full):
    group = z4_full.require_group()
    source = z4_full.subset("{1}")
    evidence = member_evidence(source, 1, 1)
    chain = WitnessChain(theorem="image")
    moved = image_evidence(group.neg_mor, evidence, chain, 64)
    assert moved.point == 3
    assert moved.query(z4_full.topology.leaf(3), chain, 64) == 3
    assert evidence.queries == 1
    queries = [step for step in chain.steps if step.kind == StepKind.QUERY]
    assert len(queries) == 2
    assert chain.replay(64).accepted

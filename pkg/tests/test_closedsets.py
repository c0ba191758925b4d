"""閉子集定理：子群、平移與取逆、開子群、交換子與正規化子"""
import pytest

from bishop.closedsets import (
    abelian_closure_refuter, center_closed, center_subset, char_closed_subgroup, char_open_subgroup,
    clopen_complement, clopen_subgroup, closure_neg_eq, closure_translate_eq, commutator_maps, constant_mor,
    finite_subgroup, is_normal, kernel_closed, kernel_subset, neg_closed, normal_closure, normalizer_closed,
    normalizer_subset, open_subgroup_closed, restricted_normal_mor, separating_iff_zero_closed, subgroup,
    subgroup_closure, translate_closed, validate_subgroup,
)
from bishop.errors import EvidenceFailure, InclusionViolation, NotASubgroup, PreconditionUnmet
from bishop.exactreal import ExactReal
from bishop.group import make_finite_group, make_reals_group, reduction_hom
from bishop.morphism import lift_check
from bishop.nbhd import closed_from_finite, finite_subset, is_open, member_evidence, open_from_finite, u_set
from bishop.types import VerdictKind, WitnessChain
from oracle.family import build_family


@pytest.fixture(scope="module")
def z4(z4_full):
    group = z4_full.require_group()
    return group, list(z4_full.family())


@pytest.fixture(scope="module")
def s3(s3_full):
    group = s3_full.require_group()
    return group, list(s3_full.family())


def test_validate_subgroup(z4):
    group, _ = z4
    validate_subgroup(group, finite_subset(group.carrier, [0, 2]))
    with pytest.raises(NotASubgroup):
        validate_subgroup(group, finite_subset(group.carrier, [0, 1]))
    with pytest.raises(NotASubgroup):
        validate_subgroup(group, finite_subset(group.carrier, [1, 3]))


def test_normality_in_s3(s3):
    group, _ = s3
    assert is_normal(finite_subgroup(group, ["e", "r", "q"]))
    assert not is_normal(finite_subgroup(group, ["e", "s"]))


def test_commutator_maps(s3, z4):
    group, _ = s3
    maps = commutator_maps(group)
    assert maps.abel(("r", "s")) == "q"
    assert maps.check_identities().accepted
    assert maps.normal("s")("r") == group.conj("s", "r")
    abelian = commutator_maps(z4[0])
    assert all(abelian.abel((x, y)) == 0 for x in range(4) for y in range(4))


def test_constant_morphism_lifts(s3):
    group, _ = s3
    c = constant_mor(group, group.topology, "r")
    assert c("u") == "r"
    assert lift_check(c).accepted


def test_neg_closed(z4):
    group, family = z4
    closed = neg_closed(group, closed_from_finite(finite_subset(group.carrier, [1]), family))
    assert closed.points == (3,)
    assert closed.close(member_evidence(closed, 3, 3)).verdict.kind == VerdictKind.MEMBER
    with pytest.raises(EvidenceFailure):
        closed.close(member_evidence(closed, 2, 3))


def test_translate_closed(z4):
    group, family = z4
    closed = translate_closed(group, 1, closed_from_finite(finite_subset(group.carrier, [0, 2]), family))
    assert closed.points == (1, 3)
    assert closed.close(member_evidence(closed, 3, 1)).verdict.kind == VerdictKind.MEMBER
    with pytest.raises(EvidenceFailure):
        closed.close(member_evidence(closed, 0, 1))


@pytest.mark.parametrize("fixture", ["z4_full", "z4_trivial"])
def test_closure_commutes_with_neg_and_translation(fixture, request):
    ws = request.getfixturevalue(fixture)
    group, family = ws.require_group(), list(ws.family())
    source = finite_subset(group.carrier, [1])
    assert closure_neg_eq(group, source, family).accepted
    for x0 in range(4):
        assert closure_translate_eq(group, x0, source, family).accepted


def test_closure_translation_in_s3(s3):
    group, family = s3
    source = finite_subset(group.carrier, ["r"])
    assert closure_neg_eq(group, source, family).accepted
    assert closure_translate_eq(group, "s", source, family).accepted


def test_closure_commutes_with_neg_and_translation_on_reals():
    group = make_reals_group()
    family = list(build_family(group.topology))
    source = finite_subset(group.carrier, [ExactReal.of(0)])
    assert closure_neg_eq(group, source, family).accepted
    assert closure_translate_eq(group, ExactReal.of(1), source, family).accepted


def test_separating_iff_zero_closed(z4_full, z4_trivial):
    full = separating_iff_zero_closed(z4_full.require_group(), list(z4_full.family()))
    assert full.accepted
    assert full.detail == "separating=True zero_closed=True"
    trivial = separating_iff_zero_closed(z4_trivial.require_group(), list(z4_trivial.family()))
    assert trivial.accepted
    assert trivial.detail == "separating=False zero_closed=False"
    assert separating_iff_zero_closed(make_reals_group(), []).accepted


def test_open_subgroup_is_closed(z4):
    group, family = z4
    H = finite_subgroup(group, [0, 2])
    closed = open_subgroup_closed(H, open_from_finite(H.subset, family))
    result = closed.close(member_evidence(H.subset, 2, 2))
    assert result.verdict.kind == VerdictKind.MEMBER
    assert result.chain.replay(64).accepted
    with pytest.raises(EvidenceFailure):
        closed.close(member_evidence(H.subset, 1, 2))


def test_open_subgroup_requires_openness(z4_trivial):
    group = z4_trivial.require_group()
    H = finite_subgroup(group, [0, 2])
    with pytest.raises(PreconditionUnmet):
        open_subgroup_closed(H, open_from_finite(H.subset, list(z4_trivial.family())))


def test_subgroup_closure_operations(z4_trivial):
    group = z4_trivial.require_group()
    H = finite_subgroup(group, [0])
    closure = subgroup_closure(H, z4_trivial.family())
    assert closure.member_at(1).kind == VerdictKind.MEMBER
    chain = WitnessChain(theorem="closure-ops")
    ex = member_evidence(H.subset, 1, 0)
    ey = member_evidence(H.subset, 2, 0)
    total = closure.plus_evidence(ex, ey, chain)
    assert total.point == 3
    audit = closure.audit(total, chain)
    assert audit.kind == VerdictKind.IN_CLOSURE
    assert audit.probes_used > 0
    assert closure.neg_evidence(ex, chain).point == 3
    assert closure.zero_evidence().point == 0
    assert chain.replay(64).accepted


def test_subgroup_closure_excludes_on_full_topology(z4):
    group, family = z4
    closure = subgroup_closure(finite_subgroup(group, [0, 2]), family)
    assert closure.member_at(1).kind == VerdictKind.NON_MEMBER
    assert closure.member_at(2).kind == VerdictKind.MEMBER


def test_abelian_closure_refuter(z4, s3):
    group, family = z4
    H = finite_subgroup(group, [0, 2])
    assert abelian_closure_refuter(H, 1, 3, family).verdict.kind == VerdictKind.NO_SEPARATION

    group, family = s3
    A3 = finite_subgroup(group, ["e", "r", "q"])
    square = finite_subset(group.square.carrier, [("r", "s")])
    evidence = member_evidence(square, ("r", "s"), ("r", "s"))
    found = abelian_closure_refuter(A3, "r", "s", family, evidence=evidence)
    assert found.verdict.kind == VerdictKind.SEPARATION_FOUND
    assert "違反假設" in found.verdict.detail
    whole = finite_subgroup(group, group.elements())
    assert abelian_closure_refuter(whole, "r", "s", family).verdict.kind == VerdictKind.PRECONDITION_UNVERIFIED


def test_refuter_needs_separating_family(z4_trivial):
    group = z4_trivial.require_group()
    H = finite_subgroup(group, [0])
    result = abelian_closure_refuter(H, 1, 2, list(z4_trivial.family()))
    assert result.verdict.kind == VerdictKind.PRECONDITION_UNVERIFIED


def test_center(s3):
    group, family = s3
    whole = finite_subgroup(group, group.elements())
    assert center_subset(group, whole).points == ("e",)
    assert center_closed(group, whole, "r", family).verdict.kind == VerdictKind.SEPARATION_FOUND
    assert center_closed(group, whole, "e", family).verdict.kind == VerdictKind.NO_SEPARATION


def test_kernel():
    z4, z2 = make_finite_group(4), make_finite_group(2)
    h = reduction_hom(z4, z2, 2)
    assert kernel_subset(h).points == (0, 2)
    family = list(build_family(z2.topology))
    assert kernel_closed(h, 1, family).verdict.kind == VerdictKind.SEPARATION_FOUND
    assert kernel_closed(h, 2, family).verdict.kind == VerdictKind.NO_SEPARATION


def test_normal_closure(s3):
    group, family = s3
    A3 = finite_subgroup(group, ["e", "r", "q"])
    chain = WitnessChain(theorem="normal-closure")
    moved = normal_closure(A3, "s", member_evidence(A3.subset, "r", "r"), chain)
    assert moved.point == "q"
    assert subgroup_closure(A3, family).audit(moved, chain).kind == VerdictKind.IN_CLOSURE
    with pytest.raises(PreconditionUnmet):
        normal_closure(finite_subgroup(group, ["e", "s"]), "r", member_evidence(A3.subset, "e", "e"), chain)


def test_normalizer(s3):
    group, family = s3
    subset = finite_subset(group.carrier, ["e", "s"])
    H = subgroup(group, subset, closed=closed_from_finite(subset, family))
    assert normalizer_subset(H).points == ("e", "s")
    closed = normalizer_closed(H)
    assert closed.close(member_evidence(closed, "s", "s")).verdict.kind == VerdictKind.MEMBER
    with pytest.raises(EvidenceFailure):
        closed.close(member_evidence(closed, "r", "s"))
    with pytest.raises(PreconditionUnmet):
        normalizer_closed(finite_subgroup(group, ["e", "s"]))


def test_restricted_normal_morphism(s3):
    group, _ = s3
    mor = restricted_normal_mor(finite_subgroup(group, ["e", "r", "q"]), "s")
    assert mor("r") == "q"
    assert lift_check(mor).accepted
    with pytest.raises(PreconditionUnmet):
        restricted_normal_mor(finite_subgroup(group, ["e", "s"]), "r")


def test_char_open_subgroup(z4_full, z4):
    group, _ = z4
    C = finite_subgroup(group, [0, 2])
    opened = char_open_subgroup(C, u_set(z4_full.topology.leaf(0)), 0)
    assert is_open(opened)
    with pytest.raises(InclusionViolation):
        char_open_subgroup(C, u_set(z4_full.topology.leaf(1)), 1)


def test_char_closed_subgroup(z4_full, z4):
    group, family = z4
    C = finite_subgroup(group, [0, 2])
    O = u_set(z4_full.topology.leaf(0))
    oc = closed_from_finite(finite_subset(group.carrier, [0]), family)
    closed = char_closed_subgroup(C, O, 0, oc, family)
    assert closed.close(member_evidence(C.subset, 2, 2)).verdict.kind == VerdictKind.MEMBER
    with pytest.raises(EvidenceFailure):
        closed.close(member_evidence(C.subset, 1, 2))
    with pytest.raises(PreconditionUnmet):
        char_closed_subgroup(C, O, 1, oc, family)


def test_clopen_subgroup(z4_full, z4):
    group, family = z4
    C = finite_subgroup(group, [0, 2])
    report = clopen_subgroup(C, u_set(z4_full.topology.leaf(0)), 0, family)
    assert report.open and report.closed
    assert report.to_json()["clopen"] is True
    assert sorted(report.witnesses) == ["0", "2"]


def test_clopen_complement(z4, z4_trivial):
    group, family = z4
    C = finite_subset(group.carrier, [1, 3])
    complement = finite_subgroup(group, [0, 2])
    report = clopen_complement(group, C, complement, 0, family)
    assert report.equality.accepted
    assert report.clopen
    with pytest.raises(PreconditionUnmet):
        clopen_complement(group, C, complement, 1, family)
    with pytest.raises(PreconditionUnmet):
        clopen_complement(group, finite_subset(group.carrier, []), complement, 0, family)

    trivial = z4_trivial.require_group()
    with pytest.raises(PreconditionUnmet):
        clopen_complement(trivial, finite_subset(trivial.carrier, [1, 3]), finite_subgroup(trivial, [0, 2]), 0,
                          list(z4_trivial.family()))

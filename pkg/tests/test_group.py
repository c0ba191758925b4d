"""拓撲群：公理、運算的態射證書、同構與同態分類"""
import pytest

from bishop.errors import ClassificationFailure, GroupLawViolation, InvalidTable
from bishop.exactreal import Dyadic, ExactReal
from bishop.group import (
    BishopHom, GroupStructure, classify_hom, cyclic_structure, k_iso_check, make_finite_group,
    make_hom, make_reals_group, make_trivial_group, neg_iso_check, pointwise_mor_group,
    product_group, reduction_hom, scaling_hom, sub_criterion, sub_map, sub_morphism_for, table_structure,
    translate_fn, translation_iso_check, translation_mor, validate_group_laws,
)
from bishop.morphism import lift_check, make_morphism
from bishop.space import FromSubbase, finite_carrier
from bishop.types import Verdict, VerdictKind


@pytest.fixture(scope="module")
def reals_group():
    return make_reals_group()


def test_table_structure_rejects_non_latin_square():
    elements = ["e", "a"]
    table = {("e", "e"): "e", ("e", "a"): "a", ("a", "e"): "a", ("a", "a"): "a"}
    with pytest.raises(InvalidTable):
        table_structure("bad", elements, table, "e")


def test_table_structure_rejects_wrong_identity():
    table = {(a, b): (a + b) % 2 for a in range(2) for b in range(2)}
    with pytest.raises(InvalidTable):
        table_structure("Z2", [0, 1], table, 1)


def test_group_laws_catch_non_associative_operation():
    broken = GroupStructure(name="minus", plus=lambda x, y: (x - y) % 3, neg=lambda x: x, zero=0)
    with pytest.raises(GroupLawViolation):
        validate_group_laws(broken, finite_carrier("Z3", range(3)))


def test_reals_addition_on_hundred_pairs(reals_group):
    pairs = reals_group.square.carrier.sample(100, seed=3)
    assert len(pairs) == 100
    result = lift_check(reals_group.plus_mor, probes=pairs, tol=Dyadic.pow2(-20))
    assert result.kind == VerdictKind.ACCEPTED
    for x, y in pairs:
        assert reals_group.same(reals_group.plus(x, y), reals_group.plus(y, x))


@pytest.mark.parametrize("n", [1, 2, 4, 6])
def test_cyclic_groups_assemble(n):
    group = make_finite_group(n)
    assert group.is_abelian
    assert lift_check(group.plus_mor).accepted
    assert lift_check(group.neg_mor).accepted


def test_trivial_topology_group():
    group = make_trivial_group(cyclic_structure(4), finite_carrier("Z4", range(4)))
    assert group.name == "Z4[trivial]"
    assert lift_check(sub_map(group)).accepted


def test_s3_is_not_abelian(s3_full):
    group = s3_full.require_group()
    assert not group.is_abelian
    assert group.conj("r", "s") == "u"


def test_commutativity_on_reals_is_checked(reals_group):
    assert reals_group.is_abelian
    left = GroupStructure(name="left", plus=lambda x, y: x, neg=reals_group.neg, zero=reals_group.zero)
    assert not reals_group.model_copy(update={"structure": left}).is_abelian


@pytest.mark.parametrize("fixture", ["z4_full", "z4_trivial", "s3_full"])
def test_isomorphisms_on_finite_groups(fixture, request):
    group = request.getfixturevalue(fixture).require_group()
    assert neg_iso_check(group).accepted
    assert k_iso_check(group).accepted
    for x0 in group.elements():
        assert translation_iso_check(group, x0).accepted


def test_isomorphisms_on_reals(reals_group):
    assert neg_iso_check(reals_group).accepted
    assert k_iso_check(reals_group).accepted
    assert translation_iso_check(reals_group, ExactReal.of(Dyadic(3, -1))).accepted


def test_translation_left_and_right(s3_full):
    group = s3_full.require_group()
    left = translation_mor(group, "r")
    right = translation_mor(group, "r", side="right")
    assert left("s") == group.plus("r", "s")
    assert right("s") == group.plus("s", "r")
    assert lift_check(right).accepted
    f = group.topology.leaf(0)
    moved = translate_fn(group, f, "r")
    assert moved.name == "indicator(e)^1[r]"
    assert moved("q").exact == Dyadic(1)


def test_sub_criterion_recovers_operations(s3_full, reals_group):
    group = s3_full.require_group()
    rebuilt = sub_criterion("S3'", group.structure, group.topology, sub_morphism_for(group), group.square)
    for x in group.elements():
        assert rebuilt.neg_mor(x) == group.neg(x)
        for y in group.elements():
            assert rebuilt.plus_mor((x, y)) == group.plus(x, y)
    real = sub_criterion("R'", reals_group.structure, reals_group.topology, sub_morphism_for(reals_group))
    point = (ExactReal.of(2), ExactReal.of(Dyadic(-1, -1)))
    assert real.plus_mor(point).exact == Dyadic(3, -1)


@pytest.mark.parametrize("a", [Dyadic(-2), Dyadic(0), Dyadic(1), Dyadic(3, -1)])
def test_classify_scaling_homs(a, reals_group):
    found = classify_hom(scaling_hom(a, reals_group))
    assert found.estimate() == a
    assert found.verdict.accepted


def test_classify_rejects_non_linear_map(reals_group):
    mor = make_morphism("abs", lambda x: abs(ExactReal.of(x)), reals_group.topology, reals_group.topology,
                        [FromSubbase(index=0)])
    fake = BishopHom(morphism=mor, source=reals_group, target=reals_group,
                     laws=Verdict(kind=VerdictKind.ACCEPTED))
    with pytest.raises(ClassificationFailure):
        classify_hom(fake)


def test_reduction_hom_is_exact():
    h = reduction_hom(make_finite_group(4), make_finite_group(2), 2)
    assert h.laws.accepted
    assert h.laws.exact
    assert [h(x) for x in range(4)] == [0, 1, 0, 1]


def test_make_hom_rejects_non_homomorphism():
    z4 = make_finite_group(4)
    shift = make_morphism("succ", lambda x: (x + 1) % 4, z4.topology, z4.topology,
                          [FromSubbase(index=(i - 1) % 4) for i in range(4)])
    assert lift_check(shift).accepted
    with pytest.raises(GroupLawViolation):
        make_hom(shift, z4, z4)


def test_product_group():
    z2 = make_finite_group(2)
    square = product_group(z2, z2)
    assert square.zero == (0, 0)
    assert square.plus((1, 0), (1, 1)) == (0, 1)
    assert lift_check(square.plus_mor).accepted


def test_pointwise_morphism_group(reals_group):
    registry = [scaling_hom(a, reals_group).morphism for a in (1, 3)]
    group = pointwise_mor_group(reals_group.topology, reals_group, registry)
    assert group.check_laws().accepted
    total = group.plus(registry[0], registry[1])
    assert total(ExactReal.of(2)).exact == Dyadic(8)

"""態射：提升檢查、合成、乘積與截面"""
import pytest

from bishop.errors import MissingCert, MorphismMismatch
from bishop.exactreal import Dyadic, ExactReal
from bishop.group import make_finite_group, make_reals_group
from bishop.morphism import (
    compose_mor, fn_as_morphism, fn_section, identity_mor, insertion, iso_check, insertion_openness,
    lift_check, make_morphism, OpennessWitness, pair_mor, product_topology, projection, pull_back, split_pair,
)
from bishop.space import FromSubbase, bic_topology, finite_carrier, full_topology
from bishop.types import VerdictKind


@pytest.fixture(scope="module")
def reals_group():
    return make_reals_group()


def test_identity_lifts(reals_group):
    assert lift_check(identity_mor(reals_group.topology)).accepted
    z4 = full_topology(finite_carrier("Z4", range(4)))
    assert lift_check(identity_mor(z4)).accepted


def test_missing_lift_cert_is_reported():
    bic = bic_topology()
    h = make_morphism("double", lambda x: ExactReal.of(x).scale(2), bic, bic, [None])
    with pytest.raises(MissingCert):
        lift_check(h)


def test_wrong_lift_cert_is_rejected():
    bic = bic_topology()
    h = make_morphism("double", lambda x: ExactReal.of(x).scale(2), bic, bic, [FromSubbase(index=0)])
    result = lift_check(h)
    assert result.kind == VerdictKind.REJECTED
    assert result.witness_fn == "double"
    assert result.detail.startswith("id∘double")


def test_compose_substitutes_certificates(reals_group):
    twice = compose_mor(reals_group.neg_mor, reals_group.neg_mor)
    assert lift_check(twice).accepted
    assert twice(ExactReal.of(3)).exact == Dyadic(3)
    assert twice.name == "-∘-"


def test_compose_requires_matching_topologies(reals_group):
    z4 = make_finite_group(4)
    with pytest.raises(MorphismMismatch):
        compose_mor(z4.neg_mor, reals_group.neg_mor)


def test_pull_back_along_negation(reals_group):
    dist = abs(reals_group.topology.leaf(0) + reals_group.topology.constant(1))
    pulled = pull_back(dist, reals_group.neg_mor)
    assert pulled(ExactReal.of(1)).exact == Dyadic(0)
    assert pulled.check().accepted


def test_projections_and_pairing(reals_group):
    square = reals_group.square
    first, second = projection(square, 0), projection(square, 1)
    assert lift_check(first).accepted
    assert lift_check(second).accepted
    swap = pair_mor(second, first, square)
    assert lift_check(swap).accepted
    left, right = split_pair(swap)
    point = (ExactReal.of(1), ExactReal.of(2))
    assert left(point).exact == Dyadic(2)
    assert right(point).exact == Dyadic(1)


def test_finite_product_topology():
    z2 = full_topology(finite_carrier("Z2", range(2)))
    square = product_topology(z2, z2)
    assert len(square.subbase) == 4
    assert square.carrier.size() == 4
    assert lift_check(projection(square, 1)).accepted


def test_insertion_fixes_one_slot(reals_group):
    ins = insertion(reals_group.square, ExactReal.of(2), slot=1)
    assert lift_check(ins).accepted
    assert ins.name == "i[2, ·]"
    value = ins(ExactReal.of(5))
    assert value[0].exact == Dyadic(2) and value[1].exact == Dyadic(5)


def test_fn_section(reals_group):
    total = pull_back(reals_group.topology.leaf(0), reals_group.plus_mor)
    section = fn_section(total, ExactReal.of(2))
    assert section(ExactReal.of(1)).exact == Dyadic(3)
    assert section.check().accepted


def test_insertion_is_open(reals_group):
    witness = insertion_openness(reals_group.square, ExactReal.of(1), slot=1)
    assert witness.entries
    ins = insertion(reals_group.square, ExactReal.of(1), slot=1)
    # i_x 不是滿射，只檢查開性見證本身的等式
    for entry in witness.entries:
        composed = entry.g.fn.precompose(ins.map)
        assert composed(ExactReal.of(3)).exact == entry.f(ExactReal.of(3)).exact


def test_iso_check_rejects_non_inverse(reals_group):
    result = iso_check(reals_group.neg_mor, lambda x: x, OpennessWitness(morphism="-"))
    assert result.kind == VerdictKind.REJECTED
    assert result.point == "1"


def test_iso_check_requires_witness_for_every_function(reals_group):
    bic = reals_group.topology
    result = iso_check(reals_group.neg_mor, reals_group.neg, OpennessWitness(morphism="-"))
    assert result.kind == VerdictKind.REJECTED
    assert result.witness_fn == bic.leaf(0).name

    wrong = OpennessWitness(morphism="-")
    wrong.add(bic.leaf(0), bic.leaf(0), "id = id∘-")
    assert iso_check(reals_group.neg_mor, reals_group.neg, wrong).kind != VerdictKind.ACCEPTED


def test_fn_as_morphism(reals_group):
    bic = reals_group.topology
    f = abs(bic.leaf(0)).renamed("dist")
    assert lift_check(fn_as_morphism(f, bic)).accepted
    z4 = full_topology(finite_carrier("Z4", range(4)))
    with pytest.raises(ValueError):
        fn_as_morphism(f, z4)

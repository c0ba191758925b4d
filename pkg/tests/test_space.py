"""載體、點函數、證書樹與拓撲"""
import pytest

from bishop.errors import MalformedCert
from bishop.exactreal import Dyadic, ExactReal, fn_abs, fn_scale
from bishop.space import (
    BicCompose, CertFn, CertRule, Const, FromSubbase, PointFn, Sum, bic_topology, cert_max, finite_carrier,
    full_topology, product_carrier, reals_carrier, restrict_fn, restrict_topology, sub_carrier, substitute,
    trivial_topology, validate_structure,
)
from bishop.types import VerdictKind


def test_finite_carrier_requires_distinct_points():
    with pytest.raises(ValueError):
        finite_carrier("X", [])
    with pytest.raises(ValueError):
        finite_carrier("X", [1, 1])


def test_finite_sample_is_exhaustive():
    carrier = finite_carrier("Z3", range(3))
    assert carrier.sample(100) == [0, 1, 2]
    assert carrier.eq_at(0, 1, 8).kind == VerdictKind.APART


def test_reals_sample_is_deterministic():
    carrier = reals_carrier()
    first = [x.exact for x in carrier.sample(32, seed=7)]
    second = [x.exact for x in carrier.sample(32, seed=7)]
    assert first == second
    assert len(first) == 32
    assert first[:4] == [Dyadic(0), Dyadic(1), Dyadic(-1), Dyadic(1, -1)]
    assert all(abs(d) <= Dyadic(4) for d in first)


def test_reals_equality_is_three_valued():
    carrier = reals_carrier()
    assert carrier.eq_at(ExactReal.of(1), ExactReal.of(1), 8).kind == VerdictKind.EQUAL
    assert carrier.eq_at(ExactReal.of(1), ExactReal.of(Dyadic(3, -1)), 8).kind == VerdictKind.APART
    close = ExactReal.limit(lambda n: ExactReal.of(Dyadic(1, -n - 4)))
    undecided = carrier.eq_at(close, ExactReal.of(0), 6)
    assert undecided.kind == VerdictKind.EQUAL
    assert not undecided.exact


def test_product_carrier_elements_and_labels():
    carrier = product_carrier(finite_carrier("A", ["a", "b"]), reals_carrier())
    assert not carrier.is_finite
    assert carrier.contains(("a", 1))
    assert not carrier.contains(("c", 1))
    assert carrier.label(("a", ExactReal.of(Dyadic(1, -1)))) == "(a, 1/2^1)"
    grid = product_carrier(finite_carrier("A", ["a", "b"]), finite_carrier("B", [0, 1]))
    assert grid.size() == 4


def test_sub_carrier_checks_parent():
    parent = finite_carrier("Z4", range(4))
    assert sub_carrier(parent, "H", [0, 2]).elements() == [0, 2]
    with pytest.raises(ValueError):
        sub_carrier(parent, "H", [0, 5])
    with pytest.raises(ValueError):
        sub_carrier(reals_carrier(), "P", [1])


def test_point_fn_caches_values():
    calls = []

    def square(x):
        calls.append(x)
        return x * x

    f = PointFn("square", square)
    assert f(3).exact == Dyadic(9)
    assert f(3).exact == Dyadic(9)
    assert calls == [3]


def test_indicator_and_table_point_fns():
    indicator = PointFn.indicator("a")
    assert indicator("a").exact == Dyadic(1)
    assert indicator("b").exact == Dyadic(0)
    table = PointFn.from_table("t", {"a": Dyadic(1, -1), "b": Dyadic(-2)})
    assert table("b").exact == Dyadic(-2)


def test_cert_tree_serialization():
    cert = cert_max(FromSubbase(index=0), Const(value=Dyadic(1)))
    tree = cert.to_tree()
    assert tree["rule"] == "BicCompose"
    assert tree["phi"] == "scale(1/2^1, id)"
    assert CertRule.SUM in cert.rules_used()
    assert CertRule.FROM_SUBBASE in cert.rules_used()


def test_substitute_replaces_leaves():
    cert = Sum(left=FromSubbase(index=0), right=FromSubbase(index=1))
    images = [Const(value=Dyadic(2)), BicCompose(phi=fn_abs(), inner=FromSubbase(index=0))]
    swapped = substitute(cert, images)
    assert swapped.left == Const(value=Dyadic(2))
    assert swapped.right.rule == CertRule.BIC_COMPOSE
    with pytest.raises(MalformedCert):
        substitute(FromSubbase(index=3), images)


def test_validate_structure_checks_indices():
    validate_structure(Sum(left=FromSubbase(index=0), right=Const(value=Dyadic(1))), 1, 3)
    with pytest.raises(MalformedCert):
        validate_structure(Sum(left=FromSubbase(index=0), right=FromSubbase(index=2)), 2, 3)


def test_denote_follows_cert():
    bic = bic_topology()
    f = bic.denote(BicCompose(phi=fn_scale(3), inner=Sum(left=FromSubbase(index=0), right=Const(value=Dyadic(1)))))
    assert f(ExactReal.of(2)).exact == Dyadic(9)


def test_register_keeps_only_accepted():
    bic = bic_topology()
    good = abs(bic.leaf(0)).renamed("dist")
    assert bic.register(good).accepted
    assert "dist" in bic.registry
    bad = CertFn(PointFn("fake", lambda x: 7), FromSubbase(index=0), bic)
    assert bic.register(bad).kind == VerdictKind.REJECTED
    assert "fake" not in bic.registry


def test_full_and_trivial_topologies():
    carrier = finite_carrier("Z3", range(3))
    full = full_topology(carrier)
    assert [g(1).exact for g in full.subbase] == [Dyadic(0), Dyadic(1), Dyadic(0)]
    trivial = trivial_topology(carrier)
    assert len(trivial.subbase) == 1
    assert trivial.constant(3).check().accepted


def test_restriction_keeps_certificates():
    carrier = finite_carrier("Z4", range(4))
    full = full_topology(carrier)
    sub = restrict_topology(full, sub_carrier(carrier, "H", [0, 2]))
    indicator = full.leaf(2)
    restricted = restrict_fn(indicator, sub)
    assert restricted.cert is indicator.cert
    assert restricted.check().accepted
    with pytest.raises(ValueError):
        restrict_fn(indicator, restrict_topology(full_topology(carrier), sub.carrier))

"""證書語料：正確的證書必須通過，損壞的證書必須被拒絕並指出失敗探針"""
from fractions import Fraction

import pytest

from bishop.errors import MalformedCert
from bishop.exactreal import (
    Dyadic, ExactReal, fn_abs, fn_clamp, fn_compose, fn_const, fn_id, fn_max, fn_min, fn_neg, fn_scale,
    fn_shift, fn_sum,
)
from bishop.group import cyclic_structure, make_full_group
from bishop.space import (
    BicCompose, CertFn, Const, Extensional, FromSubbase, Limit, LimitLevel, PointFn, Sum, bic_topology,
    check_cert, finite_carrier, full_topology, realfn_cert, trivial_topology,
)
from bishop.types import VerdictKind
from oracle.certs import indicator_fn, table_fn

TOL = Dyadic.pow2(-10)
PROBES = 32
LIMIT_DEPTH = 8

PHIS = [
    fn_id(),
    fn_abs(),
    fn_neg(),
    fn_const(Dyadic(1, -3)),
    fn_scale(3),
    fn_shift(-1),
    fn_max(fn_id(), fn_const(0)),
    fn_min(fn_id(), fn_const(1)),
    fn_clamp(-1, 1),
    fn_compose(fn_abs(), fn_shift(1)),
    fn_sum(fn_id(), fn_abs()),
    fn_scale(Dyadic(-5, -2), fn_abs()),
    fn_clamp(0, 1, fn_sum(fn_const(1), fn_neg(fn_abs()))),
]


def _third(x) -> ExactReal:
    return ExactReal.from_fraction(ExactReal.of(x).exact.to_fraction() / 3)


def third_limit(bad_level: int = None, bound_shift: int = 1) -> Limit:
    """x ↦ x/3 在 [-4, 4] 上的一致極限：第 n 層為 q_n·x，|q_n - 1/3|·4 ≤ 2^-(n+1)"""
    def stream(n: int) -> LimitLevel:
        scale = 1 << (n + 3)
        q = Dyadic(scale // 3, -(n + 3))
        if n == bad_level:
            q = q + Dyadic(1, -2)
        return LimitLevel(cert=BicCompose(phi=fn_scale(q), inner=FromSubbase(index=0)),
                          bound=Dyadic.pow2(-n - bound_shift))

    return Limit(generator="third", stream=stream)


def good_corpus():
    bic = bic_topology()
    items = [realfn_cert(phi, bic) for phi in PHIS]
    x = bic.leaf(0)
    one = bic.constant(1)
    items += [
        x + x,
        x.maximum(one),
        abs(x - one),
        x.positive_part(),
        x.scale(2).shift(1),
        bic.constant(Fraction(1, 3)),
        CertFn(PointFn("third", _third), third_limit(), bic),
    ]
    z4 = make_full_group(cyclic_structure(4), finite_carrier("Z4", range(4))).topology
    items += [indicator_fn(z4, p) for p in range(4)]
    items.append(table_fn(z4, "table", {0: Dyadic(1), 1: Dyadic(1, -1), 2: Dyadic(0), 3: Dyadic(-3)}))
    s3 = full_topology(finite_carrier("S3", ["e", "r", "q", "s", "t", "u"]))
    items.append(indicator_fn(s3, "r"))
    items.append(trivial_topology(finite_carrier("Z2", [0, 1])).constant(Dyadic(5, -1)))
    return items


def corrupted_corpus():
    """(說明, 證書, 點函數, 拓撲)"""
    bic = bic_topology()
    ident = bic.subbase[0]
    third = PointFn("third", _third)
    z4 = full_topology(finite_carrier("Z4", range(4)))
    return [
        ("abs 的證書配 id", BicCompose(phi=fn_abs(), inner=FromSubbase(index=0)), ident, bic),
        ("常數值錯誤", Const(value=Dyadic(1)), PointFn.constant(2), bic),
        ("係數錯誤", BicCompose(phi=fn_scale(2), inner=FromSubbase(index=0)),
         PointFn.from_realfn(fn_scale(3)), bic),
        ("位移小於容差的兩倍", Sum(left=FromSubbase(index=0), right=Const(value=Dyadic(1, -9))), ident, bic),
        ("Sum 少了一項", Sum(left=FromSubbase(index=0), right=Const(value=Dyadic(0))),
         PointFn.from_realfn(fn_shift(1)), bic),
        ("等式標記包住錯誤證書", Extensional(inner=Const(value=Dyadic(0)), eq_token="refl"), ident, bic),
        ("Limit 宣告的上界太大", third_limit(bound_shift=-1), third, bic),
        ("Limit 第 5 層錯誤", third_limit(bad_level=5), third, bic),
        ("Sum 內層的 Limit 錯誤",
         Sum(left=third_limit(bad_level=2), right=Const(value=Dyadic(0))), third, bic),
        ("指示函數指向錯誤的子基底成員", FromSubbase(index=2), PointFn.indicator(1), z4),
    ]


def test_corpus_size():
    assert len(good_corpus()) >= 25
    assert len(corrupted_corpus()) == 10


@pytest.mark.parametrize("item", good_corpus(), ids=lambda f: f.name)
def test_good_certificates_accepted(item):
    result = item.check(item.topology.probes(PROBES), TOL, depth=LIMIT_DEPTH)
    assert result.kind == VerdictKind.ACCEPTED, result.detail


@pytest.mark.parametrize("case", corrupted_corpus(), ids=lambda case: case[0])
def test_corrupted_certificates_rejected(case):
    _, cert, fn, topology = case
    result = check_cert(cert, fn, topology, topology.probes(PROBES), TOL, depth=LIMIT_DEPTH)
    assert result.kind == VerdictKind.REJECTED
    assert result.outcome == "fail"


def test_rejection_names_failing_probe():
    bic = bic_topology()
    cert = BicCompose(phi=fn_abs(), inner=FromSubbase(index=0))
    result = check_cert(cert, bic.subbase[0], bic, bic.probes(PROBES), TOL)
    # 0 與 1 上 |x| = x，第一個失敗的探針是 -1
    assert result.point == "-1"
    assert result.witness_fn == "id"


def test_limit_bound_rejection_reports_level():
    bic = bic_topology()
    result = check_cert(third_limit(bound_shift=-1), PointFn("third", _third), bic, bic.probes(PROBES), TOL)
    assert "第 1 層" in result.detail


def test_out_of_range_leaf_is_malformed():
    bic = bic_topology()
    with pytest.raises(MalformedCert):
        check_cert(FromSubbase(index=1), bic.subbase[0], bic, bic.probes(PROBES), TOL)


def test_shallow_depth_misses_deep_corruption():
    bic = bic_topology()
    third = PointFn("third", _third)
    shallow = check_cert(third_limit(bad_level=5), third, bic, bic.probes(PROBES), TOL, depth=4)
    deep = check_cert(third_limit(bad_level=5), third, bic, bic.probes(PROBES), TOL, depth=LIMIT_DEPTH)
    assert shallow.kind == VerdictKind.ACCEPTED
    assert not shallow.exact
    assert deep.kind == VerdictKind.REJECTED

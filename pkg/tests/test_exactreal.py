"""二進分數、精確實數與 Bic(ℝ) 組合子"""
from fractions import Fraction

import pytest
from hypothesis import assume, given, strategies as st

from bishop.exactreal import (
    ZERO, Dyadic, ExactReal, certify_le, certify_positive, certify_zero, eval_at, fn_abs, fn_clamp,
    fn_compose, fn_const, fn_id, fn_max, fn_neg, fn_scale, fn_shift, fn_sum, positivity,
)
from bishop.types import VerdictKind

dyadics = st.builds(Dyadic, st.integers(-10**6, 10**6), st.integers(-12, 6))


def test_dyadic_normal_form():
    d = Dyadic(12, -4)
    assert (d.mantissa, d.exponent) == (3, -2)
    assert Dyadic(0, 7).exponent == 0
    assert Dyadic.parse("3/2^2") == d
    assert str(Dyadic.parse("-5/2^3")) == "-5/2^3"
    assert Dyadic.of(Fraction(3, 4)) == d


def test_dyadic_rejects_non_dyadic():
    with pytest.raises(ValueError):
        Dyadic.of(Fraction(1, 3))
    with pytest.raises(ValueError):
        Dyadic.parse("1/3")


@given(dyadics, dyadics)
def test_dyadic_arithmetic_matches_fractions(a, b):
    fa, fb = a.to_fraction(), b.to_fraction()
    assert (a + b).to_fraction() == fa + fb
    assert (a - b).to_fraction() == fa - fb
    assert (a * b).to_fraction() == fa * fb
    assert (a < b) == (fa < fb)


@given(dyadics, st.integers(0, 20))
def test_dyadic_rounding_brackets_value(d, p):
    assert d.floor_at(p) <= d <= d.ceil_at(p)
    assert d.ceil_at(p) - d.floor_at(p) <= Dyadic.pow2(-p)


@given(st.fractions(min_value=-100, max_value=100, max_denominator=1000), st.integers(0, 30))
def test_rational_approximations_nest(value, p):
    x = ExactReal.from_fraction(value)
    outer, inner = x.approx(p), x.approx(p + 1)
    assert outer.contains(inner)
    assert outer.width() <= Dyadic.pow2(1 - p)
    assert outer.lo.to_fraction() <= value <= outer.hi.to_fraction()


def test_certify_positive_exact_values():
    result = certify_positive(ExactReal.of(Dyadic(1, -3)), 8)
    assert result.kind == VerdictKind.POSITIVE
    assert result.bound == Dyadic(1, -3)
    assert certify_positive(ExactReal.of(0), 8).kind == VerdictKind.NON_POSITIVE


def test_certify_positive_refines_rational():
    result = certify_positive(ExactReal.from_fraction(Fraction(1, 3)), 16)
    assert result.kind == VerdictKind.POSITIVE
    assert ZERO < result.bound <= Dyadic(1)
    assert result.probes_used >= 1


def test_certify_positive_runs_out_of_budget_near_zero():
    # 極限為 0 的序列：在有限步內無法判定符號
    vanishing = ExactReal.limit(lambda n: ExactReal.of(Dyadic(1, -n - 5)))
    result = certify_positive(vanishing, 8)
    assert result.kind == VerdictKind.UNKNOWN
    assert result.outcome == "unknown"


def test_certify_zero_is_inexact_when_undecided():
    assert certify_zero(ExactReal.of(0), 8).kind == VerdictKind.EQUAL
    assert certify_zero(ExactReal.of(0), 8).exact
    vanishing = ExactReal.limit(lambda n: ExactReal.of(Dyadic(1, -n - 5)))
    undecided = certify_zero(vanishing, 6)
    assert undecided.kind == VerdictKind.EQUAL
    assert not undecided.exact
    apart = certify_zero(ExactReal.of(Dyadic(-3, -1)), 6)
    assert apart.kind == VerdictKind.APART
    assert apart.bound == Dyadic(3, -1)


def test_certify_le():
    assert certify_le(ExactReal.of(1), Dyadic(1), 8).kind == VerdictKind.ACCEPTED
    assert certify_le(ExactReal.of(2), Dyadic(1), 8).kind == VerdictKind.REJECTED
    third = ExactReal.from_fraction(Fraction(1, 3))
    assert certify_le(third, Dyadic(1, -1), 16).kind == VerdictKind.ACCEPTED


def test_combinator_evaluation_and_expr():
    tent = fn_clamp(0, 1, fn_sum(fn_const(1), fn_neg(fn_abs(fn_id()))))
    assert tent(ExactReal.of(0)).exact == Dyadic(1)
    assert tent(ExactReal.of(Dyadic(1, -1))).exact == Dyadic(1, -1)
    assert tent(ExactReal.of(3)).exact == ZERO
    assert tent.expr() == "clamp(0, 1, sum(const(1), neg(abs(id))))"
    assert fn_shift(Dyadic(1, -1)).expr() == "sum(id, const(1/2^1))"


def test_symbolic_zero_is_non_positive():
    result = positivity(fn_scale(0, fn_id()), 5, 8)
    assert result.kind == VerdictKind.NON_POSITIVE
    assert result.detail == "符號零"
    assert positivity(fn_abs(fn_id()), 1, 8).kind == VerdictKind.POSITIVE


def test_eval_at_rejects_negative_precision():
    with pytest.raises(ValueError):
        eval_at(fn_id(), 1, -1)


COMBINATORS = [
    fn_id(),
    fn_abs(fn_id()),
    fn_scale(3, fn_id()),
    fn_sum(fn_scale(Dyadic(-5, -1), fn_id()), fn_abs(fn_id())),
    fn_max(fn_id(), fn_const(1)),
    fn_compose(fn_scale(3, fn_id()), fn_abs(fn_shift(1))),
    fn_clamp(-1, 1, fn_scale(7, fn_id())),
]


@pytest.mark.parametrize("f", COMBINATORS, ids=lambda f: f.expr())
@given(x=st.integers(-4 * 256, 4 * 256), k=st.integers(-16, 16), e=st.integers(-12, -1))
def test_modulus_bounds_variation(f, x, k, e):
    n = 4
    eps = Dyadic.pow2(e)
    delta = f.modulus(n, eps)
    left = Dyadic(x, -8)
    right = left + delta * Dyadic(k, -4)
    assume(-Dyadic(n) <= right <= Dyadic(n))
    change = abs(f(ExactReal.of(left)).exact - f(ExactReal.of(right)).exact)
    assert change <= eps


@pytest.mark.parametrize("f", COMBINATORS, ids=lambda f: f.expr())
@given(x=st.integers(-3 * 256, 3 * 256))
def test_bound_covers_values(f, x):
    value = f(ExactReal.of(Dyadic(x, -8))).exact
    assert abs(value) <= f.bound(3)

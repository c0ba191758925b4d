"""精確實數模組 - 二進分數區間算術與 Bic(ℝ) 組合子"""
import re
from enum import Enum
from fractions import Fraction
from functools import total_ordering
from typing import Any, Callable, Dict, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict

from bishop.types import Verdict, VerdictKind

_DYADIC_PATTERN = re.compile(r"^\s*(-?\d+)\s*(?:/\s*2\s*\^\s*(\d+))?\s*$")


@total_ordering
class Dyadic:
    """二進分數 mantissa·2^exponent，永遠保持標準形（尾數為奇數或零）"""
    __slots__ = ("mantissa", "exponent")

    def __init__(self, mantissa: int, exponent: int = 0):
        mantissa, exponent = int(mantissa), int(exponent)
        if mantissa == 0:
            exponent = 0
        else:
            trailing = (mantissa & -mantissa).bit_length() - 1
            mantissa >>= trailing
            exponent += trailing
        self.mantissa = mantissa
        self.exponent = exponent

    # ---- 建構 ----

    @classmethod
    def of(cls, value: Any) -> "Dyadic":
        """將 int、字串 "p/2^k"、分母為 2 的冪的 Fraction 轉成 Dyadic"""
        if isinstance(value, Dyadic):
            return value
        if isinstance(value, bool):
            return cls(int(value))
        if isinstance(value, int):
            return cls(value)
        if isinstance(value, str):
            return cls.parse(value)
        if isinstance(value, Fraction):
            den = value.denominator
            if den & (den - 1):
                raise ValueError(f"{value} 不是二進分數")
            return cls(value.numerator, -(den.bit_length() - 1))
        raise TypeError(f"無法轉換為二進分數：{value!r}")

    @classmethod
    def parse(cls, text: str) -> "Dyadic":
        match = _DYADIC_PATTERN.match(text)
        if not match:
            raise ValueError(f"二進分數格式應為 p/2^k：{text!r}")
        numerator = int(match.group(1))
        power = int(match.group(2)) if match.group(2) else 0
        return cls(numerator, -power)

    @classmethod
    def pow2(cls, k: int) -> "Dyadic":
        return cls(1, k)

    # ---- 算術 ----

    @staticmethod
    def _align(a: "Dyadic", b: "Dyadic") -> Tuple[int, int, int]:
        e = min(a.exponent, b.exponent)
        return a.mantissa << (a.exponent - e), b.mantissa << (b.exponent - e), e

    def __add__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        x, y, e = Dyadic._align(self, other)
        return Dyadic(x + y, e)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        x, y, e = Dyadic._align(self, other)
        return Dyadic(x - y, e)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return Dyadic(self.mantissa * other.mantissa, self.exponent + other.exponent)

    __rmul__ = __mul__

    def __neg__(self):
        return Dyadic(-self.mantissa, self.exponent)

    def __abs__(self):
        return Dyadic(abs(self.mantissa), self.exponent)

    def shift(self, k: int) -> "Dyadic":
        """乘以 2^k"""
        return Dyadic(self.mantissa, self.exponent + k)

    def half(self) -> "Dyadic":
        return self.shift(-1)

    def sign(self) -> int:
        return (self.mantissa > 0) - (self.mantissa < 0)

    # ---- 比較 ----

    def __eq__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return self.mantissa == other.mantissa and self.exponent == other.exponent

    def __lt__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        x, y, _ = Dyadic._align(self, other)
        return x < y

    def __hash__(self):
        return hash((self.mantissa, self.exponent))

    # ---- 捨入 ----

    def floor_at(self, p: int) -> "Dyadic":
        """不大於自身的最大 2^-p 倍數"""
        if self.exponent >= -p:
            return self
        return Dyadic(self.mantissa >> (-p - self.exponent), -p)

    def ceil_at(self, p: int) -> "Dyadic":
        return -((-self).floor_at(p))

    def ceil_int(self) -> int:
        if self.exponent >= 0:
            return self.mantissa << self.exponent
        return -((-self.mantissa) >> -self.exponent)

    def log2_ceil(self) -> int:
        """最小的 k ≥ 0 使得 |self| ≤ 2^k"""
        if self.mantissa == 0:
            return 0
        return max(0, self.exponent + (abs(self.mantissa) - 1).bit_length())

    # ---- 輸出 ----

    def to_fraction(self) -> Fraction:
        if self.exponent >= 0:
            return Fraction(self.mantissa << self.exponent)
        return Fraction(self.mantissa, 1 << -self.exponent)

    def __float__(self):
        return float(self.to_fraction())

    def to_json(self) -> Dict[str, int]:
        return {"mantissa": self.mantissa, "exponent": self.exponent}

    def __str__(self):
        if self.exponent >= 0:
            return str(self.mantissa << self.exponent)
        return f"{self.mantissa}/2^{-self.exponent}"

    def __repr__(self):
        return f"Dyadic({self})"


def _coerce(value: Any) -> Optional[Dyadic]:
    if isinstance(value, Dyadic):
        return value
    if isinstance(value, int):
        return Dyadic(value)
    return None


ZERO = Dyadic(0)
ONE = Dyadic(1)


class Interval:
    """閉區間 [lo, hi]，所有運算皆向外捨入"""
    __slots__ = ("lo", "hi")

    def __init__(self, lo: Dyadic, hi: Dyadic):
        if hi < lo:
            raise ValueError(f"區間下界 {lo} 大於上界 {hi}")
        self.lo = lo
        self.hi = hi

    @classmethod
    def point(cls, value: Dyadic) -> "Interval":
        return cls(value, value)

    def width(self) -> Dyadic:
        return self.hi - self.lo

    def midpoint(self) -> Dyadic:
        return (self.lo + self.hi).half()

    def __add__(self, other: "Interval") -> "Interval":
        return Interval(self.lo + other.lo, self.hi + other.hi)

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other: "Interval") -> "Interval":
        return self + (-other)

    def scale(self, factor: Dyadic) -> "Interval":
        a, b = self.lo * factor, self.hi * factor
        return Interval(min(a, b), max(a, b))

    def abs(self) -> "Interval":
        if self.lo >= ZERO:
            return self
        if self.hi <= ZERO:
            return -self
        return Interval(ZERO, max(-self.lo, self.hi))

    def maximum(self, other: "Interval") -> "Interval":
        return Interval(max(self.lo, other.lo), max(self.hi, other.hi))

    def minimum(self, other: "Interval") -> "Interval":
        return Interval(min(self.lo, other.lo), min(self.hi, other.hi))

    def clamp(self, lo: Dyadic, hi: Dyadic) -> "Interval":
        return Interval(min(max(self.lo, lo), hi), min(max(self.hi, lo), hi))

    def widen(self, eps: Dyadic) -> "Interval":
        return Interval(self.lo - eps, self.hi + eps)

    def intersect(self, other: "Interval") -> Optional["Interval"]:
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        if hi < lo:
            return None
        return Interval(lo, hi)

    def contains(self, other: Union[Dyadic, "Interval"]) -> bool:
        if isinstance(other, Interval):
            return self.lo <= other.lo and other.hi <= self.hi
        return self.lo <= other <= self.hi

    def overlaps(self, other: "Interval") -> bool:
        return self.intersect(other) is not None

    def to_json(self) -> Dict[str, Any]:
        return {"lo": self.lo.to_json(), "hi": self.hi.to_json()}

    def __repr__(self):
        return f"[{self.lo}, {self.hi}]"


class ExactReal:
    """
    以精度索引的巢狀二進區間表示的實數

    approx(p) 的寬度不超過 2^(1-p)，且 approx(p+1) ⊆ approx(p)。
    若 exact 不為 None，則此實數恰為該二進分數，比較可直接判定。
    """
    __slots__ = ("_approx", "exact", "_cache", "label")

    def __init__(self, approx: Callable[[int], Interval] = None,
                 exact: Optional[Dyadic] = None, label: Optional[str] = None):
        if approx is None and exact is None:
            raise ValueError("ExactReal 需要 approx 或 exact")
        self._approx = approx
        self.exact = exact
        self._cache: Dict[int, Interval] = {}
        self.label = label

    # ---- 建構 ----

    @classmethod
    def of(cls, value: Any) -> "ExactReal":
        if isinstance(value, ExactReal):
            return value
        if isinstance(value, Fraction):
            den = value.denominator
            if den & (den - 1):
                return cls.from_fraction(value)
        return cls(exact=Dyadic.of(value))

    @classmethod
    def from_fraction(cls, value: Fraction) -> "ExactReal":
        """有理數；分母不是 2 的冪時近似區間不退化為一點"""
        value = Fraction(value)
        den = value.denominator
        if not den & (den - 1):
            return cls(exact=Dyadic.of(value))

        def approx(p: int) -> Interval:
            scaled = value * (1 << p)
            lo = scaled.numerator // scaled.denominator
            return Interval(Dyadic(lo, -p), Dyadic(lo + 1, -p))

        return cls(approx, label=str(value))

    @classmethod
    def limit(cls, seq: Callable[[int], "ExactReal"], label: str = None) -> "ExactReal":
        """由 |seq(n) - x| ≤ 2^-n 的序列決定的實數，近似值逐層取交集"""
        def level(p: int) -> Interval:
            j = p + 2
            return seq(j).approx(j).widen(Dyadic.pow2(-j))

        result = cls(label=label, approx=lambda p: level(p))

        def nested(p: int) -> Interval:
            current = level(p)
            if p <= 0:
                return current
            narrowed = current.intersect(result.approx(p - 1))
            return narrowed if narrowed is not None else current

        result._approx = nested
        return result

    # ---- 近似 ----

    def approx(self, p: int) -> Interval:
        if self.exact is not None:
            return Interval.point(self.exact)
        p = max(p, 0)
        cached = self._cache.get(p)
        if cached is None:
            cached = self._approx(p)
            self._cache[p] = cached
        return cached

    # ---- 算術（精確值走快速路徑）----

    def __add__(self, other) -> "ExactReal":
        other = ExactReal.of(other)
        if self.exact is not None and other.exact is not None:
            return ExactReal(exact=self.exact + other.exact)
        return ExactReal(lambda p: self.approx(p + 1) + other.approx(p + 1))

    __radd__ = __add__

    def __neg__(self) -> "ExactReal":
        if self.exact is not None:
            return ExactReal(exact=-self.exact)
        return ExactReal(lambda p: -self.approx(p))

    def __sub__(self, other) -> "ExactReal":
        return self + (-ExactReal.of(other))

    def __rsub__(self, other) -> "ExactReal":
        return ExactReal.of(other) - self

    def __abs__(self) -> "ExactReal":
        if self.exact is not None:
            return ExactReal(exact=abs(self.exact))
        return ExactReal(lambda p: self.approx(p).abs())

    def scale(self, factor: Dyadic) -> "ExactReal":
        factor = Dyadic.of(factor)
        if self.exact is not None:
            return ExactReal(exact=self.exact * factor)
        k = factor.log2_ceil()
        return ExactReal(lambda p: self.approx(p + k).scale(factor))

    def maximum(self, other) -> "ExactReal":
        other = ExactReal.of(other)
        if self.exact is not None and other.exact is not None:
            return ExactReal(exact=max(self.exact, other.exact))
        return ExactReal(lambda p: self.approx(p).maximum(other.approx(p)))

    def minimum(self, other) -> "ExactReal":
        other = ExactReal.of(other)
        if self.exact is not None and other.exact is not None:
            return ExactReal(exact=min(self.exact, other.exact))
        return ExactReal(lambda p: self.approx(p).minimum(other.approx(p)))

    def clamp(self, lo: Dyadic, hi: Dyadic) -> "ExactReal":
        if self.exact is not None:
            return ExactReal(exact=min(max(self.exact, lo), hi))
        return ExactReal(lambda p: self.approx(p).clamp(lo, hi))

    # ---- 輸出 ----

    def describe(self, precision: int = 20) -> str:
        if self.exact is not None:
            return str(self.exact)
        if self.label:
            return self.label
        return f"≈{self.approx(precision).midpoint()}"

    def __repr__(self):
        return f"ExactReal({self.describe()})"


def real(value: Any) -> ExactReal:
    """任意數值轉為 ExactReal 的簡寫"""
    return ExactReal.of(value)


# ---------------------------------------------------------------------------
# Bic(ℝ) 組合子
# ---------------------------------------------------------------------------


class FnTag(str, Enum):
    """RealFn 的符號建構子"""
    CONST = "const"
    ID = "id"
    SUM = "sum"
    NEG = "neg"
    ABS = "abs"
    MAX = "max"
    MIN = "min"
    SCALE = "scale"
    CLAMP = "clamp"
    COMPOSE = "compose"


class RealFn(BaseModel):
    """
    Bishop 連續函數 ℝ → ℝ 的符號表示

    每個建構子都帶有在 [-n, n] 上的一致連續模數 modulus(n, ε)
    與上界 bound(n)，合成的模數由兩者串接而得。
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    tag: FnTag
    args: Tuple["RealFn", ...] = ()
    value: Optional[Dyadic] = None  # const 的值或 scale 的係數
    lo: Optional[Dyadic] = None
    hi: Optional[Dyadic] = None

    def eval(self, x: ExactReal) -> ExactReal:
        tag = self.tag
        if tag == FnTag.CONST:
            return ExactReal(exact=self.value)
        if tag == FnTag.ID:
            return x
        if tag == FnTag.COMPOSE:
            outer, inner = self.args
            return outer.eval(inner.eval(x))
        first = self.args[0].eval(x)
        if tag == FnTag.SUM:
            return first + self.args[1].eval(x)
        if tag == FnTag.NEG:
            return -first
        if tag == FnTag.ABS:
            return abs(first)
        if tag == FnTag.MAX:
            return first.maximum(self.args[1].eval(x))
        if tag == FnTag.MIN:
            return first.minimum(self.args[1].eval(x))
        if tag == FnTag.SCALE:
            return first.scale(self.value)
        return first.clamp(self.lo, self.hi)

    def __call__(self, x: Any) -> ExactReal:
        return self.eval(ExactReal.of(x))

    def modulus(self, n: int, eps: Dyadic) -> Dyadic:
        """在 [-n, n] 上 |x-y| ≤ δ 蘊含 |f(x)-f(y)| ≤ ε 的 δ"""
        tag = self.tag
        if tag == FnTag.CONST:
            return ONE
        if tag == FnTag.ID:
            return eps
        if tag in (FnTag.NEG, FnTag.ABS, FnTag.CLAMP):
            return self.args[0].modulus(n, eps)
        if tag == FnTag.SUM:
            half = eps.half()
            return min(self.args[0].modulus(n, half), self.args[1].modulus(n, half))
        if tag in (FnTag.MAX, FnTag.MIN):
            return min(self.args[0].modulus(n, eps), self.args[1].modulus(n, eps))
        if tag == FnTag.SCALE:
            return self.args[0].modulus(n, eps.shift(-self.value.log2_ceil()))
        outer, inner = self.args
        reach = max(inner.bound(n).ceil_int(), 1)
        return inner.modulus(n, outer.modulus(reach, eps))

    def bound(self, n: int) -> Dyadic:
        """|f| 在 [-n, n] 上的上界"""
        tag = self.tag
        if tag == FnTag.CONST:
            return abs(self.value)
        if tag == FnTag.ID:
            return Dyadic(n)
        if tag in (FnTag.NEG, FnTag.ABS):
            return self.args[0].bound(n)
        if tag == FnTag.SUM:
            return self.args[0].bound(n) + self.args[1].bound(n)
        if tag in (FnTag.MAX, FnTag.MIN):
            return max(self.args[0].bound(n), self.args[1].bound(n))
        if tag == FnTag.SCALE:
            return abs(self.value) * self.args[0].bound(n)
        if tag == FnTag.CLAMP:
            return max(abs(self.lo), abs(self.hi))
        outer, inner = self.args
        return outer.bound(max(inner.bound(n).ceil_int(), 1))

    def is_symbolic_zero(self) -> bool:
        tag = self.tag
        if tag == FnTag.CONST:
            return self.value == ZERO
        if tag in (FnTag.NEG, FnTag.ABS):
            return self.args[0].is_symbolic_zero()
        if tag == FnTag.SCALE:
            return self.value == ZERO or self.args[0].is_symbolic_zero()
        if tag in (FnTag.SUM, FnTag.MAX, FnTag.MIN):
            return all(arg.is_symbolic_zero() for arg in self.args)
        if tag == FnTag.CLAMP:
            return self.lo == ZERO and self.hi == ZERO
        if tag == FnTag.COMPOSE:
            return self.args[0].is_symbolic_zero()
        return False

    def expr(self) -> str:
        """與定義語言相同的運算式寫法"""
        tag = self.tag
        if tag == FnTag.CONST:
            return f"const({self.value})"
        if tag == FnTag.ID:
            return "id"
        if tag == FnTag.SCALE:
            return f"scale({self.value}, {self.args[0].expr()})"
        if tag == FnTag.CLAMP:
            return f"clamp({self.lo}, {self.hi}, {self.args[0].expr()})"
        return f"{tag.value}({', '.join(arg.expr() for arg in self.args)})"

    def __str__(self):
        return self.expr()


RealFn.model_rebuild()


def fn_const(value: Any) -> RealFn:
    return RealFn(tag=FnTag.CONST, value=Dyadic.of(value))


def fn_id() -> RealFn:
    return RealFn(tag=FnTag.ID)


def fn_sum(f: RealFn, g: RealFn) -> RealFn:
    return RealFn(tag=FnTag.SUM, args=(f, g))


def fn_neg(f: RealFn = None) -> RealFn:
    return RealFn(tag=FnTag.NEG, args=(f or fn_id(),))


def fn_abs(f: RealFn = None) -> RealFn:
    return RealFn(tag=FnTag.ABS, args=(f or fn_id(),))


def fn_max(f: RealFn, g: RealFn) -> RealFn:
    return RealFn(tag=FnTag.MAX, args=(f, g))


def fn_min(f: RealFn, g: RealFn) -> RealFn:
    return RealFn(tag=FnTag.MIN, args=(f, g))


def fn_scale(a: Any, f: RealFn = None) -> RealFn:
    """x ↦ a·f(x)；省略 f 時為 x ↦ a·x"""
    return RealFn(tag=FnTag.SCALE, args=(f or fn_id(),), value=Dyadic.of(a))


def fn_clamp(lo: Any, hi: Any, f: RealFn = None) -> RealFn:
    lo, hi = Dyadic.of(lo), Dyadic.of(hi)
    if hi < lo:
        raise ValueError(f"clamp 下界 {lo} 大於上界 {hi}")
    return RealFn(tag=FnTag.CLAMP, args=(f or fn_id(),), lo=lo, hi=hi)


def fn_compose(phi: RealFn, f: RealFn) -> RealFn:
    """φ ∘ f"""
    return RealFn(tag=FnTag.COMPOSE, args=(phi, f))


def fn_shift(c: Any, f: RealFn = None) -> RealFn:
    """x ↦ f(x) + c"""
    return fn_sum(f or fn_id(), fn_const(c))


def eval_at(f: RealFn, x: Any, p: int) -> Interval:
    """f(x) 在精度 p 的近似區間"""
    if p < 0:
        raise ValueError("精度必須 ≥ 0")
    return f.eval(ExactReal.of(x)).approx(p)


# ---------------------------------------------------------------------------
# 三值比較
# ---------------------------------------------------------------------------


def certify_positive(value: ExactReal, budget: int) -> Verdict:
    """
    判定 value > 0

    Args:
        value: 要判定的實數
        budget: 最大細化步數（精度 1..budget）

    Returns:
        Verdict: Positive 帶有下界 q > 0；NonPositive 帶有上界；Unknown 表示步數用盡
    """
    if value.exact is not None:
        if value.exact > ZERO:
            return Verdict(kind=VerdictKind.POSITIVE, bound=value.exact)
        return Verdict(kind=VerdictKind.NON_POSITIVE, bound=value.exact,
                       detail="精確值")
    for p in range(1, max(budget, 1) + 1):
        interval = value.approx(p)
        if interval.lo > ZERO:
            return Verdict(kind=VerdictKind.POSITIVE, bound=interval.lo, probes_used=p)
        if interval.hi < ZERO:
            return Verdict(kind=VerdictKind.NON_POSITIVE, bound=interval.hi, probes_used=p)
    return Verdict(kind=VerdictKind.UNKNOWN, probes_used=budget,
                   detail=f"{budget} 步內無法判定符號")


def positivity(f: RealFn, x: Any, budget: int) -> Verdict:
    """f(x) > 0 的三值判定，符號零直接回傳 NonPositive"""
    if f.is_symbolic_zero():
        return Verdict(kind=VerdictKind.NON_POSITIVE, bound=ZERO, witness_fn=f.expr(),
                       detail="符號零")
    result = certify_positive(f.eval(ExactReal.of(x)), budget)
    return result.model_copy(update={"witness_fn": f.expr()})


def certify_le(value: ExactReal, bound: Dyadic, budget: int) -> Verdict:
    """判定 value ≤ bound：Accepted / Rejected / Unknown"""
    if value.exact is not None:
        if value.exact <= bound:
            return Verdict(kind=VerdictKind.ACCEPTED, bound=value.exact)
        return Verdict(kind=VerdictKind.REJECTED, bound=value.exact)
    for p in range(1, max(budget, 1) + 1):
        interval = value.approx(p)
        if interval.hi <= bound:
            return Verdict(kind=VerdictKind.ACCEPTED, bound=interval.hi, probes_used=p)
        if interval.lo > bound:
            return Verdict(kind=VerdictKind.REJECTED, bound=interval.lo, probes_used=p)
    return Verdict(kind=VerdictKind.UNKNOWN, probes_used=budget)


def certify_zero(value: ExactReal, budget: int) -> Verdict:
    """
    判定 value 是否為零

    Apart 帶有 |value| 的正下界；Equal 在精確值時是確定的，
    否則表示在預算內「與零不可分離」（exact=False）。
    """
    if value.exact is not None:
        if value.exact == ZERO:
            return Verdict(kind=VerdictKind.EQUAL, bound=ZERO)
        return Verdict(kind=VerdictKind.APART, bound=abs(value.exact))
    for p in range(1, max(budget, 1) + 1):
        interval = value.approx(p)
        if interval.lo > ZERO:
            return Verdict(kind=VerdictKind.APART, bound=interval.lo, probes_used=p)
        if interval.hi < ZERO:
            return Verdict(kind=VerdictKind.APART, bound=-interval.hi, probes_used=p)
    return Verdict(kind=VerdictKind.EQUAL, exact=False, probes_used=budget,
                   bound=value.approx(budget).abs().hi,
                   detail=f"精度 {budget} 內不可與零分離")


def certify_close(left: ExactReal, right: ExactReal, eps: Dyadic, budget: int) -> Verdict:
    """|left - right| ≤ eps"""
    return certify_le(abs(left - right), eps, budget)

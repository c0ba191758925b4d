"""Bishop 空間模組 - 載體、點函數、子基底與 ⋁F₀ 的歸納證書"""
import itertools
import random
from enum import Enum
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, PrivateAttr

from bishop.errors import MalformedCert
from bishop.exactreal import (
    ONE, ZERO, Dyadic, ExactReal, RealFn, certify_le, certify_positive, certify_zero,
    fn_abs, fn_neg, fn_scale,
)
from bishop.types import Verdict, VerdictKind


# ---------------------------------------------------------------------------
# 載體
# ---------------------------------------------------------------------------


class CarrierKind(str, Enum):
    FINITE = "finite"
    CONTINUUM = "continuum"
    PRODUCT = "product"
    SUBSET = "subset"


class Carrier(BaseModel):
    """
    帶有相等判定的有人居住集合（setoid）

    有限載體的點是可雜湊的標籤；ℝ 的點是 ExactReal；
    乘積載體的點是二元組。
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    name: str
    kind: CarrierKind
    points: Tuple[Any, ...] = ()
    factors: Tuple["Carrier", ...] = ()
    parent: Optional["Carrier"] = None
    member: Optional[Callable[[Any], bool]] = None
    inhabitant: Any = None

    @property
    def is_finite(self) -> bool:
        if self.kind == CarrierKind.FINITE:
            return True
        if self.kind == CarrierKind.PRODUCT:
            return all(f.is_finite for f in self.factors)
        return False

    def elements(self) -> List[Any]:
        """有限載體的全部點"""
        if self.kind == CarrierKind.FINITE:
            return list(self.points)
        if self.kind == CarrierKind.PRODUCT and self.is_finite:
            left, right = self.factors
            return list(itertools.product(left.elements(), right.elements()))
        raise ValueError(f"載體 {self.name} 不是有限的")

    def size(self) -> int:
        return len(self.elements())

    def eq_at(self, x: Any, y: Any, precision: int) -> Verdict:
        """x =_X y 的三值判定；有限載體上永遠不回傳 Unknown"""
        if self.kind == CarrierKind.FINITE:
            kind = VerdictKind.EQUAL if x == y else VerdictKind.APART
            return Verdict(kind=kind)
        if self.kind == CarrierKind.PRODUCT:
            left, right = self.factors
            first = left.eq_at(x[0], y[0], precision)
            if first.kind == VerdictKind.APART:
                return first
            second = right.eq_at(x[1], y[1], precision)
            if second.kind == VerdictKind.APART:
                return second
            if first.kind == VerdictKind.EQUAL and second.kind == VerdictKind.EQUAL:
                return Verdict(kind=VerdictKind.EQUAL, exact=first.exact and second.exact)
            return Verdict(kind=VerdictKind.UNKNOWN)
        if self.kind == CarrierKind.SUBSET:
            return self.parent.eq_at(x, y, precision)
        return certify_zero(ExactReal.of(x) - ExactReal.of(y), precision)

    def same(self, x: Any, y: Any, precision: int = 20) -> bool:
        return self.eq_at(x, y, precision).kind == VerdictKind.EQUAL

    def contains(self, x: Any) -> bool:
        if self.kind == CarrierKind.FINITE:
            return x in self.points
        if self.kind == CarrierKind.PRODUCT:
            return (isinstance(x, tuple) and len(x) == 2
                    and self.factors[0].contains(x[0]) and self.factors[1].contains(x[1]))
        if self.kind == CarrierKind.SUBSET:
            return self.parent.contains(x) and bool(self.member(x))
        return isinstance(x, (ExactReal, Dyadic, int, Fraction))

    def normalize(self, x: Any) -> Any:
        """ℝ 的點一律轉為 ExactReal"""
        if self.kind == CarrierKind.CONTINUUM:
            return ExactReal.of(x)
        if self.kind == CarrierKind.PRODUCT:
            return (self.factors[0].normalize(x[0]), self.factors[1].normalize(x[1]))
        if self.kind == CarrierKind.SUBSET:
            return self.parent.normalize(x)
        return x

    def label(self, x: Any) -> str:
        if isinstance(x, ExactReal):
            return x.describe()
        if isinstance(x, tuple):
            return "(" + ", ".join(self._factor_label(i, part) for i, part in enumerate(x)) + ")"
        return str(x)

    def _factor_label(self, index: int, part: Any) -> str:
        if self.kind == CarrierKind.PRODUCT:
            return self.factors[index].label(part)
        return self.label(part)

    def sample(self, n: int, seed: int = 0, radius: int = 4) -> List[Any]:
        """
        探針點：有限載體回傳全部點（窮舉），ℝ 回傳確定性的二進分數

        Args:
            n: 探針數量（有限載體忽略）
            seed: 抽樣種子
            radius: ℝ 上探針落在 [-radius, radius]

        Returns:
            List: 探針點
        """
        if self.is_finite:
            return self.elements()
        if self.kind == CarrierKind.SUBSET:
            return [self.normalize(p) for p in self.points]
        if self.kind == CarrierKind.PRODUCT:
            left = self.factors[0].sample(n, seed, radius)
            right = self.factors[1].sample(n, seed + 1, radius)
            rng = random.Random(seed)
            pairs = [(left[0], right[0])]
            while len(pairs) < n:
                pairs.append((rng.choice(left), rng.choice(right)))
            return pairs
        return [ExactReal.of(d) for d in dyadic_probes(n, seed, radius)]


Carrier.model_rebuild()


def dyadic_probes(n: int, seed: int = 0, radius: int = 4, exponent: int = -8) -> List[Dyadic]:
    """包含 0、±1、1/2 的確定性二進分數探針"""
    fixed = [ZERO, ONE, -ONE, Dyadic(1, -1)]
    rng = random.Random(seed)
    span = radius << -exponent
    probes = fixed[:n]
    while len(probes) < n:
        probes.append(Dyadic(rng.randint(-span, span), exponent))
    return probes


def finite_carrier(name: str, points: Sequence[Any]) -> Carrier:
    points = tuple(points)
    if not points:
        raise ValueError("載體必須有人居住")
    if len(set(points)) != len(points):
        raise ValueError(f"載體 {name} 有重複的點")
    return Carrier(name=name, kind=CarrierKind.FINITE, points=points, inhabitant=points[0])


def reals_carrier() -> Carrier:
    return Carrier(name="R", kind=CarrierKind.CONTINUUM, inhabitant=ExactReal.of(0))


def product_carrier(left: Carrier, right: Carrier) -> Carrier:
    return Carrier(name=f"{left.name}×{right.name}", kind=CarrierKind.PRODUCT,
                   factors=(left, right), inhabitant=(left.inhabitant, right.inhabitant))


def sub_carrier(parent: Carrier, name: str, points: Sequence[Any],
                member: Callable[[Any], bool] = None) -> Carrier:
    """
    子載體：有限母體時為有限載體，否則以 member 判定並以 points 為探針
    """
    points = tuple(points)
    if parent.is_finite:
        missing = [p for p in points if not parent.contains(p)]
        if missing:
            raise ValueError(f"點 {missing} 不在母載體 {parent.name} 中")
        return finite_carrier(name, points)
    if member is None:
        raise ValueError("無限母載體的子載體需要 member 判定")
    return Carrier(name=name, kind=CarrierKind.SUBSET, parent=parent, member=member,
                   points=points, inhabitant=parent.normalize(points[0]))


# ---------------------------------------------------------------------------
# 點函數
# ---------------------------------------------------------------------------


def _cache_key(x: Any) -> Any:
    try:
        hash(x)
        return x
    except TypeError:
        return id(x)


class PointFn:
    """實值點函數 X → ℝ，逐點快取求值結果"""
    __slots__ = ("name", "_fn", "_cache")

    def __init__(self, name: str, fn: Callable[[Any], Any]):
        self.name = name
        self._fn = fn
        self._cache: Dict[Any, ExactReal] = {}

    def __call__(self, x: Any) -> ExactReal:
        key = _cache_key(x)
        value = self._cache.get(key)
        if value is None:
            value = ExactReal.of(self._fn(x))
            self._cache[key] = value
        return value

    def precompose(self, h: Callable[[Any], Any], name: str = None) -> "PointFn":
        """f ∘ h"""
        return PointFn(name or f"{self.name}∘h", lambda x: self(h(x)))

    def then(self, phi: RealFn) -> "PointFn":
        """φ ∘ f"""
        return PointFn(f"compose({phi.expr()}, {self.name})", lambda x: phi.eval(self(x)))

    @classmethod
    def constant(cls, value: Any) -> "PointFn":
        real = ExactReal.of(value)
        return cls(f"const({real.describe()})", lambda x: real)

    @classmethod
    def from_realfn(cls, phi: RealFn) -> "PointFn":
        return cls(phi.expr(), lambda x: phi.eval(ExactReal.of(x)))

    @classmethod
    def indicator(cls, point: Any, name: str = None) -> "PointFn":
        return cls(name or f"indicator({point})", lambda x: 1 if x == point else 0)

    @classmethod
    def from_table(cls, name: str, table: Dict[Any, Any]) -> "PointFn":
        values = {k: ExactReal.of(v) for k, v in table.items()}
        return cls(name, lambda x: values[x])

    def __repr__(self):
        return f"PointFn({self.name})"


def positive_at(f: PointFn, x: Any, budget: int, carrier: Carrier = None) -> Verdict:
    """f(x) > 0 的三值判定，附上函數名稱與點標籤"""
    result = certify_positive(f(x), budget)
    label = carrier.label(x) if carrier else str(x)
    return result.model_copy(update={"witness_fn": f.name, "point": label})


# ---------------------------------------------------------------------------
# 證書
# ---------------------------------------------------------------------------


class CertRule(str, Enum):
    FROM_SUBBASE = "FromSubbase"
    CONST = "Const"
    SUM = "Sum"
    BIC_COMPOSE = "BicCompose"
    EXTENSIONAL = "Extensional"
    LIMIT = "Limit"


class TopCert(BaseModel):
    """f ∈ ⋁F₀ 的推導樹"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    rule: CertRule

    def children(self) -> List["TopCert"]:
        return []

    def rules_used(self, depth: int = 1) -> set:
        used = {self.rule}
        for child in self.children_at(depth):
            used |= child.rules_used(depth)
        return used

    def children_at(self, depth: int) -> List["TopCert"]:
        return self.children()

    def to_tree(self, depth: int = 3) -> Dict[str, Any]:
        tree: Dict[str, Any] = {"rule": self.rule.value}
        tree.update(self._fields_json(depth))
        kids = self.children()
        if kids:
            tree["children"] = [child.to_tree(depth) for child in kids]
        return tree

    def _fields_json(self, depth: int) -> Dict[str, Any]:
        return {}


class FromSubbase(TopCert):
    rule: CertRule = CertRule.FROM_SUBBASE
    index: int

    def _fields_json(self, depth):
        return {"index": self.index}


class Const(TopCert):
    rule: CertRule = CertRule.CONST
    value: Dyadic

    def _fields_json(self, depth):
        return {"value": self.value.to_json()}


class Sum(TopCert):
    rule: CertRule = CertRule.SUM
    left: TopCert
    right: TopCert

    def children(self):
        return [self.left, self.right]


class BicCompose(TopCert):
    rule: CertRule = CertRule.BIC_COMPOSE
    phi: RealFn
    inner: TopCert

    def children(self):
        return [self.inner]

    def _fields_json(self, depth):
        return {"phi": self.phi.expr()}


class Extensional(TopCert):
    rule: CertRule = CertRule.EXTENSIONAL
    inner: TopCert
    eq_token: str

    def children(self):
        return [self.inner]

    def _fields_json(self, depth):
        return {"eq_token": self.eq_token}


class LimitLevel(BaseModel):
    """Limit 第 n 層：g_n 的證書與宣告的誤差上界"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    cert: TopCert
    bound: Dyadic


class Limit(TopCert):
    """f 是 g_n 的一致極限，且 |g_n - f| ≤ bound_n ≤ 2^-n"""
    rule: CertRule = CertRule.LIMIT
    generator: str
    stream: Callable[[int], LimitLevel]

    def level(self, n: int) -> LimitLevel:
        return self.stream(n)

    def children_at(self, depth: int):
        return [self.level(n).cert for n in range(1, depth + 1)]

    def _fields_json(self, depth):
        levels = []
        for n in range(1, depth + 1):
            lvl = self.level(n)
            levels.append({"n": n, "bound": lvl.bound.to_json(), "cert": lvl.cert.to_tree(depth)})
        return {"generator": self.generator, "levels": levels}


def cert_neg(cert: TopCert) -> TopCert:
    return BicCompose(phi=fn_neg(), inner=cert)


def cert_scale(a: Any, cert: TopCert) -> TopCert:
    return BicCompose(phi=fn_scale(a), inner=cert)


def cert_abs(cert: TopCert) -> TopCert:
    return BicCompose(phi=fn_abs(), inner=cert)


def cert_sub(left: TopCert, right: TopCert) -> TopCert:
    return Sum(left=left, right=cert_neg(right))


def cert_shift(cert: TopCert, c: Any) -> TopCert:
    return Sum(left=cert, right=Const(value=Dyadic.of(c)))


def cert_max(left: TopCert, right: TopCert) -> TopCert:
    """f ∨ g = (f + g + |f - g|) / 2"""
    total = Sum(left=Sum(left=left, right=right), right=cert_abs(cert_sub(left, right)))
    return cert_scale(Dyadic(1, -1), total)


def cert_min(left: TopCert, right: TopCert) -> TopCert:
    """f ∧ g = (f + g - |f - g|) / 2"""
    total = Sum(left=Sum(left=left, right=right), right=cert_neg(cert_abs(cert_sub(left, right))))
    return cert_scale(Dyadic(1, -1), total)


def const_cert(value: Any) -> TopCert:
    """常數的證書；非二進分數以二進常數的 Limit 表示"""
    real = ExactReal.of(value)
    if real.exact is not None:
        return Const(value=real.exact)

    def stream(n: int) -> LimitLevel:
        return LimitLevel(cert=Const(value=real.approx(n).midpoint()), bound=Dyadic.pow2(-n))

    return Limit(generator=f"const:{real.describe()}", stream=stream)


def substitute(cert: TopCert, images: Sequence[TopCert]) -> TopCert:
    """
    將每個 FromSubbase(i) 葉子換成 images[i]

    若 images[i] 證明 g_i ∘ h ∈ F，則結果證明 (cert 所表示的函數) ∘ h ∈ F。
    """
    if isinstance(cert, FromSubbase):
        if not 0 <= cert.index < len(images):
            raise MalformedCert(cert.index, len(images))
        return images[cert.index]
    if isinstance(cert, Const):
        return cert
    if isinstance(cert, Sum):
        return Sum(left=substitute(cert.left, images), right=substitute(cert.right, images))
    if isinstance(cert, BicCompose):
        return BicCompose(phi=cert.phi, inner=substitute(cert.inner, images))
    if isinstance(cert, Extensional):
        return Extensional(inner=substitute(cert.inner, images), eq_token=cert.eq_token)
    if isinstance(cert, Limit):
        source = cert

        def stream(n: int) -> LimitLevel:
            lvl = source.level(n)
            return LimitLevel(cert=substitute(lvl.cert, images), bound=lvl.bound)

        return Limit(generator=f"{cert.generator}∘h", stream=stream)
    raise MalformedCert(-1, len(images))


def validate_structure(cert: TopCert, subbase_size: int, depth: int):
    """檢查索引範圍；Limit 只展開前 depth 層"""
    if isinstance(cert, FromSubbase):
        if not 0 <= cert.index < subbase_size:
            raise MalformedCert(cert.index, subbase_size)
        return
    for child in cert.children_at(depth):
        validate_structure(child, subbase_size, depth)


def cert_to_tree(cert: TopCert, depth: int = 3) -> Dict[str, Any]:
    return cert.to_tree(depth)


# ---------------------------------------------------------------------------
# 拓撲
# ---------------------------------------------------------------------------


class TopologyKind(str, Enum):
    FULL = "full"
    TRIVIAL = "trivial"
    BIC = "bic"
    PRODUCT = "product"
    RESTRICTED = "restricted"
    GENERATED = "generated"


class Topology(BaseModel):
    """F = ⋁F₀：子基底加上只增不減的已驗證函數登錄表"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    name: str
    carrier: Carrier
    subbase: List[PointFn]
    kind: TopologyKind = TopologyKind.GENERATED
    factors: Tuple["Topology", ...] = ()
    parent: Optional["Topology"] = None
    _registry: Dict[str, "CertFn"] = PrivateAttr(default_factory=dict)
    _denotations: Dict[int, Tuple[TopCert, PointFn]] = PrivateAttr(default_factory=dict)

    @property
    def registry(self) -> Dict[str, "CertFn"]:
        return dict(self._registry)

    def subbase_name(self, index: int) -> str:
        return self.subbase[index].name

    def leaf(self, index: int) -> "CertFn":
        """子基底第 index 個成員連同其 FromSubbase 證書"""
        if not 0 <= index < len(self.subbase):
            raise MalformedCert(index, len(self.subbase))
        return CertFn(fn=self.subbase[index], cert=FromSubbase(index=index), topology=self)

    def constant(self, value: Any) -> "CertFn":
        return CertFn(fn=PointFn.constant(value), cert=const_cert(value), topology=self)

    def denote(self, cert: TopCert) -> PointFn:
        """證書所表示的點函數"""
        cached = self._denotations.get(id(cert))
        if cached is not None and cached[0] is cert:
            return cached[1]
        fn = self._denote(cert)
        self._denotations[id(cert)] = (cert, fn)
        return fn

    def _denote(self, cert: TopCert) -> PointFn:
        if isinstance(cert, FromSubbase):
            if not 0 <= cert.index < len(self.subbase):
                raise MalformedCert(cert.index, len(self.subbase))
            return self.subbase[cert.index]
        if isinstance(cert, Const):
            return PointFn.constant(cert.value)
        if isinstance(cert, Sum):
            left, right = self.denote(cert.left), self.denote(cert.right)
            return PointFn(f"sum({left.name}, {right.name})", lambda x: left(x) + right(x))
        if isinstance(cert, BicCompose):
            return self.denote(cert.inner).then(cert.phi)
        if isinstance(cert, Extensional):
            return self.denote(cert.inner)
        limit = cert

        def value(x: Any) -> ExactReal:
            return ExactReal.limit(lambda n: self.denote(limit.level(max(n, 1)).cert)(x))

        return PointFn(f"limit({limit.generator})", value)

    def probes(self, n: int = 32, seed: int = 0, radius: int = 4) -> List[Any]:
        return self.carrier.sample(n, seed, radius)

    def register(self, item: "CertFn", probes: Sequence[Any] = None, tol: Dyadic = None,
                 depth: int = 3, budget: int = 64) -> Verdict:
        """驗證證書後登錄；未通過的函數不會進入登錄表"""
        result = check_cert(item.cert, item.fn, self, probes or self.probes(), tol, depth, budget)
        if result.accepted:
            self._registry.setdefault(item.name, item)
        return result


# ---------------------------------------------------------------------------
# 帶證書的函數
# ---------------------------------------------------------------------------


class CertFn:
    """F 的元素：點函數、證書與所屬拓撲"""
    __slots__ = ("fn", "cert", "topology")

    def __init__(self, fn: PointFn, cert: TopCert, topology: Topology):
        self.fn = fn
        self.cert = cert
        self.topology = topology

    @property
    def name(self) -> str:
        return self.fn.name

    def __call__(self, x: Any) -> ExactReal:
        return self.fn(x)

    def renamed(self, name: str) -> "CertFn":
        return CertFn(PointFn(name, self.fn), self.cert, self.topology)

    def then(self, phi: RealFn) -> "CertFn":
        """φ ∘ f，對應 BicCompose"""
        return CertFn(self.fn.then(phi), BicCompose(phi=phi, inner=self.cert), self.topology)

    def __add__(self, other: "CertFn") -> "CertFn":
        f, g = self.fn, other.fn
        return CertFn(PointFn(f"sum({f.name}, {g.name})", lambda x: f(x) + g(x)),
                      Sum(left=self.cert, right=other.cert), self.topology)

    def __neg__(self) -> "CertFn":
        f = self.fn
        return CertFn(PointFn(f"neg({f.name})", lambda x: -f(x)), cert_neg(self.cert), self.topology)

    def __sub__(self, other: "CertFn") -> "CertFn":
        f, g = self.fn, other.fn
        return CertFn(PointFn(f"sum({f.name}, neg({g.name}))", lambda x: f(x) - g(x)),
                      cert_sub(self.cert, other.cert), self.topology)

    def __abs__(self) -> "CertFn":
        f = self.fn
        return CertFn(PointFn(f"abs({f.name})", lambda x: abs(f(x))), cert_abs(self.cert), self.topology)

    def scale(self, a: Any) -> "CertFn":
        a = Dyadic.of(a)
        f = self.fn
        return CertFn(PointFn(f"scale({a}, {f.name})", lambda x: f(x).scale(a)),
                      cert_scale(a, self.cert), self.topology)

    def shift(self, c: Any) -> "CertFn":
        c = Dyadic.of(c)
        f = self.fn
        return CertFn(PointFn(f"sum({f.name}, const({c}))", lambda x: f(x) + c),
                      cert_shift(self.cert, c), self.topology)

    def maximum(self, other: "CertFn") -> "CertFn":
        f, g = self.fn, other.fn
        return CertFn(PointFn(f"max({f.name}, {g.name})", lambda x: f(x).maximum(g(x))),
                      cert_max(self.cert, other.cert), self.topology)

    def minimum(self, other: "CertFn") -> "CertFn":
        f, g = self.fn, other.fn
        return CertFn(PointFn(f"min({f.name}, {g.name})", lambda x: f(x).minimum(g(x))),
                      cert_min(self.cert, other.cert), self.topology)

    def positive_part(self) -> "CertFn":
        """f ∨ 0"""
        return self.maximum(self.topology.constant(0))

    def check(self, probes: Sequence[Any] = None, tol: Dyadic = None,
              depth: int = 3, budget: int = 64) -> Verdict:
        return check_cert(self.cert, self.fn, self.topology,
                          probes or self.topology.probes(), tol, depth, budget)

    def __repr__(self):
        return f"CertFn({self.name})"


def uniform_close(g: PointFn, f: PointFn, eps: Dyadic, probes: Sequence[Any],
                  budget: int = 64, carrier: Carrier = None) -> Verdict:
    """在每個探針上驗證 |g(x) - f(x)| ≤ ε"""
    if eps <= ZERO:
        raise ValueError("ε 必須為正")
    unknown = None
    for x in probes:
        result = certify_le(abs(g(x) - f(x)), eps, budget)
        label = carrier.label(x) if carrier else str(x)
        if result.kind == VerdictKind.REJECTED:
            return Verdict(kind=VerdictKind.REJECTED, point=label, bound=result.bound,
                           witness_fn=g.name, probes_used=len(probes), exact=False,
                           detail=f"|{g.name} - {f.name}| > {eps}")
        if result.kind == VerdictKind.UNKNOWN and unknown is None:
            unknown = label
    if unknown is not None:
        return Verdict(kind=VerdictKind.UNKNOWN, point=unknown, probes_used=len(probes))
    return Verdict(kind=VerdictKind.ACCEPTED, probes_used=len(probes), exact=False)


def check_cert(cert: TopCert, f: PointFn, topology: Topology, probes: Sequence[Any],
               tol: Dyadic = None, depth: int = 3, budget: int = 64) -> Verdict:
    """
    檢查證書所表示的函數在探針上與 f 相差不超過 tol

    Limit 證書以前 depth 層驗證：每層宣告的上界必須 ≤ 2^-n，
    且 |g_n - f| ≤ bound_n + tol；各層本身的證書遞迴檢查。

    Args:
        cert: 證書
        f: 被證明屬於拓撲的點函數
        topology: 子基底所在的拓撲
        probes: 非空探針集合
        tol: 容差，預設 2^-10
        depth: Limit 展開深度
        budget: 比較的細化步數

    Returns:
        Verdict: Accepted / Rejected（附失敗探針）/ Unknown

    Raises:
        MalformedCert: 證書引用不存在的子基底成員
    """
    if not probes:
        raise ValueError("探針集合不可為空")
    if depth < 1:
        raise ValueError("depth 必須 ≥ 1")
    tol = tol if tol is not None else Dyadic.pow2(-10)
    validate_structure(cert, len(topology.subbase), depth)
    carrier = topology.carrier

    while isinstance(cert, Extensional):
        cert = cert.inner

    if isinstance(cert, Limit):
        for n in range(1, depth + 1):
            lvl = cert.level(n)
            if lvl.bound > Dyadic.pow2(-n):
                return Verdict(kind=VerdictKind.REJECTED, witness_fn=f.name,
                               detail=f"Limit 第 {n} 層宣告的上界 {lvl.bound} 超過 2^-{n}")
            g = topology.denote(lvl.cert)
            close = uniform_close(g, f, lvl.bound + tol, probes, budget, carrier)
            if close.kind != VerdictKind.ACCEPTED:
                detail = f"Limit 第 {n} 層：{close.detail or close.kind.value}"
                return close.model_copy(update={"witness_fn": f.name, "detail": detail})
            inner = _check_nested(lvl.cert, g, topology, probes, tol, depth, budget)
            if inner.kind != VerdictKind.ACCEPTED:
                return inner
        return Verdict(kind=VerdictKind.ACCEPTED, witness_fn=f.name,
                       probes_used=len(probes), exact=False)

    result = uniform_close(topology.denote(cert), f, tol, probes, budget, carrier)
    if result.kind == VerdictKind.ACCEPTED:
        nested = _check_nested(cert, f, topology, probes, tol, depth, budget)
        if nested.kind != VerdictKind.ACCEPTED:
            return nested
    return result.model_copy(update={"witness_fn": f.name})


def _check_nested(cert: TopCert, f: PointFn, topology: Topology, probes, tol, depth, budget) -> Verdict:
    """樹中較深處的 Limit 也要通過逐層檢查"""
    stack = list(cert.children()) if not isinstance(cert, Limit) else []
    while stack:
        node = stack.pop()
        if isinstance(node, Limit):
            result = check_cert(node, topology.denote(node), topology, probes, tol, depth, budget)
            if result.kind != VerdictKind.ACCEPTED:
                return result
        else:
            stack.extend(node.children())
    return Verdict(kind=VerdictKind.ACCEPTED, probes_used=len(probes))


# ---------------------------------------------------------------------------
# 拓撲建構
# ---------------------------------------------------------------------------


def full_topology(carrier: Carrier, name: str = None) -> Topology:
    """有限載體上由所有單點指示函數生成的拓撲"""
    subbase = [PointFn.indicator(x) for x in carrier.elements()]
    return Topology(name=name or f"full({carrier.name})", carrier=carrier,
                    subbase=subbase, kind=TopologyKind.FULL)


def trivial_topology(carrier: Carrier, name: str = None) -> Topology:
    """只含常數的拓撲；子基底為 const 1"""
    return Topology(name=name or f"trivial({carrier.name})", carrier=carrier,
                    subbase=[PointFn.constant(1)], kind=TopologyKind.TRIVIAL)


def bic_topology(carrier: Carrier = None) -> Topology:
    """Bic(ℝ) = ⋁{id}"""
    carrier = carrier or reals_carrier()
    return Topology(name="Bic(R)", carrier=carrier,
                    subbase=[PointFn("id", lambda x: ExactReal.of(x))], kind=TopologyKind.BIC)


def generated_topology(carrier: Carrier, subbase: Sequence[PointFn], name: str = None) -> Topology:
    return Topology(name=name or f"⋁F0({carrier.name})", carrier=carrier,
                    subbase=list(subbase), kind=TopologyKind.GENERATED)


def restrict_topology(topology: Topology, sub: Carrier) -> Topology:
    """
    F 限制到子載體：子基底成員逐一限制，證書的葉子索引不變
    """
    kind = topology.kind if topology.kind in (TopologyKind.FULL, TopologyKind.TRIVIAL) \
        else TopologyKind.RESTRICTED
    subbase = [PointFn(f"{g.name}|{sub.name}", g) for g in topology.subbase]
    return Topology(name=f"{topology.name}|{sub.name}", carrier=sub, subbase=subbase,
                    kind=kind, parent=topology)


def restrict_fn(item: CertFn, restricted: Topology) -> CertFn:
    # 限制拓撲的子基底與母拓撲逐葉對應，證書原樣沿用
    if restricted.parent is not item.topology:
        raise ValueError(f"{restricted.name} 不是 {item.topology.name} 的限制")
    return CertFn(PointFn(f"{item.name}|{restricted.carrier.name}", item.fn),
                  item.cert, restricted)


def realfn_cert(phi: RealFn, topology: Topology) -> CertFn:
    """Bic(ℝ) 中 φ = φ ∘ id 的證書"""
    if topology.kind != TopologyKind.BIC:
        raise ValueError("只有 Bic(ℝ) 能直接以 φ ∘ id 證明")
    return topology.leaf(0).then(phi).renamed(phi.expr())


Topology.model_rebuild()

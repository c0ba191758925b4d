"""Bishop 拓撲群模組"""
import itertools
import random
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict

from bishop.errors import ClassificationFailure, ClosureFailure, GroupLawViolation, InvalidTable
from bishop.exactreal import Dyadic, ExactReal, certify_le, fn_scale
from bishop.morphism import (
    Morphism, OpennessWitness, compose_mor, identity_mor, iso_check, lift_check, make_morphism,
    pair_mor, product_map, product_topology, projection, pull_back, section_mor, witnessed_fns,
)
from bishop.space import (
    BicCompose, Carrier, CertFn, Const, FromSubbase, Sum, Topology, TopologyKind,
    bic_topology, cert_neg, const_cert, finite_carrier, full_topology, reals_carrier,
    trivial_topology,
)
from bishop.types import Verdict, VerdictKind
from oracle.certs import finite_lift_certs


class GroupStructure(BaseModel):
    """(X, +, 0, -)；不假設交換律"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    name: str
    plus: Callable[[Any, Any], Any]
    neg: Callable[[Any], Any]
    zero: Any
    table: Optional[Dict[Tuple[Any, Any], Any]] = None


def cyclic_structure(n: int) -> GroupStructure:
    if n < 1:
        raise ValueError("n 必須 ≥ 1")
    return GroupStructure(name=f"Z{n}", plus=lambda x, y: (x + y) % n,
                          neg=lambda x: (-x) % n, zero=0)


def reals_structure() -> GroupStructure:
    return GroupStructure(name="R", plus=lambda x, y: ExactReal.of(x) + ExactReal.of(y),
                          neg=lambda x: -ExactReal.of(x), zero=ExactReal.of(0))


def table_structure(name: str, elements: Sequence[Any], table: Dict[Tuple[Any, Any], Any],
                    identity: Any) -> GroupStructure:
    """
    由乘法表建立群結構

    Raises:
        InvalidTable: 不是拉丁方、缺少項目或單位元錯誤
    """
    elements = list(elements)
    universe = set(elements)
    if identity not in universe:
        raise InvalidTable(f"單位元 {identity} 不在元素中")
    for a in elements:
        row = [table.get((a, b)) for b in elements]
        column = [table.get((b, a)) for b in elements]
        if None in row:
            raise InvalidTable(f"第 {a} 列缺少項目")
        if set(row) != universe or set(column) != universe:
            raise InvalidTable(f"元素 {a} 的列或行不是排列（非拉丁方）")
        if table[(identity, a)] != a or table[(a, identity)] != a:
            raise InvalidTable(f"{identity} 不是 {a} 的單位元")
    inverses = {}
    for a in elements:
        inverses[a] = next(b for b in elements if table[(a, b)] == identity)
        if table[(inverses[a], a)] != identity:
            raise InvalidTable(f"{a} 沒有雙邊逆元")
    return GroupStructure(name=name, plus=lambda x, y: table[(x, y)], neg=lambda x: inverses[x],
                          zero=identity, table=dict(table))


class BishopGroup(BaseModel):
    """群結構、拓撲，以及 + 與 - 的態射證書"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    name: str
    carrier: Carrier
    structure: GroupStructure
    topology: Topology
    square: Topology
    plus_mor: Morphism
    neg_mor: Morphism

    @property
    def zero(self) -> Any:
        return self.structure.zero

    def plus(self, x: Any, y: Any) -> Any:
        return self.structure.plus(x, y)

    def neg(self, x: Any) -> Any:
        return self.structure.neg(x)

    def sub(self, x: Any, y: Any) -> Any:
        return self.plus(x, self.neg(y))

    def conj(self, x: Any, y: Any) -> Any:
        """x + y - x"""
        return self.plus(self.plus(x, y), self.neg(x))

    def same(self, x: Any, y: Any, precision: int = 20) -> bool:
        return self.carrier.same(x, y, precision)

    def elements(self) -> List[Any]:
        return self.carrier.elements()

    def probes(self, n: int = 32, seed: int = 0, radius: int = 4) -> List[Any]:
        return self.carrier.sample(n, seed, radius)

    @property
    def is_finite(self) -> bool:
        return self.carrier.is_finite

    @property
    def is_abelian(self) -> bool:
        """有限群窮舉；ℝ 上只在探針上檢查"""
        points = self.elements() if self.is_finite else self.probes(8)
        return all(self.same(self.plus(x, y), self.plus(y, x)) for x in points for y in points)


def _law_points(carrier: Carrier, probes: Sequence[Any], seed: int) -> List[Tuple[Any, Any, Any]]:
    if carrier.is_finite:
        return list(itertools.product(carrier.elements(), repeat=3))
    rng = random.Random(seed)
    return [(rng.choice(probes), rng.choice(probes), rng.choice(probes)) for _ in range(len(probes))]


def validate_group_laws(structure: GroupStructure, carrier: Carrier, probes: Sequence[Any] = None,
                        precision: int = 20, seed: int = 0):
    """
    結合律、單位元、逆元：有限載體窮舉，ℝ 上抽樣

    Raises:
        GroupLawViolation: 某條公理不成立
    """
    probes = probes or carrier.sample(50, seed)
    same = carrier.same
    plus, neg, zero = structure.plus, structure.neg, structure.zero
    for x, y, z in _law_points(carrier, probes, seed):
        if not same(plus(plus(x, y), z), plus(x, plus(y, z)), precision):
            raise GroupLawViolation("結合律", f"({carrier.label(x)}, {carrier.label(y)}, {carrier.label(z)})")
    singles = carrier.elements() if carrier.is_finite else probes
    for x in singles:
        if not (same(plus(zero, x), x, precision) and same(plus(x, zero), x, precision)):
            raise GroupLawViolation("單位元", carrier.label(x))
        if not (same(plus(x, neg(x)), zero, precision) and same(plus(neg(x), x), zero, precision)):
            raise GroupLawViolation("逆元", carrier.label(x))


def assemble_group(name: str, structure: GroupStructure, topology: Topology, square: Topology,
                   plus_mor: Morphism, neg_mor: Morphism, verify: bool = True,
                   probes: Sequence[Any] = None) -> BishopGroup:
    """驗證群公理與兩個運算的提升證書後組裝"""
    group = BishopGroup(name=name, carrier=topology.carrier, structure=structure, topology=topology,
                        square=square, plus_mor=plus_mor, neg_mor=neg_mor)
    if verify:
        validate_group_laws(structure, topology.carrier, probes)
        for mor in (plus_mor, neg_mor):
            result = lift_check(mor)
            if result.kind != VerdictKind.ACCEPTED:
                raise GroupLawViolation(f"{mor.name} ∈ Mor", result.detail or result.kind.value)
    return group


def make_reals_group() -> BishopGroup:
    """(ℝ, +, 0, -; Bic(ℝ))：id∘+ = π₁+π₂，id∘- = -id"""
    topology = bic_topology(reals_carrier())
    square = product_topology(topology, topology)
    structure = reals_structure()
    plus_mor = make_morphism("+", lambda p: structure.plus(p[0], p[1]), square, topology,
                             [Sum(left=FromSubbase(index=0), right=FromSubbase(index=1))])
    neg_mor = make_morphism("-", structure.neg, topology, topology, [cert_neg(FromSubbase(index=0))])
    return assemble_group("R", structure, topology, square, plus_mor, neg_mor)


def _finite_group(structure: GroupStructure, topology: Topology) -> BishopGroup:
    square = product_topology(topology, topology)
    plus_mor = make_morphism("+", lambda p: structure.plus(p[0], p[1]), square, topology,
                             finite_lift_certs(lambda p: structure.plus(p[0], p[1]), square, topology))
    neg_mor = make_morphism("-", structure.neg, topology, topology,
                            finite_lift_certs(structure.neg, topology, topology))
    return assemble_group(f"{structure.name}[{topology.kind.value}]", structure, topology,
                          square, plus_mor, neg_mor)


def make_full_group(structure: GroupStructure, carrier: Carrier) -> BishopGroup:
    """有限群配上由單點指示函數生成的完全拓撲"""
    return _finite_group(structure, full_topology(carrier))


def make_finite_group(n: int) -> BishopGroup:
    """ℤₙ 配完全拓撲"""
    return make_full_group(cyclic_structure(n), finite_carrier(f"Z{n}", range(n)))


def make_trivial_group(structure: GroupStructure, carrier: Carrier) -> BishopGroup:
    """平凡拓撲：常數 a 滿足 a∘+ = a，兩個運算的證書都是 Const"""
    topology = trivial_topology(carrier)
    square = product_topology(topology, topology)
    plus_mor = make_morphism("+", lambda p: structure.plus(p[0], p[1]), square, topology,
                             [Const(value=Dyadic(1))])
    neg_mor = make_morphism("-", structure.neg, topology, topology, [Const(value=Dyadic(1))])
    return assemble_group(f"{structure.name}[trivial]", structure, topology, square, plus_mor, neg_mor)


# ---------------------------------------------------------------------------
# 平移、k 與 sub
# ---------------------------------------------------------------------------


def translation_mor(group: BishopGroup, x0: Any, side: str = "left") -> Morphism:
    """
    左平移 +¹ₓ₀: x ↦ x₀ + x（+ 在 x₀ 的截面），右平移 +²ₓ₀: x ↦ x + x₀
    """
    slot = 1 if side == "left" else 0
    return section_mor(group.plus_mor, x0, slot)


def translate_fn(group: BishopGroup, f: CertFn, x0: Any, side: str = "left") -> CertFn:
    """f¹ₓ₀(x) = f(x₀ + x) 或 f²ₓ₀(x) = f(x + x₀)，證書經平移態射代換"""
    mor = translation_mor(group, x0, side)
    label = group.carrier.label(x0)
    tag = "1" if side == "left" else "2"
    return pull_back(f, mor).renamed(f"{f.name}^{tag}[{label}]")


def neg_fn(group: BishopGroup, f: CertFn) -> CertFn:
    """f₋ = f ∘ -"""
    return pull_back(f, group.neg_mor).renamed(f"{f.name}_-")


def neg_iso_check(group: BishopGroup, probes: Sequence[Any] = None) -> Verdict:
    """- 是自逆同構，開性見證 f = (f₋)₋"""
    witness = OpennessWitness(morphism="-")
    for f in witnessed_fns(group.topology):
        witness.add(f, neg_fn(group, f), f"{f.name} = ({f.name}_-)∘-")
    return iso_check(group.neg_mor, group.neg, witness, probes)


def translation_iso_check(group: BishopGroup, x0: Any, probes: Sequence[Any] = None) -> Verdict:
    """+¹ₓ₀ 是同構，開性見證 f = f¹₋ₓ₀ ∘ +¹ₓ₀"""
    mor = translation_mor(group, x0)
    back = group.neg(x0)
    witness = OpennessWitness(morphism=mor.name)
    for f in witnessed_fns(group.topology):
        witness.add(f, translate_fn(group, f, back), f"{f.name} = {f.name}^1[-x0]∘{mor.name}")
    return iso_check(mor, lambda y: group.plus(back, y), witness, probes)


def k_map(group: BishopGroup) -> Morphism:
    """k(x, y) = (x, -y)"""
    k = product_map(identity_mor(group.topology), group.neg_mor, group.square, group.square)
    return k.model_copy(update={"name": "k"})


def k_iso_check(group: BishopGroup, probes: Sequence[Any] = None) -> Verdict:
    """k 是自己的逆：(f∘π₁)∘k = f∘π₁，(f∘π₂)∘k = f₋∘π₂"""
    k = k_map(group)
    witness = OpennessWitness(morphism="k")
    for f in witnessed_fns(group.square):
        witness.add(f, pull_back(f, k), f"{f.name} = ({f.name}∘k)∘k")
    return iso_check(k, k.map, witness, probes)


def sub_map(group: BishopGroup) -> Morphism:
    """sub = + ∘ k"""
    return compose_mor(k_map(group), group.plus_mor, "sub")


def sub_criterion(name: str, structure: GroupStructure, topology: Topology, sub_mor: Morphism,
                  square: Topology = None) -> BishopGroup:
    """
    只由 sub ∈ Mor 建立拓撲群：- = sub₀，+ = sub ∘ k

    Args:
        name: 群名稱
        structure: 群結構（只用於驗證公理）
        topology: 載體上的拓撲
        sub_mor: 已驗證的 sub: X × X → X
        square: sub_mor 的定義域

    Returns:
        BishopGroup: 以推導出的 + 與 - 組裝的群
    """
    square = square or sub_mor.dom
    zero = structure.zero
    neg = section_mor(sub_mor, zero, slot=1).model_copy(update={"name": "-"})
    k = product_map(identity_mor(topology), neg, square, square)
    plus = compose_mor(k, sub_mor, "+")
    return assemble_group(name, structure, topology, square, plus, neg)


def sub_morphism_for(group: BishopGroup) -> Morphism:
    """直接給出 sub 的證書（有限群由值表建構，ℝ 為 π₁ - π₂）"""
    fn = lambda p: group.sub(p[0], p[1])
    if group.topology.kind == TopologyKind.BIC:
        certs = [Sum(left=FromSubbase(index=0), right=cert_neg(FromSubbase(index=1)))]
    elif group.topology.kind == TopologyKind.TRIVIAL:
        certs = [Const(value=Dyadic(1))]
    else:
        certs = finite_lift_certs(fn, group.square, group.topology)
    return make_morphism("sub", fn, group.square, group.topology, certs)


# ---------------------------------------------------------------------------
# Mor(G, F) 上的逐點群運算
# ---------------------------------------------------------------------------


class MorphismGroup(BaseModel):
    """Mor(G, F) 在逐點運算下的群結構"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    source: Topology
    target: BishopGroup
    registry: List[Morphism]

    def _verified(self, mor: Morphism, operation: str) -> Morphism:
        result = lift_check(mor)
        if result.kind != VerdictKind.ACCEPTED:
            raise ClosureFailure(operation, result.detail or result.kind.value)
        return mor

    def plus(self, h1: Morphism, h2: Morphism) -> Morphism:
        """(h₁ +→ h₂)(y) = h₁(y) + h₂(y) = + ∘ (h₁ × h₂)"""
        paired = pair_mor(h1, h2, self.target.square)
        return self._verified(compose_mor(paired, self.target.plus_mor, f"({h1.name} + {h2.name})"), "+→")

    def neg(self, h: Morphism) -> Morphism:
        return self._verified(compose_mor(h, self.target.neg_mor, f"(-{h.name})"), "-→")

    def zero(self) -> Morphism:
        """常數映射 y ↦ 0；每個 g₀∘0 都是常數"""
        zero = self.target.zero
        certs = [const_cert(g0(zero)) for g0 in self.target.topology.subbase]
        return self._verified(make_morphism("0→", lambda y: zero, self.source, self.target.topology, certs), "0→")

    def agree(self, h1: Morphism, h2: Morphism, probes: Sequence[Any] = None, precision: int = 20) -> bool:
        probes = probes or self.source.probes()
        return all(self.target.same(h1(y), h2(y), precision) for y in probes)

    def check_laws(self, probes: Sequence[Any] = None) -> Verdict:
        """對登錄的每個態射檢查 h + 0 = h 與 h + (-h) = 0"""
        zero = self.zero()
        for h in self.registry:
            if not self.agree(self.plus(h, zero), h, probes):
                return Verdict(kind=VerdictKind.REJECTED, witness_fn=h.name, detail="h + 0 ≠ h")
            if not self.agree(self.plus(h, self.neg(h)), zero, probes):
                return Verdict(kind=VerdictKind.REJECTED, witness_fn=h.name, detail="h + (-h) ≠ 0")
        return Verdict(kind=VerdictKind.ACCEPTED, probes_used=len(self.registry), exact=False)


def pointwise_mor_group(source: Topology, target: BishopGroup, registry: Sequence[Morphism]) -> MorphismGroup:
    for h in registry:
        result = lift_check(h)
        if result.kind != VerdictKind.ACCEPTED:
            raise ClosureFailure(h.name, result.detail or "登錄的態射未通過提升檢查")
    return MorphismGroup(source=source, target=target, registry=list(registry))


# ---------------------------------------------------------------------------
# 乘積群
# ---------------------------------------------------------------------------


def product_group(left: BishopGroup, right: BishopGroup) -> BishopGroup:
    """
    X × Y 逐分量運算；(f∘πˣ)∘+ = (f∘+ˣ)∘h，h 為成對投影態射
    """
    topology = product_topology(left.topology, right.topology)
    square = product_topology(topology, topology)
    first, second = projection(square, 0), projection(square, 1)
    components = []
    for slot, factor in enumerate((left, right)):
        pick = projection(topology, slot)
        h = pair_mor(compose_mor(first, pick), compose_mor(second, pick), factor.square)
        components.append(compose_mor(h, factor.plus_mor, f"+{slot + 1}∘h"))
    plus_mor = pair_mor(components[0], components[1], topology).model_copy(update={"name": "+"})
    neg_mor = product_map(left.neg_mor, right.neg_mor, topology, topology).model_copy(update={"name": "-"})
    structure = GroupStructure(
        name=f"{left.structure.name}×{right.structure.name}",
        plus=lambda p, q: (left.plus(p[0], q[0]), right.plus(p[1], q[1])),
        neg=lambda p: (left.neg(p[0]), right.neg(p[1])),
        zero=(left.zero, right.zero),
    )
    return assemble_group(f"{left.name}×{right.name}", structure, topology, square, plus_mor, neg_mor)


# ---------------------------------------------------------------------------
# 同態
# ---------------------------------------------------------------------------


class BishopHom(BaseModel):
    """態射加上同態律"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    morphism: Morphism
    source: BishopGroup
    target: BishopGroup
    laws: Verdict

    @property
    def name(self) -> str:
        return self.morphism.name

    def __call__(self, x: Any) -> Any:
        return self.morphism(x)


def check_hom_laws(mor: Morphism, source: BishopGroup, target: BishopGroup,
                   probes: Sequence[Any] = None, precision: int = 20) -> Verdict:
    """h(x + y) = h(x) + h(y) 與 h(0) = 0（有限時窮舉）"""
    points = source.elements() if source.is_finite else (probes or source.probes())
    if not target.same(mor(source.zero), target.zero, precision):
        return Verdict(kind=VerdictKind.REJECTED, witness_fn=mor.name, detail="h(0) ≠ 0")
    pairs = itertools.product(points, repeat=2) if source.is_finite else zip(points, reversed(points))
    count = 0
    for x, y in pairs:
        count += 1
        if not target.same(mor(source.plus(x, y)), target.plus(mor(x), mor(y)), precision):
            label = f"({source.carrier.label(x)}, {source.carrier.label(y)})"
            return Verdict(kind=VerdictKind.REJECTED, witness_fn=mor.name, point=label,
                           detail="h(x + y) ≠ h(x) + h(y)")
    return Verdict(kind=VerdictKind.ACCEPTED, witness_fn=mor.name, probes_used=count,
                   exact=source.is_finite)


def make_hom(mor: Morphism, source: BishopGroup, target: BishopGroup,
             probes: Sequence[Any] = None) -> BishopHom:
    """
    Raises:
        GroupLawViolation: 提升檢查或同態律不成立
    """
    lifted = lift_check(mor)
    if lifted.kind != VerdictKind.ACCEPTED:
        raise GroupLawViolation(f"{mor.name} ∈ Mor", lifted.detail or lifted.kind.value)
    laws = check_hom_laws(mor, source, target, probes)
    if laws.kind != VerdictKind.ACCEPTED:
        raise GroupLawViolation("同態律", laws.point or laws.detail)
    return BishopHom(morphism=mor, source=source, target=target, laws=laws)


def projection_homs(product: BishopGroup, left: BishopGroup, right: BishopGroup) -> List[BishopHom]:
    return [make_hom(projection(product.topology, 0), product, left),
            make_hom(projection(product.topology, 1), product, right)]


def reduction_hom(source: BishopGroup, target: BishopGroup, modulus: int) -> BishopHom:
    """ℤₙ → ℤ_d，x ↦ x mod d"""
    fn = lambda x: x % modulus
    certs = finite_lift_certs(fn, source.topology, target.topology)
    mor = make_morphism(f"mod{modulus}", fn, source.topology, target.topology, certs)
    return make_hom(mor, source, target)


def scaling_hom(a: Any, reals: BishopGroup) -> BishopHom:
    """h_a(x) = a·x，id ∘ h_a = a·id"""
    a = Dyadic.of(a)
    mor = make_morphism(f"h[{a}]", lambda x: ExactReal.of(x).scale(a), reals.topology, reals.topology,
                        [BicCompose(phi=fn_scale(a), inner=FromSubbase(index=0))])
    return make_hom(mor, reals, reals)


class Classification(BaseModel):
    """h = h_a 的估計結果"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    a: ExactReal
    verdict: Verdict

    def estimate(self, precision: int = 20) -> Dyadic:
        return self.a.approx(precision).midpoint()


DEFAULT_HOM_PROBES = (Dyadic(1), Dyadic(1, -1), Dyadic(-3))


def classify_hom(h: BishopHom, probes: Sequence[Any] = DEFAULT_HOM_PROBES, tol: Dyadic = None,
                 budget: int = 64) -> Classification:
    """
    a = h(1)，在有理探針上檢查 |h(q) - a·q| ≤ tol

    Raises:
        ClassificationFailure: 某個探針超出容差
    """
    tol = tol if tol is not None else Dyadic.pow2(-10)
    a = ExactReal.of(h(ExactReal.of(1)))
    for q in probes:
        q = Dyadic.of(q)
        got = ExactReal.of(h(ExactReal.of(q)))
        expected = a.scale(q)
        result = certify_le(abs(got - expected), tol, budget)
        if result.kind != VerdictKind.ACCEPTED:
            raise ClassificationFailure(str(q), expected.describe(), got.describe())
    verdict = Verdict(kind=VerdictKind.ACCEPTED, witness_fn=h.name, bound=a.approx(20).midpoint(),
                      probes_used=len(probes), exact=False)
    return Classification(a=a, verdict=verdict)

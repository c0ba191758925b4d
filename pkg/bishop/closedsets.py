"""閉子集定理 - 以閉包證據為輸入的見證轉換器與基於緊性的反駁程序"""
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field

from bishop.errors import EvidenceFailure, InclusionViolation, NotASubgroup, PreconditionUnmet
from bishop.exactreal import certify_zero
from bishop.group import BishopGroup, BishopHom, MorphismGroup, neg_fn, translate_fn
from bishop.morphism import (
    Morphism, identity_mor, make_morphism, projection, pull_back, section_mor,
)
from bishop.nbhd import (
    ClosedSet, ClosureEvidence, OpenSet, OpenWitness, Subset, check_inclusion, closure_probe,
    f_complement, finite_subset, member_evidence, separate,
)
from bishop.space import CertFn, Topology, const_cert, positive_at, restrict_topology, sub_carrier
from bishop.types import StepKind, TheoremResult, Verdict, VerdictKind, WitnessChain


# ---------------------------------------------------------------------------
# 子群
# ---------------------------------------------------------------------------


class SubgroupView(BaseModel):
    """H ≤ X：成員判定，以及可選的閉包截面與開性結構"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    name: str
    group: BishopGroup
    subset: Subset
    closed: Optional[ClosedSet] = None
    openness: Optional[OpenSet] = None

    def member_at(self, x: Any, budget: int = 64) -> Verdict:
        return self.subset.member_at(x, budget)

    @property
    def points(self) -> Optional[Tuple[Any, ...]]:
        return self.subset.points

    def contains(self, x: Any, budget: int = 64) -> bool:
        return self.subset.contains(x, budget)


def validate_subgroup(group: BishopGroup, subset: Subset, budget: int = 64):
    """
    含 0、對 + 與 - 封閉（有限時窮舉，否則在列舉的點上檢查）

    Raises:
        NotASubgroup: 任一條件不成立
    """
    if not subset.contains(group.zero, budget):
        raise NotASubgroup(f"{subset.name} 不含單位元")
    points = subset.search_points(group.probes(), budget)
    for x in points:
        if not subset.contains(group.neg(x), budget):
            raise NotASubgroup(f"{subset.name} 對 - 不封閉：{group.carrier.label(x)}")
        for y in points:
            if not subset.contains(group.plus(x, y), budget):
                raise NotASubgroup(f"{subset.name} 對 + 不封閉："
                                   f"{group.carrier.label(x)} + {group.carrier.label(y)}")


def subgroup(group: BishopGroup, subset: Subset, closed: ClosedSet = None,
             openness: OpenSet = None, validate: bool = True) -> SubgroupView:
    if validate:
        validate_subgroup(group, subset)
    return SubgroupView(name=subset.name, group=group, subset=subset, closed=closed, openness=openness)


def finite_subgroup(group: BishopGroup, points: Sequence[Any], name: str = None) -> SubgroupView:
    return subgroup(group, finite_subset(group.carrier, points, name))


def is_normal(H: SubgroupView, budget: int = 64) -> bool:
    """x + h - x ∈ H（在群元素或探針上）"""
    group = H.group
    points = H.subset.search_points(group.probes(), budget)
    universe = group.elements() if group.is_finite else group.probes()
    return all(H.contains(group.conj(x, h), budget) for x in universe for h in points)


# ---------------------------------------------------------------------------
# 交換子映射
# ---------------------------------------------------------------------------


def constant_mor(group: BishopGroup, source: Topology, value: Any) -> Morphism:
    """c_x: y ↦ x，每個 g₀∘c_x 都是常數"""
    certs = [const_cert(g0(value)) for g0 in group.topology.subbase]
    return make_morphism(f"c[{group.carrier.label(value)}]", lambda y: value, source, group.topology, certs)


class CommutatorMaps(BaseModel):
    """abel、abel_x、normal_x、Normal_x，皆為帶證書的態射"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    group: BishopGroup
    abel: Morphism

    def abel_at(self, x: Any) -> Morphism:
        """abel_x(y) = x + y - x - y"""
        return section_mor(self.abel, x, slot=1)

    def abel_right(self, v: Any) -> Morphism:
        """y ↦ abel(y, v)"""
        return section_mor(self.abel, v, slot=0)

    def normal(self, x: Any) -> Morphism:
        """normal_x = c_x + id - c_x"""
        ops = MorphismGroup(source=self.group.topology, target=self.group, registry=[])
        c = constant_mor(self.group, self.group.topology, x)
        ident = identity_mor(self.group.topology)
        mor = ops.plus(ops.plus(c, ident), ops.neg(c))
        return mor.model_copy(update={"name": f"normal[{self.group.carrier.label(x)}]"})

    def normal_conj(self, x: Any) -> Morphism:
        """Normal_x = id + c_x - id"""
        ops = MorphismGroup(source=self.group.topology, target=self.group, registry=[])
        c = constant_mor(self.group, self.group.topology, x)
        ident = identity_mor(self.group.topology)
        mor = ops.plus(ops.plus(ident, c), ops.neg(ident))
        return mor.model_copy(update={"name": f"Normal[{self.group.carrier.label(x)}]"})

    def check_identities(self, probes: Sequence[Any] = None, precision: int = 20) -> Verdict:
        """abel_x(y) = -abel_y(x)，normal_x(y) = Normal_y(x)，abel_x(y) = 0 ⇔ abel_y(x) = 0"""
        group = self.group
        points = probes or (group.elements() if group.is_finite else group.probes(8))
        normals = {i: self.normal(x) for i, x in enumerate(points)}
        conjs = {i: self.normal_conj(y) for i, y in enumerate(points)}
        for i, x in enumerate(points):
            for j, y in enumerate(points):
                a_xy, a_yx = self.abel((x, y)), self.abel((y, x))
                if not group.same(a_xy, group.neg(a_yx), precision):
                    return Verdict(kind=VerdictKind.REJECTED, detail="abel_x(y) ≠ -abel_y(x)",
                                   point=f"({group.carrier.label(x)}, {group.carrier.label(y)})")
                if group.same(a_xy, group.zero, precision) != group.same(a_yx, group.zero, precision):
                    return Verdict(kind=VerdictKind.REJECTED, detail="abel 的零點不對稱")
                if not group.same(normals[i](y), conjs[j](x), precision):
                    return Verdict(kind=VerdictKind.REJECTED, detail="normal_x(y) ≠ Normal_y(x)")
        return Verdict(kind=VerdictKind.ACCEPTED, probes_used=len(points) ** 2, exact=group.is_finite)


def commutator_maps(group: BishopGroup) -> CommutatorMaps:
    """abel = π₁ + π₂ - π₁ - π₂，以 Mor(X×X, X) 的逐點運算組成"""
    ops = MorphismGroup(source=group.square, target=group, registry=[])
    p1, p2 = projection(group.square, 0), projection(group.square, 1)
    abel = ops.plus(ops.plus(ops.plus(p1, p2), ops.neg(p1)), ops.neg(p2))
    return CommutatorMaps(group=group, abel=abel.model_copy(update={"name": "abel"}))


# ---------------------------------------------------------------------------
# -C 與 x₀ + C
# ---------------------------------------------------------------------------


def neg_closed(group: BishopGroup, closed: ClosedSet) -> ClosedSet:
    """
    -C 是閉集：x 的證據以 f₋ 查詢，得到 u ∈ -C，回答 -u ∈ C
    """
    carrier = group.carrier

    def member_at(x: Any, budget: int) -> Verdict:
        return closed.member_at(group.neg(x), budget).model_copy(update={"point": carrier.label(x)})

    def section(evidence: ClosureEvidence, chain: WitnessChain, budget: int) -> Any:
        def respond(f: CertFn, pos: Verdict) -> Any:
            u = evidence.query(neg_fn(group, f), chain, budget)
            return group.neg(u)

        moved = ClosureEvidence(group.neg(evidence.point), closed, respond, f"-{evidence.name}")
        produced = closed.closure_section(moved, chain, budget)
        result = group.neg(produced)
        chain.record(StepKind.COMPUTE, f"-({carrier.label(produced)}) = {carrier.label(result)}",
                     point=carrier.label(result))
        return result

    points = tuple(group.neg(c) for c in closed.points) if closed.points is not None else None
    return ClosedSet(name=f"-{closed.name}", carrier=carrier, member_at=member_at, points=points,
                     closure_section=section)


def translate_closed(group: BishopGroup, x0: Any, closed: ClosedSet) -> ClosedSet:
    """
    x₀ + C 是閉集：以 f¹₋ₓ₀ 查詢，得到 u ∈ x₀ + C，回答 -x₀ + u ∈ C
    """
    carrier = group.carrier
    back = group.neg(x0)
    label = carrier.label(x0)

    def member_at(x: Any, budget: int) -> Verdict:
        return closed.member_at(group.plus(back, x), budget).model_copy(update={"point": carrier.label(x)})

    def section(evidence: ClosureEvidence, chain: WitnessChain, budget: int) -> Any:
        def respond(f: CertFn, pos: Verdict) -> Any:
            u = evidence.query(translate_fn(group, f, back), chain, budget)
            return group.plus(back, u)

        moved = ClosureEvidence(group.plus(back, evidence.point), closed, respond,
                                f"{evidence.name}-{label}")
        produced = closed.closure_section(moved, chain, budget)
        result = group.plus(x0, produced)
        chain.record(StepKind.COMPUTE, f"{label} + {carrier.label(produced)} = {carrier.label(result)}",
                     point=carrier.label(result))
        return result

    points = tuple(group.plus(x0, c) for c in closed.points) if closed.points is not None else None
    return ClosedSet(name=f"{label}+{closed.name}", carrier=carrier, member_at=member_at, points=points,
                     closure_section=section)


def _image_subset(group: BishopGroup, source: Subset, fn: Callable[[Any], Any], name: str) -> Subset:
    if source.points is None:
        raise ValueError(f"{source.name} 必須是列舉的集合")
    return finite_subset(group.carrier, [fn(a) for a in source.points], name)


def _closure_pattern(subset: Subset, universe: Sequence[Any], family: Sequence[CertFn], budget: int) -> List[bool]:
    # 依 universe 的順序；ℝ 上的點沒有雜湊，不能當鍵
    return [closure_probe(subset, x, family, budget).kind != VerdictKind.EXCLUDED_BY for x in universe]


def closure_neg_eq(group: BishopGroup, source: Subset, family: Sequence[CertFn], budget: int = 64) -> Verdict:
    """closure(-A) = -closure(A)，在有限載體上窮舉比較"""
    negated = _image_subset(group, source, group.neg, f"-{source.name}")
    universe = group.elements() if group.is_finite else group.probes()
    left = _closure_pattern(negated, universe, family, budget)
    right = _closure_pattern(source, [group.neg(x) for x in universe], family, budget)
    for x, lhs, rhs in zip(universe, left, right):
        if lhs != rhs:
            return Verdict(kind=VerdictKind.REJECTED, point=group.carrier.label(x),
                           detail="closure(-A) 與 -closure(A) 不同")
    return Verdict(kind=VerdictKind.ACCEPTED, probes_used=len(universe), exact=False)


def closure_translate_eq(group: BishopGroup, x0: Any, source: Subset, family: Sequence[CertFn],
                         budget: int = 64) -> Verdict:
    """closure(x₀ + A) = x₀ + closure(A)"""
    moved = _image_subset(group, source, lambda a: group.plus(x0, a), f"{group.carrier.label(x0)}+{source.name}")
    universe = group.elements() if group.is_finite else group.probes()
    back = group.neg(x0)
    left = _closure_pattern(moved, universe, family, budget)
    right = _closure_pattern(source, [group.plus(back, x) for x in universe], family, budget)
    for x, lhs, rhs in zip(universe, left, right):
        if lhs != rhs:
            return Verdict(kind=VerdictKind.REJECTED, point=group.carrier.label(x),
                           detail="closure(x0 + A) 與 x0 + closure(A) 不同")
    return Verdict(kind=VerdictKind.ACCEPTED, probes_used=len(universe), exact=False)


def separating_iff_zero_closed(group: BishopGroup, family: Sequence[CertFn], budget: int = 64) -> Verdict:
    """
    F 分離點 ⇔ {0} 是閉集；有限載體上兩邊都窮舉計算，{x} = x + {0} 由平移得到
    """
    carrier = group.carrier
    if not group.is_finite:
        ident = group.topology.leaf(0)
        zero = finite_subset(carrier, [group.zero])
        probes = group.probes(8)
        excluded = all(closure_probe(zero, x, [abs(ident)], budget).kind == VerdictKind.EXCLUDED_BY
                       for x in probes if certify_zero(x, budget).kind == VerdictKind.APART)
        separated = separate(probes[1], probes[0], [ident], carrier, budget) is not None
        kind = VerdictKind.ACCEPTED if excluded == separated else VerdictKind.REJECTED
        return Verdict(kind=kind, exact=False, detail=f"separating={separated} zero_closed={excluded}")

    points = group.elements()
    separating = all(separate(x, y, family, carrier, budget) is not None
                     for i, x in enumerate(points) for y in points[i + 1:])
    zero = finite_subset(carrier, [group.zero])
    zero_closed = all(closure_probe(zero, y, family, budget).kind == VerdictKind.EXCLUDED_BY
                      for y in points if y != group.zero)
    singletons_closed = True
    for x in points:
        shifted = _image_subset(group, zero, lambda z: group.plus(x, z), f"{carrier.label(x)}+{{0}}")
        if any(closure_probe(shifted, y, family, budget).kind != VerdictKind.EXCLUDED_BY
               for y in points if y != x):
            singletons_closed = False
    consistent = separating == zero_closed == singletons_closed
    kind = VerdictKind.ACCEPTED if consistent else VerdictKind.REJECTED
    return Verdict(kind=kind, exact=True, probes_used=len(family),
                   detail=f"separating={separating} zero_closed={zero_closed}")


# ---------------------------------------------------------------------------
# 開子群是閉的
# ---------------------------------------------------------------------------


def _witness_at(openness: OpenSet, point: Any, budget: int, requirement: str) -> OpenWitness:
    witness = openness.witness(point, budget)
    if witness is None or not witness.positivity.is_positive or not witness.inclusion.accepted:
        raise PreconditionUnmet(requirement)
    return witness


def open_subgroup_closed(H: SubgroupView, openness: OpenSet, budget: int = 64) -> ClosedSet:
    """
    開子群是閉的

    以 0 的開性見證 g（g(0) > 0，U(g) ⊆ H）：x 的證據以 g¹₋ₓ 查詢得到 u ∈ H，
    則 -x + u ∈ U(g) ⊆ H，回答 x = u - (-x + u)。

    Raises:
        PreconditionUnmet: 0 沒有開性見證
    """
    group = H.group
    carrier = group.carrier
    g = _witness_at(openness, group.zero, budget, f"{H.name} 在 0 沒有開性見證").f

    def section(evidence: ClosureEvidence, chain: WitnessChain, budget_: int) -> Any:
        x = evidence.point
        chain.record(StepKind.HYPOTHESIS, f"U({g.name}) ⊆ {H.name}，{g.name}(0) > 0", fn=g.name)
        back = group.neg(x)
        u = evidence.query(translate_fn(group, g, back), chain, budget)
        inside = group.plus(back, u)
        label = carrier.label(inside)
        if not positive_at(g.fn, inside, budget, carrier).is_positive:
            raise EvidenceFailure(f"{g.name}({label}) 無法證明為正", carrier.label(x))
        if not H.contains(inside, budget):
            raise InclusionViolation(label, H.name)
        chain.record(StepKind.INCLUSION, f"{label} ∈ U({g.name}) ⊆ {H.name}", point=label,
                     set_name=H.name, member_obj=H.member_at, point_obj=inside)
        result = group.sub(u, inside)
        chain.record(StepKind.COMPUTE, f"{carrier.label(u)} - {label} = {carrier.label(result)}",
                     point=carrier.label(result))
        return result

    return ClosedSet(name=H.name, carrier=carrier, member_at=H.subset.member_at, points=H.points,
                     closure_section=section)


# ---------------------------------------------------------------------------
# 子群的閉包
# ---------------------------------------------------------------------------


class SubgroupClosure(BaseModel):
    """
    closure(H) 也是子群：證據的加法、取逆與單位元

    x + y 的證據：以 f²_y 查詢 e_x 得 z，再以 f¹_z 查詢 e_y 得 w，回答 z + w ∈ H。
    """
    model_config = ConfigDict(arbitrary_types_allowed=True)

    H: SubgroupView
    family: List[CertFn] = Field(default_factory=list)

    @property
    def group(self) -> BishopGroup:
        return self.H.group

    def member_at(self, x: Any, budget: int = 64) -> Verdict:
        """以函數族探測 closure(H)"""
        probe = closure_probe(self.H.subset, x, self.family, budget)
        if probe.kind == VerdictKind.EXCLUDED_BY:
            return probe.model_copy(update={"kind": VerdictKind.NON_MEMBER})
        if probe.kind == VerdictKind.IN_CLOSURE:
            return probe.model_copy(update={"kind": VerdictKind.MEMBER})
        return probe

    def zero_evidence(self) -> ClosureEvidence:
        zero = self.group.zero
        return member_evidence(self.H.subset, zero, zero, "e0")

    def plus_evidence(self, ex: ClosureEvidence, ey: ClosureEvidence, chain: WitnessChain,
                      budget: int = 64) -> ClosureEvidence:
        group = self.group
        carrier = group.carrier
        x, y = ex.point, ey.point

        def respond(f: CertFn, pos: Verdict) -> Any:
            z = ex.query(translate_fn(group, f, y, side="right"), chain, budget)
            w = ey.query(translate_fn(group, f, z, side="left"), chain, budget)
            total = group.plus(z, w)
            chain.record(StepKind.COMPUTE, f"{carrier.label(z)} + {carrier.label(w)} ∈ {self.H.name}",
                         point=carrier.label(total))
            return total

        return ClosureEvidence(group.plus(x, y), self.H.subset, respond, f"({ex.name} + {ey.name})")

    def neg_evidence(self, ex: ClosureEvidence, chain: WitnessChain, budget: int = 64) -> ClosureEvidence:
        group = self.group

        def respond(f: CertFn, pos: Verdict) -> Any:
            return group.neg(ex.query(neg_fn(group, f), chain, budget))

        return ClosureEvidence(group.neg(ex.point), self.H.subset, respond, f"-{ex.name}")

    def audit(self, evidence: ClosureEvidence, chain: WitnessChain, budget: int = 64) -> Verdict:
        """以整個函數族查詢證據；每個在該點為正的函數都必須得到有效回答"""
        queried = 0
        for f in self.family:
            if positive_at(f.fn, evidence.point, budget).is_positive:
                evidence.query(f, chain, budget)
                queried += 1
        return Verdict(kind=VerdictKind.IN_CLOSURE, point=self.group.carrier.label(evidence.point),
                       probes_used=queried, exact=False)


def subgroup_closure(H: SubgroupView, family: Sequence[CertFn]) -> SubgroupClosure:
    return SubgroupClosure(H=H, family=list(family))


# ---------------------------------------------------------------------------
# 基於緊性的反駁
# ---------------------------------------------------------------------------


def _separation_precondition(topology: Topology, family: Sequence[CertFn], budget: int,
                             chain: WitnessChain) -> Optional[Verdict]:
    """有限載體上 F 必須分離所有點；ℝ 上 Bic(ℝ) 以 id 分離"""
    carrier = topology.carrier
    if not carrier.is_finite:
        chain.record(StepKind.HYPOTHESIS, f"{topology.name} 以 id 分離點")
        return None
    points = carrier.elements()
    for i, x in enumerate(points):
        for y in points[i + 1:]:
            if separate(x, y, family, carrier, budget) is None:
                return Verdict(kind=VerdictKind.PRECONDITION_UNVERIFIED,
                               point=f"({carrier.label(x)}, {carrier.label(y)})",
                               detail=f"{topology.name} 無法分離這兩點")
    chain.record(StepKind.HYPOTHESIS, f"{topology.name} 分離所有點")
    return None


def _separator(value: Any, zero: Any, family: Sequence[CertFn], budget: int) -> Optional[CertFn]:
    """f(value) > 0 且 f(zero) = 0 的函數"""
    for f in family:
        if positive_at(f.fn, value, budget).is_positive and certify_zero(f(zero), budget).kind == VerdictKind.EQUAL:
            return f
    return None


def _vanishing_separator(value: Any, zero: Any, family: Sequence[CertFn], budget: int) -> Optional[CertFn]:
    """分離 value 與 zero 的函數，平移成 f(zero) = 0 後取 |·|"""
    apart = next((f for f in family
                  if certify_zero(f(value) - f(zero), budget).kind == VerdictKind.APART), None)
    if apart is None:
        return _separator(value, zero, family, budget)
    level = apart(zero)
    if level.exact is None:
        return None
    return abs(apart.shift(-level.exact))


def _refutation(theorem: str, chain: WitnessChain, point_label: str, found: Optional[CertFn],
                evidence: Optional[ClosureEvidence], query_fn: Optional[CertFn], budget: int) -> TheoremResult:
    if found is None:
        verdict = Verdict(kind=VerdictKind.NO_SEPARATION, point=point_label, exact=False,
                          detail="函數族中沒有分離函數")
        return TheoremResult(theorem=theorem, verdict=verdict, point=point_label, chain=chain)
    detail = f"{found.name} 分離了應相等的點"
    if evidence is not None and query_fn is not None:
        try:
            evidence.query(query_fn, chain, budget)
            detail += "，且證據給出了違反假設的成員"
        except EvidenceFailure as e:
            detail += f"；證據無法回答：{e.reason}"
    verdict = Verdict(kind=VerdictKind.SEPARATION_FOUND, witness_fn=found.name, point=point_label, detail=detail)
    return TheoremResult(theorem=theorem, verdict=verdict, point=point_label, chain=chain)


def abelian_closure_refuter(H: SubgroupView, x: Any, y: Any, family: Sequence[CertFn],
                            budget: int = 64, evidence: ClosureEvidence = None) -> TheoremResult:
    """
    H 交換 ⇒ closure(H) 交換：尋找 f 使 f(abel(x, y)) > 0 且 f(0) = 0

    evidence 若提供，應為 (x, y) ∈ closure(H × H) 的證據，用來執行 f∘abel 的查詢。
    """
    group = H.group
    carrier = group.carrier
    chain = WitnessChain(theorem="abelian-closure")
    label = f"({carrier.label(x)}, {carrier.label(y)})"
    blocked = _separation_precondition(group.topology, family, budget, chain)
    if blocked is not None:
        return TheoremResult(theorem=chain.theorem, verdict=blocked, point=label, chain=chain)
    points = H.subset.search_points(group.probes(), budget)
    if not all(group.same(group.plus(a, b), group.plus(b, a)) for a in points for b in points):
        verdict = Verdict(kind=VerdictKind.PRECONDITION_UNVERIFIED, point=label, detail=f"{H.name} 不是交換的")
        return TheoremResult(theorem=chain.theorem, verdict=verdict, point=label, chain=chain)
    chain.record(StepKind.HYPOTHESIS, f"{H.name} 是交換子群")
    maps = commutator_maps(group)
    value = maps.abel((x, y))
    found = _vanishing_separator(value, group.zero, family, budget)
    query_fn = pull_back(found, maps.abel) if found is not None and evidence is not None else None
    return _refutation(chain.theorem, chain, label, found, evidence, query_fn, budget)


def center_subset(group: BishopGroup, H: SubgroupView, budget: int = 64) -> Subset:
    """Center_X(H) = {x | ∀h ∈ H, x + h = h + x}"""
    hs = H.subset.search_points(group.probes(), budget)

    def member_at(x: Any, budget_: int) -> Verdict:
        ok = all(group.same(group.plus(x, h), group.plus(h, x), budget_) for h in hs)
        return Verdict(kind=VerdictKind.MEMBER if ok else VerdictKind.NON_MEMBER,
                       point=group.carrier.label(x), exact=group.is_finite)

    points = tuple(x for x in group.elements() if member_at(x, budget).is_member) if group.is_finite else None
    return Subset(name=f"Center({H.name})", carrier=group.carrier, member_at=member_at, points=points)


def center_closed(group: BishopGroup, H: SubgroupView, x: Any, family: Sequence[CertFn],
                  budget: int = 64, evidence: ClosureEvidence = None) -> TheoremResult:
    """
    Center_X(H) 是閉的：對每個 v ∈ H，以 y ↦ abel(y, v) 與分離函數 f 反駁
    """
    carrier = group.carrier
    chain = WitnessChain(theorem="center-closed")
    label = carrier.label(x)
    blocked = _separation_precondition(group.topology, family, budget, chain)
    if blocked is not None:
        return TheoremResult(theorem=chain.theorem, verdict=blocked, point=label, chain=chain)
    maps = commutator_maps(group)
    for v in H.subset.search_points(group.probes(), budget):
        value = maps.abel((x, v))
        found = _vanishing_separator(value, group.zero, family, budget)
        if found is not None:
            query_fn = pull_back(found, maps.abel_right(v)) if evidence is not None else None
            return _refutation(chain.theorem, chain, label, found, evidence, query_fn, budget)
        chain.record(StepKind.COMPUTE, f"abel({label}, {carrier.label(v)}) 與 0 不可分離",
                     point=carrier.label(v))
    return _refutation(chain.theorem, chain, label, None, None, None, budget)


def kernel_subset(h: BishopHom, budget: int = 64) -> Subset:
    """Ker(h) = {x | h(x) = 0}"""
    source, target = h.source, h.target

    def member_at(x: Any, budget_: int) -> Verdict:
        ok = target.same(h(x), target.zero, budget_)
        return Verdict(kind=VerdictKind.MEMBER if ok else VerdictKind.NON_MEMBER,
                       point=source.carrier.label(x), exact=target.is_finite)

    points = tuple(x for x in source.elements() if member_at(x, budget).is_member) if source.is_finite else None
    return Subset(name=f"Ker({h.name})", carrier=source.carrier, member_at=member_at, points=points)


def kernel_closed(h: BishopHom, x: Any, family: Sequence[CertFn], budget: int = 64,
                  evidence: ClosureEvidence = None) -> TheoremResult:
    """
    值域分離點時 Ker(h) 是閉的：尋找 g 使 g(h(x)) > 0 且 g(0) = 0，以 g∘h 查詢證據

    family 是值域拓撲上的函數族。
    """
    target = h.target
    label = h.source.carrier.label(x)
    chain = WitnessChain(theorem="kernel-closed")
    blocked = _separation_precondition(target.topology, family, budget, chain)
    if blocked is not None:
        return TheoremResult(theorem=chain.theorem, verdict=blocked, point=label, chain=chain)
    found = _vanishing_separator(h(x), target.zero, family, budget)
    query_fn = pull_back(found, h.morphism) if found is not None and evidence is not None else None
    return _refutation(chain.theorem, chain, label, found, evidence, query_fn, budget)


# ---------------------------------------------------------------------------
# 正規子群
# ---------------------------------------------------------------------------


def normal_closure(H: SubgroupView, x: Any, ey: ClosureEvidence, chain: WitnessChain,
                   budget: int = 64) -> ClosureEvidence:
    """
    H 正規 ⇒ closure(H) 正規：y ∈ closure(H) 的證據以 f∘normal_x 查詢得 v ∈ H，
    回答 x + v - x ∈ H

    Raises:
        PreconditionUnmet: H 不是正規子群
    """
    group = H.group
    if not is_normal(H, budget):
        raise PreconditionUnmet(f"{H.name} 不是正規子群")
    conj = commutator_maps(group).normal(x)
    carrier = group.carrier

    def respond(f: CertFn, pos: Verdict) -> Any:
        v = ey.query(pull_back(f, conj), chain, budget)
        result = group.conj(x, v)
        chain.record(StepKind.COMPUTE, f"{carrier.label(x)} + {carrier.label(v)} - {carrier.label(x)} ∈ {H.name}",
                     point=carrier.label(result))
        return result

    return ClosureEvidence(group.conj(x, ey.point), H.subset, respond, f"{conj.name}({ey.name})")


def normalizer_subset(H: SubgroupView, budget: int = 64) -> Subset:
    """Normal_X(H) = {x | ∀v ∈ H, v + x - v ∈ H}"""
    group = H.group
    hs = H.subset.search_points(group.probes(), budget)

    def member_at(x: Any, budget_: int) -> Verdict:
        ok = all(H.contains(group.conj(v, x), budget_) for v in hs)
        return Verdict(kind=VerdictKind.MEMBER if ok else VerdictKind.NON_MEMBER,
                       point=group.carrier.label(x), exact=group.is_finite)

    points = tuple(x for x in group.elements() if member_at(x, budget).is_member) if group.is_finite else None
    return Subset(name=f"Normal({H.name})", carrier=group.carrier, member_at=member_at, points=points)


def normalizer_closed(H: SubgroupView, budget: int = 64) -> ClosedSet:
    """
    H 閉 ⇒ Normal_X(H) 閉

    對每個 v ∈ H：v + x - v ∈ closure(H) 的證據是以 f∘normal_v 查詢 x 的證據得到 u，
    回答 w = v + u - v ∈ H；再交給 H 的閉包截面。

    Raises:
        PreconditionUnmet: H 沒有閉包截面
    """
    if H.closed is None:
        raise PreconditionUnmet(f"{H.name} 必須是閉子群")
    group = H.group
    carrier = group.carrier
    target = normalizer_subset(H, budget)
    maps = commutator_maps(group)
    hs = H.subset.search_points(group.probes(), budget)

    def section(evidence: ClosureEvidence, chain: WitnessChain, budget_: int) -> Any:
        x = evidence.point
        for v in hs:
            conj = maps.normal(v)

            def respond(f: CertFn, pos: Verdict, conj=conj, v=v) -> Any:
                u = evidence.query(pull_back(f, conj), chain, budget)
                w = group.conj(v, u)
                chain.record(StepKind.COMPUTE, f"w = {carrier.label(v)} + {carrier.label(u)} - {carrier.label(v)}",
                             point=carrier.label(w))
                return w

            moved = ClosureEvidence(group.conj(v, x), H.subset, respond, f"{conj.name}({evidence.name})")
            produced = H.closed.closure_section(moved, chain, budget)
            chain.record(StepKind.MEMBERSHIP, f"{carrier.label(produced)} ∈ {H.name}",
                         point=carrier.label(produced), set_name=H.name,
                         member_obj=H.member_at, point_obj=produced)
        return x

    return ClosedSet(name=target.name, carrier=carrier, member_at=target.member_at, points=target.points,
                     closure_section=section)


def restricted_normal_mor(H: SubgroupView, x: Any) -> Morphism:
    """
    normal_x 限制在正規子群 H 上是 F|H 的態射；證書沿用 normal_x 的提升證書
    """
    group = H.group
    if H.points is None:
        raise ValueError("限制拓撲需要列舉的子群")
    if not is_normal(H):
        raise PreconditionUnmet(f"{H.name} 不是正規子群")
    sub = sub_carrier(group.carrier, H.name, H.points, member=lambda p: H.contains(p))
    restricted = restrict_topology(group.topology, sub)
    conj = commutator_maps(group).normal(x)
    return make_morphism(f"{conj.name}|{H.name}", conj.map, restricted, restricted, conj.require_certs())


# ---------------------------------------------------------------------------
# 閉子群與開子群的刻畫
# ---------------------------------------------------------------------------


def char_closed_subgroup(C: SubgroupView, O: OpenSet, c0: Any, oc_closed: ClosedSet,
                         family: Sequence[CertFn] = (), budget: int = 64) -> ClosedSet:
    """
    若 O ∩ C 有人居住（c₀）且在 O 中是閉的，則 C 是閉的

    演算法：g 為 c₀ 的開性見證。以 u ↦ g(u + (-x + c₀)) 查詢 x 的證據得 c ∈ C；
    z₀ = c - x + c₀ ∈ U(g) ⊆ O，其證據由閉包的子群運算組成；以 f ∧ g 查詢 z₀ 的證據
    得到 O ∩ C 中的點，交給 oc_closed 的截面；最後 x = c₀ - z₀ + c。

    Raises:
        PreconditionUnmet: c₀ 不在 O ∩ C 或沒有開性見證
    """
    group = C.group
    carrier = group.carrier
    if not (C.contains(c0, budget) and O.member_at(c0, budget).is_member):
        raise PreconditionUnmet(f"{carrier.label(c0)} 不在 O ∩ {C.name}")
    g = _witness_at(O, c0, budget, f"O 在 {carrier.label(c0)} 沒有開性見證").f
    closure_ops = subgroup_closure(C, family)

    def section(evidence: ClosureEvidence, chain: WitnessChain, budget_: int) -> Any:
        x = evidence.point
        shift = group.plus(group.neg(x), c0)
        c = evidence.query(translate_fn(group, g, shift, side="right"), chain, budget)
        z0 = group.plus(c, shift)
        z_label = carrier.label(z0)
        if not O.member_at(z0, budget).is_member:
            raise InclusionViolation(z_label, O.name)
        chain.record(StepKind.INCLUSION, f"{z_label} ∈ U({g.name}) ⊆ O", point=z_label,
                     member_obj=O.member_at, point_obj=z0)

        # z₀ = c + (-x) + c₀ ∈ closure(C)
        e_c = member_evidence(C.subset, c, c, f"e[{carrier.label(c)}]")
        e_c0 = member_evidence(C.subset, c0, c0, f"e[{carrier.label(c0)}]")
        e_negx = closure_ops.neg_evidence(evidence, chain, budget)
        e_z0 = closure_ops.plus_evidence(closure_ops.plus_evidence(e_c, e_negx, chain, budget), e_c0, chain, budget)

        def respond(f: CertFn, pos: Verdict) -> Any:
            w = e_z0.query(f.minimum(g), chain, budget)
            if not O.member_at(w, budget).is_member:
                raise InclusionViolation(carrier.label(w), O.name)
            return w

        into_oc = ClosureEvidence(z0, oc_closed, respond, f"{e_z0.name}∧{g.name}")
        z_back = oc_closed.closure_section(into_oc, chain, budget)
        result = group.plus(group.plus(c0, group.neg(z_back)), c)
        chain.record(StepKind.COMPUTE, f"{carrier.label(c0)} - {carrier.label(z_back)} + {carrier.label(c)} "
                     f"= {carrier.label(result)}", point=carrier.label(result))
        return result

    return ClosedSet(name=C.name, carrier=carrier, member_at=C.subset.member_at, points=C.points,
                     closure_section=section)


def char_open_subgroup(C: SubgroupView, O: OpenSet, c0: Any, budget: int = 64,
                       sample: Sequence[Any] = None) -> OpenSet:
    """
    若有人居住的開集 O ⊆ C，則 C 是開的；c 的見證為 u ↦ g(u + (-c + c₀))

    Raises:
        PreconditionUnmet: c₀ 沒有開性見證
        InclusionViolation: 見證的 U(f) 在探針上超出 C
    """
    group = C.group
    carrier = group.carrier
    g = _witness_at(O, c0, budget, f"O 在 {carrier.label(c0)} 沒有開性見證").f
    sample = sample if sample is not None else (group.elements() if group.is_finite else group.probes())
    for y in sample:
        if O.member_at(y, budget).is_member and not C.contains(y, budget):
            raise InclusionViolation(carrier.label(y), C.name)

    def witness(c: Any, budget_: int) -> Optional[OpenWitness]:
        if not C.contains(c, budget):
            return None
        f = translate_fn(group, g, group.plus(group.neg(c), c0), side="right")
        pos = positive_at(f.fn, c, budget, carrier)
        inclusion = check_inclusion(f, C.subset, sample, budget)
        if not inclusion.accepted:
            raise InclusionViolation(inclusion.point, C.name)
        return OpenWitness(f=f, positivity=pos, inclusion=inclusion)

    return OpenSet(name=C.name, carrier=carrier, member_at=C.subset.member_at, points=C.points, witness=witness)


class ClopenReport(BaseModel):
    """clopen 推論的報告"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    theorem: str
    subset: str
    complement: Optional[str] = None
    witnesses: Dict[str, str] = Field(default_factory=dict)
    open: bool = False
    closed: bool = False
    equality: Optional[Verdict] = None
    results: List[TheoremResult] = Field(default_factory=list)

    @property
    def clopen(self) -> bool:
        return self.open and self.closed

    def to_json(self) -> Dict[str, Any]:
        return {
            "theorem": self.theorem,
            "subset": self.subset,
            "complement": self.complement,
            "witnesses": dict(sorted(self.witnesses.items())),
            "open": self.open,
            "closed": self.closed,
            "clopen": self.clopen,
            "equality": self.equality.to_json() if self.equality else None,
            "results": [r.to_json() for r in self.results],
        }


def _closed_report(report: ClopenReport, D: SubgroupView, openness: OpenSet, family: Sequence[CertFn],
                   budget: int) -> ClopenReport:
    group = D.group
    carrier = group.carrier
    members = D.subset.search_points(group.probes(), budget)
    for d in members:
        w = openness.witness(d, budget)
        if w is not None:
            report.witnesses[carrier.label(d)] = w.f.name
    report.open = len(report.witnesses) == len(members)
    closed = open_subgroup_closed(D, openness, budget)
    for d in members:
        report.results.append(closed.close(member_evidence(D.subset, d, d), budget, report.theorem))
    universe = group.elements() if group.is_finite else group.probes()
    outside = [y for y in universe if not D.contains(y, budget)]
    report.closed = all(r.verdict.is_member for r in report.results) and all(
        closure_probe(D.subset, y, family, budget).kind == VerdictKind.EXCLUDED_BY for y in outside)
    return report


def clopen_complement(group: BishopGroup, C: Subset, complement: SubgroupView, d0: Any,
                      family: Sequence[CertFn], budget: int = 64) -> ClopenReport:
    """
    C 閉且 X∖C 是子群、X∖F C 有人居住 ⇒ X∖F C = X∖C 是 clopen

    依序：F-補集、開子群刻畫、開子群是閉的。

    Raises:
        PreconditionUnmet: C 為空，或 d₀ 不在 X∖F C
    """
    carrier = group.carrier
    members = C.search_points(group.probes(), budget)
    if not members:
        raise PreconditionUnmet("C 必須有人居住")
    complement_open = f_complement(C, family, budget)
    if not complement_open.member_at(d0, budget).is_member:
        raise PreconditionUnmet(f"{carrier.label(d0)} 不在 X∖F {C.name}（F-補集無人居住）")
    report = ClopenReport(theorem="clopen-complement", subset=C.name, complement=complement.name)
    universe = group.elements() if group.is_finite else group.probes()
    for y in universe:
        if complement_open.member_at(y, budget).is_member != complement.contains(y, budget):
            report.equality = Verdict(kind=VerdictKind.REJECTED, point=carrier.label(y),
                                      detail="X∖F C 與集合補集不同")
            return report
    report.equality = Verdict(kind=VerdictKind.ACCEPTED, probes_used=len(universe), exact=group.is_finite)
    openness = char_open_subgroup(complement, complement_open, d0, budget)
    return _closed_report(report, complement, openness, family, budget)


def clopen_subgroup(C: SubgroupView, O: OpenSet, c0: Any, family: Sequence[CertFn],
                    budget: int = 64) -> ClopenReport:
    """子群含有人居住的開集 ⇒ 子群是 clopen"""
    report = ClopenReport(theorem="clopen-subgroup", subset=C.name)
    openness = char_open_subgroup(C, O, c0, budget)
    return _closed_report(report, C, openness, family, budget)

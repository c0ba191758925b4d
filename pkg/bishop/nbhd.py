"""鄰域結構模組 - U(f)、開集、閉集、閉包證據與 F-補集"""
from typing import Any, Callable, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field

from bishop.errors import EvidenceFailure, PreconditionUnmet
from bishop.exactreal import ZERO, Dyadic, certify_positive, certify_zero
from bishop.morphism import Morphism, projection, pull_back
from bishop.space import Carrier, CertFn, Topology, positive_at
from bishop.types import StepKind, TheoremResult, Verdict, VerdictKind, WitnessChain

MemberFn = Callable[[Any, int], Verdict]


# ---------------------------------------------------------------------------
# 子集
# ---------------------------------------------------------------------------


class Subset(BaseModel):
    """
    帶有三值成員判定的子集

    points 在集合已知為有限時列出全部成員（有限載體上即為精確的集合）。
    """
    model_config = ConfigDict(arbitrary_types_allowed=True)

    name: str
    carrier: Carrier
    member_at: MemberFn
    points: Optional[Tuple[Any, ...]] = None

    @property
    def is_enumerated(self) -> bool:
        return self.points is not None

    def contains(self, x: Any, budget: int = 64) -> bool:
        return self.member_at(x, budget).is_member

    def search_points(self, sample: Sequence[Any] = None, budget: int = 64) -> List[Any]:
        """搜尋見證用的成員：已列舉就用全部，否則從樣本中篩選"""
        if self.points is not None:
            return list(self.points)
        sample = sample if sample is not None else self.carrier.sample(32)
        return [p for p in sample if self.member_at(p, budget).is_member]

    def label(self) -> str:
        if self.points is None:
            return self.name
        return "{" + ", ".join(self.carrier.label(p) for p in self.points) + "}"


def _member(kind: VerdictKind, **fields) -> Verdict:
    return Verdict(kind=kind, **fields)


def finite_subset(carrier: Carrier, points: Sequence[Any], name: str = None) -> Subset:
    """列舉的子集；ℝ 上以 eq_at 判定成員關係"""
    points = tuple(carrier.normalize(p) for p in points)

    if carrier.is_finite:
        members = set(points)

        def member_at(x: Any, budget: int) -> Verdict:
            kind = VerdictKind.MEMBER if x in members else VerdictKind.NON_MEMBER
            return _member(kind, point=carrier.label(x))
    else:
        def member_at(x: Any, budget: int) -> Verdict:
            unknown = False
            for p in points:
                eq = carrier.eq_at(x, p, budget)
                if eq.kind == VerdictKind.EQUAL:
                    return _member(VerdictKind.MEMBER, point=carrier.label(x), exact=eq.exact)
                if eq.kind != VerdictKind.APART:
                    unknown = True
            kind = VerdictKind.UNKNOWN if unknown else VerdictKind.NON_MEMBER
            return _member(kind, point=carrier.label(x))

    subset = Subset(name=name or "", carrier=carrier, member_at=member_at, points=points)
    if not name:
        subset.name = subset.label()
    return subset


def predicate_subset(carrier: Carrier, name: str, member_at: MemberFn) -> Subset:
    return Subset(name=name, carrier=carrier, member_at=member_at,
                  points=tuple(x for x in carrier.elements() if member_at(x, 64).is_member)
                  if carrier.is_finite else None)


# ---------------------------------------------------------------------------
# 閉包證據
# ---------------------------------------------------------------------------


Responder = Callable[[CertFn, Verdict], Any]


class ClosureEvidence:
    """
    x ∈ C̄ 的計算內容：對每個在 x 為正的 f，回應者給出 c ∈ C 使 f(c) > 0

    每次查詢都會驗證：f(x) > 0、回應點屬於 C、f(c) > 0；
    不成立時拋出 EvidenceFailure，不會信任回應者。
    """

    def __init__(self, point: Any, target: Subset, responder: Responder, name: str = "evidence"):
        self.point = point
        self.target = target
        self.responder = responder
        self.name = name
        self.queries = 0

    def query(self, f: CertFn, chain: WitnessChain, budget: int) -> Any:
        carrier = self.target.carrier
        x_label = carrier.label(self.point)
        at_x = positive_at(f.fn, self.point, budget, carrier)
        if not at_x.is_positive:
            raise EvidenceFailure(f"查詢函數 {f.name} 在 x 的值無法證明為正", x_label)
        chain.record(StepKind.POSITIVITY, f"{f.name}({x_label}) > 0", point=x_label, fn=f.name,
                     bound=at_x.bound, fn_obj=f.fn, point_obj=self.point)

        self.queries += 1
        answer = self.responder(f, at_x)
        if answer is None or not carrier.contains(answer):
            raise EvidenceFailure(f"回應者對 {f.name} 沒有回傳載體中的點", x_label)
        answer = carrier.normalize(answer)
        c_label = carrier.label(answer)
        chain.record(StepKind.QUERY, f"{self.name} 以 {f.name} 查詢，得到 {c_label}",
                     point=c_label, fn=f.name, set_name=self.target.name)

        membership = self.target.member_at(answer, budget)
        if not membership.is_member:
            raise EvidenceFailure(f"回應點 {c_label} 不在 {self.target.name} 中", x_label)
        chain.record(StepKind.MEMBERSHIP, f"{c_label} ∈ {self.target.name}", point=c_label,
                     set_name=self.target.name, member_obj=self.target.member_at, point_obj=answer)

        at_c = positive_at(f.fn, answer, budget, carrier)
        if not at_c.is_positive:
            raise EvidenceFailure(f"{f.name}({c_label}) 無法證明為正", x_label)
        chain.record(StepKind.POSITIVITY, f"{f.name}({c_label}) > 0", point=c_label, fn=f.name,
                     bound=at_c.bound, fn_obj=f.fn, point_obj=answer)
        return answer


def member_evidence(target: Subset, point: Any, member: Any, name: str = None) -> ClosureEvidence:
    """永遠回答同一個成員 member 的回應者"""
    return ClosureEvidence(point, target, lambda f, pos: member,
                           name or f"answer[{target.carrier.label(member)}]")


# ---------------------------------------------------------------------------
# 開集與閉集
# ---------------------------------------------------------------------------


class OpenWitness(BaseModel):
    """x ∈ O 的見證：f(x) > 0 且 U(f) ⊆ O"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    f: CertFn
    positivity: Verdict
    inclusion: Verdict


class OpenSet(Subset):
    witness: Callable[[Any, int], Optional[OpenWitness]]

    def inclusion_on(self, f: CertFn, sample: Sequence[Any], budget: int = 64) -> Verdict:
        """在探針上驗證 U(f) ⊆ O"""
        return check_inclusion(f, self, sample, budget)


SectionFn = Callable[[ClosureEvidence, WitnessChain, int], Any]


class ClosedSet(Subset):
    """
    閉集：成員判定加上閉包截面

    閉包截面消耗 x 的閉包證據，回傳由回應點經運算得到的點，
    該點必須等於 x 且屬於集合。
    """
    closure_section: SectionFn

    def close(self, evidence: ClosureEvidence, budget: int = 64, theorem: str = None) -> TheoremResult:
        """
        執行閉包截面並驗證結果

        Raises:
            EvidenceFailure: 回應者給出無效的回答
        """
        chain = WitnessChain(theorem=theorem or f"closed:{self.name}")
        carrier = self.carrier
        x = evidence.point
        produced = self.closure_section(evidence, chain, budget)
        label = carrier.label(produced)
        same = carrier.eq_at(produced, x, budget)
        chain.record(StepKind.COMPUTE, f"{label} = {carrier.label(x)}", point=label,
                     check=lambda: carrier.same(produced, x, budget))
        membership = self.member_at(produced, budget)
        chain.record(StepKind.MEMBERSHIP, f"{label} ∈ {self.name}", point=label,
                     set_name=self.name, member_obj=self.member_at, point_obj=produced)
        if same.kind == VerdictKind.EQUAL and membership.is_member:
            result = Verdict(kind=VerdictKind.MEMBER, point=label, exact=same.exact and membership.exact,
                             probes_used=evidence.queries)
        else:
            result = Verdict(kind=VerdictKind.REJECTED, point=label,
                             detail=f"截面結果 {label} 不是 {self.name} 中等於 x 的點")
        return TheoremResult(theorem=chain.theorem, verdict=result, point=carrier.label(x), chain=chain)


def check_inclusion(f: CertFn, target: Subset, sample: Sequence[Any], budget: int = 64) -> Verdict:
    """探針上 U(f) ⊆ target：每個 f 為正的探針都要是成員"""
    carrier = target.carrier
    for y in sample:
        if positive_at(f.fn, y, budget, carrier).is_positive and not target.member_at(y, budget).is_member:
            return Verdict(kind=VerdictKind.REJECTED, point=carrier.label(y), witness_fn=f.name,
                           detail=f"U({f.name}) ⊄ {target.name}")
    return Verdict(kind=VerdictKind.ACCEPTED, witness_fn=f.name, probes_used=len(sample),
                   exact=carrier.is_finite)


def u_set(f: CertFn) -> OpenSet:
    """U(f) = {x | f(x) > 0}"""
    carrier = f.topology.carrier

    def member_at(x: Any, budget: int) -> Verdict:
        pos = positive_at(f.fn, x, budget, carrier)
        kind = {VerdictKind.POSITIVE: VerdictKind.MEMBER,
                VerdictKind.NON_POSITIVE: VerdictKind.NON_MEMBER}.get(pos.kind, VerdictKind.UNKNOWN)
        return pos.model_copy(update={"kind": kind})

    def witness(x: Any, budget: int) -> Optional[OpenWitness]:
        pos = positive_at(f.fn, x, budget, carrier)
        if not pos.is_positive:
            return None
        inclusion = Verdict(kind=VerdictKind.ACCEPTED, witness_fn=f.name, detail=f"U({f.name}) ⊆ U({f.name})")
        return OpenWitness(f=f, positivity=pos, inclusion=inclusion)

    points = None
    if carrier.is_finite:
        points = tuple(x for x in carrier.elements() if member_at(x, 64).is_member)
    return OpenSet(name=f"U({f.name})", carrier=carrier, member_at=member_at, points=points, witness=witness)


def _refuting_section(predicate: Callable[[Any, int], Optional[CertFn]]) -> SectionFn:
    """
    predicate(x) 回傳一個在 x 為正、但在集合上處處不為正的函數時，
    以它查詢證據必然失敗；否則 x 本身即為成員
    """
    def section(evidence: ClosureEvidence, chain: WitnessChain, budget: int) -> Any:
        excluder = predicate(evidence.point, budget)
        if excluder is not None:
            evidence.query(excluder, chain, budget)
            raise EvidenceFailure(f"{excluder.name} 在集合上不可能為正", str(evidence.point))
        return evidence.point
    return section


def zero_set(f: CertFn) -> ClosedSet:
    """ζ(f) = {x | f(x) = 0}"""
    carrier = f.topology.carrier
    magnitude = abs(f)

    def member_at(x: Any, budget: int) -> Verdict:
        zero = certify_zero(f(x), budget)
        kind = VerdictKind.MEMBER if zero.kind == VerdictKind.EQUAL else VerdictKind.NON_MEMBER
        return zero.model_copy(update={"kind": kind, "point": carrier.label(x), "witness_fn": f.name})

    def excluder(x: Any, budget: int) -> Optional[CertFn]:
        return magnitude if certify_zero(f(x), budget).kind == VerdictKind.APART else None

    points = None
    if carrier.is_finite:
        points = tuple(x for x in carrier.elements() if member_at(x, 64).is_member)
    return ClosedSet(name=f"ζ({f.name})", carrier=carrier, member_at=member_at, points=points,
                     closure_section=_refuting_section(excluder))


def complement_of_u(f: CertFn) -> ClosedSet:
    """X ∖ U(f) = {x | f(x) ≤ 0}"""
    carrier = f.topology.carrier

    def member_at(x: Any, budget: int) -> Verdict:
        pos = positive_at(f.fn, x, budget, carrier)
        kind = {VerdictKind.POSITIVE: VerdictKind.NON_MEMBER,
                VerdictKind.NON_POSITIVE: VerdictKind.MEMBER}.get(pos.kind, VerdictKind.UNKNOWN)
        return pos.model_copy(update={"kind": kind})

    def excluder(x: Any, budget: int) -> Optional[CertFn]:
        return f if positive_at(f.fn, x, budget, carrier).is_positive else None

    points = None
    if carrier.is_finite:
        points = tuple(x for x in carrier.elements() if member_at(x, 64).is_member)
    return ClosedSet(name=f"X∖U({f.name})", carrier=carrier, member_at=member_at, points=points,
                     closure_section=_refuting_section(excluder))


# ---------------------------------------------------------------------------
# 閉包探測
# ---------------------------------------------------------------------------


def _nonnegative_on(f: CertFn, sample: Sequence[Any], budget: int) -> bool:
    return all(certify_positive(-f(y), budget).kind == VerdictKind.NON_POSITIVE
               or f(y).exact == ZERO for y in sample)


def closure_probe(target: Subset, x: Any, probe_fns: Sequence[CertFn], budget: int = 64,
                  sample: Sequence[Any] = None) -> Verdict:
    """
    以有限函數族探測 x 是否在 target 的閉包中

    Args:
        target: 集合 C
        x: 被探測的點
        probe_fns: 已驗證的函數族
        budget: 正值判定步數
        sample: 無限載體上搜尋成員與偏好排序用的樣本

    Returns:
        Verdict: ExcludedBy(f)、InClosureSoFar 或 Unknown
    """
    carrier = target.carrier
    sample = sample if sample is not None else carrier.sample(32)
    members = target.search_points(sample, budget)
    x_label = carrier.label(x)
    excluders: List[Tuple[CertFn, Verdict]] = []
    unknown = None
    for f in probe_fns:
        at_x = positive_at(f.fn, x, budget, carrier)
        if not at_x.is_positive:
            if at_x.kind == VerdictKind.UNKNOWN and unknown is None:
                unknown = f.name
            continue
        signs = [certify_positive(f(c), budget).kind for c in members]
        if VerdictKind.POSITIVE in signs:
            continue
        if VerdictKind.UNKNOWN in signs:
            unknown = unknown or f.name
            continue
        excluders.append((f, at_x))

    if excluders:
        preferred = [item for item in excluders if _nonnegative_on(item[0], sample, budget)]
        f, at_x = (preferred or excluders)[0]
        return Verdict(kind=VerdictKind.EXCLUDED_BY, witness_fn=f.name, bound=at_x.bound,
                       point=x_label, probes_used=len(probe_fns), exact=target.is_enumerated)
    if unknown is not None:
        return Verdict(kind=VerdictKind.UNKNOWN, witness_fn=unknown, point=x_label,
                       probes_used=len(probe_fns))
    return Verdict(kind=VerdictKind.IN_CLOSURE, point=x_label, probes_used=len(probe_fns), exact=False)


# ---------------------------------------------------------------------------
# 逆像、F-補集與分離
# ---------------------------------------------------------------------------


def preimage_closed(h: Morphism, closed: ClosedSet) -> ClosedSet:
    """h⁻¹(D)：證據經 g ↦ g∘h 傳到 h(x)"""
    dom = h.dom.carrier

    def member_at(x: Any, budget: int) -> Verdict:
        return closed.member_at(h(x), budget).model_copy(update={"point": dom.label(x)})

    def section(evidence: ClosureEvidence, chain: WitnessChain, budget: int) -> Any:
        def respond(g: CertFn, pos: Verdict) -> Any:
            return h(evidence.query(pull_back(g, h), chain, budget))

        image = ClosureEvidence(h(evidence.point), closed, respond, f"{evidence.name}∘{h.name}")
        produced = closed.closure_section(image, chain, budget)
        target = h(evidence.point)
        chain.record(StepKind.COMPUTE, f"{closed.carrier.label(produced)} = {h.name}(x)",
                     point=closed.carrier.label(produced),
                     check=lambda: closed.carrier.same(produced, target, budget))
        return evidence.point

    points = None
    if dom.is_finite:
        points = tuple(x for x in dom.elements() if member_at(x, 64).is_member)
    return ClosedSet(name=f"{h.name}⁻¹({closed.name})", carrier=dom, member_at=member_at,
                     points=points, closure_section=section)


def vanishes_on(f: CertFn, members: Sequence[Any], budget: int) -> bool:
    return all(certify_zero(f(c), budget).kind == VerdictKind.EQUAL for c in members)


def f_complement(target: Subset, family: Sequence[CertFn], budget: int = 64,
                 sample: Sequence[Any] = None, exact_family: bool = False) -> OpenSet:
    """
    X ∖_F C：存在 f 使 f(x) > 0 且 f 在 C 上為零

    見證為 f ∨ 0；exact_family=False 時否定判定只相對於函數族。
    """
    carrier = target.carrier
    sample = sample if sample is not None else carrier.sample(32)
    members = target.search_points(sample, budget)
    exact = target.is_enumerated

    def find(x: Any) -> Optional[Tuple[CertFn, Verdict]]:
        # 與 closure_probe 相同，優先取在樣本上非負的見證
        first = None
        for f in family:
            at_x = positive_at(f.fn, x, budget, carrier)
            if at_x.is_positive and vanishes_on(f, members, budget):
                if _nonnegative_on(f, sample, budget):
                    return f, at_x
                first = first or (f, at_x)
        return first

    def member_at(x: Any, budget_: int) -> Verdict:
        found = find(x)
        if found is not None:
            return Verdict(kind=VerdictKind.MEMBER, witness_fn=found[0].name, bound=found[1].bound,
                           point=carrier.label(x), exact=exact)
        return Verdict(kind=VerdictKind.NON_MEMBER, point=carrier.label(x), exact=exact_family,
                       detail=None if exact_family else "相對於函數族")

    def witness(x: Any, budget_: int) -> Optional[OpenWitness]:
        found = find(x)
        if found is None:
            return None
        g = found[0].positive_part()
        pos = positive_at(g.fn, x, budget, carrier)
        # U(g) 中的每一點都以 g 自己為見證
        zero_on_c = vanishes_on(g, members, budget)
        inclusion = Verdict(kind=VerdictKind.ACCEPTED if zero_on_c else VerdictKind.REJECTED,
                            witness_fn=g.name, exact=exact,
                            detail=f"{g.name} 在 {target.name} 上為零")
        return OpenWitness(f=g, positivity=pos, inclusion=inclusion)

    points = None
    if carrier.is_finite:
        points = tuple(x for x in carrier.elements() if find(x) is not None)
    return OpenSet(name=f"X∖F {target.name}", carrier=carrier, member_at=member_at,
                   points=points, witness=witness)


class ApartnessWitness(BaseModel):
    """x ≠_F y 的見證：|f(x) - f(y)| > gap"""
    fn: str
    x: str
    y: str
    gap: Any = None

    def to_json(self):
        return {"fn": self.fn, "x": self.x, "y": self.y,
                "gap": self.gap.to_json() if isinstance(self.gap, Dyadic) else self.gap}


def separate(x: Any, y: Any, family: Sequence[CertFn], carrier: Carrier,
             budget: int = 64) -> Optional[ApartnessWitness]:
    for f in family:
        apart = certify_zero(f(x) - f(y), budget)
        if apart.kind == VerdictKind.APART:
            return ApartnessWitness(fn=f.name, x=carrier.label(x), y=carrier.label(y), gap=apart.bound)
    return None


def separating_check(topology: Topology, pairs: Sequence[Tuple[Any, Any]], family: Sequence[CertFn],
                     budget: int = 64) -> List[Verdict]:
    """每一對點：Separated（附見證）或 NotSeparated（相對於函數族）"""
    carrier = topology.carrier
    verdicts = []
    for x, y in pairs:
        witness = separate(x, y, family, carrier, budget)
        label = f"({carrier.label(x)}, {carrier.label(y)})"
        if witness is not None:
            verdicts.append(Verdict(kind=VerdictKind.SEPARATED, witness_fn=witness.fn, bound=witness.gap,
                                    point=label, probes_used=len(family)))
        else:
            verdicts.append(Verdict(kind=VerdictKind.NOT_SEPARATED, point=label, exact=False,
                                    probes_used=len(family)))
    return verdicts


class TightnessReport(BaseModel):
    """三個等價條件的交叉檢查"""
    topology: str
    separating: bool
    tight: bool
    singletons_closed: bool
    unseparated: List[str] = Field(default_factory=list)

    @property
    def consistent(self) -> bool:
        return self.separating == self.tight == self.singletons_closed


def tightness_suite(topology: Topology, family: Sequence[CertFn], budget: int = 64) -> TightnessReport:
    """
    有限載體上比較：F 分離點、≠_F 是緊的、每個單點集都是閉集
    """
    carrier = topology.carrier
    points = carrier.elements()
    pairs = [(x, y) for i, x in enumerate(points) for y in points[i + 1:]]
    verdicts = separating_check(topology, pairs, family, budget)
    unseparated = [v.point for v in verdicts if v.kind != VerdictKind.SEPARATED]
    separating = not unseparated
    # ¬(x ≠_F y) ⇒ x = y
    tight = all(carrier.same(x, y) for (x, y), v in zip(pairs, verdicts) if v.kind != VerdictKind.SEPARATED)
    singletons_closed = True
    for x in points:
        single = finite_subset(carrier, [x])
        for y in points:
            if y != x and closure_probe(single, y, family, budget).kind != VerdictKind.EXCLUDED_BY:
                singletons_closed = False
    return TightnessReport(topology=topology.name, separating=separating, tight=tight,
                           singletons_closed=singletons_closed, unseparated=unseparated)


# ---------------------------------------------------------------------------
# 閉集的建構
# ---------------------------------------------------------------------------


def product_closed(left: ClosedSet, right: ClosedSet, product: Topology) -> ClosedSet:
    """C × D：證據分別以 f∘π₁ 與 g∘π₂ 特化"""
    carrier = product.carrier
    proj = (projection(product, 0), projection(product, 1))
    parts = (left, right)

    def member_at(p: Any, budget: int) -> Verdict:
        a, b = left.member_at(p[0], budget), right.member_at(p[1], budget)
        if a.is_member and b.is_member:
            kind = VerdictKind.MEMBER
        elif a.kind == VerdictKind.NON_MEMBER or b.kind == VerdictKind.NON_MEMBER:
            kind = VerdictKind.NON_MEMBER
        else:
            kind = VerdictKind.UNKNOWN
        return Verdict(kind=kind, point=carrier.label(p), exact=a.exact and b.exact)

    def section(evidence: ClosureEvidence, chain: WitnessChain, budget: int) -> Any:
        produced = []
        for slot in (0, 1):
            def respond(f: CertFn, pos: Verdict, slot=slot) -> Any:
                return evidence.query(pull_back(f, proj[slot]), chain, budget)[slot]

            component = ClosureEvidence(evidence.point[slot], parts[slot], respond,
                                        f"{evidence.name}∘π{slot + 1}")
            produced.append(parts[slot].closure_section(component, chain, budget))
        return tuple(produced)

    points = None
    if left.points is not None and right.points is not None:
        points = tuple((a, b) for a in left.points for b in right.points)
    return ClosedSet(name=f"{left.name}×{right.name}", carrier=carrier, member_at=member_at,
                     points=points, closure_section=section)


def intersect_closed(left: ClosedSet, right: ClosedSet) -> ClosedSet:
    """閉集的交集仍是閉集：同一份證據依序餵給兩個截面"""
    carrier = left.carrier

    def member_at(x: Any, budget: int) -> Verdict:
        a = left.member_at(x, budget)
        if not a.is_member:
            return a
        return right.member_at(x, budget)

    def section(evidence: ClosureEvidence, chain: WitnessChain, budget: int) -> Any:
        point = evidence.point
        for part in (left, right):
            narrowed = ClosureEvidence(point, part, lambda f, pos: evidence.query(f, chain, budget),
                                       f"{evidence.name}|{part.name}")
            point = part.closure_section(narrowed, chain, budget)
        return point

    points = None
    if left.points is not None:
        points = tuple(x for x in left.points if right.member_at(x, 64).is_member)
    return ClosedSet(name=f"{left.name}∩{right.name}", carrier=carrier, member_at=member_at,
                     points=points, closure_section=section)


def image_subset(h: Morphism, source: Subset) -> Subset:
    """有限集合的像 h(A)"""
    if source.points is None:
        raise ValueError("只能對列舉的集合取像")
    return finite_subset(h.cod.carrier, [h(a) for a in source.points], f"{h.name}({source.name})")


def image_evidence(h: Morphism, evidence: ClosureEvidence, chain: WitnessChain, budget: int = 64) -> ClosureEvidence:
    """h(Ā) ⊆ closure(h(A))：以 g∘h 查詢原證據再映射回答，原查詢記入 chain"""
    image = image_subset(h, evidence.target)

    def respond(g: CertFn, pos: Verdict) -> Any:
        return h(evidence.query(pull_back(g, h), chain, budget))

    return ClosureEvidence(h(evidence.point), image, respond, f"{h.name}({evidence.name})")


def image_closure_check(h: Morphism, source: Subset, x: Any, evidence: ClosureEvidence,
                        family: Sequence[CertFn], budget: int = 64) -> Verdict:
    """以函數族驗證 h(x) 在 h(A) 的閉包中：每個查詢都得到有效回答"""
    chain = WitnessChain(theorem="image-closure")
    moved = image_evidence(h, evidence, chain, budget)
    for g in family:
        if positive_at(g.fn, moved.point, budget).is_positive:
            moved.query(g, chain, budget)
    return Verdict(kind=VerdictKind.IN_CLOSURE, point=h.cod.carrier.label(moved.point),
                   probes_used=moved.queries, exact=False)


def neighborhood_preimage(h: Morphism, g: CertFn, sample: Sequence[Any] = None,
                          budget: int = 64) -> Verdict:
    """h⁻¹(U(g)) = U(g∘h)，在探針上比較成員關係"""
    pulled = u_set(pull_back(g, h))
    original = u_set(g)
    carrier = h.dom.carrier
    sample = sample if sample is not None else carrier.sample(32)
    for x in sample:
        if pulled.member_at(x, budget).kind != original.member_at(h(x), budget).kind:
            return Verdict(kind=VerdictKind.REJECTED, point=carrier.label(x),
                           detail=f"U({g.name}∘{h.name}) 與 {h.name}⁻¹(U({g.name})) 不一致")
    return Verdict(kind=VerdictKind.ACCEPTED, witness_fn=f"{g.name}∘{h.name}", probes_used=len(sample),
                   exact=carrier.is_finite)


def open_from_finite(target: Subset, family: Sequence[CertFn], budget: int = 64) -> OpenSet:
    """有限載體上的開集結構：每個成員找 f 使 f(x) > 0 且 U(f) ⊆ O（窮舉驗證）"""
    carrier = target.carrier
    universe = carrier.elements()

    def witness(x: Any, budget_: int) -> Optional[OpenWitness]:
        if not target.member_at(x, budget).is_member:
            return None
        for f in family:
            pos = positive_at(f.fn, x, budget, carrier)
            if not pos.is_positive:
                continue
            inclusion = check_inclusion(f, target, universe, budget)
            if inclusion.accepted:
                return OpenWitness(f=f, positivity=pos, inclusion=inclusion)
        return None

    return OpenSet(name=target.name, carrier=carrier, member_at=target.member_at,
                   points=target.points, witness=witness)


def is_open(open_set: OpenSet, budget: int = 64) -> bool:
    """有限載體上每個成員都有開性見證"""
    return all(open_set.witness(x, budget) is not None for x in open_set.search_points())


def closed_from_finite(target: Subset, family: Sequence[CertFn], budget: int = 64) -> ClosedSet:
    """
    有限載體上的閉集結構：不在 C 中的 x 以排除函數查詢證據，回答必然無效

    Raises（截面執行時）:
        PreconditionUnmet: x 不在 C 中卻沒有排除函數，C 不是閉集
    """
    carrier = target.carrier

    def section(evidence: ClosureEvidence, chain: WitnessChain, budget_: int) -> Any:
        x = evidence.point
        if target.member_at(x, budget).is_member:
            chain.record(StepKind.HYPOTHESIS, f"{carrier.label(x)} ∈ {target.name}",
                         point=carrier.label(x))
            return x
        probe = closure_probe(target, x, family, budget)
        if probe.kind != VerdictKind.EXCLUDED_BY:
            raise PreconditionUnmet(f"{target.name} 不是閉集：{carrier.label(x)} 在閉包中")
        excluder = next(f for f in family if f.name == probe.witness_fn)
        evidence.query(excluder, chain, budget)
        raise EvidenceFailure(f"{excluder.name} 在 {target.name} 上不為正", carrier.label(x))

    return ClosedSet(name=target.name, carrier=carrier, member_at=target.member_at,
                     points=target.points, closure_section=section)


def interval_open_check(a: Any, b: Any, topology: Topology, sample: Sequence[Any] = None,
                        budget: int = 64) -> Verdict:
    """(a, b) 與 U(min(id - a, b - id)) 在探針上一致"""
    a, b = Dyadic.of(a), Dyadic.of(b)
    ident = topology.leaf(0)
    f = ident.shift(-a).minimum((-ident).shift(b))
    opened = u_set(f)
    carrier = topology.carrier
    sample = sample if sample is not None else carrier.sample(64, radius=max(abs(a), abs(b)).ceil_int() + 1)
    for x in sample:
        inside = certify_positive(x - a, budget).is_positive and certify_positive(-(x - b), budget).is_positive
        if opened.member_at(x, budget).is_member != inside:
            return Verdict(kind=VerdictKind.REJECTED, point=carrier.label(x), witness_fn=f.name)
    return Verdict(kind=VerdictKind.ACCEPTED, witness_fn=f.name, probes_used=len(sample), exact=False)

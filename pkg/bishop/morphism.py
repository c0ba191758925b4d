"""Bishop 態射模組 - ⋁ 提升檢查、乘積、截面與同構"""
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field

from bishop.errors import MissingCert, MorphismMismatch
from bishop.exactreal import Dyadic
from bishop.space import (
    CertFn, FromSubbase, PointFn, TopCert, Topology, TopologyKind,
    check_cert, const_cert, product_carrier, substitute, uniform_close,
)
from bishop.types import Verdict, VerdictKind


class Morphism(BaseModel):
    """
    h: X → Y 連同值域子基底每個成員 g₀ 的 g₀ ∘ h ∈ F 證書

    lift_certs[i] 對應 cod.subbase[i]；None 表示缺少證書。
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    name: str
    map: Callable[[Any], Any]
    dom: Topology
    cod: Topology
    lift_certs: Tuple[Optional[TopCert], ...]

    def __call__(self, x: Any) -> Any:
        return self.map(x)

    def lifted_fn(self, index: int) -> PointFn:
        """g₀ ∘ h"""
        g = self.cod.subbase[index]
        return g.precompose(self.map, f"{g.name}∘{self.name}")

    def require_certs(self) -> List[TopCert]:
        for index, cert in enumerate(self.lift_certs):
            if cert is None:
                raise MissingCert(self.cod.subbase_name(index), self.name)
        if len(self.lift_certs) != len(self.cod.subbase):
            raise MissingCert(self.cod.subbase_name(len(self.lift_certs)), self.name)
        return list(self.lift_certs)

    def to_json(self, depth: int = 3) -> Dict[str, Any]:
        return {
            "map": self.name,
            "dom": self.dom.name,
            "cod": self.cod.name,
            "certs": [cert.to_tree(depth) if cert is not None else None for cert in self.lift_certs],
        }


def make_morphism(name: str, fn: Callable[[Any], Any], dom: Topology, cod: Topology,
                  certs: Sequence[Optional[TopCert]]) -> Morphism:
    return Morphism(name=name, map=fn, dom=dom, cod=cod, lift_certs=tuple(certs))


def same_topology(left: Topology, right: Topology) -> bool:
    return left is right or (left.name == right.name and left.carrier.name == right.carrier.name)


def lift_check(h: Morphism, probes: Sequence[Any] = None, tol: Dyadic = None,
               depth: int = 3, budget: int = 64) -> Verdict:
    """
    ⋁ 提升：只要對每個 g₀ ∈ G₀ 驗證 g₀ ∘ h ∈ F

    Raises:
        MissingCert: 某個子基底成員沒有提升證書
    """
    certs = h.require_certs()
    probes = probes or h.dom.probes()
    used = 0
    for index, cert in enumerate(certs):
        result = check_cert(cert, h.lifted_fn(index), h.dom, probes, tol, depth, budget)
        used += result.probes_used
        if result.kind != VerdictKind.ACCEPTED:
            detail = f"{h.cod.subbase_name(index)}∘{h.name}：{result.detail or result.kind.value}"
            return result.model_copy(update={"detail": detail, "witness_fn": h.name})
    return Verdict(kind=VerdictKind.ACCEPTED, witness_fn=h.name, probes_used=used, exact=False)


def identity_mor(topology: Topology) -> Morphism:
    certs = [FromSubbase(index=i) for i in range(len(topology.subbase))]
    return make_morphism(f"id[{topology.carrier.name}]", lambda x: x, topology, topology, certs)


def compose_mor(first: Morphism, second: Morphism, name: str = None) -> Morphism:
    """
    先 first: X → Y 再 second: Y → Z

    second 的證書以 first 的證書代換葉子：(g₀∘second)∘first。
    """
    if not same_topology(first.cod, second.dom):
        raise MorphismMismatch(first.name, second.name)
    inner = first.require_certs()
    certs = [substitute(cert, inner) for cert in second.require_certs()]
    f, g = first.map, second.map
    return make_morphism(name or f"{second.name}∘{first.name}", lambda x: g(f(x)),
                         first.dom, second.cod, certs)


def pull_back(item: CertFn, h: Morphism) -> CertFn:
    """g ↦ g ∘ h，證書經代換"""
    if not same_topology(item.topology, h.cod):
        raise MorphismMismatch(h.name, item.name)
    fn = item.fn.precompose(h.map, f"{item.name}∘{h.name}")
    return CertFn(fn, substitute(item.cert, h.require_certs()), h.dom)


# ---------------------------------------------------------------------------
# 乘積
# ---------------------------------------------------------------------------


def product_topology(left: Topology, right: Topology) -> Topology:
    """F × G，子基底為 {f₀∘π₁} ∪ {g₀∘π₂}"""
    carrier = product_carrier(left.carrier, right.carrier)
    subbase = [PointFn(f"{f0.name}∘π1", _on_first(f0)) for f0 in left.subbase]
    subbase += [PointFn(f"{g0.name}∘π2", _on_second(g0)) for g0 in right.subbase]
    return Topology(name=f"{left.name}×{right.name}", carrier=carrier, subbase=subbase,
                    kind=TopologyKind.PRODUCT, factors=(left, right))


def _on_first(f0: PointFn) -> Callable:
    return lambda p: f0(p[0])


def _on_second(g0: PointFn) -> Callable:
    return lambda p: g0(p[1])


def _factor_offset(product: Topology, slot: int) -> int:
    if product.kind != TopologyKind.PRODUCT:
        raise ValueError(f"{product.name} 不是乘積拓撲")
    return 0 if slot == 0 else len(product.factors[0].subbase)


def projection(product: Topology, slot: int) -> Morphism:
    """π₁ (slot=0) 或 π₂ (slot=1)，證書皆為 FromSubbase"""
    offset = _factor_offset(product, slot)
    factor = product.factors[slot]
    certs = [FromSubbase(index=offset + i) for i in range(len(factor.subbase))]
    return make_morphism(f"π{slot + 1}", lambda p: p[slot], product, factor, certs)


def pair_mor(h1: Morphism, h2: Morphism, cod: Topology = None) -> Morphism:
    """
    h₁ × h₂: Z → X × Y，z ↦ (h₁(z), h₂(z))

    (f₀∘π₁)∘(h₁×h₂) = f₀∘h₁，(g₀∘π₂)∘(h₁×h₂) = g₀∘h₂。
    """
    if not same_topology(h1.dom, h2.dom):
        raise MorphismMismatch(h1.name, h2.name)
    cod = cod or product_topology(h1.cod, h2.cod)
    if not (same_topology(cod.factors[0], h1.cod) and same_topology(cod.factors[1], h2.cod)):
        raise MorphismMismatch(f"{h1.name}×{h2.name}", cod.name)
    certs = h1.require_certs() + h2.require_certs()
    a, b = h1.map, h2.map
    return make_morphism(f"<{h1.name}, {h2.name}>", lambda z: (a(z), b(z)), h1.dom, cod, certs)


def product_map(e1: Morphism, e2: Morphism, dom: Topology = None, cod: Topology = None) -> Morphism:
    """e₁ ⊗ e₂: X × Y → Z × W，(x, y) ↦ (e₁(x), e₂(y))"""
    dom = dom or product_topology(e1.dom, e2.dom)
    left = compose_mor(projection(dom, 0), e1)
    right = compose_mor(projection(dom, 1), e2)
    paired = pair_mor(left, right, cod)
    return paired.model_copy(update={"name": f"{e1.name}⊗{e2.name}"})


def tensor_mor(e1: Morphism, e2: Morphism, dom: Topology = None, cod: Topology = None) -> Morphism:
    """e₁ ⊗ e₂ 的值域兩邊相同：X × Y → Z × Z"""
    if not same_topology(e1.cod, e2.cod):
        raise MorphismMismatch(e1.name, e2.name)
    return product_map(e1, e2, dom, cod)


def split_pair(m: Morphism) -> Tuple[Morphism, Morphism]:
    """已驗證的 Z → X × Y 給出兩個已驗證的分量"""
    return (compose_mor(m, projection(m.cod, 0), f"π1∘{m.name}"),
            compose_mor(m, projection(m.cod, 1), f"π2∘{m.name}"))


def insertion(product: Topology, point: Any, slot: int = 1) -> Morphism:
    """
    插入映射：slot=1 為 i_x: Y → X × Y，y ↦ (x, y)；slot=0 為 x ↦ (x, y)

    固定分量的子基底成員變成常數：(f₀∘π₁)∘i_x = f₀(x)；
    自由分量的成員保持為 FromSubbase。
    """
    left, right = product.factors
    free = product.factors[slot]
    fixed = product.factors[1 - slot]
    free_offset = _factor_offset(product, slot)
    certs: List[Optional[TopCert]] = [None] * len(product.subbase)
    for i in range(len(free.subbase)):
        certs[free_offset + i] = FromSubbase(index=i)
    fixed_offset = _factor_offset(product, 1 - slot)
    for i, g0 in enumerate(fixed.subbase):
        certs[fixed_offset + i] = const_cert(g0(point))
    label = fixed.carrier.label(point)
    if slot == 1:
        fn, name = (lambda y: (point, y)), f"i[{label}, ·]"
    else:
        fn, name = (lambda x: (x, point)), f"i[·, {label}]"
    return make_morphism(name, fn, free, product, certs)


def section_mor(phi: Morphism, point: Any, slot: int = 1) -> Morphism:
    """Φ_x = Φ ∘ i_x"""
    ins = insertion(phi.dom, point, slot)
    label = phi.dom.factors[1 - slot].carrier.label(point)
    return compose_mor(ins, phi, f"{phi.name}[{label}]")


def fn_section(item: CertFn, point: Any, slot: int = 1) -> CertFn:
    """y ↦ φ(x, y)（slot=1）或 x ↦ φ(x, y)（slot=0）"""
    ins = insertion(item.topology, point, slot)
    pulled = pull_back(item, ins)
    label = item.topology.factors[1 - slot].carrier.label(point)
    return pulled.renamed(f"{item.name}[{label}]")


# ---------------------------------------------------------------------------
# 開性與同構
# ---------------------------------------------------------------------------


class OpennessEntry(BaseModel):
    """f = g ∘ h 的一筆見證"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    f: CertFn
    g: CertFn
    eq_token: str


class OpennessWitness(BaseModel):
    """對登錄的每個 f ∈ F 提供 g ∈ G 使得 f = g ∘ h"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    morphism: str
    entries: List[OpennessEntry] = Field(default_factory=list)

    def add(self, f: CertFn, g: CertFn, eq_token: str):
        self.entries.append(OpennessEntry(f=f, g=g, eq_token=eq_token))


def witnessed_fns(topology: Topology) -> List[CertFn]:
    """開性檢查涵蓋的函數：子基底成員加上登錄表"""
    leaves = [topology.leaf(i) for i in range(len(topology.subbase))]
    return leaves + list(topology.registry.values())


def insertion_openness(product: Topology, point: Any, slot: int = 1) -> OpennessWitness:
    """i_x 是開的：f = (f∘π₂) ∘ i_x"""
    ins = insertion(product, point, slot)
    proj = projection(product, slot)
    witness = OpennessWitness(morphism=ins.name)
    for f in witnessed_fns(product.factors[slot]):
        witness.add(f, pull_back(f, proj), f"{f.name} = ({f.name}∘π{slot + 1})∘{ins.name}")
    return witness


def iso_check(h: Morphism, inverse: Callable[[Any], Any], openness: OpennessWitness,
              probes: Sequence[Any] = None, tol: Dyadic = None, depth: int = 3,
              budget: int = 64) -> Verdict:
    """
    驗證 h 是 Bishop 同構：逆映射在探針上成立，且每個登錄的 f 都等於 g ∘ h
    """
    tol = tol if tol is not None else Dyadic.pow2(-10)
    dom_probes = probes or h.dom.probes()
    cod_probes = h.cod.probes()
    for x in dom_probes:
        if not h.dom.carrier.same(inverse(h(x)), x, budget):
            return Verdict(kind=VerdictKind.REJECTED, point=h.dom.carrier.label(x),
                           detail=f"{h.name} 的逆映射在此點不成立", witness_fn=h.name)
    for y in cod_probes:
        if not h.cod.carrier.same(h(inverse(y)), y, budget):
            return Verdict(kind=VerdictKind.REJECTED, point=h.cod.carrier.label(y),
                           detail=f"{h.name} 在此點不是滿射", witness_fn=h.name)
    entries = {entry.f.name: entry for entry in openness.entries}
    for f in witnessed_fns(h.dom):
        entry = entries.get(f.name)
        if entry is None:
            return Verdict(kind=VerdictKind.REJECTED, witness_fn=f.name, detail=f"{f.name} 沒有開性見證")
        g_cert = entry.g.check(cod_probes, tol, depth, budget)
        if g_cert.kind != VerdictKind.ACCEPTED:
            return g_cert.model_copy(update={"detail": f"開性見證 {entry.g.name} 的證書不成立"})
        composed = entry.g.fn.precompose(h.map)
        close = uniform_close(composed, f.fn, tol, dom_probes, budget, h.dom.carrier)
        if close.kind != VerdictKind.ACCEPTED:
            return close.model_copy(update={"detail": f"{entry.eq_token} 不成立", "witness_fn": f.name})
    return Verdict(kind=VerdictKind.ACCEPTED, witness_fn=h.name, exact=False,
                   probes_used=len(dom_probes) + len(cod_probes))


def fn_as_morphism(item: CertFn, reals: Topology) -> Morphism:
    """F 的元素視為到 (ℝ, Bic(ℝ)) 的態射：id ∘ f = f"""
    if reals.kind != TopologyKind.BIC:
        raise ValueError("值域必須是 Bic(ℝ)")
    return make_morphism(item.name, item.fn, item.topology, reals, [item.cert])

"""有限載體上的暴力基準 - 閉包的窮舉計算與閉包證據的合成"""
from typing import Any, List, Optional, Sequence, Union

from pydantic import BaseModel

from bishop.errors import CarrierTooLarge
from bishop.exactreal import certify_positive
from bishop.nbhd import ClosureEvidence, Subset, member_evidence
from bishop.space import CertFn, Topology, TopologyKind
from bishop.types import Verdict, VerdictKind
from oracle.certs import indicator_fn

DEFAULT_BOUND = 8


class BruteClosure(BaseModel):
    """暴力計算的閉包；family_relative 表示結論只相對於所用的函數族"""
    points: tuple
    family_relative: bool = False


def _require_finite(topology: Topology, bound: int) -> List[Any]:
    carrier = topology.carrier
    if not carrier.is_finite:
        raise ValueError(f"{carrier.name} 不是有限載體")
    elements = carrier.elements()
    if len(elements) > bound:
        raise CarrierTooLarge(len(elements), bound)
    return elements


def _positive(f: CertFn, x: Any, budget: int) -> bool:
    return certify_positive(f(x), budget).kind == VerdictKind.POSITIVE


def _reaches(f: CertFn, members: Sequence[Any], budget: int) -> Optional[Any]:
    return next((c for c in members if _positive(f, c, budget)), None)


def bruteforce_closure(topology: Topology, members: Sequence[Any], family: Sequence[CertFn] = (),
                       bound: int = DEFAULT_BOUND, budget: int = 64) -> BruteClosure:
    """
    閉包的窮舉定義：x ∈ C̄ ⇔ 每個 f(x) > 0 都有 c ∈ C 使 f(c) > 0

    完全拓撲直接回傳 C，平凡拓撲回傳 X 或 ∅；其餘拓撲對 family 逐一量化。

    Raises:
        CarrierTooLarge: 載體大於 bound
    """
    elements = _require_finite(topology, bound)
    carrier = topology.carrier
    members = [carrier.normalize(c) for c in members]
    if topology.kind == TopologyKind.FULL:
        return BruteClosure(points=tuple(x for x in elements if x in members))
    if topology.kind == TopologyKind.TRIVIAL:
        return BruteClosure(points=tuple(elements) if members else ())
    closure = tuple(x for x in elements
                    if all(_reaches(f, members, budget) is not None
                           for f in family if _positive(f, x, budget)))
    return BruteClosure(points=closure, family_relative=True)


def _excluder(topology: Topology, members: Sequence[Any], x: Any, family: Sequence[CertFn],
              budget: int) -> Optional[CertFn]:
    if topology.kind == TopologyKind.FULL:
        return indicator_fn(topology, x)
    if topology.kind == TopologyKind.TRIVIAL:
        return topology.constant(1) if not members else None
    return next((f for f in family if _positive(f, x, budget) and _reaches(f, members, budget) is None), None)


def synthesize_evidence(target: Subset, x: Any, topology: Topology, family: Sequence[CertFn] = (),
                        bound: int = DEFAULT_BOUND, budget: int = 64) -> Union[ClosureEvidence, Verdict]:
    """
    x ∈ C̄ 時建立有效的回應者，否則給出排除函數

    Returns:
        ClosureEvidence 或 Impossible(f) 的 Verdict
    """
    carrier = topology.carrier
    x = carrier.normalize(x)
    members = target.search_points(budget=budget)
    label = carrier.label(x)
    if x in members:
        return member_evidence(target, x, x, f"e[{label}]")
    closure = bruteforce_closure(topology, members, family, bound, budget)
    if x in closure.points:
        def respond(f: CertFn, pos: Verdict) -> Any:
            return _reaches(f, members, budget)

        return ClosureEvidence(x, target, respond, f"e[{label}]")
    f = _excluder(topology, members, x, family, budget)
    return Verdict(kind=VerdictKind.IMPOSSIBLE, witness_fn=f.name if f is not None else None,
                   point=label, exact=not closure.family_relative)

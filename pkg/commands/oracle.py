"""暴力預言機與窮舉定理測試命令"""
from typing import Any, Dict, Sequence

from bishop.config import EngineConfig
from bishop.errors import EvidenceFailure
from bishop.nbhd import ClosureEvidence, closure_probe
from bishop.space import positive_at
from bishop.types import Verdict, VerdictKind, WitnessChain
from commands.base import entry
from dsl.builder import Workspace
from oracle.bruteforce import bruteforce_closure, synthesize_evidence
from oracle.family import family_for
from oracle.suite import exhaustive_theorem_suite


def _exercise(evidence: ClosureEvidence, fns: Sequence, budget: int) -> Verdict:
    """以族中每個在該點為正的函數查詢合成的證據"""
    chain = WitnessChain(theorem="oracle")
    carrier = evidence.target.carrier
    try:
        for f in fns:
            if positive_at(f.fn, evidence.point, budget, carrier).is_positive:
                evidence.query(f, chain, budget)
    except EvidenceFailure as e:
        return Verdict(kind=VerdictKind.REJECTED, point=carrier.label(evidence.point), detail=e.message)
    replayed = chain.replay(budget)
    if not replayed.accepted:
        return replayed
    return Verdict(kind=VerdictKind.ACCEPTED, point=carrier.label(evidence.point),
                   probes_used=evidence.queries)


def oracle(ws: Workspace, config: EngineConfig, set_spec: str) -> Dict[str, Any]:
    """
    有限載體上比較引擎的閉包探測與暴力閉包，並對每點合成、驗證證據

    Raises:
        CarrierTooLarge: 載體大於 carrier_bound
    """
    target = ws.subset(set_spec)
    family = family_for(ws.topology, config)
    fns = list(family)
    members = target.search_points(budget=config.budget)
    brute = bruteforce_closure(ws.topology, members, fns, bound=config.carrier_bound, budget=config.budget)

    items, rows = [], []
    for x in ws.carrier.elements():
        label = ws.carrier.label(x)
        in_brute = x in brute.points
        probe = closure_probe(target, x, fns, config.budget)
        in_engine = probe.kind == VerdictKind.IN_CLOSURE
        agreement = Verdict(kind=VerdictKind.ACCEPTED if in_brute == in_engine else VerdictKind.REJECTED,
                            point=label, exact=not brute.family_relative,
                            detail=None if in_brute == in_engine else f"暴力 {in_brute}，引擎 {probe.kind.value}")
        rows.append((f"agree @ {label}", agreement))

        built = synthesize_evidence(target, x, ws.topology, fns, bound=config.carrier_bound,
                                    budget=config.budget)
        if isinstance(built, ClosureEvidence):
            evidence = _exercise(built, fns, config.budget)
            rows.append((f"evidence @ {label}", evidence))
            evidence_json = evidence.to_json()
        else:
            evidence_json = built.to_json()
        items.append(entry(label, agreement, in_closure=in_brute, engine=probe.to_json(), evidence=evidence_json))

    data = {
        "set": target.label(),
        "closure": [ws.carrier.label(x) for x in brute.points],
        "family_relative": brute.family_relative,
        "points": items,
    }
    return {"data": data, "verdicts": rows}


def suite(ws: Workspace, config: EngineConfig) -> Dict[str, Any]:
    """
    對定義中的有限群執行窮舉定理測試

    Raises:
        CarrierTooLarge: 載體大於 suite_bound
    """
    group = ws.require_group()
    report = exhaustive_theorem_suite(group, family=family_for(group.topology, config), budget=config.budget,
                                      bound=config.suite_bound, depth=config.depth, cap=config.family_cap)
    data = report.model_dump()
    data["ok"] = report.ok
    return {"data": data, "report": report, "failed": not report.ok}

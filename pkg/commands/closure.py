"""閉包探測與 F-補集命令"""
from typing import Any, Dict, List, Sequence

from bishop.config import EngineConfig
from bishop.errors import ConfigError
from bishop.nbhd import closure_probe, f_complement
from bishop.types import VerdictKind
from commands.base import entry
from dsl.builder import Workspace
from oracle.family import ProbeFamily, family_for


def _points(ws: Workspace, tokens: Sequence[str]) -> List[Any]:
    if tokens:
        return [ws.point(t) for t in tokens]
    if not ws.carrier.is_finite:
        raise ConfigError(f"{ws.carrier.name} 是無限載體，請以 --at 指定點")
    return ws.carrier.elements()


def _family_json(family: ProbeFamily) -> Dict[str, Any]:
    return {"size": len(family), "exact": family.exact, "truncated": family.truncated,
            "generators": family.generators}


def closure(ws: Workspace, config: EngineConfig, set_spec: str, at: Sequence[str] = ()) -> Dict[str, Any]:
    """
    以探測函數族判斷各點是否在集合的閉包中

    Args:
        ws: 工作區
        config: 引擎設定
        set_spec: 具名集合或 {p, q} 列舉
        at: 要探測的點；有限載體上省略時探測全部點

    Returns:
        Dict: 每點的 ExcludedBy / InClosureSoFar / Unknown
    """
    target = ws.subset(set_spec)
    family = family_for(ws.topology, config)
    sample = ws.carrier.sample(config.probes, config.seed, config.probe_radius)
    fns = list(family)

    items, rows, inside = [], [], []
    for x in _points(ws, at):
        result = closure_probe(target, x, fns, config.budget, sample)
        if result.kind == VerdictKind.IN_CLOSURE:
            if family.exact:
                result = result.model_copy(update={"exact": True})
            inside.append(ws.carrier.label(x))
        label = ws.carrier.label(x)
        rows.append((label, result))
        items.append(entry(label, result))

    data = {"set": target.label(), "family": _family_json(family), "points": items}
    if ws.carrier.is_finite and not at:
        data["closure"] = inside
    return {"data": data, "verdicts": rows}


def complement(ws: Workspace, config: EngineConfig, set_spec: str, at: Sequence[str] = ()) -> Dict[str, Any]:
    """
    X ∖F C 的成員判定；成員附上 f ∨ 0 形式的開性見證

    Returns:
        Dict: 每點的 Member / NonMember，以及有限載體上的完整 F-補集
    """
    target = ws.subset(set_spec)
    family = family_for(ws.topology, config)
    sample = ws.carrier.sample(config.probes, config.seed, config.probe_radius)
    opened = f_complement(target, list(family), config.budget, sample, exact_family=family.exact)

    items, rows = [], []
    for x in _points(ws, at):
        result = opened.member_at(x, config.budget)
        witness = opened.witness(x, config.budget) if result.is_member else None
        label = ws.carrier.label(x)
        rows.append((label, result))
        if witness is not None:
            rows.append((f"{label} ⊆", witness.inclusion))
            items.append(entry(label, result, open_witness=witness.f.name,
                               inclusion=witness.inclusion.kind.value))
        else:
            items.append(entry(label, result))

    data = {"set": target.label(), "family": _family_json(family), "points": items}
    if opened.points is not None and not at:
        data["complement"] = [ws.carrier.label(x) for x in opened.points]
    return {"data": data, "verdicts": rows}

"""證書與態射檢查命令"""
from typing import Any, Dict, List, Optional, Tuple

from bishop.config import EngineConfig
from bishop.errors import MalformedCert, MissingCert
from bishop.group import (
    BishopGroup, k_iso_check, k_map, neg_iso_check, sub_map, translation_iso_check, translation_mor,
)
from bishop.morphism import Morphism, fn_as_morphism, lift_check
from bishop.space import CertFn, bic_topology, cert_to_tree
from bishop.types import Verdict, VerdictKind
from commands.base import entry
from dsl.builder import Workspace
from reporter.summarizer import write_json

# ℝ 上用於平移檢查的基點數
REALS_TRANSLATION_POINTS = 3


def _targets(ws: Workspace, only: Optional[str]) -> List[CertFn]:
    if only:
        return [ws.fn(only)]
    if ws.fns:
        return [ws.fns[name] for name in sorted(ws.fns)]
    return [ws.topology.leaf(i) for i in range(len(ws.topology.subbase))]


def _rejected(e: Exception, name: str) -> Verdict:
    return Verdict(kind=VerdictKind.REJECTED, witness_fn=name, detail=str(e))


def check_certs(ws: Workspace, config: EngineConfig, only: str = None, emit: str = None) -> Dict[str, Any]:
    """
    逐一檢查具名函數的證書（沒有具名函數時檢查子基底本身）

    Args:
        ws: 工作區
        config: 引擎設定
        only: 只檢查這個函數
        emit: 證書樹的輸出路徑

    Returns:
        Dict: data 與 verdicts
    """
    probes = ws.topology.probes(config.probes, config.seed, config.probe_radius)
    items, rows, trees = [], [], {}
    for f in _targets(ws, only):
        try:
            result = f.check(probes, config.tol, config.depth, config.budget)
        except MalformedCert as e:
            result = _rejected(e, f.name)
        rows.append((f.name, result))
        items.append(entry(f.name, result, rule=f.cert.rule.value))
        trees[f.name] = cert_to_tree(f.cert, config.depth)

    if emit:
        write_json(emit, trees)
    return {
        "data": {"definition": ws.summary(), "certificates": items, "emitted": emit},
        "verdicts": rows,
    }


def _translation_points(group: BishopGroup, config: EngineConfig) -> List[Any]:
    if group.is_finite:
        return group.elements()
    return group.probes(REALS_TRANSLATION_POINTS, config.seed, config.probe_radius)


def _group_morphisms(group: BishopGroup, config: EngineConfig) -> List[Morphism]:
    mors = [group.plus_mor, group.neg_mor, sub_map(group), k_map(group)]
    mors += [translation_mor(group, x0) for x0 in _translation_points(group, config)]
    return mors


def _iso_checks(group: BishopGroup, config: EngineConfig) -> List[Tuple[str, Verdict]]:
    probes = group.probes(config.probes, config.seed, config.probe_radius)
    rows = [("iso(-)", neg_iso_check(group, probes)), ("iso(k)", k_iso_check(group))]
    for x0 in _translation_points(group, config):
        rows.append((f"iso(+1[{group.carrier.label(x0)}])", translation_iso_check(group, x0, probes)))
    return rows


def check_morphisms(ws: Workspace, config: EngineConfig, emit: str = None) -> Dict[str, Any]:
    """
    以 ⋁ 提升檢查群運算、平移、k 與 sub，並把每個具名函數當作到 ℝ 的態射檢查

    有群結構時另外檢查 -、k 與平移是同構。
    """
    mors: List[Morphism] = []
    if ws.group is not None:
        mors += _group_morphisms(ws.group, config)
    reals = bic_topology()
    mors += [fn_as_morphism(ws.fns[name], reals) for name in sorted(ws.fns)]

    items, rows, trees = [], [], {}
    for mor in mors:
        probes = mor.dom.probes(config.probes, config.seed, config.probe_radius)
        try:
            result = lift_check(mor, probes, config.tol, config.depth, config.budget)
        except (MissingCert, MalformedCert) as e:
            result = _rejected(e, mor.name)
        rows.append((mor.name, result))
        items.append(entry(mor.name, result, dom=mor.dom.name, cod=mor.cod.name))
        trees[mor.name] = mor.to_json(config.depth)

    isos = []
    if ws.group is not None:
        for label, result in _iso_checks(ws.group, config):
            rows.append((label, result))
            isos.append(entry(label, result))

    if emit:
        write_json(emit, trees)
    return {
        "data": {"definition": ws.summary(), "morphisms": items, "isomorphisms": isos, "emitted": emit},
        "verdicts": rows,
    }

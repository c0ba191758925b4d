"""
定理登錄表與 run-theorem 命令

每個定理以描述性的鍵登錄；執行器以 --set、--at、--other、--open、--modulus
取得輸入，在有限載體上省略 --at / --other 時逐點執行。
"""
from typing import Any, Callable, Dict, List, Optional, Sequence, Union

from pydantic import BaseModel, ConfigDict

from bishop.closedsets import (
    ClopenReport, SubgroupClosure, SubgroupView, abelian_closure_refuter, center_closed, center_subset,
    char_closed_subgroup, char_open_subgroup, clopen_complement, clopen_subgroup, closure_neg_eq,
    closure_translate_eq, is_normal, kernel_closed, kernel_subset, neg_closed, normal_closure,
    normalizer_closed, open_subgroup_closed, separating_iff_zero_closed, subgroup, subgroup_closure,
    translate_closed,
)
from bishop.config import EngineConfig
from bishop.errors import ConfigError, EvidenceFailure, PreconditionUnmet, UnknownCommand
from bishop.group import BishopHom, make_hom
from bishop.morphism import identity_mor
from bishop.nbhd import (
    ClosedSet, ClosureEvidence, OpenSet, Subset, closed_from_finite, closure_probe, f_complement,
    finite_subset, member_evidence, open_from_finite,
)
from bishop.types import TheoremResult, Verdict, VerdictKind, WitnessChain
from commands.base import entry
from dsl.builder import Workspace
from oracle.bruteforce import synthesize_evidence
from oracle.family import family_for
from oracle.suite import kernel_homs


class TheoremArgs(BaseModel):
    """run-theorem 的輸入"""
    set_spec: Optional[str] = None
    at: Optional[str] = None
    other: Optional[str] = None
    open_spec: Optional[str] = None
    modulus: Optional[int] = None


class _Run:
    """單次定理執行的共用狀態與結果收集"""

    def __init__(self, ws: Workspace, config: EngineConfig, theorem: str, args: TheoremArgs):
        self.ws = ws
        self.config = config
        self.theorem = theorem
        self.args = args
        self.group = ws.require_group()
        self.carrier = ws.carrier
        self.family = family_for(ws.topology, config)
        self.fns = list(self.family)
        self.budget = config.budget
        self.sample = self.carrier.sample(config.probes, config.seed, config.probe_radius)
        self.items: List[Dict[str, Any]] = []
        self.rows = []
        self.chains: List[WitnessChain] = []

    # ---- 輸入 ----

    def label(self, x: Any) -> str:
        return self.carrier.label(x)

    def target(self) -> Subset:
        if not self.args.set_spec:
            raise ConfigError(f"{self.theorem} 需要 --set")
        return self.ws.subset(self.args.set_spec)

    def subgroup(self) -> SubgroupView:
        return subgroup(self.group, self.target())

    def open_structure(self, subset: Subset) -> OpenSet:
        if isinstance(subset, OpenSet):
            return subset
        if not self.carrier.is_finite:
            raise PreconditionUnmet(f"{subset.name} 需要開性見證，請以 positive(f) 宣告")
        return open_from_finite(subset, self.fns, self.budget)

    def open_set(self) -> OpenSet:
        if not self.args.open_spec:
            raise ConfigError(f"{self.theorem} 需要 --open")
        return self.open_structure(self.ws.subset(self.args.open_spec))

    def closed_structure(self, subset: Subset) -> ClosedSet:
        if isinstance(subset, ClosedSet):
            return subset
        if not self.carrier.is_finite:
            raise PreconditionUnmet(f"{subset.name} 需要閉包截面，請以 zeros(f) 宣告")
        return closed_from_finite(subset, self.fns, self.budget)

    def _tokens(self, token: Optional[str], default: Sequence[Any], flag: str) -> List[Any]:
        if token is not None:
            return [self.ws.point(token)]
        if not self.carrier.is_finite:
            raise ConfigError(f"{self.carrier.name} 是無限載體，請以 {flag} 指定點")
        return list(default)

    def points(self, default: Sequence[Any] = None) -> List[Any]:
        return self._tokens(self.args.at, self.carrier.elements() if default is None else default, "--at")

    def others(self, default: Sequence[Any] = None) -> List[Any]:
        return self._tokens(self.args.other, self.carrier.elements() if default is None else default, "--other")

    def closure_points(self, subset: Subset) -> List[Any]:
        universe = self.carrier.elements() if self.carrier.is_finite else self.sample
        return [x for x in universe
                if closure_probe(subset, x, self.fns, self.budget, self.sample).kind == VerdictKind.IN_CLOSURE]

    def evidence(self, target: Subset, x: Any) -> Union[ClosureEvidence, Verdict]:
        """有限載體以暴力合成；無限載體只接受成員本身"""
        if self.carrier.is_finite:
            return synthesize_evidence(target, x, self.ws.topology, self.fns,
                                       bound=self.config.carrier_bound, budget=self.budget)
        label = self.label(x)
        if target.contains(x, self.budget):
            return member_evidence(target, x, x, f"e[{label}]")
        probe = closure_probe(target, x, self.fns, self.budget, self.sample)
        if probe.kind == VerdictKind.EXCLUDED_BY:
            return Verdict(kind=VerdictKind.IMPOSSIBLE, witness_fn=probe.witness_fn, point=label,
                           exact=probe.exact)
        raise PreconditionUnmet(f"無法為 {label} ∈ closure({target.name}) 合成證據")

    # ---- 結果 ----

    def record(self, label: str, result: Verdict, chain: WitnessChain = None, **extra: Any):
        self.rows.append((label, result))
        if chain is not None:
            self.chains.append(chain)
            extra["chain"] = [step.model_dump(exclude_none=True) for step in chain.steps]
        self.items.append(entry(label, result, **extra))

    def record_result(self, result: TheoremResult):
        self.rows.append((f"{result.theorem} @ {result.point}", result.verdict))
        self.chains.append(result.chain)
        self.items.append({"name": result.point, **result.to_json()})

    def record_report(self, report: ClopenReport):
        equal = report.equality is None or report.equality.accepted
        result = Verdict(kind=VerdictKind.ACCEPTED if report.clopen and equal else VerdictKind.REJECTED,
                         detail=f"open={report.open} closed={report.closed}", exact=self.carrier.is_finite)
        self.rows.append((report.subset, result))
        self.chains.extend(r.chain for r in report.results)
        self.items.append({"name": report.subset, **report.to_json(), "verdict": result.kind.value})

    def run_closed(self, closed: ClosedSet, xs: Sequence[Any]):
        """對每點取得閉包證據並執行截面"""
        for x in xs:
            ev = self.evidence(closed, x)
            if isinstance(ev, Verdict):
                self.record(f"{closed.name} @ {self.label(x)}", ev)
                continue
            try:
                self.record_result(closed.close(ev, self.budget, self.theorem))
            except EvidenceFailure as e:
                self.record(f"{closed.name} @ {self.label(x)}",
                            Verdict(kind=VerdictKind.REJECTED, point=self.label(x), detail=e.message))

    def audit(self, ops: SubgroupClosure, evidence: ClosureEvidence, chain: WitnessChain):
        label = f"{evidence.name} @ {self.label(evidence.point)}"
        try:
            result = ops.audit(evidence, chain, self.budget)
        except EvidenceFailure as e:
            result = Verdict(kind=VerdictKind.REJECTED, point=self.label(evidence.point), detail=e.message)
        self.record(label, result, chain)

    def hom(self) -> BishopHom:
        homs = kernel_homs(self.group)
        if not homs:
            if self.args.modulus is not None:
                raise PreconditionUnmet(f"{self.group.name} 不是 ℤn，無法使用 --modulus")
            return make_hom(identity_mor(self.group.topology), self.group, self.group)
        if self.args.modulus is None:
            return homs[0]
        for h in homs:
            if len(h.target.elements()) == self.args.modulus:
                return h
        raise PreconditionUnmet(f"{self.group.name} 沒有到 ℤ{self.args.modulus} 的約化同態")


# ---------------------------------------------------------------------------
# 執行器
# ---------------------------------------------------------------------------


def _open_subgroup_closed(run: _Run):
    H = run.subgroup()
    closed = open_subgroup_closed(H, run.open_structure(H.subset), run.budget)
    run.run_closed(closed, run.points())


def _neg_closed(run: _Run):
    closed = run.closed_structure(run.target())
    run.run_closed(neg_closed(run.group, closed), run.points())


def _translate_closed(run: _Run):
    closed = run.closed_structure(run.target())
    xs = run.points()
    for x0 in run.others():
        run.run_closed(translate_closed(run.group, x0, closed), xs)


def _closure_neg(run: _Run):
    target = run.target()
    run.record(f"-{target.name}", closure_neg_eq(run.group, target, run.fns, run.budget))


def _closure_translate(run: _Run):
    target = run.target()
    for x0 in run.others():
        run.record(f"{run.label(x0)} + {target.name}",
                   closure_translate_eq(run.group, x0, target, run.fns, run.budget))


def _zero_closed(run: _Run):
    run.record(run.group.name, separating_iff_zero_closed(run.group, run.fns, run.budget))


def _closure_subgroup(run: _Run):
    H = run.subgroup()
    ops = subgroup_closure(H, run.fns)
    closure = run.closure_points(H.subset)
    ys = run.others(closure)
    run.audit(ops, ops.zero_evidence(), WitnessChain(theorem=run.theorem))
    evidence = {}
    for x in run.points(closure) + ys:
        if x not in evidence:
            evidence[x] = run.evidence(H.subset, x)
    for x in run.points(closure):
        ex = evidence[x]
        if isinstance(ex, Verdict):
            run.record(f"{run.label(x)} ∉ closure({H.name})", ex)
            continue
        chain = WitnessChain(theorem=run.theorem)
        run.audit(ops, ops.neg_evidence(ex, chain, run.budget), chain)
        for y in ys:
            ey = evidence[y]
            if isinstance(ey, Verdict):
                continue
            chain = WitnessChain(theorem=run.theorem)
            run.audit(ops, ops.plus_evidence(ex, ey, chain, run.budget), chain)


def _abelian_closure(run: _Run):
    H = run.subgroup()
    closure = run.closure_points(H.subset)
    for x in run.points(closure):
        for y in run.others(closure):
            run.record_result(abelian_closure_refuter(H, x, y, run.fns, run.budget))


def _center_closed(run: _Run):
    H = run.subgroup()
    center = center_subset(run.group, H, run.budget)
    for x in run.points(run.closure_points(center)):
        run.record_result(center_closed(run.group, H, x, run.fns, run.budget))


def _kernel_closed(run: _Run):
    h = run.hom()
    target_family = list(family_for(h.target.topology, run.config))
    kernel = kernel_subset(h, run.budget)
    for x in run.points(run.closure_points(kernel)):
        run.record_result(kernel_closed(h, x, target_family, run.budget))


def _normal_closure(run: _Run):
    H = run.subgroup()
    if not is_normal(H, run.budget):
        raise PreconditionUnmet(f"{H.name} 必須是正規子群")
    ops = subgroup_closure(H, run.fns)
    xs = run.points()
    for y in run.others(run.closure_points(H.subset)):
        ey = run.evidence(H.subset, y)
        if isinstance(ey, Verdict):
            run.record(f"{run.label(y)} ∉ closure({H.name})", ey)
            continue
        for x in xs:
            chain = WitnessChain(theorem=run.theorem)
            run.audit(ops, normal_closure(H, x, ey, chain, run.budget), chain)


def _normalizer_closed(run: _Run):
    H = run.subgroup()
    closed_H = H.model_copy(update={"closed": run.closed_structure(H.subset)})
    run.run_closed(normalizer_closed(closed_H, run.budget), run.points())


def _meet(run: _Run, O: OpenSet, H: SubgroupView) -> List[Any]:
    meet = [x for x in O.search_points(run.sample, run.budget) if H.contains(x, run.budget)]
    if not meet:
        raise PreconditionUnmet(f"{O.name} ∩ {H.name} 無人居住")
    return meet


def _closed_subgroup_char(run: _Run):
    H = run.subgroup()
    O = run.open_set()
    meet = _meet(run, O, H)
    oc = run.closed_structure(finite_subset(run.carrier, meet, f"{O.name}∩{H.name}"))
    closed = char_closed_subgroup(H, O, meet[0], oc, run.fns, run.budget)
    run.run_closed(closed, run.points())


def _open_subgroup_char(run: _Run):
    H = run.subgroup()
    O = run.open_set()
    c0 = _meet(run, O, H)[0]
    openness = char_open_subgroup(H, O, c0, run.budget, run.sample)
    for c in H.subset.search_points(run.sample, run.budget):
        w = openness.witness(c, run.budget)
        if w is None:
            run.record(run.label(c), Verdict(kind=VerdictKind.REJECTED, point=run.label(c), detail="沒有開性見證"))
        else:
            run.record(run.label(c), w.inclusion, open_witness=w.f.name)


def _clopen_complement(run: _Run):
    if not run.carrier.is_finite:
        raise PreconditionUnmet("clopen-complement 需要有限載體")
    C = run.target()
    rest = [x for x in run.carrier.elements() if not C.contains(x, run.budget)]
    D = subgroup(run.group, finite_subset(run.carrier, rest, f"X∖{C.name}"))
    opened = f_complement(C, run.fns, run.budget).points or ()
    if not opened:
        raise PreconditionUnmet(f"X∖F {C.name} 無人居住")
    run.record_report(clopen_complement(run.group, C, D, opened[0], run.fns, run.budget))


def _clopen_subgroup(run: _Run):
    H = run.subgroup()
    O = run.open_set()
    c0 = _meet(run, O, H)[0]
    run.record_report(clopen_subgroup(H, O, c0, run.fns, run.budget))


class Theorem(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    name: str
    description: str
    needs: List[str]
    runner: Callable[[_Run], None]


THEOREMS: Dict[str, Theorem] = {t.name: t for t in [
    Theorem(name="open-subgroup-closed", description="開子群是閉的", needs=["set"],
            runner=_open_subgroup_closed),
    Theorem(name="neg-closed", description="閉集的 -C 是閉的", needs=["set"], runner=_neg_closed),
    Theorem(name="translate-closed", description="閉集的平移 x₀ + C 是閉的", needs=["set", "other=x₀"],
            runner=_translate_closed),
    Theorem(name="closure-neg", description="closure(-A) = -closure(A)", needs=["set"], runner=_closure_neg),
    Theorem(name="closure-translate", description="closure(x₀ + A) = x₀ + closure(A)",
            needs=["set", "other=x₀"], runner=_closure_translate),
    Theorem(name="zero-closed-iff-separating", description="F 分離點 ⇔ {0} 是閉的", needs=[],
            runner=_zero_closed),
    Theorem(name="closure-subgroup", description="子群的閉包是子群", needs=["set", "at=x", "other=y"],
            runner=_closure_subgroup),
    Theorem(name="abelian-closure", description="交換子群的閉包是交換的（需分離）",
            needs=["set", "at=x", "other=y"], runner=_abelian_closure),
    Theorem(name="normal-closure", description="正規子群的閉包是正規的", needs=["set", "at=x", "other=y"],
            runner=_normal_closure),
    Theorem(name="normalizer-closed", description="閉子群的正規化子是閉的", needs=["set"],
            runner=_normalizer_closed),
    Theorem(name="center-closed", description="子群的中心化子是閉的（需分離）", needs=["set"],
            runner=_center_closed),
    Theorem(name="kernel-closed", description="同態的核是閉的（值域需分離）", needs=["modulus"],
            runner=_kernel_closed),
    Theorem(name="closed-subgroup-char", description="O ∩ C 在 O 中閉 ⇒ C 閉", needs=["set", "open"],
            runner=_closed_subgroup_char),
    Theorem(name="open-subgroup-char", description="含有人居住開集的子群是開的", needs=["set", "open"],
            runner=_open_subgroup_char),
    Theorem(name="clopen-complement", description="補集是子群時 X∖F C = X∖C 是 clopen", needs=["set"],
            runner=_clopen_complement),
    Theorem(name="clopen-subgroup", description="含有人居住開集的子群是 clopen", needs=["set", "open"],
            runner=_clopen_subgroup),
]}


def get_theorem(name: str) -> Theorem:
    if name not in THEOREMS:
        raise UnknownCommand(name)
    return THEOREMS[name]


def list_theorems() -> List[Dict[str, Any]]:
    return [{"name": t.name, "description": t.description, "needs": t.needs} for t in THEOREMS.values()]


def run_theorem(ws: Workspace, config: EngineConfig, name: str, args: TheoremArgs) -> Dict[str, Any]:
    """
    執行登錄表中的定理轉換器

    Args:
        ws: 工作區（必須有群結構）
        config: 引擎設定
        name: 定理鍵
        args: 集合、點與開集參數

    Returns:
        Dict: data（每項結果與見證鏈）、verdicts、chains

    Raises:
        UnknownCommand: 未知的定理
        PreconditionUnmet: 定理前提不成立
    """
    theorem = get_theorem(name)
    run = _Run(ws, config, theorem.name, args)
    theorem.runner(run)
    data = {
        "theorem": theorem.name,
        "group": run.group.name,
        "family": {"size": len(run.family), "exact": run.family.exact},
        "args": args.model_dump(exclude_none=True),
        "results": run.items,
    }
    return {"data": data, "verdicts": run.rows, "chains": run.chains}

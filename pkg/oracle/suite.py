"""窮舉定理測試 - 在小型有限群上以暴力基準檢查每個閉集轉換器"""
import itertools
import re
from typing import Any, Dict, List, Optional, Sequence, Tuple

from bishop.closedsets import (
    SubgroupView, abelian_closure_refuter, center_closed, center_subset, char_closed_subgroup,
    char_open_subgroup, clopen_complement, clopen_subgroup, closure_neg_eq, closure_translate_eq,
    commutator_maps, is_normal, kernel_closed, kernel_subset, neg_closed, normal_closure,
    normalizer_closed, normalizer_subset, open_subgroup_closed, restricted_normal_mor,
    separating_iff_zero_closed, subgroup, subgroup_closure, translate_closed, validate_subgroup,
)
from bishop.errors import CarrierTooLarge, EngineError, EvidenceFailure, NotASubgroup, PreconditionUnmet
from bishop.group import (
    BishopGroup, BishopHom, cyclic_structure, make_finite_group, make_hom, make_trivial_group, reduction_hom,
)
from bishop.morphism import identity_mor, lift_check
from bishop.nbhd import (
    ClosedSet, ClosureEvidence, Subset, closed_from_finite, closure_probe, f_complement, finite_subset,
    is_open, open_from_finite,
)
from bishop.space import TopologyKind, finite_carrier
from bishop.types import Discrepancy, SuiteReport, TheoremResult, VerdictKind, WitnessChain
from oracle.bruteforce import bruteforce_closure, synthesize_evidence
from oracle.family import ProbeFamily, build_family

DEFAULT_SUITE_BOUND = 6


def all_subsets(elements: Sequence[Any]) -> List[Tuple[Any, ...]]:
    """依大小再依載體順序列出全部子集"""
    return [combo for size in range(len(elements) + 1) for combo in itertools.combinations(elements, size)]


def kernel_homs(group: BishopGroup) -> List[BishopHom]:
    """
    ℤₙ 的核實例：到每個真因數 d > 1 的 ℤ_d 的約化同態，以及恆等同態

    目標群的拓撲與來源同類（完全或平凡）。
    """
    match = re.fullmatch(r"Z(\d+)", group.structure.name)
    if match is None or group.structure.table is not None:
        return []
    n = int(match.group(1))
    homs = [make_hom(identity_mor(group.topology), group, group)]
    for d in range(2, n):
        if n % d:
            continue
        if group.topology.kind == TopologyKind.TRIVIAL:
            target = make_trivial_group(cyclic_structure(d), finite_carrier(f"Z{d}", range(d)))
        else:
            target = make_finite_group(d)
        homs.append(reduction_hom(group, target, d))
    return homs


def _separating(family: Sequence, elements: Sequence[Any]) -> bool:
    """暴力：任兩點都有值不同的函數"""
    return all(any(f(x).exact != f(y).exact for f in family)
               for x, y in itertools.combinations(elements, 2))


class _SuiteRun:
    """單一群的窮舉執行狀態"""

    def __init__(self, group: BishopGroup, family: ProbeFamily, budget: int):
        self.group = group
        self.family = family
        self.fns = list(family)
        self.budget = budget
        self.carrier = group.carrier
        self.elements = group.elements()
        self.report = SuiteReport(group=group.name, topology=group.topology.name,
                                  family_relative=not family.exact)
        self._closures: Dict[Tuple[Any, ...], Tuple[Any, ...]] = {}
        self.separating = _separating(family, self.elements)

    # ---- 共用工具 ----

    def label(self, points: Sequence[Any]) -> str:
        return "{" + ", ".join(self.carrier.label(p) for p in points) + "}"

    def closure(self, points: Sequence[Any]) -> Tuple[Any, ...]:
        key = tuple(points)
        if key not in self._closures:
            self._closures[key] = bruteforce_closure(self.group.topology, key, self.fns,
                                                     bound=len(self.elements), budget=self.budget).points
        return self._closures[key]

    def is_closed(self, points: Sequence[Any]) -> bool:
        return set(self.closure(points)) == set(points)

    def subset(self, points: Sequence[Any], name: str = None) -> Subset:
        return finite_subset(self.carrier, points, name or self.label(points))

    def expect(self, check: str, instance: str, expected: Any, got: Any):
        self.report.count(check)
        if expected != got:
            self.report.discrepancies.append(
                Discrepancy(check=check, instance=instance, expected=str(expected), got=str(got)))

    def replay(self, chain: WitnessChain):
        self.report.chains_replayed += 1
        if not chain.replay(self.budget).accepted:
            self.report.unreplayable += 1

    def evidence(self, target: Subset, x: Any) -> Optional[ClosureEvidence]:
        built = synthesize_evidence(target, x, self.group.topology, self.fns,
                                    bound=len(self.elements), budget=self.budget)
        return built if isinstance(built, ClosureEvidence) else None

    def closed_structure(self, points: Sequence[Any]) -> ClosedSet:
        return closed_from_finite(self.subset(points), self.fns, self.budget)

    def run_closed(self, check: str, closed: ClosedSet, truth: Sequence[Any]):
        """對每個閉包中的點合成證據、執行截面；結果必須是成員且與真值一致"""
        truth = set(truth)
        for x in self.elements:
            ev = self.evidence(closed, x)
            if ev is None:
                self.expect(check, f"{closed.name} ∌ {self.carrier.label(x)}", False, x in truth)
                continue
            instance = f"{closed.name} @ {self.carrier.label(x)}"
            try:
                result = closed.close(ev, self.budget, check)
            except EngineError as e:
                self.expect(check, instance, "Member", type(e).__name__)
                continue
            self.replay(result.chain)
            self.expect(check, instance, x in truth, result.verdict.is_member)

    # ---- 個別檢查 ----

    def closure_checks(self, subsets: List[Tuple[Any, ...]]):
        for points in subsets:
            target = self.subset(points)
            brute = set(self.closure(points))
            for x in self.elements:
                probe = closure_probe(target, x, self.fns, self.budget)
                self.expect("closure-probe", f"{target.name} @ {self.carrier.label(x)}",
                            x in brute, probe.kind == VerdictKind.IN_CLOSURE)
            self.f_complement_check(points)
            self.expect("closure-neg", target.name, VerdictKind.ACCEPTED,
                        closure_neg_eq(self.group, target, self.fns, self.budget).kind)
            for x0 in self.elements:
                self.expect("closure-translate", f"{self.carrier.label(x0)} + {target.name}", VerdictKind.ACCEPTED,
                            closure_translate_eq(self.group, x0, target, self.fns, self.budget).kind)

    def f_complement_check(self, points: Tuple[Any, ...]):
        kind = self.group.topology.kind
        if kind == TopologyKind.FULL:
            expected = tuple(x for x in self.elements if x not in points)
        elif kind == TopologyKind.TRIVIAL:
            expected = () if points else tuple(self.elements)
        else:
            return
        opened = f_complement(self.subset(points), self.fns, self.budget)
        self.expect("f-complement", self.label(points), expected, opened.points)

    def closed_set_checks(self, subsets: List[Tuple[Any, ...]]):
        for points in subsets:
            if not self.is_closed(points):
                continue
            closed = self.closed_structure(points)
            negated = [self.group.neg(c) for c in points]
            self.run_closed("neg-closed", neg_closed(self.group, closed), negated)
            for x0 in self.elements:
                moved = [self.group.plus(x0, c) for c in points]
                self.run_closed("translate-closed", translate_closed(self.group, x0, closed), moved)

    def open_subgroup_check(self, H: SubgroupView):
        openness = open_from_finite(H.subset, self.fns, self.budget)
        opened = is_open(openness, self.budget)
        try:
            closed = open_subgroup_closed(H, openness, self.budget)
        except PreconditionUnmet:
            self.expect("open-subgroup-closed", H.name, False, opened)
            return
        self.expect("open-subgroup-closed", H.name, True, opened)
        self.run_closed("open-subgroup-closed", closed, H.points)

    def closure_subgroup_check(self, H: SubgroupView):
        B = self.closure(H.points)
        ops = subgroup_closure(H, self.fns)
        try:
            validate_subgroup(self.group, self.subset(B))
            self.expect("closure-subgroup", f"closure({H.name})", True, True)
        except NotASubgroup as e:
            self.expect("closure-subgroup", f"closure({H.name})", "subgroup", e.reason)
        evidence = {x: self.evidence(H.subset, x) for x in B}
        for x in B:
            for y in B:
                chain = WitnessChain(theorem="closure-subgroup")
                total = ops.plus_evidence(evidence[x], evidence[y], chain, self.budget)
                self.audit("closure-subgroup", ops, total, chain, self.group.plus(x, y) in B)
            chain = WitnessChain(theorem="closure-subgroup")
            self.audit("closure-subgroup", ops, ops.neg_evidence(evidence[x], chain, self.budget), chain,
                       self.group.neg(x) in B)

    def audit(self, check: str, ops, evidence: ClosureEvidence, chain: WitnessChain, truth: bool):
        instance = f"{evidence.name} @ {self.carrier.label(evidence.point)}"
        try:
            ops.audit(evidence, chain, self.budget)
            ok = True
        except EvidenceFailure:
            ok = False
        self.replay(chain)
        self.expect(check, instance, truth, ok)

    def refuter_expect(self, check: str, result: TheoremResult, zero: bool):
        if not self.separating:
            expected = VerdictKind.PRECONDITION_UNVERIFIED
        else:
            expected = VerdictKind.NO_SEPARATION if zero else VerdictKind.SEPARATION_FOUND
        self.replay(result.chain)
        self.expect(check, f"{result.point}", expected, result.verdict.kind)

    def abelian_check(self, H: SubgroupView):
        group = self.group
        if not all(group.plus(a, b) == group.plus(b, a) for a in H.points for b in H.points):
            return
        B = self.closure(H.points)
        for x in B:
            for y in B:
                result = abelian_closure_refuter(H, x, y, self.fns, self.budget)
                zero = group.plus(group.plus(x, y), group.neg(group.plus(y, x))) == group.zero
                self.refuter_expect("abelian-closure", result, zero)

    def center_check(self, H: SubgroupView):
        group = self.group
        center = center_subset(group, H, self.budget)
        for x in self.closure(center.points):
            result = center_closed(group, H, x, self.fns, self.budget)
            self.refuter_expect("center-closed", result, x in center.points)

    def normal_checks(self, H: SubgroupView):
        if not is_normal(H, self.budget):
            return
        B = self.closure(H.points)
        ops = subgroup_closure(H, self.fns)
        for y in B:
            ey = self.evidence(H.subset, y)
            for x in self.elements:
                chain = WitnessChain(theorem="normal-closure")
                moved = normal_closure(H, x, ey, chain, self.budget)
                self.audit("normal-closure", ops, moved, chain, self.group.conj(x, y) in B)
        for x in self.elements:
            mor = restricted_normal_mor(H, x)
            self.expect("restricted-normal", mor.name, VerdictKind.ACCEPTED, lift_check(mor).kind)

    def normalizer_check(self, H: SubgroupView):
        if not self.is_closed(H.points):
            return
        closed_H = H.model_copy(update={"closed": self.closed_structure(H.points)})
        normalizer = normalizer_closed(closed_H, self.budget)
        self.run_closed("normalizer-closed", normalizer, normalizer_subset(H, self.budget).points)

    def char_checks(self, H: SubgroupView, opens: List[Tuple[Any, ...]]):
        C = H.points
        inside = [O for O in opens if O and set(O) <= set(C)]
        for O in inside:
            openness = char_open_subgroup(H, open_from_finite(self.subset(O), self.fns, self.budget),
                                          O[0], self.budget)
            self.expect("open-subgroup-char", f"{H.name} ⊇ {self.label(O)}", True, is_open(openness, self.budget))
        if inside:
            O = inside[0]
            report = clopen_subgroup(H, open_from_finite(self.subset(O), self.fns, self.budget), O[0],
                                     self.fns, self.budget)
            for result in report.results:
                self.replay(result.chain)
            self.expect("clopen-subgroup", H.name, True, report.clopen)
        if not self.is_closed(C):
            return
        for O in opens:
            meet = tuple(x for x in self.elements if x in O and x in C)
            if not meet:
                continue
            if not set(self.closure(meet)) & set(O) <= set(meet):
                continue
            closed = char_closed_subgroup(H, open_from_finite(self.subset(O), self.fns, self.budget),
                                          meet[0], self.closed_structure(meet), self.fns, self.budget)
            self.run_closed("closed-subgroup-char", closed, C)

    def clopen_complement_checks(self, subsets: List[Tuple[Any, ...]]):
        group = self.group
        for points in subsets:
            if not points or len(points) == len(self.elements) or not self.is_closed(points):
                continue
            rest = tuple(x for x in self.elements if x not in points)
            try:
                D = subgroup(group, self.subset(rest))
            except NotASubgroup:
                continue
            f_rest = f_complement(self.subset(points), self.fns, self.budget).points
            instance = self.label(points)
            if not f_rest:
                try:
                    clopen_complement(group, self.subset(points), D, rest[0], self.fns, self.budget)
                    self.expect("clopen-complement", instance, "PreconditionUnmet", "ran")
                except PreconditionUnmet:
                    self.expect("clopen-complement", instance, "PreconditionUnmet", "PreconditionUnmet")
                continue
            report = clopen_complement(group, self.subset(points), D, f_rest[0], self.fns, self.budget)
            for result in report.results:
                self.replay(result.chain)
            self.expect("clopen-complement", instance, True, report.clopen and report.equality.accepted)

    def kernel_checks(self, homs: Sequence[BishopHom]):
        for h in homs:
            target_family = list(build_family(h.target.topology, self.family.depth, self.family.cap))
            target_separating = _separating(target_family, h.target.elements())
            kernel = kernel_subset(h, self.budget)
            for x in self.closure(kernel.points):
                result = kernel_closed(h, x, target_family, self.budget)
                self.replay(result.chain)
                if not target_separating:
                    expected = VerdictKind.PRECONDITION_UNVERIFIED
                else:
                    expected = VerdictKind.NO_SEPARATION if x in kernel.points else VerdictKind.SEPARATION_FOUND
                self.expect("kernel-closed", f"Ker({h.name}) @ {self.carrier.label(x)}",
                            expected, result.verdict.kind)


def exhaustive_theorem_suite(group: BishopGroup, family: ProbeFamily = None, homs: Sequence[BishopHom] = None,
                             budget: int = 64, bound: int = DEFAULT_SUITE_BOUND, depth: int = 3,
                             cap: int = 64) -> SuiteReport:
    """
    列舉全部子集與子群，以合成的證據執行每個閉集轉換器，並與暴力基準比較

    Args:
        group: 有限群
        family: 探測函數族（預設由拓撲建立）
        homs: 核檢查用的同態（預設為 kernel_homs）
        budget: 正值判定步數
        bound: 載體大小上限

    Returns:
        SuiteReport: 不一致清單（預期為空）與重播統計

    Raises:
        CarrierTooLarge: 載體大於 bound
    """
    elements = group.elements()
    if len(elements) > bound:
        raise CarrierTooLarge(len(elements), bound)
    family = family or build_family(group.topology, depth, cap)
    run = _SuiteRun(group, family, budget)
    subsets = all_subsets(elements)
    run.report.subsets_checked = len(subsets)
    subgroups: List[SubgroupView] = []
    for points in subsets:
        try:
            subgroups.append(subgroup(group, run.subset(points)))
        except NotASubgroup:
            continue
    run.report.subgroups = [H.name for H in subgroups]
    opens = [points for points in subsets if is_open(open_from_finite(run.subset(points), run.fns, budget), budget)]

    run.expect("zero-closed-iff-separating", group.name, VerdictKind.ACCEPTED,
               separating_iff_zero_closed(group, run.fns, budget).kind)
    run.expect("commutator-identities", group.name, VerdictKind.ACCEPTED,
               commutator_maps(group).check_identities().kind)
    run.closure_checks(subsets)
    run.closed_set_checks(subsets)
    for H in subgroups:
        run.open_subgroup_check(H)
        run.closure_subgroup_check(H)
        run.abelian_check(H)
        run.center_check(H)
        run.normal_checks(H)
        run.normalizer_check(H)
        run.char_checks(H, opens)
    run.clopen_complement_checks(subsets)
    run.kernel_checks(kernel_homs(group) if homs is None else homs)
    return run.report


"""有限探測函數族 - 以子基底為生成元、深度有界的組合封閉"""
from typing import Any, Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field

from bishop.space import CertFn, Topology, TopologyKind
from bishop.types import Verdict, VerdictKind

PRECISION = 20


class ProbeFamily(BaseModel):
    """
    ∀f ∈ F 與 ∃f ∈ F 的有限替身

    realized 依生成順序排列；以值表簽名去重，大小不超過 cap。
    """
    model_config = ConfigDict(arbitrary_types_allowed=True)

    topology: Topology
    generators: List[str]
    depth: int
    cap: int
    realized: List[CertFn] = Field(default_factory=list)
    signatures: List[Tuple[Any, ...]] = Field(default_factory=list)
    truncated: bool = False

    def __iter__(self):
        return iter(self.realized)

    def __len__(self) -> int:
        return len(self.realized)

    @property
    def names(self) -> List[str]:
        return [f.name for f in self.realized]

    @property
    def exact(self) -> bool:
        """完全拓撲的有限載體上，族內含全部單點指示函數，結論不依賴族"""
        return self.topology.carrier.is_finite and self.topology.kind in (
            TopologyKind.FULL, TopologyKind.TRIVIAL)

    def find(self, name: str) -> Optional[CertFn]:
        return next((f for f in self.realized if f.name == name), None)

    def audit(self, probes: Sequence[Any] = None, tol=None, depth: int = 3, budget: int = 64) -> Verdict:
        """每個成員的證書都必須通過檢查"""
        for f in self.realized:
            result = f.check(probes, tol, depth, budget)
            if not result.accepted:
                return result.model_copy(update={"witness_fn": f.name})
        return Verdict(kind=VerdictKind.ACCEPTED, probes_used=len(self.realized), exact=False)


def _signature_points(topology: Topology, probes: int, seed: int, radius: int) -> List[Any]:
    carrier = topology.carrier
    if carrier.is_finite:
        return carrier.elements()
    return carrier.sample(probes, seed, radius)


def _signature(f: CertFn, points: Sequence[Any]) -> Tuple[Any, ...]:
    values = []
    for x in points:
        value = f(x)
        if value.exact is not None:
            values.append(value.exact)
        else:
            interval = value.approx(PRECISION)
            values.append((interval.lo, interval.hi))
    return tuple(values)


def _unary(f: CertFn) -> List[CertFn]:
    return [-f, abs(f), f.shift(1), f.shift(-1)]


def _binary(f: CertFn, g: CertFn) -> List[CertFn]:
    return [f.maximum(g), f.minimum(g), f + g]


def build_family(topology: Topology, depth: int = 3, cap: int = 64, probes: int = 32,
                 seed: int = 0, radius: int = 4) -> ProbeFamily:
    """
    建立探測函數族

    生成元為子基底與常數 1；每一輪對上一輪的新成員取 -f、|f|、f ± 1，
    並與每個生成元取 ∨、∧、+。

    Args:
        topology: 拓撲
        depth: 組合輪數
        cap: 族的大小上限
        probes: 無限載體上簽名用的探針數
        seed: 探針種子
        radius: 探針半徑

    Returns:
        ProbeFamily: 已去重的族
    """
    points = _signature_points(topology, probes, seed, radius)
    base = [topology.leaf(i) for i in range(len(topology.subbase))] + [topology.constant(1)]
    family = ProbeFamily(topology=topology, generators=[f.name for f in base], depth=depth, cap=cap)
    seen: Dict[Tuple[Any, ...], str] = {}

    def admit(f: CertFn) -> bool:
        if len(family.realized) >= cap:
            family.truncated = True
            return False
        signature = _signature(f, points)
        if signature in seen:
            return False
        seen[signature] = f.name
        family.realized.append(f)
        family.signatures.append(signature)
        return True

    frontier = [f for f in base if admit(f)]
    generators = list(frontier)
    for _ in range(depth):
        fresh: List[CertFn] = []
        for f in frontier:
            for candidate in _unary(f) + [c for g in generators for c in _binary(f, g)]:
                if admit(candidate):
                    fresh.append(candidate)
                if family.truncated:
                    return family
        if not fresh:
            break
        frontier = fresh
    return family


def family_for(topology: Topology, config) -> ProbeFamily:
    """依引擎設定建立族"""
    return build_family(topology, depth=config.depth, cap=config.family_cap, probes=config.probes,
                        seed=config.seed, radius=config.probe_radius)


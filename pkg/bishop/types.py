"""資料類型定義模組"""
from typing import Optional, Dict, Any, List, Callable, Tuple
from enum import Enum
from pydantic import BaseModel, ConfigDict, Field, field_serializer


class VerdictKind(str, Enum):
    """判定種類"""
    POSITIVE = "Positive"
    NON_POSITIVE = "NonPositive"
    EQUAL = "Equal"
    APART = "Apart"
    ACCEPTED = "Accepted"
    REJECTED = "Rejected"
    MEMBER = "Member"
    NON_MEMBER = "NonMember"
    IN_CLOSURE = "InClosureSoFar"
    EXCLUDED_BY = "ExcludedBy"
    SEPARATED = "Separated"
    NOT_SEPARATED = "NotSeparated"
    NO_SEPARATION = "NoSeparation"
    SEPARATION_FOUND = "SeparationFound"
    PRECONDITION_UNVERIFIED = "PreconditionUnverified"
    IMPOSSIBLE = "Impossible"
    UNKNOWN = "Unknown"


# 會讓命令以退出碼 1 結束的判定
FAILING_KINDS = {VerdictKind.REJECTED, VerdictKind.SEPARATION_FOUND}


def dyadic_json(value: Any) -> Any:
    """二進分數序列化為 {mantissa, exponent}"""
    if value is None:
        return None
    to_json = getattr(value, "to_json", None)
    return to_json() if to_json else str(value)


class Verdict(BaseModel):
    """三值（或多值）判定結果"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kind: VerdictKind
    bound: Optional[Any] = None  # Dyadic
    witness_fn: Optional[str] = None
    point: Optional[str] = None
    probes_used: int = 0
    exact: bool = True  # False 表示僅相對於探針或函數族
    detail: Optional[str] = None

    @field_serializer("bound")
    def _serialize_bound(self, bound: Any):
        return dyadic_json(bound)

    @property
    def outcome(self) -> str:
        if self.kind in FAILING_KINDS:
            return "fail"
        if self.kind == VerdictKind.UNKNOWN:
            return "unknown"
        return "ok"

    @property
    def is_positive(self) -> bool:
        return self.kind == VerdictKind.POSITIVE

    @property
    def is_member(self) -> bool:
        return self.kind == VerdictKind.MEMBER

    @property
    def accepted(self) -> bool:
        return self.kind == VerdictKind.ACCEPTED

    def to_json(self) -> Dict[str, Any]:
        data = self.model_dump(exclude_none=True)
        data["verdict"] = data.pop("kind").value if isinstance(data.get("kind"), Enum) else data.pop("kind")
        return data


def verdict(kind: VerdictKind, **fields) -> Verdict:
    """建立判定的簡寫"""
    return Verdict(kind=kind, **fields)


class StepKind(str, Enum):
    """見證鏈步驟類型"""
    QUERY = "query"
    POSITIVITY = "positivity"
    MEMBERSHIP = "membership"
    INCLUSION = "inclusion"
    COMPUTE = "compute"
    HYPOTHESIS = "hypothesis"


class ChainStep(BaseModel):
    """見證鏈中的一步；*_obj 欄位只用於重播，不序列化"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    kind: StepKind
    note: str
    point: Optional[str] = None
    fn: Optional[str] = None
    bound: Optional[Any] = None
    set_name: Optional[str] = None
    fn_obj: Any = Field(default=None, exclude=True)
    point_obj: Any = Field(default=None, exclude=True)
    member_obj: Optional[Callable] = Field(default=None, exclude=True)
    check: Optional[Callable[[], bool]] = Field(default=None, exclude=True)

    @field_serializer("bound")
    def _serialize_bound(self, bound: Any):
        return dyadic_json(bound)


class WitnessChain(BaseModel):
    """定理轉換器產生的見證鏈"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    theorem: str
    steps: List[ChainStep] = Field(default_factory=list)

    def record(self, kind: StepKind, note: str, **fields) -> ChainStep:
        step = ChainStep(kind=kind, note=note, **fields)
        self.steps.append(step)
        return step

    def replay(self, budget: int) -> Verdict:
        """重新驗證每一個正值與成員關係步驟"""
        # 延遲匯入以避免循環
        from bishop.exactreal import certify_positive

        for index, step in enumerate(self.steps):
            if step.kind == StepKind.POSITIVITY and step.fn_obj is not None:
                again = certify_positive(step.fn_obj(step.point_obj), budget)
                if not again.is_positive:
                    return Verdict(kind=VerdictKind.REJECTED, point=step.point,
                                   detail=f"第 {index} 步正值無法重新驗證：{step.note}")
            elif step.kind in (StepKind.MEMBERSHIP, StepKind.INCLUSION) and step.member_obj is not None:
                again = step.member_obj(step.point_obj, budget)
                if not again.is_member:
                    return Verdict(kind=VerdictKind.REJECTED, point=step.point,
                                   detail=f"第 {index} 步成員關係無法重新驗證：{step.note}")
            elif step.kind == StepKind.COMPUTE and step.check is not None:
                if not step.check():
                    return Verdict(kind=VerdictKind.REJECTED, point=step.point,
                                   detail=f"第 {index} 步計算無法重現：{step.note}")
        return Verdict(kind=VerdictKind.ACCEPTED, probes_used=len(self.steps))


class TheoremResult(BaseModel):
    """定理轉換器的輸出"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    theorem: str
    verdict: Verdict
    point: Optional[str] = None
    chain: WitnessChain

    def to_json(self) -> Dict[str, Any]:
        return {
            "theorem": self.theorem,
            "point": self.point,
            "verdict": self.verdict.to_json(),
            "chain": [step.model_dump(exclude_none=True) for step in self.chain.steps],
        }


class Discrepancy(BaseModel):
    """引擎與暴力預言機不一致的紀錄"""
    check: str
    instance: str
    expected: str
    got: str


class SuiteReport(BaseModel):
    """窮舉定理測試報告"""
    group: str
    topology: str
    subsets_checked: int = 0
    subgroups: List[str] = Field(default_factory=list)
    checks_run: Dict[str, int] = Field(default_factory=dict)
    discrepancies: List[Discrepancy] = Field(default_factory=list)
    chains_replayed: int = 0
    unreplayable: int = 0
    family_relative: bool = False

    @property
    def ok(self) -> bool:
        return not self.discrepancies and self.unreplayable == 0

    def count(self, check: str, amount: int = 1):
        self.checks_run[check] = self.checks_run.get(check, 0) + amount


class CommandResult(BaseModel):
    """命令執行結果；exclude 的欄位只供控制台日誌使用"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    command: str
    ok: bool
    data: Optional[Dict[str, Any]] = None
    error: Optional[str] = None
    hint: Optional[str] = None
    exit_code: int = 0
    latency_ms: int = Field(default=0, exclude=True)
    verdicts: List[Tuple[str, Verdict]] = Field(default_factory=list, exclude=True)
    chains: List[WitnessChain] = Field(default_factory=list, exclude=True)
    report: Optional[SuiteReport] = Field(default=None, exclude=True)

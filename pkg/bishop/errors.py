"""錯誤處理類別"""


class EngineError(Exception):
    """引擎執行基礎錯誤"""
    def __init__(self, message: str, component: str = None):
        self.message = message
        self.component = component
        super().__init__(self.message)


class MalformedCert(EngineError):
    """證書引用了不存在的子基底成員"""
    def __init__(self, index: int, subbase_size: int = 0):
        message = f"證書引用子基底索引 {index}，但子基底只有 {subbase_size} 個成員"
        super().__init__(message, "space")
        self.index = index
        self.subbase_size = subbase_size


class MissingCert(EngineError):
    """態射缺少某個子基底成員的提升證書"""
    def __init__(self, subbase_name: str, morphism: str = None):
        where = f"（態射 {morphism}）" if morphism else ""
        message = f"缺少 {subbase_name} 的提升證書{where}"
        super().__init__(message, "morphism")
        self.subbase_name = subbase_name
        self.morphism = morphism


class MorphismMismatch(EngineError):
    """合成時拓撲不相符"""
    def __init__(self, left: str, right: str):
        message = f"無法合成：{left} 的值域與 {right} 的定義域不同"
        super().__init__(message, "morphism")
        self.left = left
        self.right = right


class ClosureFailure(EngineError):
    """逐點運算的結果未通過提升檢查"""
    def __init__(self, operation: str, detail: str = ""):
        message = f"逐點運算 {operation} 的結果不是 Bishop 態射：{detail}"
        super().__init__(message, "group")
        self.operation = operation


class ClassificationFailure(EngineError):
    """同態分類失敗"""
    def __init__(self, probe: str, expected: str, got: str):
        message = f"探針 {probe} 上 h(q) = {got}，但 a·q = {expected}，超出容差"
        super().__init__(message, "group")
        self.probe = probe
        self.expected = expected
        self.got = got


class EvidenceFailure(EngineError):
    """閉包證據的回應無效"""
    def __init__(self, reason: str, point: str = None):
        where = f"（點 {point}）" if point is not None else ""
        message = f"閉包證據無效{where}：{reason}"
        super().__init__(message, "evidence")
        self.reason = reason
        self.point = point


class InclusionViolation(EngineError):
    """包含關係 U(f) ⊆ O 在探針上不成立"""
    def __init__(self, point: str, open_set: str = ""):
        message = f"點 {point} 在 U(f) 中但不在開集 {open_set} 中"
        super().__init__(message, "nbhd")
        self.point = point


class PreconditionUnmet(EngineError):
    """定理的前提條件不成立"""
    def __init__(self, requirement: str):
        message = f"前提條件不成立：{requirement}"
        super().__init__(message, "closedsets")
        self.requirement = requirement


class GroupLawViolation(EngineError):
    """群公理檢查失敗"""
    def __init__(self, law: str, witness: str):
        message = f"群公理 {law} 在 {witness} 不成立"
        super().__init__(message, "group")
        self.law = law
        self.witness = witness


class NotASubgroup(EngineError):
    """子集不是子群"""
    def __init__(self, reason: str):
        super().__init__(f"不是子群：{reason}", "closedsets")
        self.reason = reason


class CarrierTooLarge(EngineError):
    """有限載體超出暴力枚舉上限"""
    def __init__(self, size: int, bound: int):
        message = f"載體大小 {size} 超過暴力枚舉上限 {bound}"
        super().__init__(message, "oracle")
        self.size = size
        self.bound = bound


class DslSyntaxError(EngineError):
    """定義語言語法錯誤"""
    def __init__(self, line: int, col: int, detail: str):
        message = f"語法錯誤（第 {line} 行，第 {col} 欄）：{detail}"
        super().__init__(message, "dsl")
        self.line = line
        self.col = col


class SemanticError(EngineError):
    """定義語言中引用了未定義的名稱"""
    def __init__(self, name: str, detail: str = "未定義的名稱"):
        super().__init__(f"{detail}：{name}", "dsl")
        self.name = name


class InvalidTable(EngineError):
    """群乘法表無效"""
    def __init__(self, reason: str):
        super().__init__(f"群乘法表無效：{reason}", "dsl")
        self.reason = reason


class UnknownCommand(EngineError):
    """未知的命令或定理名稱"""
    def __init__(self, name: str):
        super().__init__(f"未知的命令：{name}", "cli")
        self.name = name


class ConfigError(EngineError):
    """設定檔或旗標驗證失敗"""
    def __init__(self, detail: str):
        super().__init__(f"設定錯誤：{detail}", "config")
        self.detail = detail


# 失敗時的處理建議
RECOVERY_HINTS = {
    "MalformedCert": "檢查證書中的 FromSubbase 索引是否落在子基底範圍內",
    "MissingCert": "為值域子基底的每個成員提供 g₀∘h 的證書",
    "MorphismMismatch": "確認前一個態射的值域就是後一個態射的定義域",
    "ClosureFailure": "檢查參與逐點運算的態射是否都已驗證",
    "ClassificationFailure": "該映射在容差內不是線性的，請檢查同態證書",
    "EvidenceFailure": "回應者回傳的點不在集合中或不滿足正值條件",
    "InclusionViolation": "開集見證的 U(f) 超出了開集，請換一個見證函數",
    "PreconditionUnmet": "先確認子群的開性或閉性見證，再執行此定理",
    "GroupLawViolation": "檢查群運算表或運算定義",
    "NotASubgroup": "子集必須包含單位元並對加法與取逆封閉",
    "CarrierTooLarge": "縮小載體，或在設定中提高 carrier_bound",
    "DslSyntaxError": "依錯誤位置修正定義檔語法",
    "SemanticError": "先宣告再引用名稱",
    "InvalidTable": "乘法表必須是拉丁方並包含宣告的單位元",
    "UnknownCommand": "使用 --help 查看可用的命令與定理",
    "ConfigError": "檢查 settings.yaml、環境變數與命令列旗標",
}


def get_recovery_hint(error_name: str) -> str:
    """取得錯誤發生時的處理建議"""
    return RECOVERY_HINTS.get(error_name, f"錯誤 '{error_name}'，請檢查輸入定義或稍後重試")

"""命令基礎 - 統一處理計時、錯誤、退出碼與定義檔載入"""
import time
from pathlib import Path
from typing import Any, Callable, Dict, List, Sequence, Tuple

from bishop.errors import EngineError, get_recovery_hint
from bishop.types import CommandResult, Verdict
from dsl.builder import Workspace, build
from dsl.parser import parse_file

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_UNKNOWN = 2


def load_workspace(path: str) -> Workspace:
    """
    從定義檔建立工作區

    Raises:
        FileNotFoundError: 檔案不存在
        DslSyntaxError / SemanticError / InvalidTable: 定義無效
    """
    file_path = Path(path)
    if not file_path.exists():
        raise FileNotFoundError(f"定義檔不存在：{file_path}")
    return build(parse_file(str(file_path)))


def entry(label: str, result: Verdict, **extra: Any) -> Dict[str, Any]:
    """單一判定的 JSON 項目"""
    item = {"name": label, **result.to_json()}
    item.update({k: v for k, v in extra.items() if v is not None})
    return item


def exit_code_for(verdicts: Sequence[Tuple[str, Verdict]], failed: bool = False) -> int:
    """0：全部非失敗；1：有反駁或失敗；2：有 Unknown"""
    outcomes = {result.outcome for _, result in verdicts}
    if failed or "fail" in outcomes:
        return EXIT_FAILURE
    if "unknown" in outcomes:
        return EXIT_UNKNOWN
    return EXIT_OK


def wrap_command_run(command: str, func: Callable, *args, **kwargs) -> CommandResult:
    """
    包裝命令執行，統一處理計時和錯誤

    func 回傳 {"data", "verdicts", "chains", "report", "failed"}，只有 data 是必要的。

    Args:
        command: 命令名稱
        func: 要執行的函數
        *args, **kwargs: 函數參數

    Returns:
        CommandResult: 統一的命令執行結果
    """
    start_time = time.time()

    try:
        result = func(*args, **kwargs)
        latency_ms = int((time.time() - start_time) * 1000)

        verdicts: List[Tuple[str, Verdict]] = result.get("verdicts", [])
        exit_code = exit_code_for(verdicts, result.get("failed", False))
        return CommandResult(
            command=command,
            ok=exit_code != EXIT_FAILURE,
            data=result["data"],
            exit_code=exit_code,
            latency_ms=latency_ms,
            verdicts=verdicts,
            chains=result.get("chains", []),
            report=result.get("report"),
        )

    except EngineError as e:
        # 引擎定義的錯誤附帶處理建議
        latency_ms = int((time.time() - start_time) * 1000)
        return CommandResult(
            command=command,
            ok=False,
            error=str(e),
            hint=get_recovery_hint(type(e).__name__),
            exit_code=EXIT_FAILURE,
            latency_ms=latency_ms
        )

    except FileNotFoundError as e:
        latency_ms = int((time.time() - start_time) * 1000)
        return CommandResult(
            command=command,
            ok=False,
            error=f"找不到檔案：{str(e)}",
            exit_code=EXIT_FAILURE,
            latency_ms=latency_ms
        )

    except Exception as e:
        # 其他未預期錯誤
        latency_ms = int((time.time() - start_time) * 1000)
        return CommandResult(
            command=command,
            ok=False,
            error=f"命令執行失敗：{str(e)}",
            exit_code=EXIT_FAILURE,
            latency_ms=latency_ms
        )

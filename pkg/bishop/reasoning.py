"""Rich 控制台日誌模組；JSON 走 stdout，這裡的輸出全部走 stderr"""
from typing import Any, Dict, Sequence, Tuple

from rich.console import Console
from rich.panel import Panel
from rich.rule import Rule
from rich.table import Table

from bishop.types import CommandResult, SuiteReport, Verdict, WitnessChain

console = Console(stderr=True, width=100)

_VERDICT_STYLE = {
    "ok": "green",
    "fail": "red",
    "unknown": "yellow",
}


def set_quiet(quiet: bool):
    """--quiet：關閉所有控制台輸出"""
    console.quiet = quiet


def log_command(command: str, summary: Dict[str, Any]):
    """記錄命令開始與工作區摘要"""
    console.print()
    console.print(Rule(f"🔍 命令：{command}", style="blue"))

    info_text = f"""載體：{summary.get('carrier', 'unknown')}
拓撲：{summary.get('topology', 'unknown')}
群：{summary.get('group') or '無'}"""

    subbase = summary.get("subbase") or []
    if subbase:
        shown = ", ".join(subbase[:8]) + (" …" if len(subbase) > 8 else "")
        info_text += f"\n子基底：{shown}"
    if summary.get("fns"):
        info_text += f"\n具名函數：{', '.join(summary['fns'])}"
    if summary.get("sets"):
        info_text += "\n具名集合："
        for name, label in summary["sets"].items():
            info_text += f"\n  • {name} = {label}"

    console.print(Panel(info_text, title="🎯 定義摘要", style="cyan"))


def log_config(config):
    """記錄本次使用的引擎設定"""
    table = Table(show_header=True, header_style="bold magenta")
    table.add_column("參數", style="cyan", width=16)
    table.add_column("值", style="yellow")
    for name, value in config.model_dump().items():
        table.add_row(name, str(value))
    console.print(table)


def log_verdicts(title: str, rows: Sequence[Tuple[str, Verdict]]):
    """以表格列出每一項判定"""
    console.print()
    console.print(Rule(f"🧠 {title}", style="magenta"))

    table = Table(show_header=True, header_style="bold magenta")
    table.add_column("項目", style="cyan", width=28)
    table.add_column("判定", width=22)
    table.add_column("見證", style="green", width=20)
    table.add_column("說明", style="white")

    for label, result in rows:
        style = _VERDICT_STYLE[result.outcome]
        relative = "" if result.exact else " *"
        table.add_row(
            label,
            f"[{style}]{result.kind.value}{relative}[/{style}]",
            result.witness_fn or "",
            (result.detail or "")[:40],
        )

    console.print(table)
    if any(not result.exact for _, result in rows):
        console.print("  * 僅相對於探針或函數族", style="dim")


def log_chain(chain: WitnessChain):
    """記錄定理轉換器的見證鏈"""
    console.print()
    console.print(Rule(f"🔗 見證鏈：{chain.theorem}", style="green"))

    if not chain.steps:
        console.print(Panel("（空鏈）", style="green"))
        return

    chain_text = ""
    for index, step in enumerate(chain.steps):
        chain_text += f"{index:>3}. [{step.kind.value}] {step.note}"
        if step.fn:
            chain_text += f"  f = {step.fn}"
        if step.point:
            chain_text += f"  @ {step.point}"
        chain_text += "\n"

    console.print(Panel(chain_text.rstrip(), title="🧾 步驟", style="green"))


def log_suite(report: SuiteReport):
    """記錄窮舉測試的統計與不一致"""
    console.print()
    console.print(Rule(f"📊 窮舉測試：{report.group}", style="yellow"))

    table = Table(show_header=True, header_style="bold yellow")
    table.add_column("檢查", style="cyan", width=30)
    table.add_column("次數", style="yellow", width=8)
    table.add_column("不一致", width=8)

    failures: Dict[str, int] = {}
    for item in report.discrepancies:
        failures[item.check] = failures.get(item.check, 0) + 1
    for check, runs in sorted(report.checks_run.items()):
        bad = failures.get(check, 0)
        table.add_row(check, str(runs), f"[red]{bad}[/red]" if bad else "0")
    console.print(table)

    summary_text = f"""子集數：{report.subsets_checked}
子群：{', '.join(report.subgroups)}
重播見證鏈：{report.chains_replayed}（無法重播 {report.unreplayable}）
相對於函數族：{'是' if report.family_relative else '否'}"""

    for item in report.discrepancies[:10]:
        summary_text += f"\n❌ {item.check} {item.instance}：預期 {item.expected}，得到 {item.got}"

    console.print(Panel(summary_text, title="🔄 結果", style="green" if report.ok else "red"))


def log_result(result: CommandResult):
    """記錄命令結束狀態"""
    console.print()
    console.print(Rule("✅ 執行結果", style="blue" if result.ok else "red"))

    status_emoji = "✅" if result.ok else "❌"
    result_text = f"""{status_emoji} 命令：{result.command}
退出碼：{result.exit_code}
耗時：{result.latency_ms}ms"""

    if result.error:
        result_text += f"\n錯誤：{result.error}"
    if result.hint:
        result_text += f"\n建議：{result.hint}"

    console.print(Panel(result_text, title="🔧 命令執行", style="blue" if result.ok else "red"))


def log_error(error_msg: str, command: str = None, hint: str = None):
    """記錄錯誤與處理建議"""
    console.print()
    console.print(Rule("⚠️ 錯誤處理", style="red"))

    error_text = f"錯誤：{error_msg}"
    if command:
        error_text = f"命令 '{command}' " + error_text
    if hint:
        error_text += f"\n\n建議：{hint}"

    console.print(Panel(error_text, title="🔧 錯誤", style="red"))


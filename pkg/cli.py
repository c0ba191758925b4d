#!/usr/bin/env python3
"""Bishop 拓撲引擎 CLI 介面：定義檔進，JSON 出（stdout），日誌走 stderr"""
import importlib.util
import os
import sys
from pathlib import Path
from typing import Annotated, Any, Callable, Dict, List, Optional

import typer
from dotenv import load_dotenv
from pydantic import BaseModel

# 載入環境變數 (強制覆蓋系統環境變數)
load_dotenv(override=True)

# 添加專案根目錄到 Python 路徑
sys.path.append(str(Path(__file__).parent))

from bishop.config import DEFAULT_SETTINGS, ENV_PREFIX, load_config
from bishop.reasoning import (
    console, log_chain, log_command, log_config, log_error, log_result, log_suite, log_verdicts, set_quiet,
)
from bishop.types import CommandResult
from commands import certs, closure as closure_cmds, oracle as oracle_cmds, theorems
from commands.base import load_workspace, wrap_command_run
from reporter.summarizer import dumps, write_markdown

app = typer.Typer(help="🧮 Bishop 拓撲引擎")

FIXTURES_DIR = Path(__file__).parent / "fixtures"
# 見證鏈在控制台最多顯示幾條
MAX_LOGGED_CHAINS = 3

DefinitionArg = Annotated[str, typer.Argument(help="定義檔路徑 (如 fixtures/z4_full.bish)")]
PrecisionOpt = Annotated[Optional[int], typer.Option("--precision", help="區間精度 P")]
BudgetOpt = Annotated[Optional[int], typer.Option("--budget", help="正值判定的細化步數 B")]
ProbesOpt = Annotated[Optional[int], typer.Option("--probes", help="ℝ 上的探針數 N")]
DepthOpt = Annotated[Optional[int], typer.Option("--depth", help="Limit 展開與函數族深度 D")]
SeedOpt = Annotated[Optional[int], typer.Option("--seed", help="探針種子 S")]
ConfigOpt = Annotated[Optional[str], typer.Option("--config", help="設定檔路徑（預設 settings.yaml）")]
QuietOpt = Annotated[bool, typer.Option("--quiet", help="關閉 stderr 日誌")]
SetOpt = Annotated[str, typer.Option("--set", help="具名集合或 {p, q} 列舉")]
AtOpt = Annotated[Optional[List[str]], typer.Option("--at", help="要探測的點，可重複")]
EmitOpt = Annotated[Optional[str], typer.Option("--emit-cert", help="證書樹的 JSON 輸出路徑")]
MarkdownOpt = Annotated[Optional[str], typer.Option("--markdown", help="Markdown 報告輸出路徑")]


class Flags(BaseModel):
    """命令列上的共用旗標；None 表示沿用設定檔"""
    precision: Optional[int] = None
    budget: Optional[int] = None
    probes: Optional[int] = None
    depth: Optional[int] = None
    seed: Optional[int] = None
    quiet: bool = False
    config: Optional[str] = None

    def overrides(self) -> Dict[str, Any]:
        values = self.model_dump(exclude={"config", "quiet"})
        if self.quiet:
            values["quiet"] = True
        return values


def _prepare(command: str, definition: str, flags: Flags, func: Callable, *args) -> Dict[str, Any]:
    config = load_config(flags.config, flags.overrides())
    set_quiet(config.quiet)
    log_config(config)
    ws = load_workspace(definition)
    log_command(command, ws.summary())
    return func(ws, config, *args)


def _emit(result: CommandResult):
    """日誌、stdout JSON 與退出碼"""
    if result.error:
        log_error(result.error, result.command, result.hint)
    if result.verdicts:
        log_verdicts(result.command, result.verdicts)
    for chain in result.chains[:MAX_LOGGED_CHAINS]:
        log_chain(chain)
    if result.report is not None:
        log_suite(result.report)
    log_result(result)
    typer.echo(dumps(result.model_dump(exclude_none=True)).decode("utf-8"))
    raise typer.Exit(code=result.exit_code)


def _execute(command: str, definition: str, flags: Flags, func: Callable, *args,
             markdown: Optional[str] = None):
    set_quiet(flags.quiet)
    result = wrap_command_run(command, _prepare, command, definition, flags, func, *args)
    if markdown and result.data is not None:
        write_markdown(markdown, f"{command}：{Path(definition).stem}", suite_report=result.report,
                       verdicts=result.verdicts, chains=result.chains)
    _emit(result)


@app.command("check-cert")
def check_cert(
    definition: DefinitionArg,
    fn: Annotated[Optional[str], typer.Option("--fn", help="只檢查這個具名函數")] = None,
    emit_cert: EmitOpt = None,
    precision: PrecisionOpt = None, budget: BudgetOpt = None, probes: ProbesOpt = None,
    depth: DepthOpt = None, seed: SeedOpt = None, config: ConfigOpt = None, quiet: QuietOpt = False,
):
    """檢查具名函數（或子基底）的拓撲證書"""
    flags = Flags(precision=precision, budget=budget, probes=probes, depth=depth, seed=seed,
                  quiet=quiet, config=config)
    _execute("check-cert", definition, flags, certs.check_certs, fn, emit_cert)


@app.command("check-morphism")
def check_morphism(
    definition: DefinitionArg,
    emit_cert: EmitOpt = None,
    precision: PrecisionOpt = None, budget: BudgetOpt = None, probes: ProbesOpt = None,
    depth: DepthOpt = None, seed: SeedOpt = None, config: ConfigOpt = None, quiet: QuietOpt = False,
):
    """以提升檢查群運算、平移與具名函數的態射證書"""
    flags = Flags(precision=precision, budget=budget, probes=probes, depth=depth, seed=seed,
                  quiet=quiet, config=config)
    _execute("check-morphism", definition, flags, certs.check_morphisms, emit_cert)


@app.command()
def closure(
    definition: DefinitionArg,
    set_spec: SetOpt,
    at: AtOpt = None,
    precision: PrecisionOpt = None, budget: BudgetOpt = None, probes: ProbesOpt = None,
    depth: DepthOpt = None, seed: SeedOpt = None, config: ConfigOpt = None, quiet: QuietOpt = False,
):
    """探測各點是否在集合的閉包中"""
    flags = Flags(precision=precision, budget=budget, probes=probes, depth=depth, seed=seed,
                  quiet=quiet, config=config)
    _execute("closure", definition, flags, closure_cmds.closure, set_spec, at or [])


@app.command()
def complement(
    definition: DefinitionArg,
    set_spec: SetOpt,
    at: AtOpt = None,
    precision: PrecisionOpt = None, budget: BudgetOpt = None, probes: ProbesOpt = None,
    depth: DepthOpt = None, seed: SeedOpt = None, config: ConfigOpt = None, quiet: QuietOpt = False,
):
    """計算 F-補集 X∖F C 的成員與開性見證"""
    flags = Flags(precision=precision, budget=budget, probes=probes, depth=depth, seed=seed,
                  quiet=quiet, config=config)
    _execute("complement", definition, flags, closure_cmds.complement, set_spec, at or [])


@app.command("run-theorem")
def run_theorem(
    name: Annotated[str, typer.Argument(help="定理鍵（見 theorems 命令）")],
    definition: DefinitionArg,
    set_spec: Annotated[Optional[str], typer.Option("--set", help="集合或子群")] = None,
    at: Annotated[Optional[str], typer.Option("--at", help="點 x")] = None,
    other: Annotated[Optional[str], typer.Option("--other", help="第二個點 y 或平移量 x₀")] = None,
    open_spec: Annotated[Optional[str], typer.Option("--open", help="開集 O")] = None,
    modulus: Annotated[Optional[int], typer.Option("--modulus", help="核的約化同態 ℤn → ℤd 的 d")] = None,
    markdown: MarkdownOpt = None,
    precision: PrecisionOpt = None, budget: BudgetOpt = None, probes: ProbesOpt = None,
    depth: DepthOpt = None, seed: SeedOpt = None, config: ConfigOpt = None, quiet: QuietOpt = False,
):
    """執行定理轉換器並輸出見證鏈"""
    flags = Flags(precision=precision, budget=budget, probes=probes, depth=depth, seed=seed,
                  quiet=quiet, config=config)
    args = theorems.TheoremArgs(set_spec=set_spec, at=at, other=other, open_spec=open_spec, modulus=modulus)
    _execute("run-theorem", definition, flags, theorems.run_theorem, name, args, markdown=markdown)


@app.command()
def oracle(
    definition: DefinitionArg,
    set_spec: SetOpt,
    precision: PrecisionOpt = None, budget: BudgetOpt = None, probes: ProbesOpt = None,
    depth: DepthOpt = None, seed: SeedOpt = None, config: ConfigOpt = None, quiet: QuietOpt = False,
):
    """以暴力閉包核對引擎，並為每點合成閉包證據"""
    flags = Flags(precision=precision, budget=budget, probes=probes, depth=depth, seed=seed,
                  quiet=quiet, config=config)
    _execute("oracle", definition, flags, oracle_cmds.oracle, set_spec)


@app.command()
def suite(
    definition: DefinitionArg,
    markdown: MarkdownOpt = None,
    precision: PrecisionOpt = None, budget: BudgetOpt = None, probes: ProbesOpt = None,
    depth: DepthOpt = None, seed: SeedOpt = None, config: ConfigOpt = None, quiet: QuietOpt = False,
):
    """對有限群執行窮舉定理測試"""
    flags = Flags(precision=precision, budget=budget, probes=probes, depth=depth, seed=seed,
                  quiet=quiet, config=config)
    _execute("suite", definition, flags, oracle_cmds.suite, markdown=markdown)


@app.command("theorems")
def list_theorems():
    """列出 run-theorem 可用的定理鍵"""
    typer.echo(dumps(theorems.list_theorems()).decode("utf-8"))


@app.command()
def test(quiet: QuietOpt = False):
    """對 fixtures 中每個有限群定義執行窮舉測試"""
    set_quiet(quiet)
    console.print("🧪 執行所有 fixtures 的窮舉測試...")
    failed = 0
    for path in sorted(FIXTURES_DIR.glob("*.bish")):
        console.print(f"\n{'='*50}")
        console.print(f"🎯 測試定義：{path.name}")
        console.print('='*50)

        try:
            ws = load_workspace(str(path))
        except Exception as e:
            console.print(f"❌ {path.name} - 錯誤：{e}")
            failed += 1
            continue
        if ws.group is None or not ws.carrier.is_finite:
            console.print(f"⏭️  {path.name} - 無有限群，略過")
            continue
        result = wrap_command_run("suite", oracle_cmds.suite, ws, load_config())
        if result.ok:
            console.print(f"✅ {path.name} - 無不一致（{result.latency_ms}ms）")
        else:
            console.print(f"❌ {path.name} - {result.error or '有不一致'}")
            failed += 1
    raise typer.Exit(code=1 if failed else 0)


@app.command()
def setup():
    """檢查環境設定"""
    console.print("🔧 檢查環境設定...")

    # 檢查 Python 版本
    python_version = sys.version_info
    console.print(f"🐍 Python 版本：{python_version.major}.{python_version.minor}.{python_version.micro}")

    # 檢查必要目錄
    root = Path(__file__).parent
    required_dirs = ["bishop", "oracle", "dsl", "commands", "reporter", "fixtures", "tests"]
    for dir_name in required_dirs:
        if (root / dir_name).exists():
            console.print(f"✅ 目錄存在：{dir_name}")
        else:
            console.print(f"❌ 目錄缺失：{dir_name}")

    # 檢查套件
    for package in ["pydantic", "rich", "typer", "orjson", "yaml", "dotenv", "pyparsing", "pytest", "hypothesis"]:
        if importlib.util.find_spec(package) is not None:
            console.print(f"✅ 套件已安裝：{package}")
        else:
            console.print(f"❌ 套件缺失：{package}")

    # 檢查設定檔與環境變數
    try:
        config = load_config()
        console.print(f"✅ 設定檔可用：{DEFAULT_SETTINGS.name}（P={config.precision}, B={config.budget}）")
    except Exception as e:
        console.print(f"❌ 設定檔錯誤：{e}")
    overridden = sorted(k for k in os.environ if k.startswith(ENV_PREFIX))
    if overridden:
        console.print(f"⚠️  環境變數覆蓋設定：{', '.join(overridden)}")
    else:
        console.print("✅ 沒有 BISHOP_* 環境變數覆蓋")

    # 檢查 fixtures
    for path in sorted(FIXTURES_DIR.glob("*.bish")):
        try:
            ws = load_workspace(str(path))
            console.print(f"✅ 定義檔：{path.name} ({ws.topology.name})")
        except Exception as e:
            console.print(f"❌ 定義檔錯誤：{path.name} ({e})")


if __name__ == "__main__":
    app()

"""JSON 輸出與 Markdown 見證鏈報告"""
from pathlib import Path
from typing import Any, Sequence, Tuple

import orjson

from bishop.types import SuiteReport, Verdict, WitnessChain
from .templates import (
    CHAIN_TEMPLATE, CHAINS_HEADER, DISCREPANCY_HEADER, REPORT_HEADER, SUITE_TEMPLATE, VERDICT_HEADER,
)

JSON_OPTIONS = orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS


def dumps(obj: Any) -> bytes:
    """固定格式的 JSON：縮排兩格、鍵排序，相同輸入得到相同位元組"""
    return orjson.dumps(obj, option=JSON_OPTIONS)


def write_json(path: str, obj: Any):
    file_path = Path(path)
    file_path.parent.mkdir(parents=True, exist_ok=True)
    file_path.write_bytes(dumps(obj) + b"\n")


def _cell(value: Any) -> str:
    """表格儲存格內的 | 需要跳脫"""
    return str(value if value is not None else "").replace("|", "\\|")


def render_suite(report: SuiteReport) -> str:
    failures = {}
    for item in report.discrepancies:
        failures[item.check] = failures.get(item.check, 0) + 1
    check_rows = "\n".join(f"| {check} | {runs} | {failures.get(check, 0)} |"
                           for check, runs in sorted(report.checks_run.items()))
    text = SUITE_TEMPLATE.format(
        group=report.group,
        topology=report.topology,
        subsets_checked=report.subsets_checked,
        subgroups=", ".join(report.subgroups),
        chains_replayed=report.chains_replayed,
        unreplayable=report.unreplayable,
        family_relative="是" if report.family_relative else "否",
        status="✅ 無不一致" if report.ok else f"❌ {len(report.discrepancies)} 項不一致",
        check_rows=check_rows,
    )
    if report.discrepancies:
        text += DISCREPANCY_HEADER
        for item in report.discrepancies:
            text += f"| {item.check} | {_cell(item.instance)} | {_cell(item.expected)} | {_cell(item.got)} |\n"
    return text


def render_verdicts(verdicts: Sequence[Tuple[str, Verdict]]) -> str:
    text = VERDICT_HEADER
    for label, result in verdicts:
        text += (f"| {_cell(label)} | {result.kind.value}{'' if result.exact else ' *'} "
                 f"| {_cell(result.witness_fn)} | {_cell(result.detail)} |\n")
    return text


def render_chains(chains: Sequence[WitnessChain]) -> str:
    text = CHAINS_HEADER
    for index, chain in enumerate(chains, 1):
        step_rows = "\n".join(
            f"| {i} | {step.kind.value} | {_cell(step.note)} | {_cell(step.fn)} | {_cell(step.point)} |"
            for i, step in enumerate(chain.steps))
        text += CHAIN_TEMPLATE.format(index=index, theorem=chain.theorem, step_rows=step_rows or "| | | | | |")
    return text


def render_markdown(title: str, suite_report: SuiteReport = None,
                    verdicts: Sequence[Tuple[str, Verdict]] = (),
                    chains: Sequence[WitnessChain] = ()) -> str:
    """
    產生 Markdown 報告

    Args:
        title: 報告標題
        suite_report: 窮舉測試報告
        verdicts: (項目, 判定) 列表
        chains: 要列出的見證鏈

    Returns:
        str: Markdown 文字（不含時間戳，內容只由輸入決定）
    """
    report = REPORT_HEADER.format(title=title)
    if suite_report is not None:
        report += render_suite(suite_report)
    if verdicts:
        report += render_verdicts(verdicts)
    if chains:
        report += render_chains(chains)
    return report


def write_markdown(path: str, title: str = "Bishop 拓撲引擎報告", suite_report: SuiteReport = None,
                   verdicts: Sequence[Tuple[str, Verdict]] = (), chains: Sequence[WitnessChain] = ()):
    file_path = Path(path)
    file_path.parent.mkdir(parents=True, exist_ok=True)
    file_path.write_text(render_markdown(title, suite_report, verdicts, chains), encoding="utf-8")

"""Markdown 報告模板"""

REPORT_HEADER = """# 📊 {title}

"""

SUITE_TEMPLATE = """## 🎯 窮舉定理測試：{group}

- **拓撲**：{topology}
- **子集數**：{subsets_checked}
- **子群**：{subgroups}
- **重播見證鏈**：{chains_replayed}（無法重播 {unreplayable}）
- **相對於函數族**：{family_relative}
- **結論**：{status}

| 檢查 | 次數 | 不一致 |
|------|------|--------|
{check_rows}
"""

DISCREPANCY_HEADER = """
## ❌ 不一致

| 檢查 | 實例 | 預期 | 得到 |
|------|------|------|------|
"""

VERDICT_HEADER = """## 🧠 判定

| 項目 | 判定 | 見證 | 說明 |
|------|------|------|------|
"""

CHAIN_TEMPLATE = """### {index}. {theorem}

| # | 步驟 | 說明 | 函數 | 點 |
|---|------|------|------|----|
{step_rows}
"""

CHAINS_HEADER = """
## 🔗 見證鏈

"""

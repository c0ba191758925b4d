"""引擎設定 - 預設值 → settings.yaml → BISHOP_* 環境變數 → 命令列旗標"""
import os
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from pydantic import BaseModel, Field, ValidationError

from bishop.errors import ConfigError
from bishop.exactreal import Dyadic

DEFAULT_SETTINGS = Path(__file__).resolve().parent.parent / "settings.yaml"
ENV_PREFIX = "BISHOP_"


class EngineConfig(BaseModel):
    """引擎執行參數"""
    precision: int = Field(20, ge=1, le=512, description="區間精度 P")
    budget: int = Field(64, ge=1, le=4096, description="正值判定的細化步數 B")
    probes: int = Field(32, ge=1, le=4096, description="連續載體上的探針點數 N")
    depth: int = Field(3, ge=1, le=16, description="Limit 展開深度與函數族閉包深度 D")
    seed: int = Field(0, ge=0, description="探針抽樣種子 S")
    tol_exponent: int = Field(-10, le=0, description="證書檢查容差 2^tol_exponent")
    probe_radius: int = Field(4, ge=1, description="ℝ 上探針的範圍 [-r, r]")
    carrier_bound: int = Field(8, ge=1, description="暴力閉包的載體上限")
    suite_bound: int = Field(6, ge=1, description="窮舉定理測試的載體上限")
    family_cap: int = Field(64, ge=1, description="探針函數族大小上限")
    quiet: bool = False

    @property
    def tol(self) -> Dyadic:
        return Dyadic.pow2(self.tol_exponent)


def _read_yaml(path: Path) -> Dict[str, Any]:
    if not path.exists():
        return {}
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}
    except yaml.YAMLError as e:
        raise ConfigError(f"{path} 無法解析：{e}")
    if not isinstance(data, dict):
        raise ConfigError(f"{path} 頂層必須是對應表")
    return data.get("engine", data)


def _read_env() -> Dict[str, Any]:
    values = {}
    for name in EngineConfig.model_fields:
        raw = os.getenv(ENV_PREFIX + name.upper())
        if raw is not None and raw != "":
            values[name] = raw
    return values


def load_config(path: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None) -> EngineConfig:
    """
    依序合併設定來源並驗證

    Args:
        path: 設定檔路徑，None 時使用專案根目錄的 settings.yaml
        overrides: 命令列旗標（值為 None 的項目略過）

    Returns:
        EngineConfig: 合併後的設定

    Raises:
        ConfigError: 設定檔格式錯誤或欄位驗證失敗
    """
    settings_path = Path(path) if path else DEFAULT_SETTINGS
    if path and not settings_path.exists():
        raise ConfigError(f"找不到設定檔 {settings_path}")

    merged: Dict[str, Any] = {}
    merged.update(_read_yaml(settings_path))
    merged.update(_read_env())
    merged.update({k: v for k, v in (overrides or {}).items() if v is not None})

    unknown = sorted(set(merged) - set(EngineConfig.model_fields))
    if unknown:
        raise ConfigError(f"未知的設定欄位：{', '.join(unknown)}")
    try:
        return EngineConfig(**merged)
    except ValidationError as e:
        first = e.errors()[0]
        field = ".".join(str(part) for part in first["loc"])
        raise ConfigError(f"{field}：{first['msg']}")

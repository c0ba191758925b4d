"""共用的 pytest fixtures"""
import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT))

from bishop.config import EngineConfig  # noqa: E402
from dsl.builder import load  # noqa: E402

FIXTURES = ROOT / "fixtures"


def fixture_path(name: str) -> str:
    return str(FIXTURES / f"{name}.bish")


@pytest.fixture
def config() -> EngineConfig:
    return EngineConfig()


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    """避免本機的 BISHOP_* 環境變數影響測試"""
    import os

    for key in list(os.environ):
        if key.startswith("BISHOP_"):
            monkeypatch.delenv(key, raising=False)


@pytest.fixture(scope="session")
def z4_full():
    return load(fixture_path("z4_full"))


@pytest.fixture(scope="session")
def z4_trivial():
    return load(fixture_path("z4_trivial"))


@pytest.fixture(scope="session")
def s3_full():
    return load(fixture_path("s3_full"))


@pytest.fixture(scope="session")
def reals():
    return load(fixture_path("reals"))


@pytest.fixture(scope="session")
def load_fixture():
    """依名稱載入 fixtures/ 下的定義檔"""
    return lambda name: load(fixture_path(name))

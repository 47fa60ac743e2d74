"""
Общие фикстуры тестов
"""

import pytest

from trap_kohn.services.model import ModelParams, derive_constants


@pytest.fixture(autouse=True)
def setup_test_env(monkeypatch):
    """Изолируем тесты от окружения разработчика"""
    monkeypatch.delenv("TRAP_KOHN_THREADS", raising=False)
    monkeypatch.delenv("LOG_FILE", raising=False)
    monkeypatch.setenv("LOG_LEVEL", "WARNING")
    monkeypatch.setenv("LOG_FORMAT", "console")
    yield


@pytest.fixture
def params_06() -> ModelParams:
    """Ṽ_c = 0.6: K = 2, ε̃ = 0.8"""
    return ModelParams(vtilde_c=0.6)


@pytest.fixture
def dc_06(params_06):
    return derive_constants(params_06)


@pytest.fixture
def params_0() -> ModelParams:
    return ModelParams(vtilde_c=0.0)


@pytest.fixture
def dc_0(params_0):
    return derive_constants(params_0)


@pytest.fixture
def output_dir(tmp_path):
    """Временная директория для файлов результатов"""
    path = tmp_path / "out"
    path.mkdir()
    return path

import numpy as np
import pytest

from tkrank.algebra.field import field_context
from tkrank.algebra.tk import build_tk

# small enough that accidental zeros show up in tests
SMALL_PRIME = 101


@pytest.fixture
def ctx():
    return field_context()


@pytest.fixture
def small_ctx():
    return field_context(SMALL_PRIME)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def tk():
    """T_k over the default field, built once per k for the session."""
    built = {}

    def build(k):
        if k not in built:
            built[k] = build_tk(k, field_context())
        return built[k]

    return build


@pytest.fixture(autouse=True)
def _isolated_env(monkeypatch, tmp_path):
    for name in ("TKRANK_MODULUS", "TKRANK_SEED", "TKRANK_LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.setenv("TKRANK_OUTPUT_DIR", str(tmp_path / "outputs"))

"""
Pytest configuration and fixtures for test suite.
"""

import os
import sys
from pathlib import Path

import numpy as np
import pytest
from scipy.stats import ortho_group


PROJECT_ROOT = Path(__file__).resolve().parents[1]
SRC_PATH = PROJECT_ROOT / "src"
if SRC_PATH.is_dir():
    sys.path.insert(0, str(SRC_PATH))

from designlab.algebra.hilbert import Configuration, FieldTag  # noqa: E402
from designlab.algebra.quat import qmul  # noqa: E402
from designlab.settings import get_settings  # noqa: E402


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: numerical search reproductions (minutes)")


@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch):
    """Settings are cached per process; clear them so env overrides in one test don't leak."""
    for name in list(os.environ):
        if name.startswith("DESIGNLAB_"):
            monkeypatch.delenv(name, raising=False)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def _random_units(field: FieldTag, shape, rng) -> np.ndarray:
    """Random unit scalars of `field` with the given leading shape, as (..., 4) arrays."""
    q = np.zeros(tuple(shape) + (4,))
    q[..., :field.m] = rng.standard_normal(tuple(shape) + (field.m,))
    return q / np.linalg.norm(q, axis=-1, keepdims=True)


def random_configuration(field, d, n, rng, unit=True, weighted=False) -> Configuration:
    field = FieldTag.parse(field)
    vectors = np.zeros((n, d, 4))
    vectors[:, :, :field.m] = rng.standard_normal((n, d, field.m))
    if unit:
        vectors /= np.sqrt(np.sum(vectors ** 2, axis=(1, 2)))[:, None, None]
    weights = rng.uniform(0.2, 2.0, size=n) if weighted else None
    return Configuration(field, d, vectors, weights)


def regauge(cfg: Configuration, rng) -> Configuration:
    """
    Apply a random unitary U = D2 O D1 (unit-scalar diagonals D, real
    orthogonal O) to every vector and multiply each on the right by a random
    unit scalar.
    """
    d = cfg.dim
    d1 = _random_units(cfg.field, (d,), rng)
    d2 = _random_units(cfg.field, (d,), rng)
    ortho = ortho_group.rvs(d, random_state=rng) if d > 1 else np.eye(1)
    phases = _random_units(cfg.field, (cfg.n,), rng)

    vectors = qmul(d1[None, :, :], cfg.vectors)
    vectors = np.einsum("jk,nkq->njq", ortho, vectors)
    vectors = qmul(d2[None, :, :], vectors)
    vectors = qmul(vectors, phases[:, None, :])
    return Configuration(cfg.field, d, vectors, cfg.weights)


@pytest.fixture
def make_configuration():
    return random_configuration


@pytest.fixture
def apply_regauge():
    return regauge


FIXTURES_DIR = Path(__file__).resolve().parent / "fixtures"


@pytest.fixture
def load_fixture():
    """Read a stored configuration from tests/fixtures by file stem."""
    def _load(name: str) -> Configuration:
        return Configuration.from_json((FIXTURES_DIR / f"{name}.json").read_text(encoding="utf-8"))
    return _load


@pytest.fixture
def fixture_path():
    def _path(name: str) -> Path:
        return FIXTURES_DIR / f"{name}.json"
    return _path

# tests/conftest.py
"""Shared fixtures for the kerrpairs test suite."""

from __future__ import annotations

import numpy as np
import pytest

from kerrpairs.core import lindblad


@pytest.fixture(autouse=True)
def _isolated_env(monkeypatch, tmp_path):
    """No ambient config file, output under tmp_path, default log level."""
    monkeypatch.delenv("KERRPAIRS_CONFIG", raising=False)
    monkeypatch.delenv("KERRPAIRS_LOG_LEVEL", raising=False)
    monkeypatch.setenv("KERRPAIRS_OUTPUT_DIR", str(tmp_path / "out"))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture(params=lindblad.preset_names())
def preset(request):
    """(name, LatticeParams, DriveParams) for each three-cavity preset."""
    lat, drive = lindblad.ring_preset(request.param)
    return request.param, lat, drive


def random_hermitian(rng: np.random.Generator, n: int) -> np.ndarray:
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return 0.5 * (a + a.conj().T)


def random_density_matrix(rng: np.random.Generator, n: int) -> np.ndarray:
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    rho = a @ a.conj().T
    return rho / np.trace(rho)

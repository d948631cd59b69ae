# tests/test_config.py
import copy
import logging

import pytest
from pydantic import ValidationError

from kerrpairs.core.errors import InvalidConfig
from kerrpairs.models.schemas import SteadyStateMethod, SweepWindow
from kerrpairs.shared import DEFAULT_CONFIG, _load_config, configure_logging, load_settings, output_dir
from kerrpairs.utils.config_loader import load_toml, merge_config, parse_override, parse_value


# ── Merging ──────────────────────────────────────────────

def test_precedence():
    file_data = {"continuum": {"kappa": 2.0, "beta": -4.0}}
    merged = merge_config(DEFAULT_CONFIG, file_data, ["continuum.kappa=3.0"])
    assert merged["continuum"]["kappa"] == 3.0
    assert merged["continuum"]["beta"] == -4.0
    assert merged["continuum"]["L"] == DEFAULT_CONFIG["continuum"]["L"]


def test_defaults_not_mutated():
    before = copy.deepcopy(DEFAULT_CONFIG)
    merge_config(DEFAULT_CONFIG, {"lattice": {"ratios": [1.0]}}, ["lattice.N=9"])
    assert DEFAULT_CONFIG == before


@pytest.mark.parametrize("file_data,overrides", [
    ({"nowhere": {"x": 1}}, []),
    ({"continuum": {"gamma": 1}}, []),
    ({"kappa": 1.0}, []),
    (None, ["nowhere.x=1"]),
    (None, ["lattice.gamma=1"]),
])
def test_unknown_entries(file_data, overrides):
    with pytest.raises(InvalidConfig):
        merge_config(DEFAULT_CONFIG, file_data, overrides)


# ── Override parsing ─────────────────────────────────────

@pytest.mark.parametrize("raw,expected", [
    ("0.5", 0.5),
    ("3", 3),
    ("true", True),
    ("[1, 2]", [1, 2]),
    ('"quoted"', "quoted"),
    ("fig3b", "fig3b"),
])
def test_parse_value(raw, expected):
    assert parse_value(raw) == expected


def test_parse_override():
    assert parse_override("epr.W_p = 0.2") == ("epr", "W_p", 0.2)


@pytest.mark.parametrize("item", ["continuum.kappa", "kappa=1", "a.b.c=1", ".x=1"])
def test_malformed_override(item):
    with pytest.raises(InvalidConfig):
        parse_override(item)


# ── Typed sections ───────────────────────────────────────

def test_defaults_validate():
    settings = load_settings()
    assert settings.pump_sweep.method is SteadyStateMethod.AUTO
    assert settings.pump_sweep.window is SweepWindow.AUTO
    assert settings.epr_linear.M == 3


def test_typed_override():
    settings = load_settings(overrides=["pump_sweep.method=iterative", "wigner.xi=2"])
    assert settings.pump_sweep.method is SteadyStateMethod.ITERATIVE
    assert settings.wigner.xi == 2.0


@pytest.mark.parametrize("override,field", [
    ("epr_linear.M=2.5", "M"),
    ('wigner.xi="abc"', "xi"),
    ("pump_sweep.n_points=2.5", "n_points"),
    ("pump_sweep.n_points=2", "n_points"),
    ("continuum.kappa=nan", "kappa"),
    ("output.format=xml", "format"),
])
def test_wrong_types_rejected(override, field):
    with pytest.raises(ValidationError) as exc:
        load_settings(overrides=[override])
    assert field in str(exc.value)


def test_manual_window_must_be_ordered():
    with pytest.raises(ValidationError):
        load_settings(overrides=["pump_sweep.window=manual", "pump_sweep.omega_p_min=2.0",
                                 "pump_sweep.omega_p_max=1.0"])


# ── Files and environment ────────────────────────────────

def test_missing_file(tmp_path):
    with pytest.raises(InvalidConfig):
        load_toml(tmp_path / "absent.toml")


def test_invalid_toml(tmp_path):
    path = tmp_path / "bad.toml"
    path.write_text("[lattice\nN = 3\n", encoding="utf-8")
    with pytest.raises(InvalidConfig):
        load_toml(path)


def test_config_from_environment(tmp_path, monkeypatch):
    path = tmp_path / "run.toml"
    path.write_text("[lattice]\nN = 21\n", encoding="utf-8")
    monkeypatch.setenv("KERRPAIRS_CONFIG", str(path))
    assert _load_config()["lattice"]["N"] == 21
    assert _load_config(overrides=["lattice.N=31"])["lattice"]["N"] == 31


def test_output_dir_from_environment(tmp_path):
    assert output_dir() == (tmp_path / "out").resolve()


@pytest.mark.parametrize("env,verbosity,level", [
    (None, 0, logging.WARNING),
    (None, 1, logging.INFO),
    (None, 2, logging.DEBUG),
    ("ERROR", 0, logging.ERROR),
    ("ERROR", 1, logging.INFO),
])
def test_logging_levels(monkeypatch, env, verbosity, level):
    if env:
        monkeypatch.setenv("KERRPAIRS_LOG_LEVEL", env)
    try:
        configure_logging(verbosity)
        assert logging.getLogger().level == level
    finally:
        logging.captureWarnings(False)

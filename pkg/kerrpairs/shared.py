"""
kerrpairs/shared.py: Shared defaults, paths and file utilities.

Imports nothing from kerrpairs.core beyond the error types and the
settings models (prevents circular imports). The CLI and io modules import from here.
"""

from __future__ import annotations

import logging
import os
import sys
import tempfile
from pathlib import Path
from typing import Any, Dict, Iterable, Optional

from kerrpairs.models.schemas import RunSettings
from kerrpairs.utils.config_loader import load_toml, merge_config

logger = logging.getLogger("kerrpairs.cli")

# ── Defaults ─────────────────────────────────────────────
# Every tolerance and grid knob the solvers expose. Energies under
# [lattice] and [pump_sweep] are in units of |u| while unit = "u".

DEFAULT_CONFIG: Dict[str, Dict[str, Any]] = {
    "numerics": {
        "oracle_abs_tol": 1e-11,
        "kernel_gap_tol": 1e-6,
    },
    "continuum": {
        "kappa": 1.0,
        "beta": -1.0,
        "omega_k0": 0.0,
        "v": 1.0,
        "L": 1.0,
        "n_samples": 201,
        "dx_halfwidth": 6.0,   # units of 1/ξ
        "dk_halfwidth": 6.0,   # units of ξ
    },
    "wigner": {
        "xi": 1.0,
        "dx_halfwidth": 4.0,
        "dk_halfwidth": 4.0,
        "n_dx": 41,
        "n_dk": 41,
        "with_oracle": False,
    },
    "epr": {
        "xi": 1.0,
        "W_p": 0.1,
        "k0": 0.0,
        "n_sum": 512,
        "n_diff": 512,
        "sum_halfwidth": 6.0,
        "diff_halfwidth": 40.0,
        "refine_factor": 2,
    },
    "lattice": {
        "unit": "u",
        "omega_c": 0.0,
        "J0": 1.0,
        "u": 1.0,
        "b": 1.0,
        "N": 51,
        "ratios": [0.1, 0.5, 1.0, 2.0, 4.0],
        "gap_j0_max": 20.0,
        "gap_points": 201,
    },
    "pump_sweep": {
        "preset": "",
        "unit": "u",
        "omega_c": 0.0,
        "J0": 0.1,
        "u": 1.0,
        "F": 0.01,
        "gamma": 0.1,
        "k0": 0.0,
        "M": 3,
        "n_max": 4,
        "window": "auto",
        "omega_p_min": -0.5,
        "omega_p_max": 1.5,
        "n_points": 201,
        "method": "auto",
        "dense_limit": 2_000,
        "far_detuning_factor": 100.0,
        "workers": 4,
    },
    "epr_linear": {
        "M": 3,
        "kappa": 0.5,
        "L": 1.0,
        "omega_k0": 0.0,
    },
    "output": {
        "format": "csv",
        "reproducible": False,
    },
}


# ── Paths ────────────────────────────────────────────────

def output_dir() -> Path:
    """Directory for emitted curve files (KERRPAIRS_OUTPUT_DIR, default ./kerrpairs_output)."""
    return Path(os.environ.get("KERRPAIRS_OUTPUT_DIR", "kerrpairs_output")).resolve()


def config_path_from_env() -> Optional[Path]:
    raw = os.environ.get("KERRPAIRS_CONFIG", "")
    return Path(raw) if raw else None


# ── File Utilities ───────────────────────────────────────

def _atomic_write_text(path: Path, text: str) -> None:
    """Write UTF-8 text atomically via a temp file + rename.
    A killed process never leaves a truncated curve file behind."""
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp_fd, tmp_path = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    try:
        with os.fdopen(tmp_fd, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        os.replace(tmp_path, path)
    except Exception:
        try:
            os.unlink(tmp_path)
        except OSError:
            pass
        raise


# ── Config Management ────────────────────────────────────

def _load_config(
    path: Optional[Path] = None, overrides: Iterable[str] = ()
) -> Dict[str, Dict[str, Any]]:
    """DEFAULT_CONFIG < TOML file (argument or KERRPAIRS_CONFIG) < overrides."""
    path = path or config_path_from_env()
    file_data = load_toml(path) if path else None
    return merge_config(DEFAULT_CONFIG, file_data, overrides)


def load_settings(path: Optional[Path] = None, overrides: Iterable[str] = ()) -> RunSettings:
    """Merged config, type-checked section by section.

    Raises pydantic.ValidationError for wrong-typed or out-of-range values.
    """
    return RunSettings.model_validate(_load_config(path, overrides))


# ── Logging ──────────────────────────────────────────────

_LOG_FORMAT = "%(asctime)s %(levelname)-7s %(name)s: %(message)s"


def configure_logging(verbosity: int = 0) -> None:
    """Root handler on stderr. KERRPAIRS_LOG_LEVEL sets the base level; -v/-vv lower it."""
    level_name = os.environ.get("KERRPAIRS_LOG_LEVEL", "WARNING").upper()
    level = getattr(logging, level_name, logging.WARNING)
    if verbosity >= 2:
        level = min(level, logging.DEBUG)
    elif verbosity == 1:
        level = min(level, logging.INFO)
    logging.basicConfig(level=level, format=_LOG_FORMAT, stream=sys.stderr, force=True)
    logging.captureWarnings(True)

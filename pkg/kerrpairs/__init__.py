# kerrpairs/__init__.py
"""
kerrpairs: two-photon bound states in Kerr wave-guides and resonator chains.

Quick start:
    from kerrpairs import WaveguideParams, bound_state_continuum
    bs = bound_state_continuum(WaveguideParams(kappa=1.0, beta=-1.0))
"""

# Load .env file automatically if present
try:
    from dotenv import load_dotenv
    load_dotenv()
except ImportError:
    pass

__version__ = "0.1.0"

from kerrpairs.core.continuum import (
    bound_state_continuum,
    epr_linear_dispersion,
    epr_uncertainty_product,
    gaussian_pump_state,
    require_bound_state,
    wigner_closed_form,
    wigner_map,
)
from kerrpairs.core.errors import KerrPairsError, NumericalFailure, ValidationFailure
from kerrpairs.core.lattice import bound_state_lattice, exact_diagonalize
from kerrpairs.core.lindblad import pump_sweep, steady_state
from kerrpairs.models.schemas import (
    DriveParams,
    FockBasis,
    LatticeParams,
    WaveguideParams,
)

__all__ = [
    "bound_state_continuum",
    "require_bound_state",
    "wigner_closed_form",
    "wigner_map",
    "gaussian_pump_state",
    "epr_uncertainty_product",
    "epr_linear_dispersion",
    "bound_state_lattice",
    "exact_diagonalize",
    "steady_state",
    "pump_sweep",
    "WaveguideParams",
    "LatticeParams",
    "DriveParams",
    "FockBasis",
    "KerrPairsError",
    "ValidationFailure",
    "NumericalFailure",
]

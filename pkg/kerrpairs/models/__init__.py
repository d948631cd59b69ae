# kerrpairs/models/__init__.py
from kerrpairs.models.results import (
    ContinuumBoundState,
    DensityMatrix,
    EPRResult,
    LatticeBoundState,
    LatticeSpectrum,
    NoBoundState,
    SteadyObservables,
    SweepResult,
)
from kerrpairs.models.schemas import (
    Command,
    DriveParams,
    FockBasis,
    LatticeParams,
    OutputFormat,
    RunConfig,
    WaveguideParams,
)

__all__ = [
    "Command",
    "OutputFormat",
    "RunConfig",
    "WaveguideParams",
    "LatticeParams",
    "DriveParams",
    "FockBasis",
    "ContinuumBoundState",
    "NoBoundState",
    "EPRResult",
    "LatticeBoundState",
    "LatticeSpectrum",
    "DensityMatrix",
    "SteadyObservables",
    "SweepResult",
]

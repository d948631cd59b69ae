# kerrpairs/models/schemas.py
"""
Pydantic parameter and configuration models for kerrpairs.

Every physics parameter set is a frozen value type; field constraints and
validators enforce the invariants at construction so that no solver ever
sees an inconsistent parameter record.
"""

from __future__ import annotations

import itertools
import math
from enum import Enum
from pathlib import Path
from typing import Any, Optional

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    NonNegativeFloat,
    PositiveFloat,
    field_validator,
    model_validator,
)

# Tolerance for "k0 lies on the 2πn/(Nb) grid"
_GRID_TOL = 1e-9


# -- Enums --

class OutputFormat(str, Enum):
    """Serialization of emitted curve files."""
    CSV = "csv"
    JSON = "json"


class Command(str, Enum):
    """CLI sub-commands."""
    CONTINUUM_BOUND = "continuum-bound"
    WIGNER_MAP = "wigner-map"
    EPR = "epr"
    LATTICE = "lattice"
    PUMP_SWEEP = "pump-sweep"
    EPR_LINEAR = "epr-linear"


class MomentumConvention(str, Enum):
    """Which momentum variable a function argument means.

    RELATIVE:         δk = (k1 − k2)/2, conjugate to δx = x1 − x2 (Wigner bracket)
    PAIR_DIFFERENCE:  q = k1 − k2 (argument of the momentum-domain amplitude)
    """
    RELATIVE = "relative"
    PAIR_DIFFERENCE = "pair_difference"


class DomainMapping(str, Enum):
    """Change of variables used when a quadrature bound is infinite."""
    EXPONENTIAL = "exponential"  # x = s·artanh(t), for e^{-c|x|} tails
    ALGEBRAIC = "algebraic"      # x = s·t/(1 − t²), for power-law tails


class AsymptoticRegime(str, Enum):
    STRONG = "strong"  # |u| ≫ |J0|
    WEAK = "weak"      # |J0| ≫ |u|


class SteadyStateMethod(str, Enum):
    AUTO = "auto"            # svd below dense_limit, iterative above
    SVD = "svd"              # dense null vector
    DIRECT = "direct"        # sparse LU with trace row
    ITERATIVE = "iterative"  # ILU-preconditioned LGMRES with trace row


class EnergyUnit(str, Enum):
    """How [lattice] and [pump_sweep] energies are read."""
    U = "u"                # multiples of |u|
    ABSOLUTE = "absolute"


class SweepWindow(str, Enum):
    AUTO = "auto"      # both resonances plus a margin
    MANUAL = "manual"  # omega_p_min .. omega_p_max


class EvolutionMethod(str, Enum):
    EXPM = "expm"  # Krylov-free expm_multiply
    IVP = "ivp"    # adaptive Runge-Kutta


# -- Numerics --

class QuadratureSpec(BaseModel):
    """Domain and tolerances for adaptive 1-D quadrature."""

    model_config = ConfigDict(frozen=True)

    lower: float = -math.inf
    upper: float = math.inf
    abs_tol: float = Field(default=1e-12, gt=0)
    rel_tol: float = Field(default=1e-10, gt=0)
    max_subdivisions: int = Field(default=200, ge=1)
    mapping: DomainMapping = DomainMapping.EXPONENTIAL
    scale: float = Field(default=1.0, gt=0)  # length scale of the mapped tails
    breakpoints: tuple[float, ...] = ()

    @model_validator(mode="after")
    def _ordered(self) -> "QuadratureSpec":
        if not self.lower < self.upper:
            raise ValueError(f"lower ({self.lower}) must be below upper ({self.upper})")
        return self


# -- Continuum --

class WaveguideParams(BaseModel):
    """Kerr wave-guide: dispersion ω_k0 + v δk + β δk²/2, coupling κ, length L (ħ = c = 1)."""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    omega_k0: float = 0.0
    v: float = 1.0
    beta: float
    kappa: float
    L: float = Field(default=1.0, gt=0)

    @property
    def xi(self) -> float:
        """Inverse correlation length |κ/β| (1/length)."""
        return abs(self.kappa / self.beta)


class MaterialParams(BaseModel):
    """Material constants entering κ = πω²χ⁽³⁾/(2 n_r⁴ A ε₀)."""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    omega: float = Field(gt=0)
    chi3: float = Field(gt=0)
    n_r: float = Field(gt=0)
    A: float = Field(gt=0)
    eps0: float = Field(default=1.0, gt=0)


class WignerGridSpec(BaseModel):
    """δx ∈ [−dx_halfwidth/ξ, +], δk ∈ [−dk_halfwidth·ξ, +], n points each."""

    model_config = ConfigDict(frozen=True)

    dx_halfwidth: float = Field(default=4.0, gt=0)
    dk_halfwidth: float = Field(default=4.0, gt=0)
    n_dx: int = Field(default=41, ge=3)
    n_dk: int = Field(default=41, ge=3)


class PumpGridSpec(BaseModel):
    """Lattice in the (k1, k2) plane aligned with the sum and difference axes.

    sum axis:        K − 2k0 ∈ [−sum_halfwidth·W_p, +],  n_sum points
    difference axis: q = k1 − k2 ∈ [−diff_halfwidth·ξ, +], n_diff points
    """

    model_config = ConfigDict(frozen=True)

    n_sum: int = Field(default=512, ge=16)
    n_diff: int = Field(default=512, ge=16)
    sum_halfwidth: float = Field(default=6.0, gt=0)
    diff_halfwidth: float = Field(default=40.0, gt=0)
    refine_factor: int = Field(default=2, ge=2)

    def refined(self) -> "PumpGridSpec":
        """Same extent, refine_factor times the points per axis."""
        return self.model_copy(update={
            "n_sum": self.n_sum * self.refine_factor,
            "n_diff": self.n_diff * self.refine_factor,
        })


# -- Lattice --

class LatticeParams(BaseModel):
    """Periodic Bose-Hubbard chain of N Kerr resonators with pair half-momentum k0."""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    omega_c: float = 0.0
    J: float
    u: float
    b: float = Field(default=1.0, gt=0)
    N: int = Field(default=51, ge=3)
    k0: float = 0.0

    @model_validator(mode="after")
    def _k0_on_grid(self) -> "LatticeParams":
        n = self.k0 * self.N * self.b / (2 * math.pi)
        if abs(n - round(n)) > _GRID_TOL:
            raise ValueError(
                f"k0={self.k0} is not on the 2πn/(Nb) grid (n={n:.6g}, N={self.N}, b={self.b})"
            )
        return self

    @property
    def J0(self) -> float:
        """Energy scale of two free photons at quasi-momentum k0: 4J cos(k0 b)."""
        return 4.0 * self.J * math.cos(self.k0 * self.b)

    @property
    def relative_dim(self) -> int:
        """Dimension of the relative-coordinate block, j = 0..⌊N/2⌋."""
        return self.N // 2 + 1

    @classmethod
    def from_j0(
        cls,
        j0: float,
        u: float,
        omega_c: float = 0.0,
        N: int = 51,
        b: float = 1.0,
    ) -> "LatticeParams":
        """Parameterize by J0 directly (k0 = 0, J = J0/4)."""
        return cls(omega_c=omega_c, J=j0 / 4.0, u=u, b=b, N=N, k0=0.0)


# -- Lindblad --

class DriveParams(BaseModel):
    """Coherent pump F e^{−iω_p t + iψ_j} on every site, photon decay rate γ."""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    F: float = Field(ge=0)
    omega_p: float = 0.0
    psi: tuple[float, ...] = (0.0, 0.0, 0.0)
    gamma: float = Field(gt=0)

    @classmethod
    def with_pair_momentum(
        cls, F: float, gamma: float, k0: float, M: int = 3, b: float = 1.0, omega_p: float = 0.0,
    ) -> "DriveParams":
        """Phases ψ_j = 2·k0·b·j select total pair momentum 2k0."""
        return cls(F=F, gamma=gamma, omega_p=omega_p,
                   psi=tuple(2.0 * k0 * b * j for j in range(M)))


class FockBasis(BaseModel):
    """Truncated Fock space of M modes, occupations 0..n_max each.

    States are enumerated lexicographically over (m_1, ..., m_M) with m_1 the
    most significant digit, which matches Kronecker ordering site 1 ⊗ ... ⊗ site M.
    """

    model_config = ConfigDict(frozen=True)

    M: int = Field(default=3, ge=1)
    n_max: int = Field(default=4, ge=1)

    @property
    def local_dim(self) -> int:
        return self.n_max + 1

    @property
    def dim(self) -> int:
        return self.local_dim ** self.M

    def states(self) -> list[tuple[int, ...]]:
        return list(itertools.product(range(self.local_dim), repeat=self.M))

    def index(self, occupations: tuple[int, ...]) -> int:
        if len(occupations) != self.M or any(not 0 <= m <= self.n_max for m in occupations):
            raise ValueError(f"occupations {occupations} outside basis (M={self.M}, n_max={self.n_max})")
        idx = 0
        for m in occupations:
            idx = idx * self.local_dim + m
        return idx


# -- Config sections --
# One model per TOML section. Defaults live in shared.DEFAULT_CONFIG; these
# only type-check the merged values before a command runs.

class _Section(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)


class NumericsSettings(_Section):
    oracle_abs_tol: PositiveFloat
    kernel_gap_tol: PositiveFloat


class ContinuumSettings(_Section):
    kappa: float
    beta: float
    omega_k0: float
    v: float
    L: PositiveFloat
    n_samples: int = Field(ge=3)
    dx_halfwidth: PositiveFloat
    dk_halfwidth: PositiveFloat


class WignerSettings(_Section):
    xi: PositiveFloat
    dx_halfwidth: PositiveFloat
    dk_halfwidth: PositiveFloat
    n_dx: int = Field(ge=3)
    n_dk: int = Field(ge=3)
    with_oracle: bool


class EPRSettings(_Section):
    xi: PositiveFloat
    W_p: PositiveFloat
    k0: float
    n_sum: int = Field(ge=16)
    n_diff: int = Field(ge=16)
    sum_halfwidth: PositiveFloat
    diff_halfwidth: PositiveFloat
    refine_factor: int = Field(ge=2)


class LatticeSettings(_Section):
    unit: EnergyUnit
    omega_c: float
    J0: float
    u: float
    b: PositiveFloat
    N: int = Field(ge=3)
    ratios: list[float]
    gap_j0_max: PositiveFloat
    gap_points: int = Field(ge=2)

    def energy_scale(self) -> float:
        """Multiplier turning configured energies into absolute ones."""
        return abs(self.u) if self.unit is EnergyUnit.U else 1.0


class PumpSweepSettings(_Section):
    preset: str
    unit: EnergyUnit
    omega_c: float
    J0: float
    u: float
    F: NonNegativeFloat
    gamma: PositiveFloat
    k0: float
    M: int = Field(ge=1)
    n_max: int = Field(ge=1)
    window: SweepWindow
    omega_p_min: float
    omega_p_max: float
    n_points: int = Field(ge=3)
    method: SteadyStateMethod
    dense_limit: int = Field(ge=1)
    far_detuning_factor: NonNegativeFloat
    workers: int = Field(ge=1)

    @model_validator(mode="after")
    def _window_ordered(self) -> "PumpSweepSettings":
        if self.window is SweepWindow.MANUAL and not self.omega_p_min < self.omega_p_max:
            raise ValueError(
                f"omega_p_min ({self.omega_p_min}) must be below omega_p_max ({self.omega_p_max})"
            )
        return self

    def energy_scale(self) -> float:
        return abs(self.u) if self.unit is EnergyUnit.U else 1.0


class EPRLinearSettings(_Section):
    M: int = Field(ge=2)
    kappa: float
    L: PositiveFloat
    omega_k0: float


class OutputSettings(_Section):
    format: OutputFormat
    reproducible: bool


class RunSettings(BaseModel):
    """The merged configuration, every section type-checked."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    numerics: NumericsSettings
    continuum: ContinuumSettings
    wigner: WignerSettings
    epr: EPRSettings
    lattice: LatticeSettings
    pump_sweep: PumpSweepSettings
    epr_linear: EPRLinearSettings
    output: OutputSettings

    def section(self, name: str) -> _Section:
        return getattr(self, name)


# -- CLI --

class RunConfig(BaseModel):
    """One CLI invocation after config-file and flag merging."""

    command: Command
    params: dict[str, Any] = Field(default_factory=dict)
    out: Optional[Path] = None
    format: OutputFormat = OutputFormat.CSV
    reproducible: bool = False

    @field_validator("params")
    @classmethod
    def _params_are_flat(cls, value: dict[str, Any]) -> dict[str, Any]:
        for key, item in value.items():
            if isinstance(item, dict):
                raise ValueError(f"parameter '{key}' must be a scalar or list, not a table")
        return value

# kerrpairs/models/results.py
"""
Result models returned by the solvers.

These carry numpy arrays, so they allow arbitrary types; all are frozen and
safe to hand between threads.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from kerrpairs.models.schemas import FockBasis, MomentumConvention, PumpGridSpec


class _ArrayModel(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)


# -- Numerics --

class EigenDecomposition(_ArrayModel):
    eigenvalues: np.ndarray   # real, ascending
    eigenvectors: np.ndarray  # orthonormal columns


class QuadratureResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    value: float
    error: float


# -- Continuum --

class NoBoundState(BaseModel):
    """Typed outcome for κβ ≥ 0: only scattering states exist."""

    model_config = ConfigDict(frozen=True)

    kappa: float
    beta: float
    reason: str


class ContinuumBoundState(BaseModel):
    """Wave-guide bound pair.

    Amplitudes are normalised to unit L² norm in the relative coordinate:
      f(δx) = √ξ e^{−ξ|δx|}
      g(δk) = √(2/π) ξ^{3/2} / (δk² + ξ²)          δk = (k1 − k2)/2
      h(q)  = (4/√π) ξ^{3/2} / (q² + 4ξ²)           q  = k1 − k2
    g is the unitary Fourier transform of f; h(q) = g(q/2)/√2 keeps ∫|h|² dq = 1.
    """

    model_config = ConfigDict(frozen=True)

    xi: float = Field(gt=0)
    E_b: float
    omega_k0: float = 0.0

    @property
    def binding_shift(self) -> float:
        """E_b − 2ω_k0."""
        return self.E_b - 2.0 * self.omega_k0

    def amp_position(self, delta_x):
        """f(δx), δx = x1 − x2."""
        dx = np.asarray(delta_x, dtype=float)
        return math.sqrt(self.xi) * np.exp(-self.xi * np.abs(dx))

    def amp_momentum(self, k, convention: MomentumConvention = MomentumConvention.RELATIVE):
        """Momentum amplitude; `k` is δk = (k1−k2)/2 or q = k1−k2 depending on `convention`."""
        k = np.asarray(k, dtype=float)
        xi = self.xi
        if convention is MomentumConvention.RELATIVE:
            return math.sqrt(2.0 / math.pi) * xi ** 1.5 / (k ** 2 + xi ** 2)
        return 4.0 / math.sqrt(math.pi) * xi ** 1.5 / (k ** 2 + 4.0 * xi ** 2)


class WignerSample(BaseModel):
    """Relative-coordinate Wigner density with the δ(k1+k2; 2k0) factor stripped."""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    delta_x: float
    delta_k: float
    value: float


class WignerMap(_ArrayModel):
    xi: float
    delta_x: np.ndarray          # (n_dx,)
    delta_k: np.ndarray          # (n_dk,)
    values: np.ndarray           # (n_dx, n_dk), closed form
    oracle: Optional[np.ndarray] = None
    max_discrepancy: Optional[float] = None  # relative to max |W|
    minimum: WignerSample        # lowest grid value and where it sits


class PumpedPairState(_ArrayModel):
    """Gaussian-pumped pair amplitude on a (k1, k2) lattice aligned with K = k1+k2 and q = k1−k2.

    amplitude[i, j] is A(K_i, q_j) with k1 = (K+q)/2, k2 = (K−q)/2; the norm
    Σ|A|² dK dq / 2 equals 1 (dk1 dk2 = dK dq / 2).
    """

    k0: float
    W_p: float = Field(gt=0)
    xi: float = Field(gt=0)
    pair_sum: np.ndarray         # K grid
    pair_difference: np.ndarray  # q grid
    amplitude: np.ndarray
    norm_shift: float            # |1 − grid norm before renormalisation|
    grid: PumpGridSpec

    @property
    def cell_area(self) -> float:
        dK = self.pair_sum[1] - self.pair_sum[0]
        dq = self.pair_difference[1] - self.pair_difference[0]
        return 0.5 * dK * dq

    def k1_k2(self) -> tuple[np.ndarray, np.ndarray]:
        K, q = np.meshgrid(self.pair_sum, self.pair_difference, indexing="ij")
        return 0.5 * (K + q), 0.5 * (K - q)

    def norm(self) -> float:
        return float(np.sum(np.abs(self.amplitude) ** 2) * self.cell_area)


class EPRResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    product: float
    var_position_difference: float  # [Δ(x2 − x1)]²
    var_momentum_sum: float         # [Δ(k2 + k1)]²
    violates_separability: bool     # product < 1
    violates_epr: bool              # product < 1/4
    analytic_reference: float       # (1/8)(W_p/ξ)²
    refinement_change: float        # max relative change of the variances on refinement


class LinearDispersionResult(_ArrayModel):
    spectrum: np.ndarray                    # ascending, shifted by 2ω_k0
    bound_vector: Optional[np.ndarray]      # None when κ = 0
    bound_energy: Optional[float]
    rank_residual: float                    # largest |λ| among the "zero" eigenvalues / ‖H‖
    degenerate: bool                        # κ = 0: free, fully degenerate spectrum


# -- Lattice --

class LatticeBoundState(_ArrayModel):
    """Lattice bound pair, f(j) = A(η^j − δ_{j,0}/2) for j = 0..⌊N/2⌋.

    Normalisation: 2|f(0)|² + Σ_{j≥1} |f(j)|² = 1, i.e. the vector
    (√2 f(0), f(1), f(2), ...) has unit norm in the relative basis. On even
    rings j = N/2 is its own mirror and carries the √2 as well.
    """

    eta: float
    E_b: float
    amplitudes: np.ndarray
    ring_prefactor: float   # 2√((1−η²)/(N(1+3η²)))
    normalization: float       # A actually applied
    self_paired_end: bool = False

    def basis_vector(self) -> np.ndarray:
        vec = self.amplitudes.astype(float).copy()
        vec[0] *= math.sqrt(2.0)
        if self.self_paired_end:
            vec[-1] *= math.sqrt(2.0)
        return vec


class ScatteringState(_ArrayModel):
    energy: float
    delta_k: float
    amplitudes: np.ndarray  # f(0) = 1, f(j≥1) from the closed form


class LatticeSpectrum(_ArrayModel):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray        # columns, relative-coordinate basis
    bound_index: Optional[int] = None

    @property
    def bound_energy(self) -> Optional[float]:
        if self.bound_index is None:
            return None
        return float(self.eigenvalues[self.bound_index])


class AsymptoticBoundState(_ArrayModel):
    E_b: float
    base: float                 # decay base of f(j) ∝ base^{|j|}
    amplitudes: np.ndarray      # same normalisation as LatticeBoundState


# -- Lindblad --

class DensityMatrix(_ArrayModel):
    basis: FockBasis
    entries: np.ndarray

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.conj().T)))

    def trace_error(self) -> float:
        return float(abs(np.trace(self.entries) - 1.0))

    def min_eigenvalue(self) -> float:
        herm = 0.5 * (self.entries + self.entries.conj().T)
        return float(np.linalg.eigvalsh(herm)[0])


class SteadyObservables(BaseModel):
    model_config = ConfigDict(frozen=True)

    N: list[float]
    g2: list[Optional[float]]   # None where N_j < 1e-14
    n_max: int
    residual: Optional[float] = None


class SweepResult(_ArrayModel):
    omega_p: np.ndarray
    N: np.ndarray               # (n_points, M)
    g2: np.ndarray              # (n_points, M), NaN where absent
    residuals: np.ndarray
    g2_peak: Optional[float]    # local g² maximum nearest the pair resonance
    N_peak: Optional[float]     # local N maximum nearest the single-photon resonance
    pair_resonance: float       # ω_c + (ring pair level − 2ω_c)/2
    pair_resonance_infinite: float  # ω_c + sgn(u)√(J0²+4u²)/2
    single_resonance: float     # ω_c + J0/2
    far_detuned_g2: Optional[float] = None


class TruncationReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    n_max: list[int]
    N: list[list[float]]
    g2: list[list[Optional[float]]]
    deltas: list[float]         # max relative change vs previous n_max (first entry NaN)
    converged: bool
    converged_at: Optional[int] = None

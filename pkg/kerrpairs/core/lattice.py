# kerrpairs/core/lattice.py
"""
Two-photon sector of a periodic Bose-Hubbard ring.

The fixed-total-momentum (2k0) block is written in the relative-site basis
|j⟩, j = 0..⌊N/2⌋, where |0⟩ is the doubly occupied state and carries the
bosonic √2 on its hop to |1⟩. Amplitudes f(j) are stored so that the basis
vector (√2 f(0), f(1), ...) has unit norm; on even rings the last entry,
j = N/2, is self-paired and takes a √2 too.

Exports:
  single_photon_dispersion, two_photon_block, exact_diagonalize, two_photon_band
  bound_state_lattice, scattering_state, recursion_residual
  binding_gap, binding_gap_curve, asymptotic_bound_state, split_off_level
  joint_probability, joint_probability_curves
  bound_state_momentum_amplitude, continuum_limit
"""

from __future__ import annotations

import logging
import math
import warnings
from typing import Iterable, Sequence

import numpy as np

from kerrpairs.core.errors import (
    OffGridMomentum,
    RegimeMismatchWarning,
    ResonantDenominator,
    ValidationFailure,
    ZeroInteraction,
)
from kerrpairs.core.numerics import eig_hermitian
from kerrpairs.models.results import (
    AsymptoticBoundState,
    LatticeBoundState,
    LatticeSpectrum,
    ScatteringState,
)
from kerrpairs.models.schemas import AsymptoticRegime, LatticeParams, WaveguideParams

logger = logging.getLogger("kerrpairs.lattice")

_GRID_TOL = 1e-9
_BLOCK_HERMITIAN_TOL = 1e-14
_RESONANT_SIN = 1e-12
# |u/J0| band treated as neither strong nor weak coupling
_MIXED_REGIME = (0.5, 2.0)
_WEAK_LIMIT = 0.1


def _sgn(x: float) -> float:
    return 1.0 if x > 0 else -1.0


def _require_interaction(p: LatticeParams) -> None:
    if p.u == 0.0:
        raise ZeroInteraction("u = 0: the bound pair merges with the band edge (|eta| -> 1)")


# ── Single photon ────────────────────────────────────────

def momentum_grid(p: LatticeParams) -> np.ndarray:
    """The N allowed wave numbers 2πn/(Nb), n = 0..N−1."""
    return 2.0 * math.pi * np.arange(p.N) / (p.N * p.b)


def single_photon_dispersion(p: LatticeParams, k):
    """ω_k = ω_c + 2J cos(kb) for k on the ring's momentum grid."""
    k_arr = np.asarray(k, dtype=float)
    n = k_arr * p.N * p.b / (2.0 * math.pi)
    off = np.abs(n - np.round(n)) > _GRID_TOL
    if np.any(off):
        bad = np.atleast_1d(k_arr)[np.atleast_1d(off)][0]
        raise OffGridMomentum(f"k={bad} is not of the form 2*pi*n/(N*b) for N={p.N}, b={p.b}")
    value = p.omega_c + 2.0 * p.J * np.cos(k_arr * p.b)
    return float(value) if value.ndim == 0 else value


# ── Exact diagonalization ────────────────────────────────

def two_photon_block(p: LatticeParams) -> np.ndarray:
    """Real symmetric Hamiltonian of the 2k0 sector in the relative-site basis.

    Diagonal 2ω_c (+2u on |0⟩); hops J0/2 between neighbours, √2·J0/2 into
    |0⟩. At the far end, odd N closes with a J0/2 self-loop (distances rmax
    and rmax+1 are mirror images); even N has a second self-paired state
    |N/2⟩ with a √2 hop.
    """
    dim = p.relative_dim
    j0 = p.J0
    hop = 0.5 * j0
    block = np.diag(np.full(dim, 2.0 * p.omega_c))
    block[0, 0] += 2.0 * p.u
    for r in range(dim - 1):
        block[r, r + 1] = block[r + 1, r] = hop
    block[0, 1] = block[1, 0] = math.sqrt(2.0) * hop
    if p.N % 2 == 1:
        block[-1, -1] += hop
    else:
        block[-2, -1] = block[-1, -2] = math.sqrt(2.0) * hop
    return block


def _find_bound_index(eigenvalues: np.ndarray, p: LatticeParams) -> int | None:
    offsets = np.abs(eigenvalues - 2.0 * p.omega_c)
    outside = np.flatnonzero(offsets > abs(p.J0) * (1.0 + 1.0 / p.N))
    if outside.size == 0:
        return None
    return int(outside[np.argmax(offsets[outside])])


def exact_diagonalize(p: LatticeParams) -> LatticeSpectrum:
    """Diagonalize two_photon_block; the split-off level satisfies |E − 2ω_c| > |J0|(1 + 1/N)."""
    decomposition = eig_hermitian(two_photon_block(p), tol=_BLOCK_HERMITIAN_TOL)
    index = _find_bound_index(decomposition.eigenvalues, p)
    if index is not None:
        logger.debug("bound level %.12g at index %d (N=%d)",
                     decomposition.eigenvalues[index], index, p.N)
    return LatticeSpectrum(eigenvalues=decomposition.eigenvalues,
                           eigenvectors=decomposition.eigenvectors, bound_index=index)


def two_photon_band(
    J: float, u: float, omega_c: float = 0.0, N: int = 51, b: float = 1.0,
) -> list[tuple[float, LatticeSpectrum]]:
    """Spectra of every 2k0 sector, k0 = 2πn/(Nb) for n = 0..N−1."""
    sectors = []
    for n in range(N):
        p = LatticeParams(omega_c=omega_c, J=J, u=u, b=b, N=N, k0=2.0 * math.pi * n / (N * b))
        sectors.append((p.k0, exact_diagonalize(p)))
    return sectors


def split_off_level(spectrum: LatticeSpectrum, u: float) -> float:
    """Extreme eigenvalue on the sgn(u) side; the pair level of short rings."""
    values = spectrum.eigenvalues
    return float(values[-1] if u > 0 else values[0])


# ── Analytic solutions ───────────────────────────────────

def _self_paired_end(N: int) -> bool:
    """Even rings end the relative basis on j = N/2, which is its own mirror."""
    return N % 2 == 0 and N > 1


def _normalized_profile(
    base: float, dim: int, self_paired_end: bool = False,
) -> tuple[np.ndarray, float]:
    """f(j) = A(base^j − δ_{j0}/2) with (√2 f0, f1, ..., [√2] f_end) of unit norm."""
    shape = base ** np.arange(dim, dtype=float)
    shape[0] -= 0.5
    weights = np.ones(dim)
    weights[0] = 2.0
    if self_paired_end and dim > 1:
        weights[-1] = 2.0
    norm = math.sqrt(float(np.sum(weights * shape ** 2)))
    return shape / norm, 1.0 / norm


def bound_state_lattice(p: LatticeParams) -> LatticeBoundState:
    """E_b = 2ω_c + sgn(u)√(J0² + 4u²) and f(j) ∝ η^j − δ_{j0}/2.

    η is evaluated as sgn(u)·J0/(√(J0²+4u²) + 2|u|), algebraically equal to
    (−2u + sgn(u)√(J0²+4u²))/J0, free of cancellation and 0 at J0 = 0.
    """
    _require_interaction(p)
    j0, u = p.J0, p.u
    root = math.hypot(j0, 2.0 * u)
    eta = _sgn(u) * j0 / (root + 2.0 * abs(u))
    paired = _self_paired_end(p.N)
    amplitudes, scale = _normalized_profile(eta, p.relative_dim, paired)
    ring = 2.0 * math.sqrt((1.0 - eta ** 2) / (p.N * (1.0 + 3.0 * eta ** 2)))
    return LatticeBoundState(
        eta=eta,
        E_b=2.0 * p.omega_c + _sgn(u) * root,
        amplitudes=amplitudes,
        ring_prefactor=ring,
        normalization=scale,
        self_paired_end=paired,
    )


def scattering_state(p: LatticeParams, delta_k: float, n_sites: int | None = None) -> ScatteringState:
    """E = 2ω_c + J0 cos(δk b); f(0) = 1, f(j) = 2(cos(jδk b) − 2u sin(jδk b)/(J0 sin(δk b)))."""
    theta = delta_k * p.b
    if p.J0 == 0.0:
        raise ResonantDenominator("J0 = 0: scattering amplitudes are undefined")
    if abs(math.sin(theta)) < _RESONANT_SIN:
        raise ResonantDenominator(f"sin(delta_k*b) = 0 at delta_k={delta_k}")
    dim = n_sites or p.relative_dim
    j = np.arange(dim, dtype=float)
    amplitudes = 2.0 * (np.cos(j * theta) - 2.0 * p.u * np.sin(j * theta) / (p.J0 * math.sin(theta)))
    amplitudes[0] = 1.0
    return ScatteringState(energy=2.0 * p.omega_c + p.J0 * math.cos(theta),
                           delta_k=delta_k, amplitudes=amplitudes)


def recursion_residual(E: float, f: Sequence[float], p: LatticeParams) -> float:
    """Largest violation of the relative-coordinate equations, over max|f|.

      J0 f(1) = 2(E − 2ω_c − 2u) f(0)
      J0 f(j+1) = 2(E − 2ω_c) f(j) − (1 + δ_{j1}) J0 f(j−1),  j ≥ 1
    """
    f = np.asarray(f, dtype=float)
    if f.size < 2:
        raise ValidationFailure("recursion needs amplitudes for at least j = 0, 1")
    j0, shift = p.J0, E - 2.0 * p.omega_c
    rows = [j0 * f[1] - 2.0 * (shift - 2.0 * p.u) * f[0]]
    if f.size > 2:
        coupling = np.full(f.size - 2, j0)
        coupling[0] = 2.0 * j0
        rows.extend(j0 * f[2:] - 2.0 * shift * f[1:-1] + coupling * f[:-2])
    scale = float(np.max(np.abs(f)))
    return float(np.max(np.abs(rows)) / scale) if scale > 0 else 0.0


# ── Binding gap and asymptotics ──────────────────────────

def binding_gap(p: LatticeParams) -> float:
    """ΔE = √(J0² + 4u²) − |J0|, written as 4u²/(√(J0²+4u²) + |J0|)."""
    _require_interaction(p)
    j0 = abs(p.J0)
    return 4.0 * p.u ** 2 / (math.hypot(j0, 2.0 * p.u) + j0)


def binding_gap_curve(u: float, j0_values: Iterable[float]) -> tuple[np.ndarray, np.ndarray]:
    """(J0, ΔE) pairs for a plot of the split from the band edge."""
    if u == 0.0:
        raise ZeroInteraction("u = 0: no binding gap")
    j0 = np.asarray(list(j0_values), dtype=float)
    gap = 4.0 * u ** 2 / (np.hypot(j0, 2.0 * u) + np.abs(j0))
    return j0, gap


def _warn_regime(message: str) -> None:
    logger.warning(message)
    warnings.warn(message, RegimeMismatchWarning, stacklevel=3)


def asymptotic_bound_state(p: LatticeParams, regime: AsymptoticRegime) -> AsymptoticBoundState:
    """Leading-order bound pair for |u| ≫ |J0| (strong) or |J0| ≫ |u| (weak).

    strong: base J0/(4u), E_b = 2ω_c + 2u + J0²/(4u)
    weak:   base sgn(uJ0)(1 − 2|u/J0| + 2u²/J0²), E_b = 2ω_c + sgn(u)(|J0| + 2u²/|J0|)
    """
    _require_interaction(p)
    regime = AsymptoticRegime(regime)
    j0, u = p.J0, p.u
    ratio = math.inf if j0 == 0.0 else abs(u / j0)
    if _MIXED_REGIME[0] < ratio < _MIXED_REGIME[1]:
        _warn_regime(f"|u/J0| = {ratio:.3g} lies between the strong and weak regimes")

    if regime is AsymptoticRegime.STRONG:
        if ratio <= _MIXED_REGIME[0]:
            _warn_regime(f"strong-coupling formula used at |u/J0| = {ratio:.3g}")
        base = j0 / (4.0 * u)
        energy = 2.0 * p.omega_c + 2.0 * u + j0 ** 2 / (4.0 * u)
    else:
        if j0 == 0.0:
            raise ValidationFailure("weak-coupling formula needs J0 != 0")
        if ratio > _WEAK_LIMIT:
            _warn_regime(f"weak-coupling decay base used at |u/J0| = {ratio:.3g} > {_WEAK_LIMIT}")
        base = _sgn(u * j0) * (1.0 - 2.0 * ratio + 2.0 * ratio ** 2)
        energy = 2.0 * p.omega_c + _sgn(u) * (abs(j0) + 2.0 * u ** 2 / abs(j0))

    amplitudes, _ = _normalized_profile(base, p.relative_dim, _self_paired_end(p.N))
    return AsymptoticBoundState(E_b=energy, base=base, amplitudes=amplitudes)


# ── Probabilities and other representations ──────────────

def joint_probability(
    amplitudes: Sequence[float], self_paired_end: bool = False,
) -> tuple[np.ndarray, np.ndarray]:
    """P over relative site j: P(0) = 2f(0)², P(±j) = f(j)²/2.

    Odd rings cover j = −jmax..jmax. With self_paired_end (even rings) the
    last amplitude is j = N/2 = −N/2, reported once as P(N/2) = 2f(N/2)², so
    j runs −(jmax−1)..jmax.
    """
    f = np.asarray(amplitudes, dtype=float)
    half = f ** 2 / 2.0
    center = 2.0 * f[0] ** 2
    if self_paired_end and f.size > 1:
        j = np.arange(-(f.size - 2), f.size)
        probability = np.concatenate([half[-2:0:-1], [center], half[1:-1], [2.0 * f[-1] ** 2]])
        return j, probability
    j = np.arange(-(f.size - 1), f.size)
    probability = np.concatenate([half[:0:-1], [center], half[1:]])
    return j, probability


def joint_probability_curves(
    u: float, ratios: Iterable[float], N: int = 51, omega_c: float = 0.0,
) -> dict[float, tuple[np.ndarray, np.ndarray]]:
    """Bound-pair P(j) for each J0/u ratio."""
    curves = {}
    for ratio in ratios:
        state = bound_state_lattice(LatticeParams.from_j0(ratio * u, u, omega_c=omega_c, N=N))
        curves[float(ratio)] = joint_probability(state.amplitudes, state.self_paired_end)
    return curves


def bound_state_momentum_amplitude(p: LatticeParams, q) -> np.ndarray:
    """Σ_j (η^|j| − δ_{j0}/2) e^{ij q b/2}, times ring_prefactor.

    Closed form (1 − η²)/(1 − 2η cos(qb/2) + η²) − 1/2; q = k1 − k2.
    """
    state = bound_state_lattice(p)
    eta = state.eta
    theta = 0.5 * np.asarray(q, dtype=float) * p.b
    series = (1.0 - eta ** 2) / (1.0 - 2.0 * eta * np.cos(theta) + eta ** 2) - 0.5
    return state.ring_prefactor * series


def continuum_limit(p: LatticeParams) -> WaveguideParams:
    """Wave-guide parameters matching the lattice near the band edge.

    κ = u·b, β = −J0 b²/2 (curvature of J0 cos(δk b) at δk = 0) and
    ω_k0 = ω_c + J0/2, so 2ω_k0 is the band edge and −κ²/β = 2u²/J0.
    Meaningful for uJ0 > 0, where the pair binds on the edge it expands.
    """
    _require_interaction(p)
    if p.u * p.J0 <= 0.0:
        raise ValidationFailure(
            f"continuum limit needs u*J0 > 0 (u={p.u}, J0={p.J0:.6g}); "
            "otherwise the pair splits off the opposite band edge"
        )
    return WaveguideParams(
        omega_k0=p.omega_c + 0.5 * p.J0,
        v=0.0,
        beta=-0.5 * p.J0 * p.b ** 2,
        kappa=p.u * p.b,
        L=p.N * p.b,
    )

# kerrpairs/core/continuum.py
"""
Two photons in a Kerr wave-guide with quadratic dispersion.

Bound state and its amplitudes, the relative-coordinate Wigner density with
a quadrature oracle, the Gaussian-pumped pair and its EPR uncertainty
product, and the exactly diagonalizable linear-dispersion limit.

Momentum arguments follow MomentumConvention: δk = (k1 − k2)/2 unless a
function says it takes q = k1 − k2.
"""

from __future__ import annotations

import logging
import math
from typing import Union

import numpy as np

from kerrpairs.core.errors import GridTooCoarse, NoBoundStateError, ValidationFailure
from kerrpairs.core.numerics import (
    eig_hermitian,
    fourier_cosine,
    fourier_probability_2d,
    fourier_transform_even,
    integrate,
    integrate_2d,
)
from kerrpairs.models.results import (
    ContinuumBoundState,
    EPRResult,
    LinearDispersionResult,
    NoBoundState,
    PumpedPairState,
    WignerMap,
    WignerSample,
)
from kerrpairs.models.schemas import (
    MaterialParams,
    MomentumConvention,
    PumpGridSpec,
    QuadratureSpec,
    WaveguideParams,
    WignerGridSpec,
)

logger = logging.getLogger("kerrpairs.continuum")

# |δk| below this fraction of ξ uses the analytic bracket 1 + 2ξ|δx|
_SMALL_DK = 1e-8
# Largest norm shift a pump grid may need before renormalisation
_PUMP_NORM_TOL = 1e-3
# Largest relative variance change accepted under grid refinement
_REFINE_TOL = 0.01
# Grids must span this many standard deviations per axis
_SPAN_SIGMAS = 8.0


# ── Dispersion and coupling ──────────────────────────────

def kappa_from_material(m: MaterialParams) -> float:
    """κ = πω²χ⁽³⁾ / (2 n_r⁴ A ε₀)."""
    return math.pi * m.omega ** 2 * m.chi3 / (2.0 * m.n_r ** 4 * m.A * m.eps0)


def pair_energy_detuning(beta: float, delta_k):
    """Δ²ω = β δk² for k1,2 = k0 ± δk."""
    return beta * np.asarray(delta_k, dtype=float) ** 2


def photon_dispersion(p: WaveguideParams, delta_k):
    """ω_{k0+δk} ≈ ω_k0 + v δk + β δk²/2."""
    dk = np.asarray(delta_k, dtype=float)
    return p.omega_k0 + p.v * dk + 0.5 * p.beta * dk ** 2


def pair_difference_to_relative(q):
    """q = k1 − k2  →  δk = q/2."""
    return 0.5 * np.asarray(q, dtype=float)


def relative_to_pair_difference(delta_k):
    """δk  →  q = 2δk."""
    return 2.0 * np.asarray(delta_k, dtype=float)


# ── Bound state ──────────────────────────────────────────

def bound_state_continuum(p: WaveguideParams) -> Union[ContinuumBoundState, NoBoundState]:
    """Bound pair for κβ < 0, a NoBoundState outcome otherwise.

    ξ = |κ/β| and E_b = 2ω_k0 − κ²/β, so sgn(E_b − 2ω_k0) = sgn(κ).
    """
    if p.beta == 0.0:
        raise ValidationFailure("beta must be nonzero: the pair problem has no length scale")
    if p.kappa * p.beta >= 0.0:
        reason = ("kappa = 0: free photons" if p.kappa == 0.0
                  else "kappa and beta share a sign: the interaction cannot bind")
        logger.info("no bound state (kappa=%g, beta=%g): %s", p.kappa, p.beta, reason)
        return NoBoundState(kappa=p.kappa, beta=p.beta, reason=reason)
    state = ContinuumBoundState(
        xi=p.xi,
        E_b=2.0 * p.omega_k0 - p.kappa ** 2 / p.beta,
        omega_k0=p.omega_k0,
    )
    logger.debug("bound state xi=%g E_b=%g", state.xi, state.E_b)
    return state


def require_bound_state(p: WaveguideParams) -> ContinuumBoundState:
    """bound_state_continuum for callers that cannot proceed without a bound pair."""
    outcome = bound_state_continuum(p)
    if isinstance(outcome, NoBoundState):
        raise NoBoundStateError(
            f"no two-photon bound state for kappa={outcome.kappa}, beta={outcome.beta}: "
            f"{outcome.reason} (requires kappa*beta < 0)"
        )
    return outcome


def sample_amplitudes(
    bs: ContinuumBoundState, n_samples: int = 201,
    dx_halfwidth: float = 6.0, dk_halfwidth: float = 6.0,
) -> dict[str, np.ndarray]:
    """f(δx) on [−dx_halfwidth/ξ, +] and g(δk), h(2δk) on [−dk_halfwidth·ξ, +]."""
    dx = np.linspace(-dx_halfwidth / bs.xi, dx_halfwidth / bs.xi, n_samples)
    dk = np.linspace(-dk_halfwidth * bs.xi, dk_halfwidth * bs.xi, n_samples)
    return {
        "delta_x": dx,
        "f_position": bs.amp_position(dx),
        "delta_k": dk,
        "f_momentum": bs.amp_momentum(dk),
        "f_pair_difference": bs.amp_momentum(relative_to_pair_difference(dk),
                                             MomentumConvention.PAIR_DIFFERENCE),
    }


def fourier_consistency_error(
    bs: ContinuumBoundState, n_points: int = 101, halfwidth: float = 10.0,
) -> float:
    """Relative L² distance between amp_momentum and the quadrature transform of amp_position."""
    k = np.linspace(-halfwidth * bs.xi, halfwidth * bs.xi, n_points)
    xi = bs.xi
    root = math.sqrt(xi)

    def f(x: float) -> float:
        return root * math.exp(-xi * abs(x))

    numeric = fourier_transform_even(f, k, abs_tol=1e-11, scale=1.0 / xi)
    exact = bs.amp_momentum(k)
    return float(np.linalg.norm(numeric - exact) / np.linalg.norm(exact))


def box_prefactors(xi: float, L: float) -> dict[str, float]:
    """Prefactors for a box of length L next to the unit-normalised ones.

    position: √(ξ/2L) vs √ξ; momentum (argument q): 8ξ^{3/2}/√(2L) vs 4ξ^{3/2}/√π.
    The ratios carry the L and symmetrisation factors only.
    """
    position_box = math.sqrt(xi / (2.0 * L))
    momentum_box = 8.0 * xi ** 1.5 / math.sqrt(2.0 * L)
    position_unit = math.sqrt(xi)
    momentum_unit = 4.0 * xi ** 1.5 / math.sqrt(math.pi)
    return {
        "position_box": position_box,
        "position_unit": position_unit,
        "position_ratio": position_box / position_unit,
        "momentum_box": momentum_box,
        "momentum_unit": momentum_unit,
        "momentum_ratio": momentum_box / momentum_unit,
    }


def spectrum_curve(p: WaveguideParams, delta_k) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Dimensionless pair spectrum Ẽ = (E − 2ω_k0)|β|/κ² against δk/ξ.

    Returns (δk/ξ, continuum Ẽ = sgn(β)(δk/ξ)², bound level Ẽ_b = −sgn(β)).
    """
    bs = require_bound_state(p)
    dk = np.asarray(delta_k, dtype=float)
    scale = abs(p.beta) / p.kappa ** 2
    continuum = pair_energy_detuning(p.beta, dk) * scale
    bound = np.full_like(dk, bs.binding_shift * scale)
    return dk / bs.xi, continuum, bound


# ── Wigner density ───────────────────────────────────────

def wigner_closed_form(xi: float, delta_x, delta_k):
    """Relative-coordinate Wigner density W_rel(δx, δk), δ(k1+k2; 2k0) stripped.

    ξ²e^{−2ξ|δx|}/(2π²(δk²+ξ²)) · [cos(2δk|δx|) + (ξ/δk) sin(2δk|δx|)];
    for |δk| < 1e-8·ξ the bracket is its limit 1 + 2ξ|δx|. Broadcasts.
    """
    if xi <= 0:
        raise ValidationFailure(f"xi must be positive, got {xi}")
    a = np.abs(np.asarray(delta_x, dtype=float))
    dk = np.asarray(delta_k, dtype=float)
    a, dk = np.broadcast_arrays(a, dk)
    prefactor = xi ** 2 * np.exp(-2.0 * xi * a) / (2.0 * math.pi ** 2 * (dk ** 2 + xi ** 2))
    small = np.abs(dk) < _SMALL_DK * xi
    safe_dk = np.where(small, 1.0, dk)
    bracket = np.where(
        small,
        1.0 + 2.0 * xi * a,
        np.cos(2.0 * dk * a) + (xi / safe_dk) * np.sin(2.0 * safe_dk * a),
    )
    value = prefactor * bracket
    return float(value) if value.ndim == 0 else value


def wigner_numeric_oracle(
    bs: ContinuumBoundState, delta_x: float, delta_k: float, abs_tol: float = 1e-11,
) -> float:
    """W_rel from the parity-operator integral (1/2π²)∫dζ g(δk+ζ) g(δk−ζ) cos(2δxζ).

    The integrand is even in ζ, so the half-line cosine transform is used.
    """
    xi = bs.xi
    c = math.sqrt(2.0 / math.pi) * xi ** 1.5
    xi2 = xi * xi
    dk = float(delta_k)

    def g_product(z: float) -> float:
        return c * c / (((dk + z) ** 2 + xi2) * ((dk - z) ** 2 + xi2))

    result = fourier_cosine(g_product, 2.0 * abs(float(delta_x)), abs_tol=abs_tol, scale=xi)
    return result.value / math.pi ** 2


def wigner_map(
    xi: float, grid: WignerGridSpec | None = None, with_oracle: bool = False,
    oracle_abs_tol: float = 1e-11,
) -> WignerMap:
    """Closed-form W_rel on δx ∈ [−w/ξ, w/ξ], δk ∈ [−w'ξ, w'ξ]; optional oracle comparison."""
    grid = grid or WignerGridSpec()
    dx = np.linspace(-grid.dx_halfwidth / xi, grid.dx_halfwidth / xi, grid.n_dx)
    dk = np.linspace(-grid.dk_halfwidth * xi, grid.dk_halfwidth * xi, grid.n_dk)
    values = wigner_closed_form(xi, dx[:, None], dk[None, :])

    oracle = None
    discrepancy = None
    if with_oracle:
        bs = ContinuumBoundState(xi=xi, E_b=0.0)
        oracle = np.empty_like(values)
        for i, x in enumerate(dx):
            for j, k in enumerate(dk):
                oracle[i, j] = wigner_numeric_oracle(bs, x, k, abs_tol=oracle_abs_tol)
        discrepancy = float(np.max(np.abs(oracle - values)) / np.max(np.abs(values)))
        logger.info("wigner oracle: max relative discrepancy %.3e on %dx%d grid",
                    discrepancy, grid.n_dx, grid.n_dk)

    i, j = np.unravel_index(np.argmin(values), values.shape)
    return WignerMap(
        xi=xi, delta_x=dx, delta_k=dk, values=values, oracle=oracle,
        max_discrepancy=discrepancy,
        minimum=WignerSample(delta_x=float(dx[i]), delta_k=float(dk[j]), value=float(values[i, j])),
    )


def wigner_marginal(xi: float, delta_k: float) -> float:
    """∫ W_rel dδx; equals g(δk)²/(2π)."""
    extent = 30.0 / xi  # e^{−60} beyond
    spec = QuadratureSpec(lower=0.0, upper=extent, abs_tol=1e-12, rel_tol=1e-10,
                          max_subdivisions=500)
    half = integrate(lambda x: wigner_closed_form(xi, x, delta_k), spec)
    return 2.0 * half.value


# ── Gaussian-pumped pair and EPR product ─────────────────

def _pair_difference_amplitude(xi: float, q: np.ndarray) -> np.ndarray:
    return 4.0 / math.sqrt(math.pi) * xi ** 1.5 / (q ** 2 + 4.0 * xi ** 2)


def gaussian_pump_state(
    xi: float, W_p: float, k0: float = 0.0, grid: PumpGridSpec | None = None,
) -> PumpedPairState:
    """Pair amplitude exp(−(k1+k2−2k0)²/W_p²)·h(k1−k2) renormalised on the grid.

    Grid axes are K = k1+k2 (half-width sum_halfwidth·W_p about 2k0) and
    q = k1−k2 (half-width diff_halfwidth·ξ). Both must cover 8 standard
    deviations; the analytic prefactor must normalise the grid to 1e-3.
    """
    if xi <= 0 or W_p <= 0:
        raise ValidationFailure(f"xi and W_p must be positive (xi={xi}, W_p={W_p})")
    grid = grid or PumpGridSpec()

    sigma_K = W_p / 2.0           # std of |A|² along K
    sigma_q = 2.0 * xi            # std of |h|² along q
    if 2.0 * grid.sum_halfwidth * W_p < _SPAN_SIGMAS * sigma_K:
        raise GridTooCoarse(f"sum axis spans {2 * grid.sum_halfwidth:g} W_p, need "
                            f">= {_SPAN_SIGMAS * sigma_K / W_p:g} W_p")
    if 2.0 * grid.diff_halfwidth * xi < _SPAN_SIGMAS * sigma_q:
        raise GridTooCoarse(f"difference axis spans {2 * grid.diff_halfwidth:g} xi, need "
                            f">= {_SPAN_SIGMAS * sigma_q / xi:g} xi")

    K = 2.0 * k0 + np.linspace(-grid.sum_halfwidth * W_p, grid.sum_halfwidth * W_p, grid.n_sum)
    q = np.linspace(-grid.diff_halfwidth * xi, grid.diff_halfwidth * xi, grid.n_diff)
    prefactor = math.sqrt(2.0) * (2.0 / math.pi) ** 0.25 / math.sqrt(W_p)

    def density(k_sum: float, q_diff: float) -> float:
        # |A|² with the dk1 dk2 = dK dq / 2 Jacobian
        a = prefactor * math.exp(-((k_sum - 2.0 * k0) / W_p) ** 2)
        a *= _pair_difference_amplitude(xi, q_diff)
        return 0.5 * a * a

    window = integrate_2d(density, (K[0], K[-1]), (q[0], q[-1]), abs_tol=1e-8, rel_tol=1e-8)
    if 1.0 - window.value > _PUMP_NORM_TOL:
        raise GridTooCoarse(f"grid window holds {window.value:.6f} of the pair; widen the axes")

    amplitude = prefactor * np.outer(np.exp(-((K - 2.0 * k0) / W_p) ** 2),
                                     _pair_difference_amplitude(xi, q))

    cell = 0.5 * (K[1] - K[0]) * (q[1] - q[0])
    norm = float(np.sum(amplitude ** 2) * cell)
    shift = abs(1.0 - norm)
    if shift > _PUMP_NORM_TOL:
        raise GridTooCoarse(f"grid norm {norm:.6f} deviates from 1 by {shift:.2e} "
                            f"(limit {_PUMP_NORM_TOL:g}); widen or refine the grid")
    amplitude /= math.sqrt(norm)
    logger.debug("pump state %dx%d, norm shift %.2e", grid.n_sum, grid.n_diff, shift)
    return PumpedPairState(k0=k0, W_p=W_p, xi=xi, pair_sum=K, pair_difference=q,
                           amplitude=amplitude, norm_shift=shift, grid=grid)


def _weighted_variance(axis: np.ndarray, weights: np.ndarray) -> float:
    weights = weights / weights.sum()
    mean = float(np.sum(weights * axis))
    return float(np.sum(weights * (axis - mean) ** 2))


def pumped_state_variances(s: PumpedPairState) -> tuple[float, float]:
    """([Δ(x2 − x1)]², [Δ(k1 + k2)]²) of a pumped pair.

    Momentum side from |A|² directly; position side from the 2-D Fourier
    transform, whose variable conjugate to q is (x1 − x2)/2.
    """
    prob = np.abs(s.amplitude) ** 2
    var_K = _weighted_variance(s.pair_sum, prob.sum(axis=1))
    density, _, y = fourier_probability_2d(s.amplitude, s.pair_sum, s.pair_difference)
    var_y = _weighted_variance(y, density.sum(axis=0))
    return 4.0 * var_y, var_K


def epr_uncertainty_product(s: PumpedPairState, refine: bool = True) -> EPRResult:
    """[Δ(x2−x1)]²[Δ(k2+k1)]² with separability (< 1) and EPR (< 1/4) verdicts.

    With `refine`, the state is rebuilt on grid.refined() and both variances
    must agree within 1 %, else GridTooCoarse.
    """
    var_x, var_k = pumped_state_variances(s)
    change = 0.0
    if refine:
        fine = gaussian_pump_state(s.xi, s.W_p, s.k0, s.grid.refined())
        fine_x, fine_k = pumped_state_variances(fine)
        change = max(abs(var_x - fine_x) / fine_x, abs(var_k - fine_k) / fine_k)
        if change > _REFINE_TOL:
            raise GridTooCoarse(f"variances moved by {change:.2%} under refinement "
                                f"(limit {_REFINE_TOL:.0%})")
        var_x, var_k = fine_x, fine_k
    product = var_x * var_k
    reference = (s.W_p / s.xi) ** 2 / 8.0
    logger.info("EPR product %.6e (reference %.6e, refinement change %.2e)",
                product, reference, change)
    return EPRResult(
        product=product,
        var_position_difference=var_x,
        var_momentum_sum=var_k,
        violates_separability=product < 1.0,
        violates_epr=product < 0.25,
        analytic_reference=reference,
        refinement_change=change,
    )


# ── Linear dispersion ────────────────────────────────────

def linear_dispersion_matrix(M: int, kappa: float, L: float = 1.0) -> np.ndarray:
    """(2κ/L) w wᵀ with w = (1, √2, ..., √2), basis (a†_{k0})²|0⟩/√2, a†_{k0+q}a†_{k0−q}|0⟩."""
    w = np.full(M, math.sqrt(2.0))
    w[0] = 1.0
    return (2.0 * kappa / L) * np.outer(w, w)


def epr_linear_dispersion(
    M: int, kappa: float, L: float = 1.0, omega_k0: float = 0.0, rank_tol: float = 1e-10,
) -> LinearDispersionResult:
    """Spectrum 2ω_k0 + eig((2κ/L) w wᵀ) and the single bound vector w/‖w‖.

    The interaction block has rank one, so exactly one level leaves 2ω_k0, at
    2ω_k0 + (2κ/L)(2M − 1). κ = 0 leaves the free, fully degenerate spectrum.
    """
    if M < 2:
        raise ValidationFailure(f"M must be at least 2, got {M}")
    if L <= 0:
        raise ValidationFailure(f"L must be positive, got {L}")
    interaction = linear_dispersion_matrix(M, kappa, L)
    decomposition = eig_hermitian(interaction)
    values = decomposition.eigenvalues
    scale = float(np.linalg.norm(interaction, 2))
    spectrum = values + 2.0 * omega_k0

    if scale == 0.0:
        logger.info("kappa = 0: degenerate free spectrum at 2*omega_k0 = %g", 2.0 * omega_k0)
        return LinearDispersionResult(spectrum=spectrum, bound_vector=None, bound_energy=None,
                                      rank_residual=0.0, degenerate=True)

    nonzero = np.abs(values) > rank_tol * scale
    if int(nonzero.sum()) != 1:
        logger.warning("expected rank 1, found %d eigenvalues above %.1e", nonzero.sum(), rank_tol)
    index = int(np.argmax(np.abs(values)))
    vector = decomposition.eigenvectors[:, index].real.copy()
    if vector[0] < 0:
        vector = -vector
    others = np.delete(values, index)
    residual = float(np.max(np.abs(others)) / scale) if others.size else 0.0
    return LinearDispersionResult(
        spectrum=spectrum,
        bound_vector=vector,
        bound_energy=float(values[index] + 2.0 * omega_k0),
        rank_residual=residual,
        degenerate=False,
    )

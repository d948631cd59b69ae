# kerrpairs/core/numerics.py
"""
Shared numerical kernels.

Dense Hermitian eigendecomposition, null vectors of general complex matrices,
linear solves (dense, sparse direct, or ILU-preconditioned LGMRES,
optionally with a trace constraint), adaptive 1-D/2-D quadrature with
explicit infinite-domain mappings, and Fourier transforms from sampled or
analytic amplitudes.

Functions are pure and results are value types; IluPreconditioner is the
one stateful object, held by callers that solve many nearby systems.
"""

from __future__ import annotations

import logging
import math
import warnings
from typing import Callable, NamedTuple

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy import integrate as _integrate
from scipy.integrate import IntegrationWarning
from scipy.sparse.csgraph import reverse_cuthill_mckee

from kerrpairs.core.errors import (
    DegenerateKernel,
    DimensionMismatch,
    IterationLimit,
    MaxSubdivisions,
    NotHermitian,
    QuadratureFailure,
)
from kerrpairs.models.results import EigenDecomposition, QuadratureResult
from kerrpairs.models.schemas import DomainMapping, QuadratureSpec

logger = logging.getLogger("kerrpairs.numerics")

HERMITIAN_TOL = 1e-12
KERNEL_GAP_TOL = 1e-6

# Iterative sparse solves
ITERATIVE_RTOL = 1e-12
ITERATIVE_MAXITER = 500
ILU_DROP_TOL = 1e-4
ILU_FILL_FACTOR = 10.0


class IterativeSolution(NamedTuple):
    x: np.ndarray
    cycles: int                          # LGMRES outer cycles
    preconditioner: "IluPreconditioner"


# ── Linear algebra ───────────────────────────────────────

def relative_hermitian_deviation(m: np.ndarray) -> float:
    """‖m − m†‖_F / ‖m‖_F (0 for the zero matrix)."""
    norm = np.linalg.norm(m)
    if norm == 0.0:
        return 0.0
    return float(np.linalg.norm(m - m.conj().T) / norm)


def _as_dense_square(m) -> np.ndarray:
    if sp.issparse(m):
        m = m.toarray()
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    return m


def eig_hermitian(m, tol: float = HERMITIAN_TOL) -> EigenDecomposition:
    """Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix."""
    m = _as_dense_square(m)
    deviation = relative_hermitian_deviation(m)
    if deviation > tol:
        raise NotHermitian(f"relative Frobenius deviation {deviation:.3e} exceeds {tol:.1e}")
    # eigh reads one triangle only; symmetrise so both halves count
    herm = 0.5 * (m + m.conj().T)
    values, vectors = np.linalg.eigh(herm)
    return EigenDecomposition(eigenvalues=values, eigenvectors=vectors)


def _fix_phase(x: np.ndarray) -> np.ndarray:
    """Rotate a vector so its largest-magnitude component is real and positive."""
    pivot = x[np.argmax(np.abs(x))]
    if pivot == 0:
        return x
    return x * (abs(pivot) / pivot)


def null_vector(m, gap_tol: float = KERNEL_GAP_TOL) -> np.ndarray:
    """Unit vector spanning the (one-dimensional) numerical kernel of `m`.

    Uses the right singular vector of the smallest singular value. Raises
    DegenerateKernel when the two smallest singular values agree within
    `gap_tol` relative, because the kernel is then not one-dimensional.
    """
    m = _as_dense_square(m)
    if m.shape[0] == 1:
        return np.ones(1, dtype=complex)
    _, s, vh = np.linalg.svd(m)
    smallest, second = s[-1], s[-2]
    if second == 0.0 or (second - smallest) <= gap_tol * second:
        raise DegenerateKernel(
            f"smallest singular values {smallest:.3e} and {second:.3e} are not separated"
        )
    logger.debug("null_vector: gap ratio %.3e", second / max(smallest, np.finfo(float).tiny))
    x = vh[-1].conj()
    x = x / np.linalg.norm(x)
    return _fix_phase(x)


def solve_linear(a, b: np.ndarray) -> np.ndarray:
    """Solve a x = b for dense or sparse square `a`."""
    if sp.issparse(a):
        if a.shape[0] != a.shape[1] or a.shape[0] != b.shape[0]:
            raise DimensionMismatch(f"cannot solve {a.shape} system with rhs {b.shape}")
        return spla.spsolve(sp.csc_matrix(a), b)
    a = _as_dense_square(a)
    if a.shape[0] != b.shape[0]:
        raise DimensionMismatch(f"cannot solve {a.shape} system with rhs {b.shape}")
    return np.linalg.solve(a, b)


def solve_with_trace_constraint(a, constraint: np.ndarray, replace_row: int = 0) -> np.ndarray:
    """Kernel vector of a singular `a` fixed by constraint·x = 1.

    Row `replace_row` of `a` is swapped for the constraint; it must be a row
    that is linearly dependent on the others (for a trace-preserving
    Liouvillian any diagonal-element row qualifies).
    """
    n = a.shape[0]
    if constraint.shape != (n,):
        raise DimensionMismatch(f"constraint of shape {constraint.shape} for {a.shape} matrix")
    rhs = np.zeros(n, dtype=complex)
    rhs[replace_row] = 1.0
    if sp.issparse(a):
        lil = sp.lil_matrix(a, dtype=complex)
        lil[replace_row, :] = constraint
        return solve_linear(lil.tocsc(), rhs)
    dense = np.array(_as_dense_square(a), dtype=complex)
    dense[replace_row, :] = constraint
    return np.linalg.solve(dense, rhs)


def bordered_system(a, constraint: np.ndarray, weight: float | None = None, row: int = 0):
    """(a + w·e_row⊗constraint, w·e_row): the singular `a` made regular by constraint·x = 1.

    Adding the constraint to a dependent row keeps that row's sparsity and the
    unique kernel vector of `a` becomes the solution. w defaults to the mean
    absolute value of the nonzero entries so the added row is on the scale of the rest.
    """
    a = sp.csr_matrix(a, dtype=complex)
    n = a.shape[0]
    if a.shape != (n, n) or constraint.shape != (n,):
        raise DimensionMismatch(f"constraint of shape {constraint.shape} for {a.shape} matrix")
    if weight is None:
        magnitudes = np.abs(a.data)
        magnitudes = magnitudes[magnitudes > 0]
        weight = float(magnitudes.mean()) if magnitudes.size else 1.0
    cols = np.flatnonzero(constraint)
    border = sp.csr_matrix(
        (weight * constraint[cols], (np.full(cols.size, row), cols)), shape=(n, n), dtype=complex,
    )
    rhs = np.zeros(n, dtype=complex)
    rhs[row] = weight
    return (a + border).tocsr(), rhs


class IluPreconditioner:
    """Incomplete LU of a sparse matrix in reverse Cuthill-McKee order.

    Stays usable for matrices close to the one it was built from, so a sweep
    can keep one factorization across neighbouring points.
    """

    def __init__(self, a, drop_tol: float = ILU_DROP_TOL, fill_factor: float = ILU_FILL_FACTOR):
        a = sp.csr_matrix(a, dtype=complex)
        n = a.shape[0]
        pattern = sp.csr_matrix((np.ones(a.nnz), a.indices, a.indptr), shape=a.shape)
        pattern.sort_indices()
        self.perm = reverse_cuthill_mckee(pattern, symmetric_mode=False)
        self.inverse_perm = np.argsort(self.perm)
        permuted = a[self.perm][:, self.perm].tocsc()
        try:
            self._ilu = spla.spilu(permuted, drop_tol=drop_tol, fill_factor=fill_factor,
                                   permc_spec="NATURAL")
        except RuntimeError as e:
            raise DegenerateKernel(f"incomplete LU failed: {e}") from e
        self.fill = (self._ilu.L.nnz + self._ilu.U.nnz) / max(a.nnz, 1)
        self.operator = spla.LinearOperator((n, n), matvec=self._apply, dtype=complex)
        logger.debug("ILU preconditioner: n=%d, fill %.1f", n, self.fill)

    def _apply(self, r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=complex).ravel()
        return self._ilu.solve(r[self.perm])[self.inverse_perm]


def solve_preconditioned(
    a,
    rhs: np.ndarray,
    preconditioner: IluPreconditioner | None = None,
    x0: np.ndarray | None = None,
    rtol: float = ITERATIVE_RTOL,
    maxiter: int = ITERATIVE_MAXITER,
) -> IterativeSolution:
    """LGMRES on a sparse system, ILU-preconditioned, optionally warm-started.

    A preconditioner is built when none is passed. Raises IterationLimit when
    the residual does not fall below rtol·‖rhs‖ within maxiter outer cycles.
    """
    a = sp.csr_matrix(a, dtype=complex)
    if a.shape[0] != a.shape[1] or a.shape[0] != rhs.shape[0]:
        raise DimensionMismatch(f"cannot solve {a.shape} system with rhs {rhs.shape}")
    if preconditioner is None:
        preconditioner = IluPreconditioner(a)
    cycles = 0

    def _count(_xk) -> None:
        nonlocal cycles
        cycles += 1

    x, info = spla.lgmres(a, rhs, x0=x0, rtol=rtol, atol=0.0, maxiter=maxiter,
                          M=preconditioner.operator, callback=_count)
    if info > 0:
        residual = np.linalg.norm(rhs - a @ x) / np.linalg.norm(rhs)
        raise IterationLimit(f"LGMRES stopped after {info} cycles at relative residual {residual:.3e}")
    if info < 0:
        raise IterationLimit(f"LGMRES breakdown (info={info})")
    return IterativeSolution(x=x, cycles=cycles, preconditioner=preconditioner)


# ── Quadrature ───────────────────────────────────────────

def _tolerance_target(value: float, abs_tol: float, rel_tol: float) -> float:
    return max(abs_tol, rel_tol * abs(value))


def _checked_quad(func, a, b, abs_tol, rel_tol, **kwargs) -> QuadratureResult:
    """scipy quad with IntegrationWarnings turned into a tolerance check."""
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", IntegrationWarning)
        value, error = _integrate.quad(func, a, b, epsabs=abs_tol, epsrel=rel_tol, **kwargs)
    issues = [w for w in caught if issubclass(w.category, IntegrationWarning)]
    if issues:
        message = str(issues[0].message)
        if not math.isfinite(value) or error > _tolerance_target(value, abs_tol, rel_tol):
            if "subdivisions" in message or "limlst" in message:
                raise MaxSubdivisions(f"{message.strip()} (error estimate {error:.3e})")
            raise QuadratureFailure(f"{message.strip()} (error estimate {error:.3e})")
        logger.warning("quadrature accepted despite warning: %s", message.strip().splitlines()[0])
    return QuadratureResult(value=float(value), error=float(error))


def _mapping(kind: DomainMapping, scale: float):
    """(φ, φ', φ⁻¹) for x = φ(t) on t ∈ (−1, 1)."""
    if kind is DomainMapping.EXPONENTIAL:
        def phi(t):
            return scale * np.arctanh(t)

        def dphi(t):
            return scale / (1.0 - t * t)

        def inverse(x):
            return math.tanh(x / scale)
    else:
        def phi(t):
            return scale * t / (1.0 - t * t)

        def dphi(t):
            return scale * (1.0 + t * t) / (1.0 - t * t) ** 2

        def inverse(x):
            y = x / scale
            if y == 0.0:
                return 0.0
            return (-1.0 + math.sqrt(1.0 + 4.0 * y * y)) / (2.0 * y)
    return phi, dphi, inverse


def integrate(f: Callable[[float], float], spec: QuadratureSpec | None = None) -> QuadratureResult:
    """Adaptive quadrature of a real scalar function over spec's domain.

    Infinite bounds are mapped onto a finite interval with the change of
    variables named by spec.mapping (exponential for e^{−c|x|} tails,
    algebraic for power-law tails); breakpoints are mapped along.
    """
    spec = spec or QuadratureSpec()
    a, b = spec.lower, spec.upper
    inner = [p for p in spec.breakpoints if a < p < b]

    if math.isfinite(a) and math.isfinite(b):
        kwargs = {"points": sorted(inner)} if inner else {}
        return _checked_quad(f, a, b, spec.abs_tol, spec.rel_tol,
                             limit=spec.max_subdivisions, **kwargs)

    phi, dphi, inverse = _mapping(spec.mapping, spec.scale)
    if math.isfinite(a):
        shift, ta, tb = a, 0.0, 1.0
    elif math.isfinite(b):
        shift, ta, tb = b, -1.0, 0.0
    else:
        shift, ta, tb = 0.0, -1.0, 1.0

    def mapped(t: float) -> float:
        jac = dphi(t)
        if not math.isfinite(jac):
            return 0.0
        value = f(shift + phi(t)) * jac
        return value if math.isfinite(value) else 0.0

    points = sorted(inverse(p - shift) for p in inner)
    points = [t for t in points if ta < t < tb]
    kwargs = {"points": points} if points else {}
    return _checked_quad(mapped, ta, tb, spec.abs_tol, spec.rel_tol,
                         limit=spec.max_subdivisions, **kwargs)


def integrate_2d(
    f: Callable[[float, float], float],
    x_bounds: tuple[float, float],
    y_bounds: tuple[float, float],
    abs_tol: float = 1e-10,
    rel_tol: float = 1e-10,
) -> QuadratureResult:
    """∫∫ f(x, y) dy dx over a finite rectangle (nested adaptive quadrature)."""
    (xa, xb), (ya, yb) = x_bounds, y_bounds
    if not all(math.isfinite(v) for v in (xa, xb, ya, yb)):
        raise QuadratureFailure("integrate_2d needs finite bounds; map the domain first")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", IntegrationWarning)
        value, error = _integrate.dblquad(
            lambda y, x: f(x, y), xa, xb, ya, yb, epsabs=abs_tol, epsrel=rel_tol
        )
    if caught and error > _tolerance_target(value, abs_tol, rel_tol):
        raise QuadratureFailure(f"{caught[0].message} (error estimate {error:.3e})")
    return QuadratureResult(value=float(value), error=float(error))


def fourier_cosine(
    f: Callable[[float], float],
    omega: float,
    abs_tol: float = 1e-12,
    limit: int = 200,
    scale: float = 1.0,
) -> QuadratureResult:
    """∫₀^∞ f(x) cos(ωx) dx.

    ω ≠ 0 uses the oscillatory-weight algorithm for semi-infinite ranges;
    ω = 0 falls back to `integrate` with an algebraic mapping of length `scale`.
    """
    if omega == 0.0:
        spec = QuadratureSpec(lower=0.0, abs_tol=abs_tol, rel_tol=1e-12,
                              max_subdivisions=limit, mapping=DomainMapping.ALGEBRAIC,
                              scale=scale)
        return integrate(f, spec)
    return _checked_quad(f, 0.0, math.inf, abs_tol, 1e-12,
                         weight="cos", wvar=abs(omega), limlst=limit)


def fourier_transform_even(
    f: Callable[[float], float], k: np.ndarray, abs_tol: float = 1e-13, scale: float = 1.0,
) -> np.ndarray:
    """Unitary transform (2π)^{-1/2}∫ f(x) e^{−ikx} dx of an even real function."""
    values = [2.0 * fourier_cosine(f, float(kk), abs_tol=abs_tol, scale=scale).value
              for kk in np.atleast_1d(k)]
    return np.asarray(values) / math.sqrt(2.0 * math.pi)


def nonuniform_dft(x: np.ndarray, fx: np.ndarray, k: np.ndarray) -> np.ndarray:
    """(2π)^{-1/2} Σ_i w_i f(x_i) e^{−ik x_i} with trapezoid weights on a sorted, non-uniform x."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape != np.shape(fx):
        raise DimensionMismatch(f"samples {np.shape(fx)} do not match abscissae {x.shape}")
    gaps = np.diff(x)
    if np.any(gaps <= 0):
        raise ValueError("abscissae must be strictly increasing")
    weights = np.zeros_like(x)
    weights[:-1] += 0.5 * gaps
    weights[1:] += 0.5 * gaps
    phase = np.exp(-1j * np.outer(np.atleast_1d(k), x))
    return phase @ (weights * np.asarray(fx)) / math.sqrt(2.0 * math.pi)


def fourier_probability_2d(
    amplitude: np.ndarray, axis0: np.ndarray, axis1: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Probability density of the 2-D Fourier transform of a uniformly sampled amplitude.

    Returns (P, y0, y1): y_i are the angular conjugate variables (kernel
    e^{−i(k0 y0 + k1 y1)}), centred, and P is normalised to ∫∫P dy0 dy1 = 1.
    """
    n0, n1 = amplitude.shape
    if axis0.shape != (n0,) or axis1.shape != (n1,):
        raise DimensionMismatch("axes do not match the amplitude grid")
    d0, d1 = axis0[1] - axis0[0], axis1[1] - axis1[0]
    transformed = np.fft.fftshift(np.fft.fft2(np.fft.ifftshift(amplitude)))
    y0 = 2.0 * math.pi * np.fft.fftshift(np.fft.fftfreq(n0, d=d0))
    y1 = 2.0 * math.pi * np.fft.fftshift(np.fft.fftfreq(n1, d=d1))
    density = np.abs(transformed) ** 2
    cell = (y0[1] - y0[0]) * (y1[1] - y1[0])
    density /= density.sum() * cell
    return density, y0, y1

# kerrpairs/core/lindblad.py
"""
Driven-dissipative steady states of a short ring of lossy Kerr cavities.

Frame rotating at the pump frequency, so the drive is static:

  H = Σ_j (ω_c − ω_p) n_j + J Σ_bonds (a†_{j+1} a_j + h.c.) + u Σ_j a†_j a†_j a_j a_j
      + Σ_j F (e^{iψ_j} a†_j + e^{−iψ_j} a_j)

  ∂_t ρ = −i[H, ρ] + γ Σ_j (2 a_j ρ a†_j − n_j ρ − ρ n_j)

With this dissipator ⟨n⟩ decays at 2γ. Density matrices are vectorized
row-major, vec(AρB) = (A ⊗ Bᵀ) vec(ρ).

Steady states come from the null vector of L: dense SVD for small rings,
ILU-preconditioned LGMRES with Tr ρ = 1 folded into one row above that.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Iterable, Optional, Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.integrate import solve_ivp
from scipy.signal import find_peaks

from kerrpairs.core.errors import (
    DegenerateKernel,
    DimensionMismatch,
    IterationLimit,
    NotHermitian,
    SteadyStateInvalid,
    TruncationTooSmall,
    ValidationFailure,
)
from kerrpairs.core.numerics import (
    HERMITIAN_TOL,
    ITERATIVE_RTOL,
    KERNEL_GAP_TOL,
    IluPreconditioner,
    bordered_system,
    eig_hermitian,
    null_vector,
    solve_preconditioned,
    solve_with_trace_constraint,
)
from kerrpairs.models.results import DensityMatrix, SteadyObservables, SweepResult, TruncationReport
from kerrpairs.models.schemas import (
    DriveParams,
    EvolutionMethod,
    FockBasis,
    LatticeParams,
    SteadyStateMethod,
)

logger = logging.getLogger("kerrpairs.lindblad")

DENSE_LIMIT = 2_000           # largest d² solved by dense SVD under "auto"
STATE_TOL = 1e-10             # Hermiticity, trace and positivity bounds on ρ_ss
ZERO_OCCUPATION = 1e-14       # g² is absent below this N_j
REUSE_CYCLES = 20             # LGMRES cycles allowed on a kept ILU before refactorizing
FAR_DETUNING_FACTOR = 100.0
# Occupation targeted by the far-detuned reference solve (|α|² ≈ F²/Δ²)
_FAR_OCCUPATION = 1e-4
# Fock cutoff of that solve; three-photon weight there is ~N³
_FAR_N_MAX = 2

# Three-cavity rings, energies in units of |u|
_RING_PRESETS = {
    "fig3a": {"J0": 0.1, "u": -1.0},
    "fig3b": {"J0": 0.1, "u": 1.0},
    "fig3c": {"J0": 1.0, "u": 1.0},
    "fig3d": {"J0": 4.0, "u": 1.0},
}
# tight/balanced/wide is J0 against u
_PRESET_ALIASES = {
    "attractive-tight": "fig3a",
    "repulsive-tight": "fig3b",
    "repulsive-balanced": "fig3c",
    "repulsive-wide": "fig3d",
}
_RING_DRIVE = {"F": 0.01, "gamma": 0.1}


# ── Operators ────────────────────────────────────────────

def annihilation_operators(basis: FockBasis) -> list[sp.csr_matrix]:
    """a_j on the full space, site 1 the most significant Kronecker factor."""
    n = basis.local_dim
    local = sp.diags(np.sqrt(np.arange(1, n, dtype=float)), offsets=1, format="csr")
    ops = []
    for j in range(basis.M):
        left = sp.identity(n ** j, format="csr")
        right = sp.identity(n ** (basis.M - j - 1), format="csr")
        ops.append(sp.kron(sp.kron(left, local), right, format="csr"))
    return ops


def ring_bonds(M: int) -> list[tuple[int, int]]:
    """Nearest-neighbour bonds (j, j+1 mod M); a single bond for M = 2, none for M = 1."""
    if M <= 1:
        return []
    if M == 2:
        return [(0, 1)]
    return [(j, (j + 1) % M) for j in range(M)]


def build_hamiltonian(
    lat: LatticeParams, d: DriveParams, basis: FockBasis, check_truncation: bool = True,
) -> sp.csr_matrix:
    """Rotating-frame Bose-Hubbard ring plus static coherent drive (sparse, Hermitian)."""
    if len(d.psi) != basis.M:
        raise DimensionMismatch(f"{len(d.psi)} pump phases for {basis.M} sites")
    if check_truncation and d.F ** 2 / d.gamma ** 2 > basis.n_max / 4.0:
        raise TruncationTooSmall(
            f"F^2/gamma^2 = {d.F ** 2 / d.gamma ** 2:.3g} exceeds n_max/4 = {basis.n_max / 4:g}; "
            "raise n_max or weaken the drive"
        )
    ops = annihilation_operators(basis)
    detuning = lat.omega_c - d.omega_p
    H = sp.csr_matrix((basis.dim, basis.dim), dtype=complex)
    for j, a in enumerate(ops):
        ad = a.T.conj()
        n_op = ad @ a
        H = H + detuning * n_op + lat.u * (ad @ ad @ a @ a)
        if d.F:
            phase = complex(math.cos(d.psi[j]), math.sin(d.psi[j]))
            H = H + d.F * (phase * ad + phase.conjugate() * a)
    for i, j in ring_bonds(basis.M):
        hop = ops[j].T.conj() @ ops[i]
        H = H + lat.J * (hop + hop.T.conj())
    return H.tocsr()


def _sparse_hermitian_deviation(H: sp.spmatrix) -> float:
    norm = spla.norm(H)
    if norm == 0.0:
        return 0.0
    return float(spla.norm(H - H.T.conj()) / norm)


def trace_functional(dim: int) -> np.ndarray:
    """Row t with t·vec(ρ) = Tr ρ."""
    return np.eye(dim, dtype=complex).reshape(-1)


def build_liouvillian(H, gamma: float, basis: FockBasis) -> sp.csr_matrix:
    """Superoperator L on row-major vec(ρ):

    −i(H ⊗ 1 − 1 ⊗ Hᵀ) + γ Σ_j [2 a_j ⊗ a_j* − n_j ⊗ 1 − 1 ⊗ n_jᵀ]
    """
    H = sp.csr_matrix(H, dtype=complex)
    d = basis.dim
    if H.shape != (d, d):
        raise DimensionMismatch(f"Hamiltonian {H.shape} does not match basis dimension {d}")
    deviation = _sparse_hermitian_deviation(H)
    if deviation > HERMITIAN_TOL:
        raise NotHermitian(f"Hamiltonian deviates from Hermitian by {deviation:.3e}")
    eye = sp.identity(d, dtype=complex, format="csr")
    L = -1j * (sp.kron(H, eye) - sp.kron(eye, H.T))
    if gamma:
        for a in annihilation_operators(basis):
            n_op = a.T.conj() @ a
            L = L + gamma * (2.0 * sp.kron(a, a.conj())
                             - sp.kron(n_op, eye) - sp.kron(eye, n_op.T))
    return sp.csr_matrix(L)


def liouvillian_residual(L, rho: DensityMatrix) -> float:
    """‖L vec(ρ)‖ / (‖L‖_F ‖vec(ρ)‖)."""
    x = rho.entries.reshape(-1)
    norm_L = spla.norm(L) if sp.issparse(L) else np.linalg.norm(L)
    if norm_L == 0.0:
        return 0.0
    return float(np.linalg.norm(L @ x) / (norm_L * np.linalg.norm(x)))


# ── Steady state and time evolution ──────────────────────

def _to_density(x: np.ndarray, basis: FockBasis) -> DensityMatrix:
    rho = np.asarray(x, dtype=complex).reshape(basis.dim, basis.dim)
    rho = 0.5 * (rho + rho.conj().T)
    trace = np.trace(rho).real
    if not math.isfinite(trace) or abs(trace) < np.finfo(float).tiny:
        raise DegenerateKernel("steady-state solve returned a traceless or non-finite vector")
    return DensityMatrix(basis=basis, entries=rho / trace)


class SteadyStateSolver:
    """Steady states of a run of related Liouvillians on one basis.

    svd:        null vector of the dense L (DegenerateKernel for several steady states)
    direct:     sparse LU with the ρ_00 equation replaced by Tr ρ = 1
    iterative:  LGMRES on L with Tr ρ = 1 added to the ρ_00 row, ILU-preconditioned;
                each solve starts from the previous ρ and keeps the ILU while it
                still converges within REUSE_CYCLES outer cycles
    auto:       svd when d² ≤ dense_limit, iterative otherwise
    """

    def __init__(
        self,
        basis: FockBasis,
        method: SteadyStateMethod = SteadyStateMethod.AUTO,
        dense_limit: int = DENSE_LIMIT,
        gap_tol: float = KERNEL_GAP_TOL,
        rtol: float = ITERATIVE_RTOL,
    ):
        self.basis = basis
        self.size = basis.dim ** 2
        method = SteadyStateMethod(method)
        if method is SteadyStateMethod.AUTO:
            method = SteadyStateMethod.SVD if self.size <= dense_limit else SteadyStateMethod.ITERATIVE
        self.method = method
        self.gap_tol = gap_tol
        self.rtol = rtol
        self._guess: Optional[np.ndarray] = None
        self._preconditioner: Optional[IluPreconditioner] = None

    def _iterate(self, L) -> np.ndarray:
        a, rhs = bordered_system(L, trace_functional(self.basis.dim))
        result = None
        if self._preconditioner is not None:
            try:
                result = solve_preconditioned(a, rhs, self._preconditioner, x0=self._guess,
                                              rtol=self.rtol, maxiter=REUSE_CYCLES)
            except IterationLimit:
                logger.debug("kept ILU stalled after %d cycles; refactorizing", REUSE_CYCLES)
        if result is None:
            result = solve_preconditioned(a, rhs, x0=self._guess, rtol=self.rtol)
        logger.debug("iterative steady state: %d LGMRES cycles", result.cycles)
        self._preconditioner = result.preconditioner
        self._guess = result.x
        return result.x

    def solve(self, L) -> DensityMatrix:
        """ρ_ss with L vec(ρ_ss) = 0, Hermitized and trace-normalised."""
        if L.shape != (self.size, self.size):
            raise DimensionMismatch(
                f"Liouvillian {L.shape} does not match basis (d^2 = {self.size})"
            )
        if self.method is SteadyStateMethod.SVD:
            dense = L.toarray() if sp.issparse(L) else np.asarray(L)
            x = null_vector(dense, gap_tol=self.gap_tol)
        elif self.method is SteadyStateMethod.DIRECT:
            x = solve_with_trace_constraint(sp.csr_matrix(L), trace_functional(self.basis.dim))
            if not np.all(np.isfinite(x)):
                raise DegenerateKernel("trace-constrained system is singular: steady state not unique")
        else:
            x = self._iterate(L)

        rho = _to_density(x, self.basis)
        residual = liouvillian_residual(L, rho)
        min_eig = rho.min_eigenvalue()
        logger.debug("steady state (%s, d=%d): residual %.2e, min eigenvalue %.2e",
                     self.method.value, self.basis.dim, residual, min_eig)
        if residual > STATE_TOL:
            raise SteadyStateInvalid(f"residual {residual:.3e} exceeds {STATE_TOL:g}")
        if min_eig < -STATE_TOL:
            raise SteadyStateInvalid(f"steady state has eigenvalue {min_eig:.3e} < -{STATE_TOL:g}")
        return rho


def steady_state(
    L,
    basis: FockBasis,
    method: SteadyStateMethod = SteadyStateMethod.AUTO,
    dense_limit: int = DENSE_LIMIT,
    gap_tol: float = KERNEL_GAP_TOL,
) -> DensityMatrix:
    """One-off steady state; see SteadyStateSolver for the methods."""
    return SteadyStateSolver(basis, method=method, dense_limit=dense_limit, gap_tol=gap_tol).solve(L)


def evolve(
    L,
    rho0: DensityMatrix,
    t_final: float,
    method: EvolutionMethod = EvolutionMethod.EXPM,
    rtol: float = 1e-10,
    atol: float = 1e-12,
) -> DensityMatrix:
    """ρ(t_final) = exp(L t_final) ρ0, by expm_multiply or adaptive DOP853."""
    x0 = rho0.entries.reshape(-1).astype(complex)
    if L.shape != (x0.size, x0.size):
        raise DimensionMismatch(f"Liouvillian {L.shape} does not act on a {x0.size}-vector")
    method = EvolutionMethod(method)
    if method is EvolutionMethod.EXPM:
        x = spla.expm_multiply(sp.csr_matrix(L) * t_final, x0)
    else:
        solution = solve_ivp(lambda _t, y: L @ y, (0.0, t_final), x0,
                             method="DOP853", rtol=rtol, atol=atol)
        if not solution.success:
            raise SteadyStateInvalid(f"time evolution failed: {solution.message}")
        x = solution.y[:, -1]
    return DensityMatrix(basis=rho0.basis, entries=x.reshape(rho0.entries.shape))


def trace_distance(a: DensityMatrix, b: DensityMatrix) -> float:
    """½ Σ |eig(ρa − ρb)|."""
    if a.entries.shape != b.entries.shape:
        raise DimensionMismatch("density matrices live on different bases")
    delta = a.entries - b.entries
    delta = 0.5 * (delta + delta.conj().T)
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(delta))))


# ── Observables and reference states ─────────────────────

def observables(rho: DensityMatrix, residual: Optional[float] = None) -> SteadyObservables:
    """N_j = Tr(ρ n_j) and g²_jj = Tr(ρ a†²a²)/N_j², absent where N_j < 1e-14."""
    occupations, correlations = [], []
    for a in annihilation_operators(rho.basis):
        ad = a.T.conj()
        n_op = ad @ a
        pair_op = ad @ ad @ a @ a
        n_j = max(float(np.real(np.trace(n_op @ rho.entries))), 0.0)
        pairs = max(float(np.real(np.trace(pair_op @ rho.entries))), 0.0)
        occupations.append(n_j)
        correlations.append(pairs / n_j ** 2 if n_j >= ZERO_OCCUPATION else None)
    return SteadyObservables(N=occupations, g2=correlations, n_max=rho.basis.n_max,
                             residual=residual)


def coherent_density_matrix(alpha, basis: FockBasis) -> DensityMatrix:
    """Product of truncated coherent states, amplitude alpha (scalar or per site)."""
    alphas = np.broadcast_to(np.asarray(alpha, dtype=complex), (basis.M,))
    n = np.arange(basis.local_dim)
    factorial = np.array([math.factorial(int(k)) for k in n], dtype=float)
    psi = np.ones(1, dtype=complex)
    for a in alphas:
        local = a ** n / np.sqrt(factorial)
        psi = np.kron(psi, local / np.linalg.norm(local))
    return DensityMatrix(basis=basis, entries=np.outer(psi, psi.conj()))


def fock_density_matrix(occupations: Sequence[int], basis: FockBasis) -> DensityMatrix:
    rho = np.zeros((basis.dim, basis.dim), dtype=complex)
    idx = basis.index(tuple(occupations))
    rho[idx, idx] = 1.0
    return DensityMatrix(basis=basis, entries=rho)


# ── Presets and resonances ───────────────────────────────

def ring_preset(name: str) -> tuple[LatticeParams, DriveParams]:
    """Three-cavity ring with F = 0.01, γ = 0.1, ψ_j = 0 (units of |u|).

    Accepts the canonical names and their descriptive aliases.
    """
    try:
        panel = _RING_PRESETS[_PRESET_ALIASES.get(name, name)]
    except KeyError:
        raise ValidationFailure(
            f"unknown preset '{name}' (known: {', '.join(preset_names(aliases=True))})"
        ) from None
    lat = LatticeParams.from_j0(panel["J0"], panel["u"], N=3)
    drive = DriveParams(F=_RING_DRIVE["F"], gamma=_RING_DRIVE["gamma"], psi=(0.0, 0.0, 0.0))
    return lat, drive


def preset_names(aliases: bool = False) -> list[str]:
    """Canonical preset names; with aliases=True the descriptive spellings follow."""
    names = sorted(_RING_PRESETS)
    return names + sorted(_PRESET_ALIASES) if aliases else names


def single_photon_resonance(lat: LatticeParams) -> float:
    return lat.omega_c + 0.5 * lat.J0


def pair_resonance(lat: LatticeParams, M: int = 3, psi: Sequence[float] | None = None) -> tuple[float, float]:
    """Pump frequencies resonant with the bound pair: (ring value, infinite-chain value).

    The ring value is half the two-photon level of the undriven M-site ring
    that the pumped pair (Σ_j e^{iψ_j} a†_j)²|0⟩ overlaps, taken on the
    sgn(u) side; the infinite-chain value is ω_c + sgn(u)√(J0² + 4u²)/2.
    """
    psi = tuple(psi) if psi is not None else (0.0,) * M
    basis = FockBasis(M=M, n_max=2)
    undriven = DriveParams(F=0.0, gamma=1.0, omega_p=0.0, psi=psi)
    H = build_hamiltonian(lat, undriven, basis, check_truncation=False).toarray()
    two = [i for i, s in enumerate(basis.states()) if sum(s) == 2]
    block = H[np.ix_(two, two)]

    ops = annihilation_operators(basis)
    creation = sp.csr_matrix((basis.dim, basis.dim), dtype=complex)
    for p, a in zip(psi, ops):
        creation = creation + complex(math.cos(p), math.sin(p)) * a.T.conj()
    vacuum = np.zeros(basis.dim, dtype=complex)
    vacuum[0] = 1.0
    pair = (creation @ (creation @ vacuum))[two]
    pair /= np.linalg.norm(pair)

    decomposition = eig_hermitian(block)
    weights = np.abs(decomposition.eigenvectors.conj().T @ pair) ** 2
    coupled = decomposition.eigenvalues[weights > 1e-12]
    level = coupled.max() if lat.u > 0 else coupled.min()
    ring = lat.omega_c + 0.5 * (level - 2.0 * lat.omega_c)
    infinite = lat.omega_c + math.copysign(math.hypot(lat.J0, 2.0 * lat.u), lat.u) / 2.0
    return float(ring), float(infinite)


def sweep_window(lat: LatticeParams, M: int = 3, margin: float | None = None) -> tuple[float, float]:
    """ω_p range covering both resonances with a margin (default |u|/2)."""
    margin = 0.5 * abs(lat.u) if margin is None else margin
    ring, infinite = pair_resonance(lat, M)
    points = (single_photon_resonance(lat), ring, infinite)
    return min(points) - margin, max(points) + margin


# ── Sweeps ───────────────────────────────────────────────

def solve_point(
    lat: LatticeParams,
    d: DriveParams,
    basis: FockBasis,
    method: SteadyStateMethod = SteadyStateMethod.AUTO,
    dense_limit: int = DENSE_LIMIT,
    check_truncation: bool = True,
    gap_tol: float = KERNEL_GAP_TOL,
    solver: Optional[SteadyStateSolver] = None,
) -> SteadyObservables:
    if solver is None:
        solver = SteadyStateSolver(basis, method=method, dense_limit=dense_limit, gap_tol=gap_tol)
    H = build_hamiltonian(lat, d, basis, check_truncation=check_truncation)
    L = build_liouvillian(H, d.gamma, basis)
    rho = solver.solve(L)
    return observables(rho, residual=liouvillian_residual(L, rho))


def _nearest_peak(x: np.ndarray, y: np.ndarray, target: float) -> Optional[float]:
    """Local maximum of y nearest to target, refined by a three-point parabola."""
    finite = np.where(np.isfinite(y), y, -np.inf)
    peaks, _ = find_peaks(finite)
    if peaks.size == 0:
        return None
    i = int(peaks[np.argmin(np.abs(x[peaks] - target))])
    xs, ys = x[i - 1:i + 2], finite[i - 1:i + 2]
    if not np.all(np.isfinite(ys)):
        return float(x[i])
    curvature, slope, _ = np.polyfit(xs - x[i], ys, 2)
    if curvature >= 0:
        return float(x[i])
    return float(x[i] - slope / (2.0 * curvature))


def _site_mean(values: np.ndarray) -> np.ndarray:
    counts = np.sum(np.isfinite(values), axis=1)
    totals = np.nansum(values, axis=1)
    return np.where(counts > 0, totals / np.maximum(counts, 1), np.nan)


def pump_sweep(
    lat: LatticeParams,
    d_template: DriveParams,
    omega_p: Iterable[float],
    basis: FockBasis,
    method: SteadyStateMethod = SteadyStateMethod.AUTO,
    dense_limit: int = DENSE_LIMIT,
    workers: int = 1,
    far_detuning_factor: float | None = FAR_DETUNING_FACTOR,
    gap_tol: float = KERNEL_GAP_TOL,
) -> SweepResult:
    """Steady-state N_j and g²_jj across pump frequencies, with peak positions.

    The g² peak is the local maximum nearest the ring pair resonance, the N
    peak the one nearest ω_c + J0/2. The far-detuned reference is solved at
    ω_c + far_detuning_factor·max(|u|, |J0|) with the drive raised to keep
    N ≈ 1e-4, where the weak-drive g² is resolvable in double precision.
    """
    grid = np.asarray(list(omega_p), dtype=float)
    if grid.ndim != 1 or grid.size < 3:
        raise ValidationFailure("omega_p grid needs at least three points")
    if np.any(np.diff(grid) <= 0):
        raise ValidationFailure("omega_p grid must be strictly increasing")
    # raises TruncationTooSmall before any point is solved
    build_hamiltonian(lat, d_template, basis)

    def _solve_chunk(chunk: np.ndarray) -> list[SteadyObservables]:
        # one solver per contiguous chunk so neighbours share the ILU and warm start
        solver = SteadyStateSolver(basis, method=method, dense_limit=dense_limit, gap_tol=gap_tol)
        points = []
        for w in chunk:
            point = solve_point(lat, d_template.model_copy(update={"omega_p": float(w)}), basis,
                                solver=solver)
            logger.debug("omega_p=%.6g N=%s g2=%s", w, point.N, point.g2)
            points.append(point)
        return points

    chunks = np.array_split(grid, max(1, min(workers, grid.size)))
    if len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            solved = list(pool.map(_solve_chunk, chunks))
    else:
        solved = [_solve_chunk(chunks[0])]
    points = [p for part in solved for p in part]

    N = np.array([p.N for p in points], dtype=float)
    g2 = np.array([[np.nan if g is None else g for g in p.g2] for p in points], dtype=float)
    residuals = np.array([p.residual for p in points], dtype=float)

    ring, infinite = pair_resonance(lat, basis.M, d_template.psi)
    single = single_photon_resonance(lat)
    g2_peak = _nearest_peak(grid, _site_mean(g2), ring)
    N_peak = _nearest_peak(grid, N.mean(axis=1), single)

    far_g2 = None
    if far_detuning_factor:
        detuning = far_detuning_factor * max(abs(lat.u), abs(lat.J0))
        far_drive = d_template.model_copy(update={
            "omega_p": lat.omega_c + detuning,
            "F": max(d_template.F, math.sqrt(_FAR_OCCUPATION) * detuning),
        })
        far_basis = FockBasis(M=basis.M, n_max=min(basis.n_max, _FAR_N_MAX))
        far_method = SteadyStateMethod.SVD if far_basis.dim ** 2 <= dense_limit else method
        far = solve_point(lat, far_drive, far_basis, method=far_method, dense_limit=dense_limit,
                          check_truncation=False, gap_tol=gap_tol)
        present = [g for g in far.g2 if g is not None]
        far_g2 = float(np.mean(present)) if present else None

    logger.info("pump sweep: %d points, g2 peak %s (ring resonance %.6g), N peak %s (%.6g)",
                grid.size, g2_peak, ring, N_peak, single)
    return SweepResult(
        omega_p=grid, N=N, g2=g2, residuals=residuals,
        g2_peak=g2_peak, N_peak=N_peak,
        pair_resonance=ring, pair_resonance_infinite=infinite,
        single_resonance=single, far_detuned_g2=far_g2,
    )


def _relative_change(new: Optional[float], old: Optional[float]) -> float:
    if new is None and old is None:
        return 0.0
    if new is None or old is None:
        return math.inf
    scale = max(abs(new), abs(old))
    return 0.0 if scale == 0.0 else abs(new - old) / scale


def truncation_convergence(
    lat: LatticeParams,
    d: DriveParams,
    n_max_values: Sequence[int],
    M: int = 3,
    method: SteadyStateMethod = SteadyStateMethod.AUTO,
    tol: float = 1e-4,
) -> TruncationReport:
    """Observables at increasing n_max; converged once successive values agree within tol."""
    values = list(n_max_values)
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ValidationFailure(f"n_max list must be increasing, got {values}")
    N, g2, deltas = [], [], []
    converged_at = None
    previous: Optional[SteadyObservables] = None
    for n_max in values:
        point = solve_point(lat, d, FockBasis(M=M, n_max=n_max), method=method)
        N.append(point.N)
        g2.append(point.g2)
        if previous is None:
            deltas.append(math.nan)
        else:
            changes = [_relative_change(a, b) for a, b in zip(point.N, previous.N)]
            changes += [_relative_change(a, b) for a, b in zip(point.g2, previous.g2)]
            delta = max(changes)
            deltas.append(delta)
            if converged_at is None and delta < tol:
                converged_at = n_max
        previous = point
    if converged_at is None:
        logger.warning("observables not converged within n_max=%s (deltas %s)", values, deltas)
    return TruncationReport(n_max=values, N=N, g2=g2, deltas=deltas,
                            converged=converged_at is not None, converged_at=converged_at)

# tests/test_numerics.py
import math

import numpy as np
import pytest
import scipy.sparse as sp

from conftest import random_hermitian
from kerrpairs.core.errors import (
    DegenerateKernel,
    DimensionMismatch,
    MaxSubdivisions,
    NotHermitian,
    QuadratureFailure,
)
from kerrpairs.core.numerics import (
    IluPreconditioner,
    bordered_system,
    eig_hermitian,
    fourier_cosine,
    fourier_probability_2d,
    fourier_transform_even,
    integrate,
    integrate_2d,
    nonuniform_dft,
    null_vector,
    relative_hermitian_deviation,
    solve_preconditioned,
    solve_with_trace_constraint,
)
from kerrpairs.models.schemas import DomainMapping, QuadratureSpec


# ── eig_hermitian ────────────────────────────────────────

class TestEigHermitian:
    def test_identity(self):
        result = eig_hermitian(np.eye(2))
        assert np.allclose(result.eigenvalues, [1.0, 1.0])

    def test_pauli_x(self):
        result = eig_hermitian(np.array([[0.0, 1.0], [1.0, 0.0]]))
        assert np.allclose(result.eigenvalues, [-1.0, 1.0])

    def test_rank_one_outer_product(self):
        w = np.array([1.0, math.sqrt(2.0), math.sqrt(2.0)])
        m = np.outer(w, w)
        values = eig_hermitian(m).eigenvalues
        assert values[-1] == pytest.approx(np.trace(m), rel=1e-12)
        assert np.all(np.abs(values[:-1]) <= 1e-10 * np.linalg.norm(m, 2))

    def test_reconstruction_and_residuals(self, rng):
        for n in (2, 5, 12):
            m = random_hermitian(rng, n)
            result = eig_hermitian(m)
            v, lam = result.eigenvectors, result.eigenvalues
            assert np.all(np.diff(lam) >= 0)
            rebuilt = v @ np.diag(lam) @ v.conj().T
            assert np.linalg.norm(rebuilt - m) <= 1e-10 * np.linalg.norm(m)
            for i in range(n):
                residual = np.linalg.norm(m @ v[:, i] - lam[i] * v[:, i])
                assert residual <= 1e-10 * np.linalg.norm(m, 2)

    def test_sparse_input(self):
        m = sp.csr_matrix(np.diag([3.0, 1.0, 2.0]))
        assert np.allclose(eig_hermitian(m).eigenvalues, [1.0, 2.0, 3.0])

    def test_rejects_non_hermitian(self):
        with pytest.raises(NotHermitian):
            eig_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_rejects_non_square(self):
        with pytest.raises(DimensionMismatch):
            eig_hermitian(np.ones((2, 3)))

    def test_deviation_of_zero_matrix(self):
        assert relative_hermitian_deviation(np.zeros((3, 3))) == 0.0


# ── null_vector ──────────────────────────────────────────

class TestNullVector:
    def test_explicit_kernel(self):
        x = null_vector(np.diag([0.0, 1.0, 2.0]))
        assert np.allclose(x, [1.0, 0.0, 0.0])

    def test_rotation_block_plus_zero(self):
        m = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
        x = null_vector(m)
        assert np.allclose(np.abs(x), [0.0, 0.0, 1.0])

    def test_random_kernels(self, rng):
        for _ in range(100):
            n = 5
            u, _ = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
            v, _ = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
            s = np.concatenate([rng.uniform(0.5, 2.0, size=n - 1), [0.0]])
            m = u @ np.diag(s) @ v.conj().T
            x = null_vector(m)
            assert np.linalg.norm(x) == pytest.approx(1.0, abs=1e-12)
            assert np.linalg.norm(m @ x) <= 1e-10 * np.linalg.norm(m, 2)

    def test_degenerate_kernel(self):
        with pytest.raises(DegenerateKernel):
            null_vector(np.diag([0.0, 0.0, 1.0]))


# ── Linear solves ────────────────────────────────────────

class TestTraceConstraint:
    RATES = np.array([[-1.0, 2.0], [1.0, -2.0]])

    def test_dense(self):
        x = solve_with_trace_constraint(self.RATES, np.ones(2))
        assert np.allclose(x, [2.0 / 3.0, 1.0 / 3.0])

    def test_sparse(self):
        x = solve_with_trace_constraint(sp.csr_matrix(self.RATES), np.ones(2))
        assert np.allclose(x, [2.0 / 3.0, 1.0 / 3.0])

    def test_shape_check(self):
        with pytest.raises(DimensionMismatch):
            solve_with_trace_constraint(self.RATES, np.ones(3))


class TestIterativeSolve:
    # generator of a three-state Markov chain; stationary distribution (1/2, 1/4, 1/4)
    RATES = np.array([[-1.0, 2.0, 0.0], [1.0, -3.0, 1.0], [0.0, 1.0, -1.0]])

    def test_bordered_rows(self):
        a, rhs = bordered_system(self.RATES, np.ones(3))
        w = 10.0 / 7.0
        assert np.allclose(rhs, [w, 0.0, 0.0])
        assert np.allclose(a.toarray()[0], self.RATES[0] + w)
        assert np.allclose(a.toarray()[1:], self.RATES[1:])

    def test_explicit_weight(self):
        a, rhs = bordered_system(self.RATES, np.ones(3), weight=2.0, row=1)
        assert np.allclose(rhs, [0.0, 2.0, 0.0])
        assert np.allclose(a.toarray()[1], self.RATES[1] + 2.0)

    def test_stationary_distribution(self):
        a, rhs = bordered_system(sp.csr_matrix(self.RATES), np.ones(3))
        result = solve_preconditioned(a, rhs)
        assert np.allclose(result.x, [0.5, 0.25, 0.25], atol=1e-10)
        assert result.cycles >= 1

    def test_warm_start_reuses_preconditioner(self):
        a, rhs = bordered_system(self.RATES, np.ones(3))
        cold = solve_preconditioned(a, rhs)
        warm = solve_preconditioned(a, rhs, cold.preconditioner, x0=cold.x)
        assert warm.preconditioner is cold.preconditioner
        assert warm.cycles <= 1
        assert np.allclose(warm.x, cold.x, atol=1e-12)

    def test_preconditioner_inverts_small_matrix(self):
        a, _ = bordered_system(self.RATES, np.ones(3))
        ilu = IluPreconditioner(a, drop_tol=0.0)
        b = np.array([1.0, -2.0, 0.5])
        assert np.allclose(a @ ilu.operator.matvec(b), b, atol=1e-12)

    def test_shape_check(self):
        with pytest.raises(DimensionMismatch):
            bordered_system(self.RATES, np.ones(4))
        with pytest.raises(DimensionMismatch):
            solve_preconditioned(sp.identity(3), np.ones(2))


# ── Quadrature ───────────────────────────────────────────

class TestIntegrate:
    def test_sine(self):
        result = integrate(math.sin, QuadratureSpec(lower=0.0, upper=math.pi))
        assert result.value == pytest.approx(2.0, abs=1e-12)

    def test_normalized_exponential(self):
        xi = 1.0
        spec = QuadratureSpec(mapping=DomainMapping.EXPONENTIAL, scale=1.0 / xi,
                              breakpoints=(0.0,), abs_tol=1e-12, rel_tol=1e-12)
        result = integrate(lambda x: 2.0 * xi * math.exp(-2.0 * xi * abs(x)), spec)
        assert result.value == pytest.approx(1.0, abs=1e-10)

    def test_momentum_amplitude_normalization(self):
        xi = 0.5
        c = math.sqrt(2.0 / math.pi) * xi ** 1.5
        spec = QuadratureSpec(mapping=DomainMapping.ALGEBRAIC, scale=xi)
        result = integrate(lambda k: (c / (k * k + xi * xi)) ** 2, spec)
        assert result.value == pytest.approx(1.0, abs=1e-10)

    def test_half_line(self):
        spec = QuadratureSpec(lower=0.0, mapping=DomainMapping.EXPONENTIAL, scale=2.0)
        assert integrate(lambda x: math.exp(-x), spec).value == pytest.approx(1.0, abs=1e-11)

    @pytest.mark.parametrize("degree", range(6))
    def test_polynomials_exact(self, degree):
        spec = QuadratureSpec(lower=-1.0, upper=2.0)
        exact = (2.0 ** (degree + 1) - (-1.0) ** (degree + 1)) / (degree + 1)
        assert integrate(lambda x: x ** degree, spec).value == pytest.approx(exact, abs=1e-12)

    def test_subdivision_limit(self):
        spec = QuadratureSpec(lower=0.0, upper=50.0, max_subdivisions=1,
                              abs_tol=1e-12, rel_tol=1e-12)
        with pytest.raises(MaxSubdivisions):
            integrate(lambda x: math.sin(x * x), spec)

    def test_spec_rejects_empty_domain(self):
        with pytest.raises(ValueError):
            QuadratureSpec(lower=1.0, upper=1.0)


class TestIntegrate2d:
    def test_gaussian(self):
        result = integrate_2d(lambda x, y: math.exp(-x * x - y * y), (-8.0, 8.0), (-8.0, 8.0))
        assert result.value == pytest.approx(math.pi, abs=1e-9)

    def test_anisotropic_gaussian(self):
        # ∫∫ exp(-x²/2 - 2y²) = sqrt(2π)·sqrt(π/2) = π
        result = integrate_2d(lambda x, y: math.exp(-0.5 * x * x - 2.0 * y * y),
                              (-12.0, 12.0), (-6.0, 6.0))
        assert result.value == pytest.approx(math.pi, abs=1e-9)

    def test_argument_order(self):
        result = integrate_2d(lambda x, y: x, (0.0, 2.0), (0.0, 1.0))
        assert result.value == pytest.approx(2.0, abs=1e-12)

    def test_infinite_bounds_rejected(self):
        with pytest.raises(QuadratureFailure):
            integrate_2d(lambda x, y: 1.0, (0.0, math.inf), (0.0, 1.0))


class TestFourier:
    @pytest.mark.parametrize("omega", [0.0, 0.5, 2.0])
    def test_cosine_transform_of_exponential(self, omega):
        result = fourier_cosine(lambda x: math.exp(-x), omega)
        assert result.value == pytest.approx(1.0 / (1.0 + omega ** 2), abs=1e-11)

    def test_even_transform(self):
        k = np.array([0.0, 0.3, 1.0, 4.0])
        values = fourier_transform_even(lambda x: math.exp(-abs(x)), k, abs_tol=1e-12)
        exact = math.sqrt(2.0 / math.pi) / (1.0 + k ** 2)
        assert np.allclose(values, exact, atol=1e-11)

    def test_nonuniform_dft_of_gaussian(self):
        x = np.sinh(np.linspace(-3.0, 3.0, 4001))
        k = np.linspace(-3.0, 3.0, 13)
        values = nonuniform_dft(x, np.exp(-x ** 2 / 2.0), k)
        assert np.allclose(values.real, np.exp(-k ** 2 / 2.0), atol=1e-4)
        assert np.allclose(values.imag, 0.0, atol=1e-10)

    def test_nonuniform_dft_shape_check(self):
        with pytest.raises(DimensionMismatch):
            nonuniform_dft(np.linspace(0, 1, 5), np.ones(4), np.zeros(1))

    def test_probability_2d_of_gaussian(self):
        k = np.linspace(-10.0, 10.0, 256)
        amplitude = np.exp(-(k[:, None] ** 2 + k[None, :] ** 2) / 2.0)
        density, y0, y1 = fourier_probability_2d(amplitude, k, k)
        cell = (y0[1] - y0[0]) * (y1[1] - y1[0])
        assert density.sum() * cell == pytest.approx(1.0, rel=1e-12)
        marginal = density.sum(axis=0) / density.sum()
        variance = float(np.sum(marginal * y1 ** 2) - np.sum(marginal * y1) ** 2)
        assert variance == pytest.approx(0.5, rel=1e-6)

    def test_probability_2d_axis_check(self):
        with pytest.raises(DimensionMismatch):
            fourier_probability_2d(np.ones((4, 4)), np.arange(3.0), np.arange(4.0))

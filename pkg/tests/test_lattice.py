# tests/test_lattice.py
import math
import warnings

import numpy as np
import pytest
from pydantic import ValidationError

from kerrpairs.core import continuum, lattice
from kerrpairs.core.errors import (
    OffGridMomentum,
    RegimeMismatchWarning,
    ResonantDenominator,
    ValidationFailure,
    ZeroInteraction,
)
from kerrpairs.models.schemas import AsymptoticRegime, LatticeParams

SQRT13 = math.sqrt(13.0)


def _params(j0: float, u: float, N: int = 51, omega_c: float = 0.0) -> LatticeParams:
    return LatticeParams.from_j0(j0, u, omega_c=omega_c, N=N)


# ── Single photon ────────────────────────────────────────

class TestDispersion:
    P = LatticeParams(omega_c=1.0, J=0.5, u=1.0, N=52)

    def test_band_top(self):
        assert lattice.single_photon_dispersion(self.P, 0.0) == pytest.approx(2.0)

    def test_quarter_zone(self):
        assert lattice.single_photon_dispersion(self.P, math.pi / 2.0) == pytest.approx(1.0, abs=1e-12)

    def test_band_average(self):
        values = lattice.single_photon_dispersion(self.P, lattice.momentum_grid(self.P))
        assert values.shape == (52,)
        assert float(np.sum(values)) == pytest.approx(52.0, abs=1e-10)

    def test_off_grid_momentum(self):
        with pytest.raises(OffGridMomentum):
            lattice.single_photon_dispersion(self.P, 0.1)

    def test_pair_momentum_must_be_on_grid(self):
        with pytest.raises(ValidationError):
            LatticeParams(J=1.0, u=1.0, N=51, k0=0.1)


# ── Bound state ──────────────────────────────────────────

class TestBoundState:
    def test_no_hopping(self):
        state = lattice.bound_state_lattice(_params(0.0, 1.0))
        assert state.eta == 0.0
        assert state.E_b == pytest.approx(2.0)
        assert state.basis_vector()[0] == pytest.approx(1.0)
        assert np.allclose(state.basis_vector()[1:], 0.0)

    def test_reference_point(self):
        p = _params(2.0, 1.5)
        state = lattice.bound_state_lattice(p)
        assert state.E_b == pytest.approx(SQRT13, rel=1e-14)
        assert state.eta == pytest.approx(0.302776, abs=1e-6)
        assert np.linalg.norm(state.basis_vector()) == pytest.approx(1.0, abs=1e-14)

        spectrum = lattice.exact_diagonalize(p)
        assert spectrum.bound_energy == pytest.approx(SQRT13, abs=1e-8)
        overlap = abs(spectrum.eigenvectors[:, spectrum.bound_index] @ state.basis_vector())
        assert overlap >= 1.0 - 1e-8

    def test_even_ring(self):
        p = _params(2.0, 1.5, N=50)
        assert p.relative_dim == 26
        spectrum = lattice.exact_diagonalize(p)
        assert spectrum.bound_energy == pytest.approx(SQRT13, abs=1e-8)

    def test_even_ring_state_matches_diagonalization(self):
        p = _params(2.0, 1.5, N=4)
        state = lattice.bound_state_lattice(p)
        assert np.linalg.norm(state.basis_vector()) == pytest.approx(1.0, abs=1e-14)
        spectrum = lattice.exact_diagonalize(p)
        vec = spectrum.eigenvectors[:, spectrum.bound_index]
        f = vec / np.array([math.sqrt(2.0), 1.0, math.sqrt(2.0)])
        j, prob = lattice.joint_probability(f, self_paired_end=True)
        assert list(j) == [-1, 0, 1, 2]
        assert float(prob.sum()) == pytest.approx(1.0, abs=1e-12)

    def test_attractive_mirror(self):
        p = _params(2.0, -1.5)
        state = lattice.bound_state_lattice(p)
        assert state.E_b == pytest.approx(-SQRT13, rel=1e-14)
        assert lattice.exact_diagonalize(p).bound_energy == pytest.approx(-SQRT13, abs=1e-8)

    def test_cavity_frequency_offset(self):
        p = _params(2.0, 1.5, omega_c=0.75)
        assert lattice.bound_state_lattice(p).E_b == pytest.approx(1.5 + SQRT13)
        assert lattice.exact_diagonalize(p).bound_energy == pytest.approx(1.5 + SQRT13, abs=1e-8)

    def test_decay_base_inside_unit_disc(self, rng):
        for _ in range(1000):
            j0 = rng.uniform(-50.0, 50.0)
            u = rng.choice([-1.0, 1.0]) * rng.uniform(1e-3, 10.0)
            assert abs(lattice.bound_state_lattice(_params(j0, u)).eta) < 1.0

    def test_zero_interaction(self):
        with pytest.raises(ZeroInteraction):
            lattice.bound_state_lattice(_params(1.0, 0.0))

    def test_random_parameters_match_diagonalization(self, rng):
        for _ in range(200):
            eta = rng.uniform(-0.7, 0.7)
            u = rng.choice([-1.0, 1.0]) * rng.uniform(0.1, 10.0)
            j0 = 4.0 * u * eta / (1.0 - eta ** 2)
            p = _params(j0, u, N=71)
            state = lattice.bound_state_lattice(p)
            assert state.eta == pytest.approx(eta, abs=1e-12)
            spectrum = lattice.exact_diagonalize(p)
            assert spectrum.bound_index is not None
            assert spectrum.bound_energy == pytest.approx(state.E_b, abs=1e-8 * max(1.0, abs(state.E_b)))
            overlap = abs(spectrum.eigenvectors[:, spectrum.bound_index] @ state.basis_vector())
            assert overlap >= 1.0 - 1e-8

    def test_ring_prefactor(self):
        state = lattice.bound_state_lattice(_params(0.0, 1.0, N=51))
        assert state.ring_prefactor == pytest.approx(2.0 / math.sqrt(51.0))


# ── Spectrum ─────────────────────────────────────────────

class TestSpectrum:
    def test_block_is_symmetric(self):
        for N in (3, 4, 11, 12):
            block = lattice.two_photon_block(_params(1.3, 0.4, N=N))
            assert block.shape == (N // 2 + 1, N // 2 + 1)
            assert np.array_equal(block, block.T)

    @pytest.mark.parametrize("N", [51, 50])
    def test_free_pairs_stay_in_band(self, N):
        spectrum = lattice.exact_diagonalize(_params(2.0, 0.0, N=N))
        assert spectrum.bound_index is None
        assert np.all(np.abs(spectrum.eigenvalues) <= 2.0 + 1e-12)

    def test_single_split_off_level(self):
        spectrum = lattice.exact_diagonalize(_params(2.0, 1.5))
        outside = np.abs(spectrum.eigenvalues) > 2.0 * (1.0 + 1.0 / 51.0)
        assert int(outside.sum()) == 1
        assert lattice.split_off_level(spectrum, 1.5) == pytest.approx(spectrum.bound_energy)

    def test_band_covers_every_sector(self):
        sectors = lattice.two_photon_band(J=0.5, u=1.0, N=21)
        assert len(sectors) == 21
        for k0, spectrum in sectors:
            j0 = 2.0 * math.cos(k0)
            assert spectrum.bound_energy == pytest.approx(math.hypot(j0, 2.0), abs=1e-6)


# ── Scattering states and the recursion ──────────────────

class TestScattering:
    def test_free_amplitudes(self):
        p = _params(2.0, 0.0)
        theta = 0.4
        state = lattice.scattering_state(p, theta)
        j = np.arange(p.relative_dim)
        assert state.amplitudes[0] == 1.0
        assert np.allclose(state.amplitudes[1:], 2.0 * np.cos(j[1:] * theta))

    def test_band_centre(self):
        state = lattice.scattering_state(_params(2.0, 1.5, omega_c=1.0), math.pi / 2.0)
        assert state.energy == pytest.approx(2.0, abs=1e-12)

    @pytest.mark.parametrize("theta", [0.3, 1.1, 2.5])
    def test_scattering_solves_recursion(self, theta):
        p = _params(2.0, 1.5)
        state = lattice.scattering_state(p, theta)
        assert lattice.recursion_residual(state.energy, state.amplitudes, p) <= 1e-10

    def test_bound_state_solves_recursion(self):
        p = _params(2.0, 1.5)
        state = lattice.bound_state_lattice(p)
        assert lattice.recursion_residual(state.E_b, state.amplitudes, p) <= 1e-10

    def test_perturbation_breaks_recursion(self):
        p = _params(2.0, 1.5)
        state = lattice.bound_state_lattice(p)
        f = state.amplitudes.copy()
        f[3] += 1e-2
        assert lattice.recursion_residual(state.E_b, f, p) > 1e-3

    def test_resonant_denominator(self):
        with pytest.raises(ResonantDenominator):
            lattice.scattering_state(_params(2.0, 1.5), 0.0)
        with pytest.raises(ResonantDenominator):
            lattice.scattering_state(_params(0.0, 1.5), 0.5)

    def test_recursion_needs_two_sites(self):
        with pytest.raises(ValidationFailure):
            lattice.recursion_residual(0.0, [1.0], _params(1.0, 1.0))


# ── Binding gap and asymptotics ──────────────────────────

class TestBindingGap:
    def test_no_hopping(self):
        assert lattice.binding_gap(_params(0.0, 1.0)) == pytest.approx(2.0)

    def test_matches_bound_level(self):
        p = _params(2.0, 1.5)
        expected = abs(lattice.bound_state_lattice(p).E_b) - 2.0
        assert lattice.binding_gap(p) == pytest.approx(expected, rel=1e-12)

    def test_curve_is_monotone(self):
        j0, gap = lattice.binding_gap_curve(1.0, np.linspace(0.0, 20.0, 201))
        assert j0.shape == gap.shape
        assert np.all(np.diff(gap) < 0)
        assert gap[-1] == pytest.approx(0.1, rel=0.01)

    def test_curve_needs_interaction(self):
        with pytest.raises(ZeroInteraction):
            lattice.binding_gap_curve(0.0, [1.0])


class TestAsymptotics:
    def test_strong_coupling(self):
        p = _params(0.1, 1.0)
        with warnings.catch_warnings():
            warnings.simplefilter("error", RegimeMismatchWarning)
            approx = lattice.asymptotic_bound_state(p, AsymptoticRegime.STRONG)
        exact = lattice.bound_state_lattice(p)
        assert approx.E_b == pytest.approx(exact.E_b, abs=2e-6)
        assert approx.base == pytest.approx(exact.eta, abs=2e-5)

    def test_strong_coupling_without_hopping(self):
        approx = lattice.asymptotic_bound_state(_params(0.0, 1.0), "strong")
        assert approx.base == 0.0
        assert approx.E_b == pytest.approx(2.0)

    def test_weak_coupling(self):
        p = _params(1.0, 0.05)
        with warnings.catch_warnings():
            warnings.simplefilter("error", RegimeMismatchWarning)
            approx = lattice.asymptotic_bound_state(p, AsymptoticRegime.WEAK)
        exact = lattice.bound_state_lattice(p)
        assert approx.base == pytest.approx(0.905)
        assert approx.base == pytest.approx(exact.eta, abs=2.5e-4)
        assert approx.E_b == pytest.approx(exact.E_b, abs=1e-4)

    def test_mixed_regime_warns(self):
        with pytest.warns(RegimeMismatchWarning):
            lattice.asymptotic_bound_state(_params(1.0, 1.0), AsymptoticRegime.STRONG)

    def test_misapplied_formulas_warn(self):
        with pytest.warns(RegimeMismatchWarning):
            lattice.asymptotic_bound_state(_params(1.0, 0.3), AsymptoticRegime.WEAK)
        with pytest.warns(RegimeMismatchWarning):
            lattice.asymptotic_bound_state(_params(1.0, 0.3), AsymptoticRegime.STRONG)

    def test_weak_needs_hopping(self):
        with pytest.raises(ValidationFailure):
            lattice.asymptotic_bound_state(_params(0.0, 1.0), AsymptoticRegime.WEAK)


# ── Probabilities ────────────────────────────────────────

class TestJointProbability:
    def test_normalized_and_symmetric(self):
        state = lattice.bound_state_lattice(_params(2.0, 1.5))
        j, prob = lattice.joint_probability(state.amplitudes)
        assert j[0] == -25 and j[-1] == 25
        assert float(prob.sum()) == pytest.approx(1.0, abs=1e-14)
        assert np.allclose(prob, prob[::-1])

    def test_even_ring_reports_far_site_once(self):
        state = lattice.bound_state_lattice(_params(2.0, 1.5, N=50))
        assert state.self_paired_end
        j, prob = lattice.joint_probability(state.amplitudes, state.self_paired_end)
        assert j.size == 50
        assert j[0] == -24 and j[-1] == 25
        assert np.count_nonzero(np.abs(j) == 25) == 1
        assert float(prob.sum()) == pytest.approx(1.0, abs=1e-14)
        assert prob[-1] == pytest.approx(2.0 * state.amplitudes[-1] ** 2)

    def test_far_site_weighted_like_double_occupancy(self):
        f = np.array([0.5, 0.5, 0.5])
        j, prob = lattice.joint_probability(f, self_paired_end=True)
        assert list(j) == [-1, 0, 1, 2]
        assert np.allclose(prob, [0.125, 0.5, 0.125, 0.5])

    def test_curves_follow_ring_parity(self):
        odd = lattice.joint_probability_curves(1.0, [0.5], N=11)[0.5]
        even = lattice.joint_probability_curves(1.0, [0.5], N=12)[0.5]
        assert list(odd[0]) == list(range(-5, 6))
        assert list(even[0]) == list(range(-5, 7))
        assert float(even[1].sum()) == pytest.approx(1.0, abs=1e-14)

    def test_tightly_bound_pair_shares_a_site(self):
        curves = lattice.joint_probability_curves(1.0, [1e-3])
        j, prob = curves[1e-3]
        assert prob[j == 0][0] > 0.999

    def test_pairs_spread_with_hopping(self):
        ratios = [0.1, 0.5, 1.0, 2.0, 4.0]
        curves = lattice.joint_probability_curves(1.0, ratios)
        centre = [curves[r][1][curves[r][0] == 0][0] for r in ratios]
        assert all(a > b for a, b in zip(centre, centre[1:]))


def test_momentum_amplitude_closed_form():
    p = _params(2.0, 1.5)
    state = lattice.bound_state_lattice(p)
    q = np.linspace(-2.0 * math.pi, 2.0 * math.pi, 17)
    j = np.arange(-200, 201)
    terms = state.eta ** np.abs(j) - 0.5 * (j == 0)
    direct = (terms[None, :] * np.exp(1j * np.outer(q, j) * p.b / 2.0)).sum(axis=1)
    assert np.allclose(direct.imag, 0.0, atol=1e-12)
    expected = state.ring_prefactor * direct.real
    assert np.allclose(lattice.bound_state_momentum_amplitude(p, q), expected, atol=1e-12)


# ── Continuum limit ──────────────────────────────────────

class TestContinuumLimit:
    def test_weak_interaction_matches_waveguide(self):
        p = _params(1.0, 0.05)
        waveguide = continuum.require_bound_state(lattice.continuum_limit(p))
        exact = lattice.bound_state_lattice(p)
        lattice_shift = exact.E_b - 2.0 * p.omega_c - p.J0
        assert waveguide.binding_shift == pytest.approx(lattice_shift, rel=0.01)
        assert math.exp(-waveguide.xi * p.b) == pytest.approx(exact.eta, abs=1e-3)

    def test_opposite_signs_rejected(self):
        with pytest.raises(ValidationFailure):
            lattice.continuum_limit(_params(1.0, -0.05))

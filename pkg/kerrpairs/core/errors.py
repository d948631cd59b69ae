# kerrpairs/core/errors.py
"""
Exception hierarchy for kerrpairs.

Two families map onto CLI exit statuses:
  ValidationFailure  → 2  (inputs violate a precondition or a physical regime)
  NumericalFailure   → 3  (a solver could not meet its contract)
"""

from __future__ import annotations

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3


class KerrPairsError(RuntimeError):
    """Root of every error raised deliberately by kerrpairs."""

    exit_status: int = EXIT_NUMERICAL


# ── Validation family ───────────────────────────────────

class ValidationFailure(KerrPairsError):
    exit_status = EXIT_VALIDATION


class NoBoundStateError(ValidationFailure):
    """κβ ≥ 0: the continuum model has no two-photon bound state."""


class ZeroInteraction(ValidationFailure):
    """u = 0: the lattice bound state merges with the band edge."""


class OffGridMomentum(ValidationFailure):
    """Momentum not on the 2πn/(Nb) grid of the periodic chain."""


class ResonantDenominator(ValidationFailure):
    """sin(δk b) = 0 or J0 = 0 in the scattering-state formula."""


class DimensionMismatch(ValidationFailure):
    pass


class TruncationTooSmall(ValidationFailure):
    """Drive strong enough that occupations approach the Fock cutoff."""


class InvalidConfig(ValidationFailure):
    pass


# ── Numerical family ────────────────────────────────────

class NumericalFailure(KerrPairsError):
    exit_status = EXIT_NUMERICAL


class NotHermitian(NumericalFailure):
    pass


class DegenerateKernel(NumericalFailure):
    """The two smallest singular values are too close to pick a null vector."""


class QuadratureFailure(NumericalFailure):
    pass


class MaxSubdivisions(QuadratureFailure):
    """Adaptive quadrature hit its subdivision limit above tolerance."""


class GridTooCoarse(NumericalFailure):
    pass


class SteadyStateInvalid(NumericalFailure):
    """Steady state violates Hermiticity, trace or positivity bounds."""


class IterationLimit(NumericalFailure):
    """An iterative solver did not reach its tolerance."""


# ── Warnings ────────────────────────────────────────────

class RegimeMismatchWarning(UserWarning):
    """Asymptotic formula evaluated outside the regime it was derived for."""
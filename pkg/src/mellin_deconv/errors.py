"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class MellinError(Exception):
    """Base class for every error raised by this package."""


class DomainError(MellinError, ValueError):
    """A parameter or development point lies outside its admissible domain."""


class AssumptionViolation(DomainError):
    """A modelling assumption needed by a procedure does not hold."""


class ContractViolation(MellinError, ValueError):
    """A caller-supplied object breaks a documented contract."""


class UnsupportedError(MellinError, NotImplementedError):
    """No closed form is available for the requested quantity."""


class QuadratureError(MellinError, ArithmeticError):
    """Adaptive quadrature did not reach its tolerance.

    Attributes
    ----------
    estimate : float or complex
        Last estimate returned by the integrator.
    abserr : float
        Error bound reported with that estimate.
    """

    def __init__(self, message, estimate=float("nan"), abserr=float("inf")):
        super().__init__(f"{message} (estimate={estimate!r}, abserr={abserr:.3g})")
        self.estimate = estimate
        self.abserr = abserr


class DegenerateExperimentError(MellinError, ValueError):
    """A Monte Carlo experiment produced data that cannot be regressed."""

"""Linear functionals of a density expressed through its Mellin transform.

A functional is encoded by a weight ``Psi`` with

    theta(f) = (2 pi)^-1 int Psi(-t) M_c[f](t) dt.

Point evaluation of the density, the CDF, the survival function and the
Laplace transform at ``x_o > 0`` are built in; :class:`Custom` accepts any
Hermitian ``Psi`` together with a declared decay class.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .errors import ContractViolation, DomainError, UnsupportedError
from .mellin import DecayClass, Distribution, Interval, Smooth, SuperSmooth
from .special import loggamma

__all__ = [
    "Psi1", "Psi2", "PsiDecay", "Regime", "FunctionalSpec", "Density", "Cdf",
    "Survival", "Laplace", "Custom", "psi_eval", "psi_decay",
    "regime_classify", "regime_of", "true_value", "parse_functional",
]

_HERMITIAN_TOL = 1e-10
_PROBE_T = np.linspace(-50.0, 50.0, 41)


@dataclass(frozen=True)
class Psi1:
    """Polynomial envelope ``|Psi(t)| ~ (1 + t^2)^(-p / 2)``."""

    p: float

    def log_envelope(self, t):
        return -0.5 * self.p * np.log1p(np.square(t))


@dataclass(frozen=True)
class Psi2:
    """Envelope ``(1 + t^2)^(-p / 2) exp(-mu |t|^R)``."""

    p: float
    mu: float
    R: float

    def log_envelope(self, t):
        return -0.5 * self.p * np.log1p(np.square(t)) - self.mu * np.abs(t) ** self.R


PsiDecay = Union[Psi1, Psi2]


class Regime(str, enum.Enum):
    PARAMETRIC = "parametric"
    NONPARAMETRIC = "nonparametric"


def _probe_c(interval: Interval) -> float:
    lo, hi = interval.lo, interval.hi
    if math.isfinite(lo) and math.isfinite(hi):
        return 0.5 * (lo + hi)
    if math.isfinite(lo):
        return lo + 0.5
    if math.isfinite(hi):
        return hi - 0.5
    return 1.0


class FunctionalSpec:
    """Base class: a weight ``Psi(c, t)`` with its admissible ``c`` range."""

    kind = "functional"

    def c_interval(self) -> Interval:
        raise NotImplementedError

    def _psi(self, c: float, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def decay(self, c: float) -> PsiDecay:
        raise NotImplementedError

    def psi(self, c: float, t):
        self.c_interval().check(c, f"{self.kind} functional")
        return self._psi(c, np.asarray(t, dtype=float))

    def _check_hermitian(self) -> None:
        c = _probe_c(self.c_interval())
        plus = np.asarray(self._psi(c, _PROBE_T), dtype=complex)
        minus = np.asarray(self._psi(c, -_PROBE_T), dtype=complex)
        gap = np.abs(np.conj(plus) - minus)
        if not np.all(gap <= _HERMITIAN_TOL * np.maximum(1.0, np.abs(plus))):
            raise ContractViolation(
                f"Psi of {self} is not Hermitian (max asymmetry {np.nanmax(gap):.3g})")

    def to_dict(self) -> dict:
        return {"kind": self.kind, "x0": getattr(self, "x_o", None)}


@dataclass(frozen=True)
class _PointFunctional(FunctionalSpec):
    x_o: float

    def __post_init__(self):
        if not (math.isfinite(self.x_o) and self.x_o > 0):
            raise DomainError(f"{self.kind} functional needs x_o > 0, got {self.x_o!r}")
        self._check_hermitian()

    def __str__(self) -> str:
        return f"{self.kind}({self.x_o:g})"


@dataclass(frozen=True)
class Density(_PointFunctional):
    """``theta(f) = f(x_o)``.

    Any real ``c`` is accepted; the caller is responsible for
    ``M_c[f]`` being integrable.
    """

    kind = "density"

    def c_interval(self):
        return Interval()

    def _psi(self, c, t):
        return np.exp((-c + 1j * t) * math.log(self.x_o))

    def decay(self, c=None):
        return Psi1(0.0)


@dataclass(frozen=True)
class Cdf(_PointFunctional):
    """``theta(f) = F(x_o)``; needs ``c < 1``."""

    kind = "cdf"

    def c_interval(self):
        return Interval(-math.inf, 1.0)

    def _psi(self, c, t):
        z = 1.0 - c + 1j * t
        return np.exp(z * math.log(self.x_o)) / z

    def decay(self, c=None):
        return Psi1(1.0)


@dataclass(frozen=True)
class Survival(_PointFunctional):
    """``theta(f) = 1 - F(x_o)``; needs ``c > 1``."""

    kind = "survival"

    def c_interval(self):
        return Interval(1.0, math.inf)

    def _psi(self, c, t):
        z = 1.0 - c + 1j * t
        return -np.exp(z * math.log(self.x_o)) / z

    def decay(self, c=None):
        return Psi1(1.0)


@dataclass(frozen=True)
class Laplace(_PointFunctional):
    """``theta(f) = int exp(-x_o x) f(x) dx``; needs ``c < 1``."""

    kind = "laplace"

    def c_interval(self):
        return Interval(-math.inf, 1.0)

    def _psi(self, c, t):
        z = 1.0 - c + 1j * t
        return np.exp(-z * math.log(self.x_o) + loggamma(z))

    def decay(self, c=None):
        if c is None:
            raise ValueError("the Laplace decay exponent depends on c; pass c")
        return Psi2(1.0 - 2.0 * c, math.pi / 2.0, 1.0)


@dataclass(frozen=True)
class Custom(FunctionalSpec):
    """User-supplied weight.

    Parameters
    ----------
    psi : callable
        ``(c, t) -> Psi(t)`` accepting an array of ``t``.
    decay_class : Psi1 or Psi2
        Declared envelope; it is not inferred.
    interval : Interval
        Admissible development points.
    """

    psi_fn: Callable
    decay_class: PsiDecay
    interval: Interval = field(default_factory=Interval)
    label: str = "custom"
    kind = "custom"

    def __post_init__(self):
        self._check_hermitian()

    def c_interval(self):
        return self.interval

    def _psi(self, c, t):
        return np.asarray(self.psi_fn(c, t), dtype=complex)

    def decay(self, c=None):
        return self.decay_class

    def to_dict(self):
        return {"kind": self.kind, "label": self.label}

    def __str__(self):
        return self.label


def psi_eval(spec: FunctionalSpec, c: float, t):
    """``Psi(t)`` of `spec` at development point `c`.

    Raises
    ------
    DomainError
        If `c` violates the functional's constraint.
    """
    out = spec.psi(c, t)
    return out[()] if np.ndim(out) == 0 else out


def psi_decay(spec: FunctionalSpec, c: float | None = None) -> PsiDecay:
    """Declared decay class of ``Psi``; the Laplace weight needs `c`."""
    return spec.decay(c)


def regime_classify(psi: PsiDecay, g: DecayClass) -> Regime:
    """Whether ``Delta(k)`` stays bounded (parametric) or grows with ``k``."""
    if isinstance(psi, Psi1):
        if isinstance(g, Smooth) and 2.0 * psi.p - 2.0 * g.gamma > 1.0:
            return Regime.PARAMETRIC
        return Regime.NONPARAMETRIC
    if isinstance(g, Smooth):
        return Regime.PARAMETRIC
    if psi.R > g.rho:
        return Regime.PARAMETRIC
    if psi.R == g.rho:
        if psi.mu > g.lam:
            return Regime.PARAMETRIC
        if psi.mu == g.lam and 2.0 * psi.p - 2.0 * g.gamma > 1.0:
            return Regime.PARAMETRIC
    return Regime.NONPARAMETRIC


def regime_of(spec: FunctionalSpec, model: Distribution, c: float) -> Regime:
    """Regime of a (functional, error law) pair at development point `c`."""
    return regime_classify(psi_decay(spec, c), model.decay(c))


def true_value(target: Distribution, spec: FunctionalSpec) -> float:
    """Closed-form ``theta(f)`` for a catalog target.

    Raises
    ------
    UnsupportedError
        For custom functionals, or Laplace transforms without a closed form.
    """
    if isinstance(spec, Density):
        return float(target.pdf(spec.x_o))
    if isinstance(spec, Cdf):
        return float(target.cdf(spec.x_o))
    if isinstance(spec, Survival):
        return 1.0 - float(target.cdf(spec.x_o))
    if isinstance(spec, Laplace):
        return float(target.laplace(spec.x_o))
    raise UnsupportedError(f"no closed-form value of {spec} for {target}")


_KINDS = {"density": Density, "cdf": Cdf, "survival": Survival, "laplace": Laplace}


def parse_functional(kind: str, x_o: float) -> FunctionalSpec:
    """Build a built-in functional from its name."""
    try:
        cls = _KINDS[kind.lower()]
    except KeyError:
        raise ValueError(f"unknown functional {kind!r}; choose from {sorted(_KINDS)}") from None
    return cls(float(x_o))

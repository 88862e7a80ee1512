"""Mellin transforms of densities on the positive half line.

The transform at development point ``c`` is

    M_c[h](t) = int_0^inf x^(c - 1 + i t) h(x) dx,

the multiplicative analogue of the Fourier transform: the density of a
product of independent positive variables has the product of their Mellin
transforms.  This module holds

* a catalog of parametric families (:class:`Beta`, :class:`ScaledLogGamma`,
  :class:`Gamma`, :class:`Weibull`, :class:`Lognormal`) with closed-form
  transforms, moments, weighted sup-norms and decay classes.  They serve both
  as error laws ``g`` and as target laws ``f`` in simulations;
* :class:`DensityFn`, a plain density with a support hint, and numeric
  forward / inverse transforms and multiplicative convolution for it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Union

import numpy as np
from scipy import special as sp

from . import quadrature
from .errors import ContractViolation, DomainError, UnsupportedError
from .special import loggamma, rgamma

__all__ = [
    "Interval", "Smooth", "SuperSmooth", "DecayClass", "DensityFn",
    "Distribution", "Beta", "ScaledLogGamma", "Gamma", "Weibull", "Lognormal",
    "ErrorModel", "parse_model", "analytic_mellin", "numeric_mellin",
    "mult_convolution", "convolve", "inverse_mellin", "error_moment",
    "g_weighted_sup", "decay_class_g",
]

# t-range over which decay-class constants are sampled; the ratio to the
# envelope varies fastest near t = 0, so that end is sampled more densely
DECAY_T_MAX = 200.0
DECAY_T = np.concatenate([np.linspace(0.0, 10.0, 10_001), np.linspace(10.0, DECAY_T_MAX, 19_001)[1:]])
# beyond |log x| > 700 the floating-point range ends; integrands are cut there
_U_CUT = 700.0


@dataclass(frozen=True)
class Interval:
    """Open interval ``(lo, hi)`` of admissible development points."""

    lo: float = -math.inf
    hi: float = math.inf

    def __contains__(self, c) -> bool:
        return self.lo < c < self.hi

    def check(self, c: float, what: str) -> None:
        if c <= self.lo:
            raise DomainError(f"{what} requires c > {self.lo:g}, got c={c:g}")
        if c >= self.hi:
            raise DomainError(f"{what} requires c < {self.hi:g}, got c={c:g}")

    def __and__(self, other: "Interval") -> "Interval":
        return Interval(max(self.lo, other.lo), min(self.hi, other.hi))

    def __str__(self) -> str:
        return f"({self.lo:g}, {self.hi:g})"


# ---------------------------------------------------------------------------
# decay classes


@dataclass(frozen=True)
class Smooth:
    """Polynomial decay ``|M(t)| ~ (1 + t^2)^(-gamma / 2)``."""

    gamma: float
    c_low: float = math.nan
    c_up: float = math.nan

    def log_envelope(self, t):
        return -0.5 * self.gamma * np.log1p(np.square(t))

    def envelope(self, t):
        return np.exp(self.log_envelope(t))


@dataclass(frozen=True)
class SuperSmooth:
    """Exponential decay ``(1 + t^2)^(-gamma / 2) exp(-lam |t|^rho)``."""

    gamma: float
    lam: float
    rho: float
    c_low: float = math.nan
    c_up: float = math.nan

    def log_envelope(self, t):
        return -0.5 * self.gamma * np.log1p(np.square(t)) - self.lam * np.abs(t) ** self.rho

    def envelope(self, t):
        return np.exp(self.log_envelope(t))


DecayClass = Union[Smooth, SuperSmooth]


def _fit_constants(decay, log_abs):
    ratio = log_abs(DECAY_T) - decay.log_envelope(DECAY_T)
    return float(np.exp(ratio.min())), float(np.exp(ratio.max()))


# ---------------------------------------------------------------------------
# plain densities


@dataclass(frozen=True, eq=False)
class DensityFn:
    """A probability density on ``(0, inf)``.

    Parameters
    ----------
    pdf : callable
        ``x -> h(x) >= 0``.  Scalars must be accepted; arrays are optional.
    support : (float, float)
        Interval outside which ``pdf`` vanishes (``hi`` may be ``inf``).
    breakpoints : tuple of float
        Interior points where ``pdf`` is not smooth; used to split quadrature.
    check : bool
        Verify on construction that the density integrates to one within 1e-6.
    """

    pdf: Callable
    support: tuple = (0.0, math.inf)
    breakpoints: tuple = ()
    name: str = "density"
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        lo, hi = self.support
        if not (0.0 <= lo < hi):
            raise ValueError(f"invalid support {self.support!r}")
        if self.check:
            mass = numeric_mellin(self, 1.0, 0.0).real
            if abs(mass - 1.0) > 1e-6:
                raise ContractViolation(f"{self.name} integrates to {mass!r}, not 1")

    def __call__(self, x):
        return self.pdf(x)

    def log_cuts(self) -> list:
        """Points in ``u = log x`` where the integrand should be split."""
        lo, hi = self.support
        a = math.log(lo) if lo > 0 else -math.inf
        b = math.log(hi) if math.isfinite(hi) else math.inf
        cuts = {0.0} | {math.log(p) for p in self.breakpoints if p > 0}
        return [a] + sorted(u for u in cuts if a < u < b) + [b]


# ---------------------------------------------------------------------------
# parametric catalog


class Distribution:
    """Shared behaviour of the parametric families.

    Subclasses provide the closed forms; this base class derives moments,
    sampling helpers and a :class:`DensityFn` view.
    """

    name = "distribution"
    support = (0.0, math.inf)
    breakpoints = ()

    # -- closed forms supplied by subclasses --------------------------------
    def admissible(self) -> Interval:
        raise NotImplementedError

    def _mellin(self, c, t):
        raise NotImplementedError

    def _reciprocal(self, c, t):
        return 1.0 / self._mellin(c, t)

    def log_abs_mellin(self, c: float, t):
        """``log |M_c(t)|`` evaluated without under- or overflow."""
        raise NotImplementedError

    def pdf(self, x):
        raise NotImplementedError

    def cdf(self, x):
        raise NotImplementedError

    def laplace(self, s: float) -> float:
        raise UnsupportedError(f"no closed-form Laplace transform for {self}")

    def weighted_sup(self, c: float) -> float:
        raise NotImplementedError

    def decay(self, c: float) -> DecayClass:
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        raise NotImplementedError

    def spec_string(self) -> str:
        raise NotImplementedError

    # -- derived ------------------------------------------------------------
    def sf(self, x):
        return 1.0 - self.cdf(x)

    def mellin(self, c: float, t):
        """Closed-form ``M_c(t)``; `c` must be admissible."""
        self.admissible().check(c, f"Mellin transform of {self}")
        return self._mellin(c, np.asarray(t, dtype=float))

    def reciprocal_mellin(self, c: float, t):
        """``1 / M_c(t)`` from the closed form.

        Where the closed-form reciprocal is an entire function of ``c``
        (every family but :class:`ScaledLogGamma`) it is returned for any
        real `c`; this analytic continuation is what a deconvolution needs
        even when the forward integral itself diverges.
        """
        if not self.reciprocal_is_entire:
            self.admissible().check(c, f"Mellin transform of {self}")
        return self._reciprocal(c, np.asarray(t, dtype=float))

    reciprocal_is_entire = True

    def moment(self, r: float) -> float:
        """``E(U^r)`` from the closed-form transform at ``c = r + 1``."""
        c = r + 1.0
        if c not in self.admissible():
            raise DomainError(f"E(U^{r:g}) diverges for {self} (needs r+1 in {self.admissible()})")
        return float(np.real(self._mellin(c, 0.0)))

    def density_fn(self) -> DensityFn:
        return DensityFn(self.pdf, self.support, self.breakpoints, name=str(self), check=False)

    def __str__(self) -> str:
        return self.spec_string()


def _open_uniform(rng: np.random.Generator, size: int) -> np.ndarray:
    # uniforms strictly inside (0, 1)
    return (rng.integers(0, 2**53, size=size, dtype=np.int64) + 0.5) * 2.0**-53


@dataclass(frozen=True)
class Beta(Distribution):
    """Beta(1, b) law with density ``b (1 - x)^(b - 1)`` on ``(0, 1)``.

    ``Beta(1)`` is the uniform error of multiplicative censoring.
    """

    b: int = 1
    name = "beta"

    def __post_init__(self):
        if int(self.b) != self.b or self.b < 1:
            raise DomainError(f"Beta needs a positive integer b, got {self.b!r}")
        object.__setattr__(self, "b", int(self.b))

    @property
    def support(self):
        return (0.0, 1.0)

    def admissible(self):
        return Interval(0.0, math.inf)

    def _mellin(self, c, t):
        out = np.ones(np.shape(t), dtype=complex)
        for j in range(1, self.b + 1):
            out = out * (j / (c - 1.0 + j + 1j * t))
        return out[()] if out.ndim == 0 else out

    def _reciprocal(self, c, t):
        out = np.ones(np.shape(t), dtype=complex)
        for j in range(1, self.b + 1):
            out = out * ((c - 1.0 + j + 1j * t) / j)
        return out[()] if out.ndim == 0 else out

    def log_abs_mellin(self, c, t):
        t2 = np.square(np.asarray(t, dtype=float))
        return sum(math.log(j) - 0.5 * np.log((c - 1.0 + j) ** 2 + t2)
                   for j in range(1, self.b + 1))

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x > 0) & (x < 1)
        out = np.where(inside, self.b * np.clip(1.0 - x, 0.0, 1.0) ** (self.b - 1), 0.0)
        return out[()] if out.ndim == 0 else out

    def cdf(self, x):
        x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
        out = 1.0 - (1.0 - x) ** self.b
        return out[()] if out.ndim == 0 else out

    def laplace(self, s):
        return float(sp.hyp1f1(1.0, self.b + 1.0, -s))

    def weighted_sup(self, c):
        a = 2.0 * c - 1.0
        if a < 0:
            return math.inf
        if self.b == 1:
            return 1.0
        if a == 0:
            return float(self.b)
        x = a / (a + self.b - 1.0)
        return float(self.b * x**a * (1.0 - x) ** (self.b - 1))

    def decay(self, c):
        return Smooth(float(self.b))

    def sample(self, rng, size):
        v = _open_uniform(rng, size)
        return -np.expm1(np.log(v) / self.b)

    def spec_string(self):
        return f"beta:{self.b}"


@dataclass(frozen=True)
class ScaledLogGamma(Distribution):
    """Law of ``exp(mu + G / lam)`` with ``G ~ Gamma(a, 1)``.

    Density ``lam^a e^(lam mu) / Gamma(a) x^(-lam-1) (log x - mu)^(a-1)`` on
    ``(e^mu, inf)``; ``a = 1`` is a Pareto law.
    """

    mu: float = 0.0
    a: float = 1.0
    lam: float = 1.0
    name = "loggamma"
    reciprocal_is_entire = False

    def __post_init__(self):
        if not (self.a > 0 and self.lam > 0):
            raise DomainError(f"ScaledLogGamma needs a > 0 and lam > 0, got {self!r}")

    @property
    def support(self):
        return (math.exp(self.mu), math.inf)

    @property
    def breakpoints(self):
        return (math.exp(self.mu),)

    def admissible(self):
        return Interval(-math.inf, self.lam + 1.0)

    def _mellin(self, c, t):
        z = c - 1.0 + 1j * t
        return np.exp(self.a * math.log(self.lam) + self.mu * z
                      - self.a * np.log(self.lam - z))

    def log_abs_mellin(self, c, t):
        t2 = np.square(np.asarray(t, dtype=float))
        return (self.a * math.log(self.lam) + self.mu * (c - 1.0)
                - 0.5 * self.a * np.log((self.lam - c + 1.0) ** 2 + t2))

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            u = np.log(np.where(x > 0, x, 1.0)) - self.mu
            logp = (self.a * math.log(self.lam) + self.lam * self.mu - math.lgamma(self.a)
                    - (self.lam + 1.0) * np.log(np.where(x > 0, x, 1.0))
                    + (self.a - 1.0) * np.log(np.where(u > 0, u, 1.0)))
            out = np.where(u > 0, np.exp(logp), 0.0)
        return out[()] if out.ndim == 0 else out

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            u = np.log(np.where(x > 0, x, 1.0)) - self.mu
        out = np.where(u > 0, sp.gammainc(self.a, self.lam * np.maximum(u, 0.0)), 0.0)
        return out[()] if out.ndim == 0 else out

    def weighted_sup(self, c):
        # sup over u = log x - mu >= 0 of e^(mu(2c-2)) lam^a e^(-beta u) u^(a-1) / Gamma(a)
        beta = self.lam + 2.0 - 2.0 * c
        scale = math.exp(self.mu * (2.0 * c - 2.0) + self.a * math.log(self.lam)
                         - math.lgamma(self.a))
        if beta < 0 or self.a < 1:
            return math.inf
        if self.a == 1:
            return scale
        if beta == 0:
            return math.inf
        u = (self.a - 1.0) / beta
        return scale * math.exp(-(self.a - 1.0)) * u ** (self.a - 1.0)

    def decay(self, c):
        return Smooth(float(self.a))

    def sample(self, rng, size):
        if self.a == 1:
            g = -np.log(_open_uniform(rng, size))
        else:
            g = rng.standard_gamma(self.a, size)
        return np.exp(self.mu + g / self.lam)

    def spec_string(self):
        return f"loggamma:{self.mu:g}:{self.a:g}:{self.lam:g}"


@dataclass(frozen=True)
class Gamma(Distribution):
    """Gamma(d, 1) law; ``Gamma(1)`` is the standard exponential."""

    d: float = 1.0
    name = "gamma"

    def __post_init__(self):
        if not self.d > 0:
            raise DomainError(f"Gamma needs d > 0, got {self.d!r}")

    def admissible(self):
        return Interval(1.0 - self.d, math.inf)

    def _mellin(self, c, t):
        return np.exp(loggamma(c + self.d - 1.0 + 1j * t) - math.lgamma(self.d))

    def _reciprocal(self, c, t):
        return math.gamma(self.d) * rgamma(c + self.d - 1.0 + 1j * t)

    def log_abs_mellin(self, c, t):
        return np.real(loggamma(c + self.d - 1.0 + 1j * np.asarray(t, dtype=float))) - math.lgamma(self.d)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            pos = np.where(x > 0, x, 1.0)
            out = np.where(x > 0, np.exp((self.d - 1.0) * np.log(pos) - pos - math.lgamma(self.d)), 0.0)
        return out[()] if out.ndim == 0 else out

    def cdf(self, x):
        out = sp.gammainc(self.d, np.maximum(np.asarray(x, dtype=float), 0.0))
        return out[()] if np.ndim(out) == 0 else out

    def laplace(self, s):
        return float((1.0 + s) ** -self.d)

    def weighted_sup(self, c):
        q = 2.0 * c + self.d - 2.0
        if q < 0:
            return math.inf
        if q == 0:
            return 1.0 / math.gamma(self.d)
        return math.exp(q * math.log(q) - q - math.lgamma(self.d))

    def decay(self, c):
        return SuperSmooth(-(c + self.d - 1.5), math.pi / 2.0, 1.0)

    def sample(self, rng, size):
        if self.d == 1:
            return -np.log(_open_uniform(rng, size))
        return rng.standard_gamma(self.d, size)

    def spec_string(self):
        return f"gamma:{self.d:g}"


@dataclass(frozen=True)
class Weibull(Distribution):
    """Weibull law with density ``m x^(m-1) exp(-x^m)``."""

    m: float = 1.0
    name = "weibull"

    def __post_init__(self):
        if not self.m > 0:
            raise DomainError(f"Weibull needs m > 0, got {self.m!r}")

    def admissible(self):
        return Interval(1.0 - self.m, math.inf)

    # (z/m) Gamma(z/m) is written as Gamma(1 + z/m), finite at z = 0
    def _mellin(self, c, t):
        return np.exp(loggamma(1.0 + (c - 1.0 + 1j * t) / self.m))

    def _reciprocal(self, c, t):
        return rgamma(1.0 + (c - 1.0 + 1j * t) / self.m)

    def log_abs_mellin(self, c, t):
        return np.real(loggamma(1.0 + (c - 1.0 + 1j * np.asarray(t, dtype=float)) / self.m))

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            pos = np.where(x > 0, x, 1.0)
            log_pdf = math.log(self.m) + (self.m - 1.0) * np.log(pos) - pos**self.m
            out = np.where(x > 0, np.exp(log_pdf), 0.0)
        return out[()] if out.ndim == 0 else out

    def cdf(self, x):
        x = np.maximum(np.asarray(x, dtype=float), 0.0)
        out = -np.expm1(-(x**self.m))
        return out[()] if out.ndim == 0 else out

    def laplace(self, s):
        if self.m == 1:
            return 1.0 / (1.0 + s)
        return super().laplace(s)

    def weighted_sup(self, c):
        q = 2.0 * c + self.m - 2.0
        if q < 0:
            return math.inf
        if q == 0:
            return float(self.m)
        v = q / self.m
        return self.m * math.exp(v * math.log(v) - v)

    def decay(self, c):
        return SuperSmooth(-(2.0 * c - 2.0 - self.m) / self.m, math.pi / (2.0 * self.m), 1.0)

    def sample(self, rng, size):
        return (-np.log(_open_uniform(rng, size))) ** (1.0 / self.m)

    def spec_string(self):
        return f"weibull:{self.m:g}"


@dataclass(frozen=True)
class Lognormal(Distribution):
    """Law of ``exp(mu + lam Z)`` with ``Z`` standard normal."""

    mu: float = 0.0
    lam: float = 1.0
    name = "lognormal"

    def __post_init__(self):
        if not self.lam > 0:
            raise DomainError(f"Lognormal needs lam > 0, got {self.lam!r}")

    def admissible(self):
        return Interval()

    def _mellin(self, c, t):
        z = c - 1.0 + 1j * t
        return np.exp(self.mu * z + 0.5 * self.lam**2 * z * z)

    def _reciprocal(self, c, t):
        z = c - 1.0 + 1j * t
        return np.exp(-self.mu * z - 0.5 * self.lam**2 * z * z)

    def log_abs_mellin(self, c, t):
        t2 = np.square(np.asarray(t, dtype=float))
        return self.mu * (c - 1.0) + 0.5 * self.lam**2 * ((c - 1.0) ** 2 - t2)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            pos = np.where(x > 0, x, 1.0)
            z = (np.log(pos) - self.mu) / self.lam
            out = np.where(x > 0, np.exp(-0.5 * z * z) / (math.sqrt(2 * math.pi) * self.lam * pos), 0.0)
        return out[()] if out.ndim == 0 else out

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            z = (np.log(np.where(x > 0, x, 1.0)) - self.mu) / self.lam
        out = np.where(x > 0, sp.ndtr(z), 0.0)
        return out[()] if out.ndim == 0 else out

    def weighted_sup(self, c):
        k = 2.0 * c - 2.0
        return math.exp(k * self.mu + 0.5 * k * k * self.lam**2) / (math.sqrt(2 * math.pi) * self.lam)

    def decay(self, c):
        return SuperSmooth(0.0, self.lam**2 / 2.0, 2.0)

    def sample(self, rng, size):
        return np.exp(self.mu + self.lam * rng.standard_normal(size))

    def spec_string(self):
        return f"lognormal:{self.mu:g}:{self.lam:g}"


ErrorModel = Distribution

_FAMILIES = {
    "beta": (Beta, 1), "uniform": (lambda: Beta(1), 0),
    "loggamma": (ScaledLogGamma, 3), "pareto": (lambda mu, lam: ScaledLogGamma(mu, 1.0, lam), 2),
    "gamma": (Gamma, 1), "exp": (lambda: Gamma(1.0), 0),
    "weibull": (Weibull, 1), "lognormal": (Lognormal, 2),
}


def parse_model(text: str) -> Distribution:
    """Build a catalog law from a ``name:param[:param...]`` string.

    Recognised names: ``beta:b``, ``uniform``, ``loggamma:mu:a:lam``,
    ``pareto:mu:lam``, ``gamma:d``, ``exp``, ``weibull:m``,
    ``lognormal:mu:lam``.

    >>> parse_model("lognormal:0:1")
    Lognormal(mu=0.0, lam=1.0)
    """
    name, *params = text.strip().split(":")
    name = name.lower()
    if name not in _FAMILIES:
        raise ValueError(f"unknown distribution {name!r}; choose from {sorted(_FAMILIES)}")
    factory, arity = _FAMILIES[name]
    if len(params) != arity:
        raise ValueError(f"{name!r} takes {arity} parameter(s), got {len(params)} in {text!r}")
    try:
        values = [float(p) for p in params]
    except ValueError:
        raise ValueError(f"non-numeric parameter in {text!r}") from None
    if name == "beta":
        if values[0] != int(values[0]):
            raise DomainError(f"Beta needs a positive integer b, got {params[0]!r}")
        values = [int(values[0])]
    return factory(*values)


# ---------------------------------------------------------------------------
# operations


def analytic_mellin(model: Distribution, c: float, t):
    """Closed-form ``M_c[g](t)`` of a catalog law.

    Raises
    ------
    DomainError
        If `c` lies outside the law's admissible interval.
    """
    return model.mellin(c, t)


def error_moment(model: Distribution, r: float) -> float:
    """``E(U^r)`` for ``U ~ model``; divergent moments raise :class:`DomainError`."""
    return model.moment(r)


def g_weighted_sup(model: Distribution, c: float) -> float:
    """Essential supremum of ``x -> x^(2c-1) g(x)``; ``math.inf`` when unbounded."""
    model.admissible().check(c, f"weighted sup-norm of {model}")
    return model.weighted_sup(c)


@lru_cache(maxsize=256)
def decay_class_g(model: Distribution, c: float) -> DecayClass:
    """Decay class of ``|M_c[g]|`` with constants sampled over ``t in [0, 200]``."""
    model.admissible().check(c, f"decay class of {model}")
    decay = model.decay(c)
    c_low, c_up = _fit_constants(decay, lambda t: model.log_abs_mellin(c, t))
    return type(decay)(**{**decay.__dict__, "c_low": c_low, "c_up": c_up})


def _u_integrand(h, c):
    def phi(u):
        if abs(u) > _U_CUT:
            return 0.0
        val = float(h(math.exp(u)))
        if val == 0.0:
            return 0.0
        # combine in logs: e^(cu) alone may overflow where e^(cu) h(e^u) does not
        return math.copysign(math.exp(c * u + math.log(abs(val))), val)
    return phi


def numeric_mellin(h, c: float, t: float, full_output: bool = False):
    """Quadrature value of ``M_c[h](t)``.

    The integral is taken over ``u = log x``, where ``x^(it)`` becomes the
    pure oscillation ``exp(i t u)``, and split at ``x = 1`` and at the
    breakpoints of `h`.

    Parameters
    ----------
    h : DensityFn or Distribution
    c, t : float
    full_output : bool
        Also return the accumulated error estimate.

    Returns
    -------
    complex, or (complex, float) when `full_output` is set.

    Raises
    ------
    QuadratureError
        When adaptive refinement does not converge.
    """
    if isinstance(h, Distribution):
        h = h.density_fn()
    phi = _u_integrand(h, c)
    cuts = h.log_cuts()
    total, err = 0j, 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        val, e = quadrature.fourier_quad(phi, a, b, float(t))
        total += val
        err += e
    return (total, err) if full_output else total


def mult_convolution(h1, h2, y: float) -> float:
    """``(h1 * h2)(y) = int h1(y / x) h2(x) x^(-1) dx`` by adaptive quadrature."""
    if not y > 0:
        raise DomainError(f"multiplicative convolution is defined for y > 0, got {y!r}")
    if isinstance(h1, Distribution):
        h1 = h1.density_fn()
    if isinstance(h2, Distribution):
        h2 = h2.density_fn()
    lo1, hi1 = h1.support
    lo2, hi2 = h2.support
    # x must satisfy lo2 < x < hi2 and lo1 < y/x < hi1
    x_lo = max(lo2, y / hi1 if math.isfinite(hi1) else 0.0)
    x_hi = min(hi2, y / lo1 if lo1 > 0 else math.inf)
    if x_hi <= x_lo:
        return 0.0
    a = math.log(x_lo) if x_lo > 0 else -math.inf
    b = math.log(x_hi) if math.isfinite(x_hi) else math.inf
    cuts = {0.0, math.log(y)}
    cuts |= {math.log(p) for p in h2.breakpoints if p > 0}
    cuts |= {math.log(y / p) for p in h1.breakpoints if p > 0}
    edges = [a] + sorted(u for u in cuts if a < u < b) + [b]

    def integrand(u):
        if abs(u) > _U_CUT:
            return 0.0
        return float(h1(y * math.exp(-u))) * float(h2(math.exp(u)))

    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        total += quadrature.quad(integrand, lo, hi)[0]
    return total


def convolve(h1, h2, check: bool = False) -> DensityFn:
    """Density of the product of independent variables with densities `h1`, `h2`."""
    d1 = h1.density_fn() if isinstance(h1, Distribution) else h1
    d2 = h2.density_fn() if isinstance(h2, Distribution) else h2
    lo = d1.support[0] * d2.support[0]
    hi = d1.support[1] * d2.support[1]
    pts = {p * q for p in (*d1.breakpoints, *d1.support) for q in (*d2.breakpoints, *d2.support)
           if 0 < p * q < math.inf}
    pts = tuple(sorted(p for p in pts if lo < p < hi))
    pdf = np.vectorize(lambda y: mult_convolution(d1, d2, y) if y > 0 else 0.0, otypes=[float])
    return DensityFn(pdf, (lo, hi), pts, name=f"({d1.name})*({d2.name})", check=check)


def _as_vectorised(H):
    def wrapped(t):
        try:
            out = np.asarray(H(t), dtype=complex)
            if out.shape == np.shape(t):
                return out
        except (TypeError, ValueError):
            pass
        return np.array([complex(H(float(s))) for s in np.ravel(t)]).reshape(np.shape(t))
    return wrapped


def inverse_mellin(H, c: float, x: float, k: float, full_output: bool = False):
    """Truncated inverse transform ``(2 pi)^-1 int_{-k}^{k} x^(-c-it) H(t) dt``.

    `H` must satisfy ``H(-t) = conj(H(t))`` so that the result is real; it is
    computed as twice the real part of the half-range integral.

    Raises
    ------
    ContractViolation
        If `H` is not Hermitian to 1e-10 on a probe grid.
    """
    if not x > 0:
        raise DomainError(f"inverse Mellin transform needs x > 0, got {x!r}")
    Hv = _as_vectorised(H)
    if k <= 0:
        return (0.0, 0.0) if full_output else 0.0
    probe = np.linspace(0.0, k, 33)
    plus, minus = Hv(probe), Hv(-probe)
    gap = np.abs(minus - np.conj(plus))
    if np.any(gap > 1e-10 * np.maximum(1.0, np.abs(plus))):
        raise ContractViolation(f"H is not Hermitian (max asymmetry {gap.max():.3g})")
    logx = math.log(x)
    width = min(0.5, math.pi / (4.0 * abs(logx))) if logx else 0.5

    def integrand(t):
        return np.real(np.exp(-(c + 1j * t) * logx) * Hv(t))

    val, err = quadrature.composite_gl(integrand, 0.0, float(k), width)
    val, err = float(val) / math.pi, err / math.pi
    return (val, err) if full_output else val

"""Data-driven choice of the cut-off by a Goldenshluger-Lepski comparison.

For every ``k`` of an integer grid ``K_n`` the penalty

    V_hat(k) = 2 chi ||g||_{inf, x^(2c-1)} sigma_hat Delta(k) log(n) / n

is compared against the bias proxy

    A_hat(k) = max_{k < k' <= K_n} ((theta_k' - theta_k)^2 - V_hat(k'))_+

and ``k_hat`` minimises ``A_hat + V_hat`` (ties go to the smaller ``k``).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import AssumptionViolation
from .estimator import Sample, delta_curve, theta_path
from .functionals import FunctionalSpec
from .mellin import Distribution, error_moment, g_weighted_sup

__all__ = [
    "GridMode", "SelectionConfig", "SelectionReport", "admissible_set", "sigma_hat",
    "v_hat", "v_true", "penalty", "a_hat", "select_k", "CERTIFIED_CHI",
]

# smallest chi covered by the oracle inequality
CERTIFIED_CHI = 72.0


class GridMode(str, enum.Enum):
    THEORETICAL = "theoretical"
    PRACTICAL = "practical"


@dataclass(frozen=True)
class SelectionConfig:
    """Tuning of the selection rule.

    Parameters
    ----------
    chi : float
        Penalty constant.  The theoretical grid insists on ``chi >= 72``; the
        practical grid accepts any ``chi >= 0`` and its results are always
        marked as not certified.
    grid_mode : GridMode
        ``theoretical`` caps ``k`` at ``sqrt(n) / log(n)^2``, ``practical``
        at ``sqrt(n)``.
    max_k_override : int, optional
        Further cap on the grid.
    """

    chi: float = CERTIFIED_CHI
    grid_mode: GridMode = GridMode.THEORETICAL
    max_k_override: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "grid_mode", GridMode(self.grid_mode))
        if not (math.isfinite(self.chi) and self.chi >= 0):
            raise ValueError(f"chi must be a nonnegative number, got {self.chi!r}")
        if self.grid_mode is GridMode.THEORETICAL and self.chi < CERTIFIED_CHI:
            raise AssumptionViolation(
                f"theoretical grid requires chi >= {CERTIFIED_CHI:g}, got {self.chi:g}")
        if self.max_k_override is not None and self.max_k_override < 1:
            raise ValueError("max_k_override must be at least 1")

    @property
    def certified(self) -> bool:
        return self.grid_mode is GridMode.THEORETICAL and self.chi >= CERTIFIED_CHI


@dataclass(frozen=True)
class SelectionReport:
    """Outcome of :func:`select_k` with the full per-``k`` table."""

    k_hat: int
    theta_hat: float
    grid: tuple
    theta_by_k: tuple
    v_hat_by_k: tuple
    a_hat_by_k: tuple
    sigma_hat: float
    g_sup: float
    chi: float
    grid_mode: GridMode
    fallback: bool
    certified: bool
    diagnostics: dict = field(default_factory=dict)

    def per_k(self) -> list:
        return [{"k": k, "v_hat": v, "a_hat": a, "theta_hat": th}
                for k, v, a, th in zip(self.grid, self.v_hat_by_k, self.a_hat_by_k, self.theta_by_k)]

    def to_dict(self) -> dict:
        return {"k_hat": self.k_hat, "theta_hat": self.theta_hat, "sigma_hat": self.sigma_hat,
                "g_sup": self.g_sup, "chi": self.chi, "grid_mode": self.grid_mode.value,
                "fallback": self.fallback, "certified": self.certified,
                "grid": list(self.grid), "per_k": self.per_k(),
                "diagnostics": dict(self.diagnostics)}


def _finite_sup(model: Distribution, c: float) -> float:
    g_sup = g_weighted_sup(model, c)
    if not math.isfinite(g_sup):
        raise AssumptionViolation(
            f"x^(2c-1) g(x) is unbounded for {model} at c={c:g}; the selection rule needs it finite")
    return g_sup


def admissible_set(n: int, spec: FunctionalSpec, model: Distribution, c: float,
                   config: SelectionConfig) -> tuple[list, bool]:
    """Integer cut-off grid ``{1, ..., k_max}`` and whether the fallback ``{1}`` was used.

    ``k`` is admissible if ``||g|| Delta(k) <= n`` and ``k`` is below the
    mode's growth cap.

    Raises
    ------
    AssumptionViolation
        If the weighted sup-norm of ``g`` is infinite.
    """
    if n < 2:
        raise ValueError(f"the selection rule needs n >= 2, got {n}")
    g_sup = _finite_sup(model, c)
    if config.grid_mode is GridMode.THEORETICAL:
        cap = math.sqrt(n) / math.log(n) ** 2
    else:
        cap = math.sqrt(n)
    k_cap = math.floor(cap + 1e-12)
    if config.max_k_override is not None:
        k_cap = min(k_cap, config.max_k_override)
    if k_cap < 1:
        return [1], True
    ks = np.arange(1, k_cap + 1)
    ok = g_sup * delta_curve(spec, model, c, ks) <= n
    k_max = int(np.argmin(ok)) if not ok.all() else k_cap
    if k_max < 1:
        return [1], True
    return list(range(1, k_max + 1)), False


def sigma_hat(sample: Sample, model: Distribution, c: float) -> float:
    """Plug-in ``sigma_hat = mean(Y^(2(c-1))) / E(U^(2(c-1)))``.

    Raises
    ------
    DomainError
        If the error moment ``E(U^(2(c-1)))`` diverges.
    """
    if c == 1.0:
        return 1.0  # Y^0 / E(U^0)
    moment = error_moment(model, 2.0 * (c - 1.0))
    return math.fsum(np.exp(2.0 * (c - 1.0) * sample.log_values)) / sample.n / moment


def penalty(delta, g_sup: float, sigma: float, n: int, chi: float, factor: float = 2.0):
    """``factor * chi * g_sup * sigma * delta * log(n) / n``."""
    return factor * chi * g_sup * sigma * np.asarray(delta) * math.log(n) / n


def v_hat(k: float, sample: Sample, spec: FunctionalSpec, model: Distribution, c: float,
          config: SelectionConfig) -> float:
    """Penalty ``V_hat(k)`` with the plug-in ``sigma_hat``."""
    delta = delta_curve(spec, model, c, [k])[0]
    return float(penalty(delta, _finite_sup(model, c), sigma_hat(sample, model, c),
                         sample.n, config.chi))


def v_true(k: float, sigma: float, n: int, spec: FunctionalSpec, model: Distribution, c: float,
           chi: float = CERTIFIED_CHI) -> float:
    """Penalty ``V(k)`` with the true ``sigma = E(X^(2(c-1)))`` and factor ``chi``."""
    delta = delta_curve(spec, model, c, [k])[0]
    return float(penalty(delta, _finite_sup(model, c), sigma, n, chi, factor=1.0))


def a_hat(k, grid: Sequence, theta_by_k: Mapping, v_hat_by_k: Mapping) -> float:
    """Bias proxy ``max_{k' in grid, k < k'} ((theta_k' - theta_k)^2 - V_hat(k'))_+``."""
    best = 0.0
    th = theta_by_k[k]
    for kp in grid:
        if kp > k:
            best = max(best, (theta_by_k[kp] - th) ** 2 - v_hat_by_k[kp])
    return best


def _a_hat_all(theta: np.ndarray, v: np.ndarray) -> np.ndarray:
    # A[i] = max_{j > i} ((theta_j - theta_i)^2 - v_j)_+
    diff = np.square(theta[None, :] - theta[:, None]) - v[None, :]
    upper = np.triu(np.ones_like(diff, dtype=bool), k=1)
    return np.max(np.where(upper, diff, 0.0), axis=1, initial=0.0)


def select_k(sample: Sample, spec: FunctionalSpec, model: Distribution, c: float,
             config: SelectionConfig | None = None) -> SelectionReport:
    """Goldenshluger-Lepski cut-off and the resulting estimate."""
    config = config or SelectionConfig()
    grid, fallback = admissible_set(sample.n, spec, model, c, config)
    g_sup = _finite_sup(model, c)
    sig = sigma_hat(sample, model, c)
    ks = np.asarray(grid, dtype=float)
    theta, err, step = theta_path(sample, spec, model, c, ks)
    v = penalty(delta_curve(spec, model, c, ks), g_sup, sig, sample.n, config.chi)
    a = _a_hat_all(theta, v)
    i = int(np.argmin(a + v))  # first minimiser, i.e. smallest k on ties
    return SelectionReport(
        k_hat=grid[i], theta_hat=float(theta[i]), grid=tuple(grid),
        theta_by_k=tuple(theta.tolist()), v_hat_by_k=tuple(v.tolist()),
        a_hat_by_k=tuple(a.tolist()), sigma_hat=sig, g_sup=g_sup, chi=config.chi,
        grid_mode=config.grid_mode, fallback=fallback, certified=config.certified,
        diagnostics={"quadrature_error": float(err.max()), "grid_step": step})

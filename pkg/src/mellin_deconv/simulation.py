"""Monte Carlo experiments for the spectral cut-off estimator.

A :class:`Scenario` fixes the target law of ``X``, the error law of ``U``,
the functional, the development point and the cut-off rule.  Replication
``r`` draws ``X`` and ``U`` from independent Philox streams keyed by
``(seed, r, role)``, so every replication is reproducible on its own and the
results do not depend on how replications are spread over threads.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Union

import numpy as np
from scipy import stats

from . import quadrature
from .adaptive import SelectionConfig, select_k
from .errors import DegenerateExperimentError, DomainError
from .estimator import Sample, theta_path
from .functionals import FunctionalSpec, Regime, psi_decay, regime_of, true_value
from .mellin import DecayClass, Distribution, Smooth, SuperSmooth

__all__ = [
    "FixedK", "PowerK", "OracleK", "Selection", "Scenario", "MCResult", "OracleResult",
    "RateReport", "draw_sample", "mc_mse", "oracle_cutoff", "theoretical_cutoff",
    "theory_slope", "fit_slope", "rate_experiment", "sobolev_seminorm", "jackknife_se",
]

ROLE_X = 0
ROLE_U = 1
# geometric panels for the Sobolev integral and where its tail is cut
SOBOLEV_T_MAX = 1e5
SOBOLEV_RATIO = 1.25


@dataclass(frozen=True)
class FixedK:
    """Cut-off ``k`` independent of the data."""

    k: float

    def __post_init__(self):
        if not (math.isfinite(self.k) and self.k > 0):
            raise ValueError(f"k must be positive, got {self.k!r}")

    def cutoff(self, n: int) -> float:
        return float(self.k)


@dataclass(frozen=True)
class PowerK:
    """Cut-off ``scale * n^exponent``."""

    exponent: float
    scale: float = 1.0

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError(f"scale must be positive, got {self.scale!r}")

    def cutoff(self, n: int) -> float:
        return float(self.scale * n**self.exponent)


@dataclass(frozen=True)
class OracleK:
    """Best cut-off of `grid` in Monte Carlo risk (needs the true value)."""

    grid: tuple
    rule: str = "min"

    def __post_init__(self):
        object.__setattr__(self, "grid", tuple(sorted(float(k) for k in self.grid)))
        if not self.grid or self.grid[0] <= 0:
            raise ValueError("oracle grid must be a nonempty set of positive cut-offs")
        if self.rule not in ("min", "one_se"):
            raise ValueError(f"rule must be 'min' or 'one_se', got {self.rule!r}")


Selection = Union[FixedK, PowerK, OracleK, SelectionConfig]


@dataclass(frozen=True)
class Scenario:
    """Description of one Monte Carlo experiment.

    Only the functional's constraint on `c` is enforced.  Violations of the
    moment condition on the target or of the strict admissibility of `c` for
    the error law are listed by :meth:`assumption_notes` instead, since the
    estimator can still be run (and may still behave well) there.
    """

    target: Distribution
    error: Distribution
    functional: FunctionalSpec
    c: float
    n: int
    replications: int
    seed: int
    selection: Selection = FixedK(1.0)
    smoothness: float | None = None

    def __post_init__(self):
        if self.n < 1 or self.replications < 1:
            raise ValueError("n and replications must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        self.functional.c_interval().check(self.c, f"{self.functional.kind} functional")
        if not self.error.reciprocal_is_entire:
            self.error.admissible().check(self.c, f"error law {self.error}")

    def with_n(self, n: int) -> "Scenario":
        return replace(self, n=int(n))

    def assumption_notes(self) -> list:
        notes = []
        if 2.0 * self.c - 1.0 not in self.target.admissible():
            notes.append(f"E(X^(2c-2)) is infinite for {self.target} at c={self.c:g}")
        if self.c not in self.error.admissible():
            notes.append(f"c={self.c:g} is outside the Mellin domain of {self.error}; "
                         "the analytic continuation of 1/M_c[g] is used")
        return notes

    @property
    def theta_true(self) -> float:
        return true_value(self.target, self.functional)


def _rng(seed: int, replication: int, role: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, replication, role])))


def draw_sample(scenario: Scenario, replication: int) -> tuple[Sample, np.ndarray]:
    """``(Y, X)`` for one replication; deterministic in ``(seed, replication)``."""
    x = scenario.target.sample(_rng(scenario.seed, replication, ROLE_X), scenario.n)
    u = scenario.error.sample(_rng(scenario.seed, replication, ROLE_U), scenario.n)
    return Sample(x * u), x


def jackknife_se(values) -> float:
    """Jackknife standard error of the mean of `values`."""
    v = np.asarray(values, dtype=float)
    r = v.size
    if r < 2:
        return math.nan
    loo = (math.fsum(v) - v) / (r - 1)
    return math.sqrt((r - 1) / r * math.fsum(np.square(loo - loo.mean())))


def _map(fn, count: int, workers: int) -> list:
    if workers <= 1:
        return [fn(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(count)))


@dataclass(frozen=True)
class MCResult:
    """Monte Carlo risk of one scenario and the per-replication records."""

    mse: float
    stderr: float
    theta_true: float
    ks: tuple
    thetas: tuple

    def rows(self, n: int) -> list:
        return [(n, r, k, th, self.theta_true, (th - self.theta_true) ** 2)
                for r, (k, th) in enumerate(zip(self.ks, self.thetas))]


def _default_estimator(scenario: Scenario) -> Callable:
    sel = scenario.selection
    if isinstance(sel, SelectionConfig):
        def estimate(sample):
            rep = select_k(sample, scenario.functional, scenario.error, scenario.c, sel)
            return rep.k_hat, rep.theta_hat
        return estimate
    if isinstance(sel, OracleK):
        raise ValueError("oracle selection is evaluated by oracle_cutoff, not mc_mse")
    k = sel.cutoff(scenario.n)

    def estimate(sample):
        return k, float(theta_path(sample, scenario.functional, scenario.error, scenario.c, [k])[0][0])
    return estimate


def mc_mse(scenario: Scenario, estimator: Callable | None = None, workers: int = 1) -> MCResult:
    """Mean squared error over the scenario's replications.

    Parameters
    ----------
    estimator : callable, optional
        ``sample -> (k, theta_hat)``; defaults to the scenario's cut-off rule.
    workers : int
        Threads used for replications; results do not depend on it.
    """
    theta = scenario.theta_true
    est = estimator or _default_estimator(scenario)

    def one(r):
        sample, _ = draw_sample(scenario, r)
        return est(sample)

    out = _map(one, scenario.replications, workers)
    ks = tuple(float(k) for k, _ in out)
    thetas = tuple(float(t) for _, t in out)
    sq = np.square(np.asarray(thetas) - theta)
    return MCResult(math.fsum(sq) / sq.size, jackknife_se(sq), theta, ks, thetas)


@dataclass(frozen=True)
class OracleResult:
    """Risk curve over a grid, evaluated on shared samples."""

    k_star: float
    mse: float
    stderr: float
    grid: tuple
    mse_by_k: tuple
    stderr_by_k: tuple
    result: MCResult = field(repr=False)


def oracle_cutoff(scenario: Scenario, grid=None, rule: str | None = None,
                  workers: int = 1) -> OracleResult:
    """Grid cut-off with the smallest Monte Carlo risk.

    All cut-offs are evaluated on the same replications.  ``rule="one_se"``
    picks the smallest ``k`` whose risk is within one standard error of the
    minimum; ``"min"`` (default) the smallest minimiser.
    """
    sel = scenario.selection if isinstance(scenario.selection, OracleK) else None
    grid = OracleK(tuple(grid) if grid is not None else sel.grid).grid
    rule = rule or (sel.rule if sel else "min")
    if rule not in ("min", "one_se"):
        raise ValueError(f"rule must be 'min' or 'one_se', got {rule!r}")
    theta = scenario.theta_true
    ks = np.asarray(grid)

    def one(r):
        sample, _ = draw_sample(scenario, r)
        return theta_path(sample, scenario.functional, scenario.error, scenario.c, ks)[0]

    paths = np.vstack(_map(one, scenario.replications, workers))
    sq = np.square(paths - theta)
    mse = np.array([math.fsum(col) / col.size for col in sq.T])
    se = np.array([jackknife_se(col) for col in sq.T])
    best = int(np.argmin(mse))
    if rule == "one_se" and np.isfinite(se[best]):
        best = int(np.argmax(mse <= mse[best] + se[best]))
    result = MCResult(float(mse[best]), float(se[best]), theta,
                      (float(ks[best]),) * scenario.replications, tuple(paths[:, best].tolist()))
    return OracleResult(float(ks[best]), float(mse[best]), float(se[best]), tuple(grid),
                        tuple(mse.tolist()), tuple(se.tolist()), result)


def theoretical_cutoff(s: float, gamma: float, n: int) -> float:
    """Rate-optimal cut-off ``n^(1 / (2s + 2 gamma))``."""
    return float(n ** (1.0 / (2.0 * s + 2.0 * gamma)))


def theory_slope(s: float, p: float, gamma: float, regime: Regime) -> float:
    """Log-log slope of the risk in ``n``: -1, or ``-(2s + 2p - 1) / (2s + 2 gamma)``."""
    if Regime(regime) is Regime.PARAMETRIC:
        return -1.0
    return -(2.0 * s + 2.0 * p - 1.0) / (2.0 * s + 2.0 * gamma)


def fit_slope(n_list, mse) -> tuple[float, tuple, float]:
    """OLS fit of ``log(mse)`` on ``log(n)``.

    Returns
    -------
    slope : float
    ci : (float, float)
        95% confidence interval from the t distribution.
    intercept : float

    Raises
    ------
    DegenerateExperimentError
        If any risk is not positive or fewer than three points are given.
    """
    n_arr = np.asarray(n_list, dtype=float)
    m = np.asarray(mse, dtype=float)
    if n_arr.size < 3:
        raise DegenerateExperimentError("a slope fit needs at least three sample sizes")
    if not np.all(np.isfinite(m) & (m > 0)):
        raise DegenerateExperimentError(f"risks must be positive and finite, got {m.tolist()}")
    res = stats.linregress(np.log(n_arr), np.log(m))
    half = stats.t.ppf(0.975, n_arr.size - 2) * res.stderr
    return float(res.slope), (float(res.slope - half), float(res.slope + half)), float(res.intercept)


@dataclass(frozen=True)
class RateReport:
    """Risk at several sample sizes and its fitted log-log slope."""

    n_list: tuple
    mse_by_n: tuple
    stderr_by_n: tuple
    k_by_n: tuple
    slope: float
    slope_ci: tuple
    theory_slope: float
    intercept: float

    def to_dict(self) -> dict:
        return {"n_list": list(self.n_list), "mse_by_n": list(self.mse_by_n),
                "stderr_by_n": list(self.stderr_by_n), "k_by_n": list(self.k_by_n),
                "slope": self.slope, "slope_ci": list(self.slope_ci),
                "theory_slope": self.theory_slope, "intercept": self.intercept}

    def csv_rows(self) -> list:
        return [(math.log(n), math.log(m), se)
                for n, m, se in zip(self.n_list, self.mse_by_n, self.stderr_by_n)]


def scenario_theory_slope(scenario: Scenario, s: float | None = None) -> float:
    """Predicted slope for the scenario's functional and error law."""
    regime = regime_of(scenario.functional, scenario.error, scenario.c)
    if regime is Regime.PARAMETRIC:
        return -1.0
    s = scenario.smoothness if s is None else s
    if s is None:
        return math.nan
    p = psi_decay(scenario.functional, scenario.c).p
    return theory_slope(s, p, scenario.error.decay(scenario.c).gamma, regime)


def risk_at_n(scenario: Scenario, workers: int = 1) -> tuple[float, float, float, MCResult]:
    """``(mse, stderr, k, records)`` under the scenario's own cut-off rule."""
    if isinstance(scenario.selection, OracleK):
        res = oracle_cutoff(scenario, workers=workers)
        return res.mse, res.stderr, res.k_star, res.result
    res = mc_mse(scenario, workers=workers)
    k = res.ks[0] if len(set(res.ks)) == 1 else math.nan
    return res.mse, res.stderr, k, res


def rate_experiment(scenario: Scenario, n_list, *, s: float | None = None,
                    mse_fn: Callable | None = None, workers: int = 1) -> RateReport:
    """Risk at each ``n`` of `n_list` and the OLS slope of ``log mse`` on ``log n``.

    Parameters
    ----------
    mse_fn : callable, optional
        ``scenario -> (mse, stderr)`` replacing the Monte Carlo evaluation.
    s : float, optional
        Smoothness of the target used for the predicted slope; defaults to
        ``scenario.smoothness``.
    """
    n_list = [int(n) for n in n_list]
    if len(n_list) < 3 or any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError("n_list needs at least three strictly increasing sample sizes")
    mses, ses, ks = [], [], []
    for n in n_list:
        sc = scenario.with_n(n)
        if mse_fn is not None:
            m, se = mse_fn(sc)
            k = math.nan
        else:
            m, se, k, _ = risk_at_n(sc, workers)
        mses.append(float(m))
        ses.append(float(se))
        ks.append(float(k))
    slope, ci, intercept = fit_slope(n_list, mses)
    return RateReport(tuple(n_list), tuple(mses), tuple(ses), tuple(ks), slope, ci,
                      scenario_theory_slope(scenario, s), intercept)


def _sobolev_integrand(mellin_fn, s):
    def f(t):
        return np.power(1.0 + np.square(t), s) * np.square(np.abs(mellin_fn(t)))
    return f


def sobolev_seminorm(mellin_of_f, s: float, c: float = 1.0,
                     decay: DecayClass | None = None) -> float:
    """``(int (1 + t^2)^s |M_c[f](t)|^2 dt)^(1/2)`` over the real line.

    Parameters
    ----------
    mellin_of_f : Distribution or callable
        A catalog law, or ``t -> M_c[f](t)`` (then `decay` is required).
    decay : Smooth or SuperSmooth, optional
        Envelope of ``|M_c[f]|``; decides divergence and the tail correction.

    Returns
    -------
    float
        ``math.inf`` when the weighted integral diverges.
    """
    if isinstance(mellin_of_f, Distribution):
        dist = mellin_of_f
        decay = decay or dist.decay(c)
        fn = lambda t: dist.mellin(c, t)  # noqa: E731
    else:
        if decay is None:
            raise ValueError("a callable Mellin transform needs an explicit decay class")
        fn = mellin_of_f
    if isinstance(decay, Smooth) and 2.0 * (s - decay.gamma) >= -1.0:
        return math.inf
    integrand = _sobolev_integrand(fn, s)
    edges = [0.0, 0.5]
    while edges[-1] < SOBOLEV_T_MAX:
        edges.append(min(edges[-1] * SOBOLEV_RATIO, SOBOLEV_T_MAX))
    edges = np.asarray(edges)
    parts = quadrature.integrate_panels(integrand, edges, 12)
    total = math.fsum(parts)
    if isinstance(decay, Smooth):
        # |M|^2 ~ A t^(-2 gamma): tail of A t^(2(s - gamma)) beyond T
        T = SOBOLEV_T_MAX
        A = float(integrand(np.array([T]))[0]) * T ** (-2.0 * (s - decay.gamma))
        total += A * T ** (2.0 * (s - decay.gamma) + 1.0) / (2.0 * decay.gamma - 2.0 * s - 1.0)
    elif not np.isfinite(total):
        raise DomainError("Sobolev integrand overflowed")
    if not math.isfinite(total):
        return math.inf
    return math.sqrt(2.0 * total)

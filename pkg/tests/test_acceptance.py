"""Acceptance criteria, each run at its stated tolerance.

Every test prints one ``criterion N: PASS|FAIL`` line (also collected in the
pytest terminal summary) before asserting.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest
from scipy import integrate, special

from conftest import ACCEPTANCE_LINES
from mellin_deconv.adaptive import SelectionConfig, admissible_set
from mellin_deconv.cli import main
from mellin_deconv.estimator import delta_curve, delta_psi_g, theta_path
from mellin_deconv.functionals import Density, Laplace
from mellin_deconv.mellin import (
    Beta, Gamma, Lognormal, ScaledLogGamma, Weibull, analytic_mellin, convolve, numeric_mellin,
)
from mellin_deconv.scenario import load_scenario
from mellin_deconv.simulation import (
    FixedK, PowerK, Scenario, draw_sample, mc_mse, oracle_cutoff, rate_experiment, sobolev_seminorm,
)

ROOT = Path(__file__).resolve().parents[1]
B1 = Beta(2)  # density 2(1 - x) on (0, 1)
# penalty constant for the practical grid, calibrated on independent seeds
CALIBRATED_CHI = 0.004


def report(number: int, passed: bool, detail: str) -> None:
    line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)


def _theta_k_oracle(k: float) -> float:
    # Exp(1) target, Density(1), c = 1: theta_k = pi^-1 int_0^k Re Gamma(1 + it) dt
    return integrate.quad(lambda t: special.gamma(1 + 1j * t).real, 0, k, epsabs=1e-13)[0] / math.pi


def test_criterion_1_catalog():
    start = time.perf_counter()
    cases = [
        (Beta(1), 1.0), (Beta(2), 0.6), (Beta(5), 1.5),
        (ScaledLogGamma(0.0, 1.0, 2.0), 1.0), (ScaledLogGamma(0.3, 2.5, 3.0), 0.8),
        (ScaledLogGamma(-0.5, 1.5, 1.5), 2.0),
        # exponentially decaying families: parameters keep |M(+-20)| above ~1e-9, since the
        # quadrature error is absolute (~1e-16) and relative accuracy is lost below that
        (Gamma(4.0), 1.5), (Gamma(6.0), 1.0), (Gamma(8.0), 0.5),
        (Weibull(1.5), 1.0), (Weibull(3.0), 1.3), (Weibull(5.0), 0.4),
        (Lognormal(0.0, 0.1), 1.0), (Lognormal(0.5, 0.15), 0.2), (Lognormal(-0.2, 0.2), 1.8),
    ]
    ts = [0.0, 0.5, -0.5, 1.0, -1.0, 5.0, -5.0, 20.0, -20.0]
    worst = 0.0
    for model, c in cases:
        for t in ts:
            exact = analytic_mellin(model, c, t)
            worst = max(worst, abs(numeric_mellin(model, c, t) - exact) / abs(exact))
    elapsed = time.perf_counter() - start
    passed = worst <= 1e-6 and elapsed < 60
    report(1, passed, f"max relative error {worst:.2e} (<= 1e-6), {elapsed:.1f}s (< 60s)")
    assert passed


def test_criterion_2_multiplication_theorem():
    start = time.perf_counter()
    ts = [0.0, 0.5, -0.5, 1.0, -1.0, 5.0, -5.0, 20.0, -20.0]
    worst = 0.0
    for target in (Gamma(1.0), B1):
        h = convolve(target, Beta(1))
        for t in ts:
            product = target.mellin(1.0, t) * Beta(1).mellin(1.0, t)
            worst = max(worst, abs(numeric_mellin(h, 1.0, t) - product))
    elapsed = time.perf_counter() - start
    passed = worst <= 1e-4 and elapsed < 120
    report(2, passed, f"max |M[f*g] - M[f]M[g]| {worst:.2e} (<= 1e-4), {elapsed:.1f}s (< 120s)")
    assert passed


def test_criterion_3_closed_form_delta():
    worst = 0.0
    for x_o in (0.5, 1.0, 2.0):
        for k in (0.5, 1.0, 5.0, 20.0):
            exact = x_o**-2 * (k + k**3 / 3) / math.pi
            worst = max(worst, abs(delta_psi_g(Density(x_o), Beta(1), 1.0, k) - exact) / exact)
    passed = worst <= 1e-8
    report(3, passed, f"max relative error {worst:.2e} (<= 1e-8)")
    assert passed


def test_criterion_4_unbiasedness():
    start = time.perf_counter()
    k = 3.0
    sc = Scenario(Gamma(1.0), Beta(1), Density(1.0), 1.0, 10_000, 200, seed=404, selection=FixedK(k))
    res = mc_mse(sc)
    vals = np.asarray(res.thetas)
    se = vals.std(ddof=1) / math.sqrt(vals.size)
    oracle = _theta_k_oracle(k)
    z = abs(vals.mean() - oracle) / se
    elapsed = time.perf_counter() - start
    passed = z <= 3 and elapsed < 180
    report(4, passed, f"mean {vals.mean():.6f} vs theta_k {oracle:.6f}, |z| = {z:.2f} (<= 3), "
                      f"{elapsed:.1f}s (< 180s)")
    assert passed


def test_criterion_5_consistency():
    start = time.perf_counter()
    sc = Scenario(Gamma(1.0), Beta(1), Density(1.0), 1.0, 500, 300, seed=505, selection=PowerK(0.25))
    mses = [mc_mse(sc.with_n(n)).mse for n in (500, 2000, 8000)]
    elapsed = time.perf_counter() - start
    passed = mses[0] > mses[1] > mses[2] and elapsed < 300
    report(5, passed, "mse at n = 500, 2000, 8000: " + ", ".join(f"{m:.3e}" for m in mses)
           + f" (strictly decreasing), {elapsed:.1f}s (< 300s)")
    assert passed


@pytest.mark.slow
def test_criterion_6_nonparametric_rate():
    start = time.perf_counter()
    scenario, n_list, _ = load_scenario(ROOT / "scenarios" / "b1_rates.json")
    rep = rate_experiment(scenario, n_list, s=1.5)
    elapsed = time.perf_counter() - start
    passed = abs(rep.slope - (-0.4)) <= 0.15 and rep.theory_slope == pytest.approx(-0.4) and elapsed < 600
    report(6, passed, f"slope {rep.slope:.3f} (CI {rep.slope_ci[0]:.3f}..{rep.slope_ci[1]:.3f}) vs -0.4 "
                      f"+- 0.15, oracle k {rep.k_by_n}, {elapsed:.1f}s (< 600s)")
    assert passed


def test_criterion_7_parametric_regime():
    start = time.perf_counter()
    d100, d200 = delta_curve(Laplace(1.0), Beta(2), 0.0, [100.0, 200.0])
    sc = Scenario(Gamma(1.0), Beta(2), Laplace(1.0), 0.0, 1000, 200, seed=707, selection=FixedK(30.0))
    scaled = [n * mc_mse(sc.with_n(n)).mse for n in (1000, 10_000)]
    ratio = scaled[1] / scaled[0]
    elapsed = time.perf_counter() - start
    passed = d200 - d100 <= 1e-6 and 0.3 <= ratio <= 3 and elapsed < 300
    report(7, passed, f"Delta(200) - Delta(100) = {d200 - d100:.2e} (<= 1e-6), n*mse "
                      f"{scaled[0]:.4f} -> {scaled[1]:.4f}, ratio {ratio:.3f} (in [0.3, 3]), "
                      f"{elapsed:.1f}s (< 300s)")
    assert passed


@pytest.mark.slow
def test_criterion_8_adaptive_oracle():
    start = time.perf_counter()
    config = SelectionConfig(CALIBRATED_CHI, "practical")
    sc = Scenario(B1, Beta(1), Density(1.0), 1.0, 2000, 500, seed=808, selection=config)
    adaptive = mc_mse(sc)
    grid, _ = admissible_set(sc.n, sc.functional, sc.error, sc.c, config)
    oracle = oracle_cutoff(replace(sc, selection=FixedK(1.0)), grid=grid)
    ratio = adaptive.mse / oracle.mse
    elapsed = time.perf_counter() - start
    passed = ratio <= 6 and elapsed < 600
    report(8, passed, f"chi = {CALIBRATED_CHI}, mse(k_hat) {adaptive.mse:.3e} / min_k mse "
                      f"{oracle.mse:.3e} (k* = {oracle.k_star:g}) = {ratio:.2f} (<= 6), "
                      f"{elapsed:.1f}s (< 600s)")
    assert passed


def test_criterion_9_sobolev_membership():
    below, above = sobolev_seminorm(B1, 1.4, 1.0), sobolev_seminorm(B1, 1.6, 1.0)
    passed = math.isfinite(below) and above == math.inf
    report(9, passed, f"|B1|_(1.4) = {below:.6f} (finite), |B1|_(1.6) = {above} (inf)")
    assert passed


def test_criterion_10_determinism(tmp_path):
    doc = {"target": "beta:2", "error": "uniform", "functional": {"kind": "density", "x0": 1.0},
           "c": 1.0, "n_list": [100, 200, 400], "replications": 16, "seed": 1010,
           "selection": {"mode": "adaptive", "chi": CALIBRATED_CHI, "grid": "practical"}}
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(doc))
    outputs = {}
    for cmd in ("simulate", "rates"):
        for workers in (1, 2, 8):
            out, csv = tmp_path / f"{cmd}{workers}.json", tmp_path / f"{cmd}{workers}.csv"
            assert main([cmd, str(path), "-o", str(out), "--csv", str(csv),
                         "--workers", str(workers)]) == 0
            outputs.setdefault(cmd, set()).add(out.read_bytes() + csv.read_bytes())
    passed = all(len(v) == 1 for v in outputs.values())
    report(10, passed, "simulate and rates reports byte-identical across 1, 2 and 8 workers")
    assert passed


def test_draw_is_worker_independent():
    # the per-replication draws do not depend on anything but (seed, replication)
    sc = Scenario(B1, Beta(1), Density(1.0), 1.0, 50, 4, seed=1)
    a = [draw_sample(sc, r)[0].values for r in range(4)]
    b = [draw_sample(sc, r)[0].values for r in reversed(range(4))][::-1]
    assert all(np.array_equal(x, y) for x, y in zip(a, b))

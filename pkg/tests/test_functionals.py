from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate, special

from mellin_deconv.errors import ContractViolation, DomainError, UnsupportedError
from mellin_deconv.functionals import (
    Cdf, Custom, Density, Laplace, Psi1, Psi2, Regime, Survival, psi_decay, psi_eval,
    regime_classify, true_value,
)
from mellin_deconv.mellin import Beta, Gamma, Interval, Lognormal, ScaledLogGamma, Smooth, SuperSmooth, Weibull

TARGETS = [Gamma(1.0), Gamma(2.5), Beta(2), Weibull(1.7), Lognormal(0.1, 0.4), ScaledLogGamma(-1.0, 2.0, 3.0)]


class TestPsiEval:
    @pytest.mark.parametrize("t", [0.0, 1.3, -40.0])
    def test_density_at_one(self, t):
        assert psi_eval(Density(1.0), 1.0, t) == 1.0

    def test_cdf_at_one(self):
        assert psi_eval(Cdf(1.0), 0.0, 0.0) == 1.0

    def test_survival_at_one(self):
        assert psi_eval(Survival(1.0), 2.0, 0.0) == 1.0

    def test_laplace_at_one(self):
        assert psi_eval(Laplace(1.0), 0.0, 0.0) == pytest.approx(special.gamma(1.0), rel=1e-14)

    def test_laplace_against_scipy_gamma(self):
        t = np.linspace(-30, 30, 61)
        x_o, c = 2.5, 0.3
        oracle = x_o ** (c - 1 - 1j * t) * special.gamma(1 - c + 1j * t)
        np.testing.assert_allclose(psi_eval(Laplace(x_o), c, t), oracle, rtol=1e-11)

    @pytest.mark.parametrize("spec, c", [(Cdf(1.0), 1.0), (Laplace(2.0), 1.5), (Survival(1.0), 1.0)])
    def test_constraint(self, spec, c):
        with pytest.raises(DomainError):
            psi_eval(spec, c, 0.0)

    @pytest.mark.parametrize("cls", [Density, Cdf, Survival, Laplace])
    @pytest.mark.parametrize("x_o", [0.0, -1.0, math.inf])
    def test_rejects_bad_point(self, cls, x_o):
        with pytest.raises(DomainError):
            cls(x_o)

    def test_custom_must_be_hermitian(self):
        with pytest.raises(ContractViolation):
            Custom(lambda c, t: np.exp(1j * np.abs(t)), Psi1(0.0))

    def test_custom_evaluates(self):
        spec = Custom(lambda c, t: 1.0 / (1.0 + np.square(t)) + 0j, Psi1(2.0), Interval(0.0, 2.0))
        assert psi_eval(spec, 1.0, 1.0) == 0.5
        with pytest.raises(DomainError):
            psi_eval(spec, 3.0, 1.0)


class TestHermitian:
    @pytest.mark.parametrize("spec, c", [(Density(2.0), 1.0), (Cdf(0.7), 0.2), (Survival(1.5), 1.8),
                                         (Laplace(1.3), 0.0), (Laplace(0.5), 0.8)])
    def test_grid(self, spec, c):
        t = np.linspace(-50.0, 50.0, 1001)
        lhs = np.conj(psi_eval(spec, c, t))
        rhs = psi_eval(spec, c, -t)
        assert np.all(np.abs(lhs - rhs) <= 1e-12 * np.maximum(1.0, np.abs(lhs)))


def _fit_and_check(spec, c, decay):
    # constants fitted on [1, 50] must still bracket the ratio out to t = 200
    coarse = np.linspace(1.0, 50.0, 50)
    dense = np.linspace(1.0, 200.0, 20_000)
    log_ratio = lambda t: np.log(np.abs(psi_eval(spec, c, t))) - decay.log_envelope(t)  # noqa: E731
    lo, hi = np.exp(log_ratio(coarse).min()), np.exp(log_ratio(coarse).max())
    ratio = np.exp(log_ratio(dense))
    return ratio.min() >= 0.95 * lo and ratio.max() <= 1.05 * hi


class TestPsiDecay:
    def test_density(self):
        assert psi_decay(Density(2.0)) == Psi1(0.0)

    def test_survival(self):
        assert psi_decay(Survival(2.0)) == Psi1(1.0)

    def test_cdf(self):
        assert psi_decay(Cdf(2.0)) == Psi1(1.0)

    def test_laplace_at_zero(self):
        assert psi_decay(Laplace(1.0), 0.0) == Psi2(1.0, math.pi / 2, 1.0)

    def test_laplace_needs_c(self):
        with pytest.raises(ValueError):
            psi_decay(Laplace(1.0))

    def test_custom_declared(self):
        spec = Custom(lambda c, t: np.exp(-np.square(t)) + 0j, Psi2(0.0, 1.0, 2.0))
        assert psi_decay(spec) == Psi2(0.0, 1.0, 2.0)

    @pytest.mark.parametrize("spec, c", [(Density(0.5), 1.0), (Density(3.0), -0.5), (Cdf(2.0), 0.5),
                                         (Cdf(0.3), -1.0), (Survival(1.0), 2.0), (Laplace(1.0), 0.5)])
    def test_envelope_stable(self, spec, c):
        assert _fit_and_check(spec, c, psi_decay(spec, c))

    def test_laplace_true_exponent(self):
        # away from c = 1/2 the modulus of Gamma(1 - c + it) carries |t|^(1/2 - c)
        spec, c = Laplace(1.0), 0.0
        assert _fit_and_check(spec, c, Psi2(c - 0.5, math.pi / 2, 1.0))
        assert not _fit_and_check(spec, c, psi_decay(spec, c))


class TestRegime:
    def test_cdf_uniform_is_nonparametric(self):
        assert regime_classify(Psi1(1.0), Smooth(1.0)) is Regime.NONPARAMETRIC

    def test_laplace_smooth_is_parametric(self):
        assert regime_classify(Psi2(0.3, math.pi / 2, 1.0), Smooth(2.0)) is Regime.PARAMETRIC

    def test_density_is_nonparametric(self):
        assert regime_classify(Psi1(0.0), Smooth(1.0)) is Regime.NONPARAMETRIC

    def test_polynomial_psi_beats_weak_error(self):
        assert regime_classify(Psi1(2.0), Smooth(0.2)) is Regime.PARAMETRIC

    @pytest.mark.parametrize("psi, g, expected", [
        (Psi2(0.0, 1.0, 2.0), SuperSmooth(0.0, 0.5, 1.0), Regime.PARAMETRIC),
        (Psi2(0.0, 1.0, 1.0), SuperSmooth(0.0, 0.5, 1.0), Regime.PARAMETRIC),
        (Psi2(0.0, 0.5, 1.0), SuperSmooth(0.0, 1.0, 1.0), Regime.NONPARAMETRIC),
        (Psi2(2.0, 1.0, 1.0), SuperSmooth(0.0, 1.0, 1.0), Regime.PARAMETRIC),
        (Psi2(0.5, 1.0, 1.0), SuperSmooth(0.0, 1.0, 1.0), Regime.NONPARAMETRIC),
        (Psi2(0.0, 1.0, 1.0), SuperSmooth(0.0, 0.1, 2.0), Regime.NONPARAMETRIC),
        (Psi1(5.0), SuperSmooth(0.0, 0.1, 1.0), Regime.NONPARAMETRIC),
    ])
    def test_table(self, psi, g, expected):
        assert regime_classify(psi, g) is expected

    @given(st.floats(-3, 3), st.floats(0.1, 3), st.floats(0.1, 3), st.floats(0.1, 3),
           st.floats(-3, 3), st.floats(0.1, 3), st.floats(0.1, 3))
    def test_matches_integrability_of_ratio(self, p, mu, R, _, gamma, lam, rho):
        # the ratio |Psi / M_g|^2 ~ t^(2 gamma - 2 p) exp(-2 mu t^R + 2 lam t^rho) is integrable
        # at infinity exactly in the parametric regime
        exp_rate = (mu if R > rho else (-lam if rho > R else mu - lam))
        if R == rho:
            integrable = mu > lam or (mu == lam and 2 * p - 2 * gamma > 1)
        else:
            integrable = exp_rate > 0
        got = regime_classify(Psi2(p, mu, R), SuperSmooth(gamma, lam, rho))
        assert (got is Regime.PARAMETRIC) == integrable


class TestTrueValue:
    def test_exp_density(self):
        assert true_value(Gamma(1.0), Density(1.0)) == pytest.approx(math.exp(-1.0), rel=1e-15)

    def test_exp_survival(self):
        assert true_value(Gamma(1.0), Survival(1.0)) == pytest.approx(math.exp(-1.0), rel=1e-14)

    def test_exp_laplace(self):
        oracle = integrate.quad(lambda x: math.exp(-2 * x), 0, math.inf)[0]
        assert true_value(Gamma(1.0), Laplace(1.0)) == pytest.approx(oracle, rel=1e-12)

    @pytest.mark.parametrize("target", [Beta(1), Beta(3), Gamma(0.5), Gamma(4.0)], ids=str)
    def test_laplace_against_quadrature(self, target):
        lo, hi = target.support
        oracle = integrate.quad(lambda x: math.exp(-0.7 * x) * target.pdf(x), lo, hi)[0]
        assert true_value(target, Laplace(0.7)) == pytest.approx(oracle, rel=1e-10)

    def test_missing_closed_form(self):
        with pytest.raises(UnsupportedError):
            true_value(Lognormal(0.0, 1.0), Laplace(1.0))

    @given(st.sampled_from(TARGETS), st.floats(1e-3, 20.0))
    def test_survival_cdf_duality(self, target, x_o):
        assert true_value(target, Survival(x_o)) + true_value(target, Cdf(x_o)) == 1.0


class TestPlancherelConsistency:
    def test_cdf_of_exponential(self):
        # (2 pi)^-1 int_{-k}^{k} Psi(-t) M_c[f](t) dt with k = 200 recovers F(1)
        c, k = 0.5, 200.0
        spec, target = Cdf(1.0), Gamma(1.0)
        t, w = np.polynomial.legendre.leggauss(4000)
        t, w = k * (t + 1) / 2, k * w / 2
        value = np.sum(w * np.real(psi_eval(spec, c, -t) * target.mellin(c, t))) / math.pi
        assert value == pytest.approx(1 - math.exp(-1.0), abs=2e-2)

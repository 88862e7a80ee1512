"""Estimation of linear functionals under multiplicative measurement error.

Observations ``Y = X U`` carry a positive error ``U`` with known law; the
package estimates ``theta(f)`` for the density ``f`` of ``X`` (point values
of the density, CDF and survival function, or the Laplace transform) by
dividing empirical Mellin transforms and truncating the inversion integral.
"""

from .adaptive import SelectionConfig, SelectionReport, admissible_set, select_k, sigma_hat
from .errors import (AssumptionViolation, ContractViolation, DegenerateExperimentError,
                     DomainError, MellinError, QuadratureError, UnsupportedError)
from .estimator import EstimateReport, Sample, delta_psi_g, empirical_mellin, theta_hat
from .functionals import Cdf, Custom, Density, Laplace, Survival, psi_eval, regime_classify
from .mellin import (Beta, DensityFn, Gamma, Lognormal, ScaledLogGamma, Weibull,
                     analytic_mellin, numeric_mellin, parse_model)
from .simulation import Scenario, mc_mse, oracle_cutoff, rate_experiment

__version__ = "0.1.0"

__all__ = [
    "SelectionConfig", "SelectionReport", "admissible_set", "select_k", "sigma_hat",
    "AssumptionViolation", "ContractViolation", "DegenerateExperimentError", "DomainError",
    "MellinError", "QuadratureError", "UnsupportedError",
    "EstimateReport", "Sample", "delta_psi_g", "empirical_mellin", "theta_hat",
    "Cdf", "Custom", "Density", "Laplace", "Survival", "psi_eval", "regime_classify",
    "Beta", "DensityFn", "Gamma", "Lognormal", "ScaledLogGamma", "Weibull",
    "analytic_mellin", "numeric_mellin", "parse_model",
    "Scenario", "mc_mse", "oracle_cutoff", "rate_experiment",
]

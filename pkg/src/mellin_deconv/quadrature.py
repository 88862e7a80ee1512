"""Quadrature building blocks.

Two families live here: fixed composite Gauss-Legendre rules on uniform
panels (deterministic, vectorised, used for integrals over ``t``), and thin
wrappers around QUADPACK for adaptive integrals over ``x`` that convert
non-convergence into :class:`~mellin_deconv.errors.QuadratureError`.
"""

from __future__ import annotations

import math
import warnings
from functools import lru_cache

import numpy as np
from scipy import integrate

from .errors import QuadratureError

# adaptive-integration defaults for integrals over x (or u = log x)
EPSABS = 1e-11
EPSREL = 1e-11
LIMIT = 400
# accept a QUADPACK warning only if its own error bound is below this
ACCEPT_ABSERR = 1e-8
# below this frequency the oscillatory QUADPACK routines lose accuracy
# (and crash on subnormal input); the cos/sin products are integrated directly
SLOW_FREQUENCY = 0.1


@lru_cache(maxsize=None)
def gauss_legendre(nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights mapped to ``[0, 1]``."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    return (x + 1.0) / 2.0, w / 2.0


def panel_edges(a: float, b: float, max_width: float) -> np.ndarray:
    """Split ``[a, b]`` into the fewest equal panels no wider than `max_width`."""
    if b <= a:
        return np.array([a, a])
    count = max(1, math.ceil((b - a) / max_width - 1e-12))
    return np.linspace(a, b, count + 1)


def panel_rule(edges, nodes: int = 8) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes and weights over consecutive `edges`.

    Returns arrays of shape ``(len(edges) - 1, nodes)``; summing ``w * f(t)``
    along the last axis gives one integral per panel.
    """
    edges = np.asarray(edges, dtype=float)
    x, w = gauss_legendre(nodes)
    width = np.diff(edges)[:, None]
    return edges[:-1, None] + width * x[None, :], width * w[None, :]


def integrate_panels(func, edges, nodes: int = 8) -> np.ndarray:
    """Per-panel integrals of a vectorised `func` (real or complex)."""
    t, w = panel_rule(edges, nodes)
    return np.sum(w * func(t), axis=-1)


def quad(func, a, b, *, weight=None, wvar=None, points=None,
         epsabs=EPSABS, epsrel=EPSREL, limit=LIMIT):
    """``scipy.integrate.quad`` that raises instead of warning.

    Returns ``(value, abserr)``.  A QUADPACK warning is tolerated when the
    reported error bound is still below ``ACCEPT_ABSERR``; otherwise a
    :class:`QuadratureError` carrying the last estimate is raised.
    """
    kwargs = dict(epsabs=epsabs, epsrel=epsrel, limit=limit)
    if weight is not None:
        kwargs.update(weight=weight, wvar=wvar)
        if math.isinf(b):
            kwargs = dict(weight=weight, wvar=wvar, epsabs=epsabs, limlst=100)
    elif points is not None and not (math.isinf(a) or math.isinf(b)):
        kwargs["points"] = points
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", integrate.IntegrationWarning)
        value, abserr = integrate.quad(func, a, b, **kwargs)[:2]
    failed = any(issubclass(c.category, integrate.IntegrationWarning) for c in caught)
    if not np.isfinite(value) or (failed and abserr > ACCEPT_ABSERR):
        raise QuadratureError(f"quadrature on [{a}, {b}] did not converge", value, abserr)
    return value, abserr


def fourier_quad(func, a, b, t):
    """Integrate ``func(u) * exp(i t u)`` over ``[a, b]`` (either end may be infinite).

    Oscillatory weights use QUADPACK's QAWO/QAWF, so the step resolves the
    frequency ``t`` automatically.  Returns ``(complex value, abserr)``.
    """
    if a == b:
        return 0j, 0.0
    if 0 < abs(t) < SLOW_FREQUENCY:
        return _slow_fourier(func, a, b, t)
    if math.isinf(a) and math.isinf(b):
        re1, im1, e1 = _fourier_half(func, 0.0, t)
        re2, im2, e2 = _fourier_half(lambda v: func(-v), 0.0, -t)
        return complex(re1 + re2, im1 + im2), e1 + e2
    if math.isinf(a):
        # u = -v maps (-inf, b] onto [-b, inf)
        re, im, err = _fourier_half(lambda v: func(-v), -b, -t)
        return complex(re, im), err
    if math.isinf(b):
        re, im, err = _fourier_half(func, a, t)
        return complex(re, im), err
    if t == 0:
        val, err = quad(func, a, b)
        return complex(val), err
    if abs(t) < SLOW_FREQUENCY:
        return _slow_fourier(func, a, b, t)
    re, e1 = quad(func, a, b, weight="cos", wvar=t)
    im, e2 = quad(func, a, b, weight="sin", wvar=t)
    return complex(re, im), e1 + e2


def _slow_fourier(func, a, b, t):
    re, e1 = quad(lambda u: func(u) * math.cos(t * u), a, b)
    im, e2 = quad(lambda u: func(u) * math.sin(t * u), a, b)
    return complex(re, im), e1 + e2


def _fourier_half(func, a, t):
    # integral over [a, inf) of func(u) * exp(i t u); a finite head panel is
    # split off so that endpoint singularities are handled by QAWO/QAGS
    head = a + 1.0
    if t == 0:
        v1, e1 = quad(func, a, head)
        v2, e2 = quad(func, head, math.inf)
        return v1 + v2, 0.0, e1 + e2
    sign = 1.0 if t > 0 else -1.0
    w = abs(t)
    c1, e1 = quad(func, a, head, weight="cos", wvar=w)
    s1, e2 = quad(func, a, head, weight="sin", wvar=w)
    c2, e3 = quad(func, head, math.inf, weight="cos", wvar=w)
    s2, e4 = quad(func, head, math.inf, weight="sin", wvar=w)
    return c1 + c2, sign * (s1 + s2), e1 + e2 + e3 + e4


def composite_gl(func, a: float, b: float, max_width: float, nodes: int = 10):
    """Composite Gauss-Legendre integral of a vectorised `func` over ``[a, b]``.

    Returns ``(value, err)`` where `err` is the gap to the same panels
    integrated with ``nodes - 4`` points, a conservative error estimate.
    """
    edges = panel_edges(a, b, max_width)
    fine = integrate_panels(func, edges, nodes).sum()
    coarse = integrate_panels(func, edges, nodes - 4).sum()
    return fine, float(abs(fine - coarse))

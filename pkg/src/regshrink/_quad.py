"""Thin wrappers over QUADPACK with library-wide tolerances.

Integrals over (0, inf) are taken on a log-transformed axis and split at a
caller-supplied interior point (normally the mode), which keeps the adaptive
subdivision well conditioned for the heavy-tailed scale densities used here.
"""
from __future__ import annotations

import math
import warnings

import numpy as np
from scipy import integrate

from .errors import ComputationError

EPSABS = 1e-10
EPSREL = 1e-8
LIMIT = 500


def quad(f, a, b, *, points=None, epsabs=EPSABS, epsrel=EPSREL, limit=LIMIT):
    """Adaptive Gauss-Kronrod integral of a scalar function on [a, b].

    Raises ComputationError when QUADPACK reports failure and the returned
    error estimate is not within a small multiple of the requested tolerance.
    """
    kwargs = dict(epsabs=epsabs, epsrel=epsrel, limit=limit, full_output=1)
    if points is not None and np.isfinite(a) and np.isfinite(b):
        pts = [p for p in points if a < p < b]
        if pts:
            kwargs["points"] = pts
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        res = integrate.quad(f, a, b, **kwargs)
    value, abserr = res[0], res[1]
    msg = res[3] if len(res) > 3 else ""
    ier = 0
    if msg and abserr > 10 * max(epsabs, epsrel * abs(value)):
        ier = 1
    if not math.isfinite(value) or ier != 0:
        raise ComputationError(
            "quadrature did not converge",
            diagnostics={"interval": (a, b), "value": value, "abserr": abserr,
                         "message": str(msg)},
        )
    return value


def quad_halfline(f, center=1.0, *, epsabs=EPSABS, epsrel=EPSREL, limit=LIMIT):
    """Integral of ``f`` over (0, inf) computed as an integral over log x.

    ``center`` should sit near the bulk of the integrand; the log axis is
    split there.
    """
    s0 = math.log(center)

    def g(s):
        if s > 709.0:
            return 0.0
        x = math.exp(s)
        return f(x) * x if x > 0.0 and math.isfinite(x) else 0.0

    left = quad(g, -math.inf, s0, epsabs=epsabs, epsrel=epsrel, limit=limit)
    right = quad(g, s0, math.inf, epsabs=epsabs, epsrel=epsrel, limit=limit)
    return left + right


def quad_log_interval(f, lo, hi, *, points=None, epsabs=EPSABS, epsrel=EPSREL,
                      limit=LIMIT):
    """Integral of ``f`` over [lo, hi] (0 <= lo < hi <= inf) on the log axis."""
    a = -math.inf if lo <= 0.0 else math.log(lo)
    b = math.inf if not math.isfinite(hi) else math.log(hi)

    def g(s):
        if s > 709.0:
            return 0.0
        x = math.exp(s)
        return f(x) * x if x > 0.0 and math.isfinite(x) else 0.0

    log_points = None
    if points is not None:
        log_points = [math.log(p) for p in points if p > 0]
    if math.isinf(a) or math.isinf(b):
        # QUADPACK ignores breakpoints on infinite ranges; split manually.
        inner = sorted(p for p in (log_points or []) if a < p < b)
        if not inner:
            mid = 0.0 if (math.isinf(a) and math.isinf(b)) else (
                b - 1.0 if math.isinf(a) else a + 1.0)
            inner = [mid]
        edges = [a, *inner, b]
        return sum(quad(g, edges[i], edges[i + 1], epsabs=epsabs, epsrel=epsrel,
                        limit=limit) for i in range(len(edges) - 1))
    return quad(g, a, b, points=log_points, epsabs=epsabs, epsrel=epsrel, limit=limit)

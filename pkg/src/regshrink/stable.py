"""One-sided stable laws and their exponentially tilted versions.

The standard positive stable variable ``S`` with index ``a`` in (0, 1) has
Laplace transform ``E exp(-s S) = exp(-s**a)``.  Its density is evaluated
through Zolotarev's integral representation (moderate and small ``x``) or its
convergent power series in ``x**-a`` (large ``x``).  Random generation uses
the Kanter representation; the exponentially tilted law with density
proportional to ``exp(-t x) f(x)`` is drawn either by naive rejection from
the untilted law or by Devroye's double-rejection algorithm.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import special

from ._quad import quad
from .errors import ComputationError, DomainError

_SERIES_TERMS = 60
_SERIES_CUT = 0.25  # use the series when x**-a falls below this


def _check_index(a):
    if not (0.0 < a < 1.0):
        raise DomainError(f"stable index must lie in (0, 1), got {a!r}")


def _sinc(x):
    return np.sinc(np.asarray(x, dtype=float) / np.pi)


def _logsinc(x):
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 0.1
    x2 = np.where(small, x * x, 0.0)
    series = -x2 / 6.0 - x2 ** 2 / 180.0 - x2 ** 3 / 2835.0 - x2 ** 4 / 37800.0
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = np.log(_sinc(np.where(small, 1.0, x)))
    return np.where(small, series, direct)


def _logsinc_scalar(x):
    if abs(x) < 0.1:
        x2 = x * x
        return -x2 / 6.0 - x2 * x2 / 180.0 - x2 ** 3 / 2835.0 - x2 ** 4 / 37800.0
    return math.log(math.sin(x) / x)


def _log_kanter_excess_scalar(u, a):
    if u >= math.pi:
        return math.inf
    return (a * _logsinc_scalar(a * u) + (1 - a) * _logsinc_scalar((1 - a) * u)
            - _logsinc_scalar(u)) / (1 - a)


def log_kanter_excess(u, a):
    """log A(u) - log A(0), accurate for small u."""
    val = a * _logsinc(a * u) + (1 - a) * _logsinc((1 - a) * u) - _logsinc(u)
    return val / (1 - a)


def log_kanter(u, a):
    """Log of Kanter's function A(u) on (0, pi).

    A(u) = [sin(a u)**a sin((1-a) u)**(1-a) / sin(u)]**(1/(1-a)); written in
    sinc form so the value at u -> 0 is finite.
    """
    u = np.asarray(u, dtype=float)
    with np.errstate(divide="ignore"):
        val = (a * np.log(a * _sinc(a * u))
               + (1 - a) * np.log((1 - a) * _sinc((1 - a) * u))
               - np.log(_sinc(u)))
    return val / (1 - a)


def kanter(u, a):
    return np.exp(log_kanter(u, a))


def _series_terms(a, n_terms=_SERIES_TERMS):
    n = np.arange(1, n_terms + 1)
    sign = np.where(n % 2 == 1, 1.0, -1.0)
    return n, sign, np.sin(np.pi * a * n)


def _log_series(lg, sign, s):
    # log of sum(sign * s * exp(lg)) / pi, factoring out the leading term
    total = np.sum(sign * s * np.exp(lg - lg[0]))
    if total <= 0.0:
        return -math.inf
    return float(lg[0] + math.log(total) - math.log(math.pi))


def _log_pdf_series(logx, a):
    n, sign, s = _series_terms(a)
    lg = special.gammaln(a * n + 1) - special.gammaln(n + 1) - (a * n + 1) * logx
    return _log_series(lg, sign, s)


def _log_sf_series(x, a):
    n, sign, s = _series_terms(a)
    lg = special.gammaln(a * n) - special.gammaln(n + 1) - a * n * math.log(x)
    return _log_series(lg, sign, s)


def _u_star(a, y):
    """Point where A(u) * y = 1, or None when A(u) * y > 1 everywhere."""
    la0 = float(log_kanter(0.0, a))
    target = -math.log(y)
    if la0 >= target:
        return None
    lo, hi = 0.0, math.pi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if log_kanter(mid, a) < target:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-14:
            break
    return 0.5 * (lo + hi)


def _breakpoints(a, y):
    # For large y the integrand concentrates near u = 0 with width ~ (A(0) y)**-0.5.
    pts = []
    us = _u_star(a, y)
    if us is not None:
        pts.append(us)
    w = 1.0 / math.sqrt(max(float(kanter(0.0, a)) * y, 1.0))
    while w < math.pi:
        pts.append(w)
        w *= 4.0
    return sorted(pts)


def positive_stable_logpdf(x, a, *, logx=None):
    """Log density of the standard positive stable law (scalar ``x``).

    ``logx`` may be passed instead of ``x`` for arguments beyond the
    floating-point range.
    """
    _check_index(a)
    if logx is None:
        x = float(x)
        if x <= 0.0:
            return -math.inf
        logx = math.log(x)
    if -a * logx < math.log(_SERIES_CUT):
        val = _log_pdf_series(logx, a)
        if math.isfinite(val):
            return val
    k = a / (1.0 - a)
    ly = -k * logx
    la0 = float(log_kanter(0.0, a))
    if la0 + ly > 700.0:
        return -math.inf  # below exp(-1e304)
    y = math.exp(ly)
    shift = math.exp(la0 + ly)  # A(0) * y, the minimum of A(u) * y

    def g(u):
        ex = _log_kanter_excess_scalar(u, a)
        if ex == math.inf:
            return 0.0
        v = la0 + ex - shift * math.expm1(ex)
        return math.exp(v) if v > -745.0 else 0.0

    integral = quad(g, 0.0, math.pi, points=_breakpoints(a, y), epsabs=0.0)
    if integral <= 0.0:
        raise ComputationError("stable density integral vanished",
                               diagnostics={"logx": logx, "a": a})
    return math.log(k / math.pi) - (1.0 + k) * logx - shift + math.log(integral)


def positive_stable_pdf(x, a):
    return math.exp(positive_stable_logpdf(x, a))


def positive_stable_logsf(x, a):
    """Log survival function; exact series in the upper tail."""
    _check_index(a)
    x = float(x)
    if x <= 0.0:
        return 0.0
    if x ** (-a) < _SERIES_CUT:
        return _log_sf_series(x, a)
    return math.log1p(-positive_stable_cdf(x, a))


def positive_stable_cdf(x, a):
    """Distribution function of the standard positive stable law."""
    _check_index(a)
    x = float(x)
    if x <= 0.0:
        return 0.0
    if x ** (-a) < _SERIES_CUT:
        return -math.expm1(_log_sf_series(x, a))
    k = a / (1.0 - a)
    ly = -k * math.log(x)
    if float(log_kanter(0.0, a)) + ly > 700.0:
        return 0.0
    la0 = float(log_kanter(0.0, a))

    def h(u):
        ex = _log_kanter_excess_scalar(u, a)
        if ex == math.inf:
            return 0.0
        v = la0 + ex + ly
        return math.exp(-math.exp(v)) if v < 7.0 else 0.0

    val = quad(h,
               0.0, math.pi, points=_breakpoints(a, math.exp(ly)), epsabs=1e-300)
    return val / math.pi


def sample_positive_stable(a, rng, size=None):
    """Kanter draw: S = (A(U) / E) ** ((1 - a) / a), U ~ U(0, pi), E ~ Exp(1)."""
    _check_index(a)
    u = rng.uniform(0.0, np.pi, size=size)
    e = rng.standard_exponential(size=size)
    with np.errstate(over="ignore"):
        return np.exp((1.0 - a) / a * (log_kanter(u, a) - np.log(e)))


def _tilted_naive(a, tilt, rng):
    out = np.empty(tilt.size)
    pending = np.arange(tilt.size)
    tries = 0
    while pending.size:
        s = sample_positive_stable(a, rng, size=pending.size)
        v = rng.random(pending.size)
        with np.errstate(invalid="ignore"):
            ok = np.log(v) <= -tilt[pending] * s
        ok &= np.isfinite(s)
        out[pending[ok]] = s[ok]
        pending = pending[~ok]
        tries += 1
    return out, tries


def _tilted_double_rejection(a, lam, rng):
    """Devroye's double-rejection sampler, vectorized over tilts ``lam``."""
    n = lam.size
    out = np.empty(n)
    b = (1.0 - a) / a
    la = lam ** a
    gam = la * a * (1.0 - a)
    sg = np.sqrt(gam)
    c1 = math.sqrt(math.pi / 2.0)
    c3 = (2.0 + c1) * sg
    xi = (1.0 + math.sqrt(2.0) * c3) / math.pi
    psi = c3 * np.exp(-gam * math.pi ** 2 / 8.0) / math.sqrt(math.pi)
    w1 = c1 * xi / sg
    w2 = 2.0 * math.sqrt(math.pi) * psi
    w3 = xi * math.pi
    big = gam >= 1.0

    def aux(idx):
        m = idx.size
        uu = np.empty(m)
        zz = np.empty(m)
        zeta_out = np.empty(m)
        todo = np.arange(m)
        while todo.size:
            # several candidates per pending slot; keep the first accepted
            reps = max(1, min(8, 256 // todo.size))
            j = np.repeat(idx[todo], reps)
            k = j.size
            v = rng.random(k)
            w = rng.random(k)
            nrm = rng.standard_normal(k)
            bj = big[j]
            u = np.where(
                bj,
                np.where(v < w1[j] / (w1[j] + w2[j]), np.abs(nrm) / sg[j],
                         np.pi * (1.0 - w * w)),
                np.where(v < w3[j] / (w2[j] + w3[j]), np.pi * w,
                         np.pi * (1.0 - w * w)),
            )
            inside = u < np.pi
            us = np.where(inside, u, 0.5)
            with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
                # zeta = sqrt(B(u) / B(0)) in Devroye's notation
                log_ratio = (np.log(_sinc(us)) - a * np.log(_sinc(a * us))
                             - (1 - a) * np.log(_sinc((1 - a) * us)))
                zeta = np.exp(0.5 * log_ratio)
                zbig = -1.0 / np.expm1(-np.log1p(a * zeta / sg[j]) / a)
                rho = (np.pi * np.exp(-la[j] * (1.0 - zeta ** -2))
                       / ((1.0 + c1) * sg[j] / zeta + zbig))
                d = np.zeros(k)
                d += np.where(bj & (us >= 0), xi[j] * np.exp(-gam[j] * us * us / 2.0), 0.0)
                d += np.where((us > 0) & (us < np.pi), psi[j] / np.sqrt(np.pi - us), 0.0)
                d += np.where(~bj & (us >= 0) & (us <= np.pi), xi[j], 0.0)
                rho = rho * d
            zr = rng.random(k) * rho
            ok = (inside & (zr <= 1.0) & np.isfinite(zr)).reshape(-1, reps)
            hit = ok.any(axis=1)
            pick = np.flatnonzero(hit) * reps + np.argmax(ok[hit], axis=1)
            uu[todo[hit]] = us[pick]
            zz[todo[hit]] = zr[pick]
            zeta_out[todo[hit]] = zbig[pick]
            todo = todo[~hit]
        return uu, zz, zeta_out

    pending = np.arange(n)
    rounds = 0
    while pending.size:
        rounds += 1
        if rounds > 100000:
            raise ComputationError("tilted stable sampler exceeded its retry budget",
                                   diagnostics={"pending": int(pending.size)})
        u, zr, zbig = aux(pending)
        k = pending.size
        la_p = la[pending]
        lam_p = lam[pending]
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            A = np.exp(log_kanter(u, a))
            m = (b / A) ** a * la_p
            delta = np.sqrt(m * a / A)
            a1 = delta * c1
            a3 = zbig / A
            s = a1 + delta + a3
            v = rng.random(k)
            nrm = rng.standard_normal(k)
            e1 = rng.standard_exponential(k)
            uni = rng.random(k)
            case1 = v < a1 / s
            case2 = ~case1 & (v < (a1 + delta) / s)
            case3 = ~case1 & ~case2
            x = np.where(case1, m - delta * np.abs(nrm),
                         np.where(case2, m + delta * uni, m + delta + e1 * a3))
            pos = x > 0
            xs = np.where(pos, x, 1.0)
            e2 = -np.log(zr)
            c = A * (xs - m) + lam_p * m ** (-b) * ((m / xs) ** b - 1.0)
            c = c - np.where(case1, nrm * nrm / 2.0, 0.0) - np.where(case3, e1, 0.0)
            ok = pos & (c <= e2)
            draw = xs ** (-b)
        ok &= np.isfinite(draw) & (draw > 0)
        out[pending[ok]] = draw[ok]
        pending = pending[~ok]
    return out, rounds


def sample_tilted_stable(a, tilt, rng, method="auto"):
    """Draws with density proportional to exp(-tilt * x) f_a(x).

    Parameters
    ----------
    a : float
        Stable index in (0, 1).
    tilt : array_like
        Non-negative tilts; one draw is returned per entry.
    method : {"auto", "double_rejection", "naive"}
        ``auto`` uses naive rejection when ``tilt**a <= 1`` (acceptance is
        then at least exp(-1)) and double rejection otherwise.

    Returns
    -------
    draws : ndarray
    rounds : int
        Number of vectorized rejection rounds, a coarse retry counter.
    """
    _check_index(a)
    t = np.atleast_1d(np.asarray(tilt, dtype=float))
    if np.any(t < 0) or not np.all(np.isfinite(t)):
        raise DomainError("tilt must be finite and non-negative")
    if method not in ("auto", "double_rejection", "naive"):
        raise DomainError(f"unknown method {method!r}")
    out = np.empty(t.size)
    rounds = 0
    if method == "naive":
        use_dr = np.zeros(t.size, dtype=bool)
    elif method == "double_rejection":
        use_dr = t > 0
    else:
        use_dr = t ** a > 1.0
    if np.any(~use_dr):
        idx = np.flatnonzero(~use_dr)
        out[idx], r = _tilted_naive(a, t[idx], rng)
        rounds += r
    if np.any(use_dr):
        idx = np.flatnonzero(use_dr)
        out[idx], r = _tilted_double_rejection(a, t[idx], rng)
        rounds += r
    return out, rounds

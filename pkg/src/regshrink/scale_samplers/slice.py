"""Univariate stepping-out slice sampler."""
from __future__ import annotations

import math

from ..errors import ComputationError


def slice_sample(logf, x0, rng, *, width=1.0, max_steps=50, lower=-math.inf,
                 upper=math.inf, max_shrink=1000):
    """One slice-sampling update of a univariate target.

    Parameters
    ----------
    logf : callable
        Log density up to a constant.
    x0 : float
        Current point, must satisfy lower <= x0 <= upper with finite logf.
    width, max_steps : float, int
        Stepping-out interval width and cap on the number of expansions.
    lower, upper : float
        Hard support bounds.

    Returns
    -------
    x1 : float
    expansions : int
        Number of stepping-out expansions plus shrinkage evaluations.
    """
    f0 = logf(x0)
    if not math.isfinite(f0):
        raise ComputationError("slice sampler started outside the support",
                               diagnostics={"x0": x0, "logf": f0})
    level = f0 - rng.standard_exponential()
    u = rng.random()
    left = x0 - width * u
    right = left + width
    v = rng.random()
    j = int(math.floor(max_steps * v))
    k = max_steps - 1 - j
    used = 0
    while j > 0 and left > lower and logf(left) > level:
        left -= width
        j -= 1
        used += 1
    while k > 0 and right < upper and logf(right) > level:
        right += width
        k -= 1
        used += 1
    left = max(left, lower)
    right = min(right, upper)
    for _ in range(max_shrink):
        x1 = left + rng.random() * (right - left)
        used += 1
        if logf(x1) > level:
            return x1, used
        if x1 < x0:
            left = x1
        else:
            right = x1
    raise ComputationError("slice sampler shrinkage did not terminate",
                           diagnostics={"x0": x0, "interval": (left, right)})

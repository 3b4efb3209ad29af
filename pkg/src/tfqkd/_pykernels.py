"""Pure-Python numerical kernels.

These are the reference implementations of the two iterative routines the
estimation pipeline leans on: the modified Bessel function I0 and the
bisection solve of the improved Chernoff deviation equations.  A compiled
twin lives in ``_ckernels.pyx``; :mod:`tfqkd.kernels` picks one at import.
"""
import math

import numpy as np

SERIES_CUTOFF = 15.0


def bessel_i0(x):
    """Modified Bessel function of the first kind, order zero.

    Power series ``sum (x^2/4)^k / (k!)^2`` below ``SERIES_CUTOFF``; the
    Hankel asymptotic expansion above it, truncated at its smallest term.
    """
    x = abs(float(x))
    if x < SERIES_CUTOFF:
        q = 0.25 * x * x
        term = total = 1.0
        k = 0
        while True:
            k += 1
            term *= q / (k * k)
            total += term
            if term < 1e-17 * total:
                return total
    inv8x = 1.0 / (8.0 * x)
    term = total = 1.0
    for k in range(60):
        coeff = (2.0 * k + 1.0) ** 2 * inv8x / (k + 1.0)
        if coeff >= 1.0:
            break
        term *= coeff
        total += term
        if term < 1e-17 * total:
            break
    return math.exp(x) / math.sqrt(2.0 * math.pi * x) * total


def residual(delta, observed, log_eps, upper):
    """Log-space residual of the deviation equation at ``delta``.

    Upper side: ``observed/(1-d) * (-d - (1-d) ln(1-d)) - ln eps``.
    Lower side: ``observed/(1+d) * (d - (1+d) ln(1+d)) - ln eps``.
    Both are strictly decreasing in ``d`` on their domains.
    """
    if upper:
        return observed * (-delta / (1.0 - delta) - math.log1p(-delta)) - log_eps
    return observed * (delta / (1.0 + delta) - math.log1p(delta)) - log_eps


def _bisect(observed, log_eps, upper, lo, hi, rtol):
    f_lo = residual(lo, observed, log_eps, upper)
    f_hi = residual(hi, observed, log_eps, upper)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if (f_lo > 0) == (f_hi > 0):
        return math.nan
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        f_mid = residual(mid, observed, log_eps, upper)
        if f_mid == 0.0:
            return mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
        # run well past rtol so the log-space residual is also tiny
        if hi - lo <= rtol * 1e-4 * lo:
            break
    return 0.5 * (lo + hi)


def solve_delta(observed, log_eps, upper, lo, hi, rtol=1e-12):
    d = _bisect(float(observed), float(log_eps), bool(upper), lo, hi, rtol)
    if math.isnan(d):
        raise ArithmeticError(f"no sign change on bracket [{lo!r}, {hi!r}]")
    return d


def solve_delta_many(observed, log_eps, upper, lo, hi, rtol=1e-12):
    """Vectorised :func:`solve_delta`; NaN marks entries with no root."""
    observed = np.ascontiguousarray(observed, dtype=np.float64)
    return np.array([_bisect(float(t), log_eps, upper, lo, hi, rtol) for t in observed],
                    dtype=np.float64)

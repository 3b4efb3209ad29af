# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the iterative numerical kernels.

Mirrors :mod:`tfqkd._pykernels` function for function; see there for the
algorithm descriptions.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp, sqrt, log1p, fabs, M_PI, NAN, isnan

cnp.import_array()

cdef double SERIES_CUTOFF = 15.0


cdef double _i0(double x) noexcept nogil:
    cdef double q, term, total, inv8x, coeff
    cdef int k
    if x < 0:
        x = -x
    if x < SERIES_CUTOFF:
        q = 0.25 * x * x
        term = 1.0
        total = 1.0
        k = 0
        while True:
            k += 1
            term *= q / (<double>k * <double>k)
            total += term
            if term < 1e-17 * total:
                break
        return total
    inv8x = 1.0 / (8.0 * x)
    term = 1.0
    total = 1.0
    k = 0
    while k < 60:
        coeff = (2.0 * k + 1.0) * (2.0 * k + 1.0) * inv8x / (k + 1.0)
        if coeff >= 1.0:
            break
        term *= coeff
        total += term
        k += 1
        if term < 1e-17 * total:
            break
    return exp(x) / sqrt(2.0 * M_PI * x) * total


cdef inline double _residual(double delta, double observed, double log_eps, bint upper) noexcept nogil:
    if upper:
        return observed * (-delta / (1.0 - delta) - log1p(-delta)) - log_eps
    return observed * (delta / (1.0 + delta) - log1p(delta)) - log_eps


cdef double _bisect(double observed, double log_eps, bint upper,
                    double lo, double hi, double rtol) noexcept nogil:
    cdef double f_lo = _residual(lo, observed, log_eps, upper)
    cdef double f_hi = _residual(hi, observed, log_eps, upper)
    cdef double mid, f_mid
    cdef int it
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if (f_lo > 0) == (f_hi > 0):
        return NAN
    for it in range(400):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        f_mid = _residual(mid, observed, log_eps, upper)
        if f_mid == 0.0:
            return mid
        if (f_mid > 0) == (f_lo > 0):
            lo = mid
            f_lo = f_mid
        else:
            hi = mid
        if hi - lo <= rtol * 1e-4 * lo:
            break
    return 0.5 * (lo + hi)


def bessel_i0(double x):
    return _i0(x)


def solve_delta(double observed, double log_eps, bint upper,
                double lo, double hi, double rtol=1e-12):
    cdef double d = _bisect(observed, log_eps, upper, lo, hi, rtol)
    if isnan(d):
        raise ArithmeticError(
            f"no sign change on bracket [{lo!r}, {hi!r}]")
    return d


def solve_delta_many(double[::1] observed, double log_eps, bint upper,
                     double lo, double hi, double rtol=1e-12):
    cdef Py_ssize_t i, n = observed.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] res = out
    with nogil:
        for i in range(n):
            res[i] = _bisect(observed[i], log_eps, upper, lo, hi, rtol)
    return out


def residual(double delta, double observed, double log_eps, bint upper):
    return _residual(delta, observed, log_eps, upper)

"""X-basis bit error bound and the Z-basis phase error bound derived from it."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .concentration import gamma_sampling

MAX_ERROR_RATE = 0.5
TAIL_TOLERANCE = 1e-15


def _even_term(mu, n):
    return mu ** n / math.sqrt(math.factorial(2 * n))


def _odd_term(mu, n):
    return mu ** (n + 0.5) / math.sqrt(math.factorial(2 * n + 1))


@dataclass(frozen=True)
class KCoefficients:
    """Separable sums of the coherent-state expansion coefficients.

    ``K_{2n,2m} = e^-mu * e_n * e_m`` and ``K_{2n+1,2m+1} = e^-mu * o_n * o_m``
    with ``e_n = mu^n / sqrt((2n)!)`` and ``o_n = mu^(n+1/2) / sqrt((2n+1)!)``,
    so every double sum over both indices is a product of single sums.
    """

    mu_Z: float
    cutoff: int
    S_even_total: float
    S_odd_total: float
    tail_bound: float

    @property
    def prefactor(self):
        return math.exp(-self.mu_Z)

    @property
    def K00(self):
        return self.prefactor

    @property
    def K02(self):
        return self.prefactor * self.mu_Z / math.sqrt(2.0)

    K20 = K02

    @property
    def K11(self):
        return self.prefactor * self.mu_Z

    @property
    def even_sum(self):
        """Sum of ``K_{2n,2m}`` over all ``n, m >= 0``."""
        return self.prefactor * self.S_even_total ** 2

    @property
    def even_interior_sum(self):
        """Sum of ``K_{2n,2m}`` over ``n, m >= 1``."""
        s = self.S_even_total
        # drop the n=0 row and m=0 column, add back the corner counted twice
        return self.prefactor * (s * s - 2.0 * s * 1.0 + 1.0)

    @property
    def odd_sum(self):
        return self.prefactor * self.S_odd_total ** 2


def k_coefficients(mu_Z, cutoff=40):
    """Truncated separable sums; the cutoff doubles until the tail is negligible."""
    if not mu_Z > 0:
        raise ValueError(f"mu_Z must be positive, got {mu_Z!r}")
    if cutoff < 10:
        raise ValueError(f"cutoff must be >= 10, got {cutoff}")
    while True:
        s_even = math.fsum(_even_term(mu_Z, n) for n in range(cutoff))
        s_odd = math.fsum(_odd_term(mu_Z, n) for n in range(cutoff))
        tail = math.exp(-mu_Z) * max(_even_term(mu_Z, cutoff), _odd_term(mu_Z, cutoff))
        if tail < TAIL_TOLERANCE or cutoff >= 160:
            return KCoefficients(mu_Z, cutoff, s_even, s_odd, tail)
        cutoff *= 2


def _axis_sum(k, yields):
    # K_{0,2m} and K_{2m,0} for m >= 2 with the Y_40 / Y_04 bounds and Y <= 1 beyond
    pre, mu = k.prefactor, k.mu_Z
    k04 = pre * _even_term(mu, 2)
    rest = pre * math.fsum(_even_term(mu, n) for n in range(3, k.cutoff))
    return k04 * (math.sqrt(yields.Y40_up) + math.sqrt(yields.Y04_up)) + 2.0 * rest


def ex_upper_raw(yields, k, N_Z, s_Z, conservative=False):
    """Unclamped upper bound on the X-basis bit error rate.

    Unbounded even and odd yields are replaced by 1.  With the default
    ``conservative=False`` the even amplitude carries only the ``n, m >= 1``
    block besides ``K00, K02, K20``; ``conservative=True`` also adds the
    remaining axis terms ``K_{0,2m}, K_{2m,0}`` (``m >= 2``).
    """
    if not s_Z > 0:
        raise ValueError("s_Z must be positive")
    even = (k.K00 * math.sqrt(yields.Y00_up) + k.K02 * math.sqrt(yields.Y02_up)
            + k.K20 * math.sqrt(yields.Y20_up) + k.even_interior_sum)
    if conservative:
        even += _axis_sum(k, yields)
    odd = k.K11 * math.sqrt(yields.Y11_up) + k.odd_sum - k.K11
    return (even * even + odd * odd) * N_Z / s_Z


def ex_upper(yields, k, N_Z, s_Z, conservative=False):
    """Upper bound on the X-basis bit error rate, clamped to [0, 0.5]."""
    raw = ex_upper_raw(yields, k, N_Z, s_Z, conservative)
    return min(max(raw, 0.0), MAX_ERROR_RATE)


def eph_upper(E_mu_X, s_X, s_Z, eps_pp):
    """Phase error bound: ``E_mu_X`` plus the sampling correction, capped at 0.5."""
    return min(MAX_ERROR_RATE, E_mu_X + gamma_sampling(s_X, s_Z, E_mu_X, eps_pp))

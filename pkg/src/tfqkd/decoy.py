"""Two-decoy bounds on the photon-number-resolved yields ``Y_nm``.

Intervals on the expected X-basis counts of the four decoy settings are
rescaled into intervals on

    T_ab = sum_{n,m} mu_a^n mu_b^m / (n! m!) * Y_nm,

and the closed-form bounds below are linear combinations of those.  The
pair key ``(a, b)`` means Alice used ``mu_a`` and Bob ``mu_b``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .channel import PAIRS


def _clamp01(x):
    return min(max(x, 0.0), 1.0)


@dataclass(frozen=True)
class TBounds:
    lower: dict
    upper: dict

    def __post_init__(self):
        for pair in PAIRS:
            if not 0 <= self.lower[pair] <= self.upper[pair]:
                raise ValueError(f"invalid T interval for {pair}: "
                                 f"[{self.lower[pair]}, {self.upper[pair]}]")

    @classmethod
    def exact(cls, values):
        """Zero-width bounds from exact ``T_ab`` values."""
        return cls(dict(values), dict(values))

    def swapped(self):
        """Bounds with the roles of Alice and Bob exchanged."""
        swap = {(0, 1): (1, 0), (1, 0): (0, 1)}
        return TBounds({swap.get(p, p): v for p, v in self.lower.items()},
                       {swap.get(p, p): v for p, v in self.upper.items()})


@dataclass(frozen=True)
class YieldBounds:
    Y00_up: float
    Y02_up: float
    Y20_up: float
    Y11_up: float
    Y30_up: float
    Y03_up: float
    Y40_up: float
    Y04_up: float
    Y22_low: float


def t_bounds(s_intervals, config, N_X=None, mus=None):
    """Rescale count intervals into ``T_ab`` intervals.

    ``mus`` overrides the decoy intensities ``(mu_0, mu_1)`` used in the
    exponential prefactor.
    """
    N_X = config.N_X if N_X is None else N_X
    mus = mus or (config.mu_0, config.mu_1)
    lower, upper = {}, {}
    for a, b in PAIRS:
        weight = config.decoy_prob(a) * config.decoy_prob(b) * N_X
        if not weight > 0:
            raise ValueError(f"zero selection weight for decoy pair {(a, b)}")
        scale = math.exp(mus[a] + mus[b]) / weight
        lower[(a, b)] = scale * s_intervals[(a, b)].lower
        upper[(a, b)] = scale * s_intervals[(a, b)].upper
    return TBounds(lower, upper)


def _check_mus(mu0, mu1):
    if not mu0 > mu1 > 0:
        raise ValueError(f"need mu0 > mu1 > 0, got {mu0}, {mu1}")


def _all_ones_offset(mu0, mu1):
    # value the Gamma_20 / Gamma_02 remainder takes when every Y_nm is 1
    e0, e1 = math.exp(mu0), math.exp(mu1)
    return (e0 - e1) * (mu0 - mu1 + mu1 * e0 - mu0 * e1)


def gamma_20_02_lower(t, mu0, mu1):
    lo, up = t.lower, t.upper
    g20 = mu1 * lo[0, 0] + mu0 * lo[1, 1] - mu0 * up[0, 1] - mu1 * up[1, 0]
    g02 = mu1 * lo[0, 0] + mu0 * lo[1, 1] - mu1 * up[0, 1] - mu0 * up[1, 0]
    return g20, g02


def yield_y11_upper(t, mu0, mu1, clamp=True):
    _check_mus(mu0, mu1)
    gamma = t.upper[0, 0] + t.upper[1, 1] - t.lower[0, 1] - t.lower[1, 0]
    raw = gamma / (mu0 - mu1) ** 2
    return _clamp01(raw) if clamp else raw


def yield_y20_y02_upper(t, mu0, mu1, clamp=True):
    """Upper bounds on ``(Y_20, Y_02)``."""
    _check_mus(mu0, mu1)
    offset = _all_ones_offset(mu0, mu1)
    denom = (mu0 + mu1) * (mu0 - mu1) ** 2
    g20, g02 = gamma_20_02_lower(t, mu0, mu1)
    raw = (2.0 * (offset - g20) / denom, 2.0 * (offset - g02) / denom)
    return tuple(_clamp01(r) for r in raw) if clamp else raw


def yield_yn0_y0m_upper(t, mu0, mu1, order, clamp=True):
    """Upper bounds on ``(Y_k0, Y_0k)`` for ``k = order >= 2``."""
    _check_mus(mu0, mu1)
    if order < 2:
        raise ValueError(f"order must be >= 2, got {order}")
    offset = _all_ones_offset(mu0, mu1)
    denom = (mu0 - mu1) * (mu0 ** order - mu1 ** order)
    fact = math.factorial(order)
    g20, g02 = gamma_20_02_lower(t, mu0, mu1)
    raw = (fact * (offset - g20) / denom, fact * (offset - g02) / denom)
    return tuple(_clamp01(r) for r in raw) if clamp else raw


def yield_y22_lower(t, mu0, mu1, clamp=True):
    _check_mus(mu0, mu1)
    gamma = t.lower[0, 0] + t.lower[1, 1] - t.upper[0, 1] - t.upper[1, 0]
    raw = (4.0 * (gamma - (math.exp(mu0) - math.exp(mu1)) ** 2)
           / (mu0 ** 2 - mu1 ** 2) ** 2 + 1.0)
    return _clamp01(raw) if clamp else raw


def yield_y00_upper(t, partial, mu0, mu1, clamp=True):
    """Upper bound on ``Y_00``.

    ``partial`` must carry ``Y20_up, Y02_up, Y30_up, Y03_up, Y40_up,
    Y04_up`` and ``Y22_low`` (a :class:`YieldBounds` or any object or
    mapping with those names).
    """
    _check_mus(mu0, mu1)
    get = partial.get if isinstance(partial, dict) else lambda k: getattr(partial, k)
    d = mu0 - mu1
    gamma = (mu1 ** 2 * t.upper[0, 0] + mu0 ** 2 * t.upper[1, 1]
             - mu0 * mu1 * (t.lower[0, 1] + t.lower[1, 0]))
    low_orders = mu0 * mu1 * (
        12.0 * d * (get("Y20_up") + get("Y02_up"))
        + 4.0 * (mu0 ** 2 - mu1 ** 2) * (get("Y30_up") + get("Y03_up"))
        + (mu0 ** 3 - mu1 ** 3) * (get("Y40_up") + get("Y04_up"))
    ) / (24.0 * d)

    def tail(mu, other):
        # 24 e^mu minus the first five Taylor terms, scaled by 24
        return other * (24.0 * math.exp(mu) - mu ** 4 - 4.0 * mu ** 3 - 12.0 * mu ** 2 - 24.0)

    raw = (gamma / d ** 2 + low_orders
           + tail(mu0, mu1) / (12.0 * d) - tail(mu1, mu0) / (12.0 * d)
           - mu0 ** 2 * mu1 ** 2 * get("Y22_low") / 4.0)
    return _clamp01(raw) if clamp else raw


def estimate_yields(t, mu0, mu1):
    """All yield bounds needed downstream, each clamped to [0, 1]."""
    y20, y02 = yield_y20_y02_upper(t, mu0, mu1)
    y30, y03 = yield_yn0_y0m_upper(t, mu0, mu1, 3)
    y40, y04 = yield_yn0_y0m_upper(t, mu0, mu1, 4)
    partial = dict(Y20_up=y20, Y02_up=y02, Y30_up=y30, Y03_up=y03,
                   Y40_up=y40, Y04_up=y04, Y22_low=yield_y22_lower(t, mu0, mu1))
    return YieldBounds(Y00_up=yield_y00_upper(t, partial, mu0, mu1),
                       Y11_up=yield_y11_upper(t, mu0, mu1), **partial)

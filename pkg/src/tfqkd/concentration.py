"""Confidence intervals on the expectation of a sum of Bernoulli trials.

Four fluctuation models turn an observed count into an interval on its
expected value: Hoeffding, multiplicative Chernoff, improved Chernoff and
Azuma (fixed unit differences, so valid for dependent trials).  The
random-sampling correction for the phase error rate lives here as well.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import kernels

UPPER_BRACKET = (1e-12, 1.0 - 1e-12)
LOWER_BRACKET = (1e-12, 1e3)


class BoundModel(enum.Enum):
    HOEFFDING = "hoeffding"
    MULT_CHERNOFF = "mult_chernoff"
    IMPROVED_CHERNOFF = "improved_chernoff"
    AZUMA = "azuma"

    @classmethod
    def parse(cls, name):
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower().replace("-", "_")
        for model in cls:
            if key in (model.value, model.name.lower()):
                return model
        raise ValueError(f"unknown bound model {name!r}; choose from "
                         + ", ".join(m.value for m in cls))


class ConditionsNotMet(ValueError):
    """The multiplicative Chernoff bound's applicability test failed."""


class DeltaSolveError(ArithmeticError):
    """Bisection bracket holds no root."""

    def __init__(self, lo, hi, observed, eps):
        self.bracket = (lo, hi)
        super().__init__(f"no sign change on bracket [{lo!r}, {hi!r}] "
                         f"(observed={observed!r}, eps={eps!r})")


@dataclass(frozen=True)
class ExpectationInterval:
    lower: float
    upper: float
    eps_lower: float
    eps_upper: float

    def __post_init__(self):
        if not 0 <= self.lower <= self.upper:
            raise ValueError(f"invalid interval [{self.lower}, {self.upper}]")

    @property
    def width(self):
        return self.upper - self.lower


def _check_prob(name, value):
    if not 0 < value < 1:
        raise ValueError(f"{name} must lie in (0, 1), got {value!r}")


def _check_counts(observed, n_trials):
    if n_trials is not None:
        if not n_trials >= 1:
            raise ValueError(f"n_trials must be >= 1, got {n_trials!r}")
        if observed > n_trials:
            raise ValueError(f"observed={observed!r} exceeds n_trials={n_trials!r}")
    if observed < 0:
        raise ValueError(f"observed must be nonnegative, got {observed!r}")


def _clip_upper(upper, n_trials):
    return min(upper, n_trials) if n_trials is not None else upper


def hoeffding_interval(observed, n_trials, eps_hat, eps, clamp=True):
    """Two-sided Hoeffding interval; half-widths are ``sqrt(n/2 ln(1/e))``."""
    _check_counts(observed, n_trials)
    _check_prob("eps_hat", eps_hat)
    _check_prob("eps", eps)
    upper = observed + math.sqrt(0.5 * n_trials * math.log(1.0 / eps_hat))
    lower = max(0.0, observed - math.sqrt(0.5 * n_trials * math.log(1.0 / eps)))
    if clamp:
        upper = _clip_upper(upper, n_trials)
    return ExpectationInterval(lower, upper, eps, eps_hat)


def mult_chernoff_interval(observed, n_trials, eps_H, eps_C, eps_hat_C, clamp=True):
    """Multiplicative Chernoff interval, gated by a Hoeffding lower bound.

    The Hoeffding pre-test failure is charged to the lower side, so
    ``eps_lower + eps_upper == eps_H + eps_C + eps_hat_C``.
    """
    _check_counts(observed, n_trials)
    for name, value in (("eps_H", eps_H), ("eps_C", eps_C), ("eps_hat_C", eps_hat_C)):
        _check_prob(name, value)
    tau_low = observed - math.sqrt(0.5 * n_trials * math.log(1.0 / eps_H))
    if tau_low <= 0:
        raise ConditionsNotMet(f"Hoeffding lower bound {tau_low:.6g} is not positive")
    if math.log(2.0 / eps_hat_C) / tau_low > 9.0 / 32.0:
        raise ConditionsNotMet("(2/eps_hat_C)^(1/tau) exceeds e^(9/32)")
    if not math.log(1.0 / eps_C) / tau_low < 1.0 / 3.0:
        raise ConditionsNotMet("eps_C^(-1/tau) is not below e^(1/3)")
    upper = observed + math.sqrt(2.0 * observed * math.log(16.0 / eps_hat_C ** 4))
    lower = max(0.0, observed - math.sqrt(2.0 * observed * 1.5 * math.log(1.0 / eps_C)))
    if clamp:
        upper = _clip_upper(upper, n_trials)
    return ExpectationInterval(lower, upper, eps_H + eps_C, eps_hat_C)


def solve_delta_exact(observed, eps, side, rtol=1e-12, bracket=None):
    """Deviation ratio from the exact improved-Chernoff equation, by bisection.

    ``side="upper"`` solves
    ``[e^-d / (1-d)^(1-d)]^(observed/(1-d)) = eps`` for ``d`` in (0, 1);
    ``side="lower"`` solves ``[e^d / (1+d)^(1+d)]^(observed/(1+d)) = eps``
    for ``d > 0``.  Both are solved in log space.
    """
    if not observed > 0:
        raise ValueError(f"observed must be positive, got {observed!r}")
    _check_prob("eps", eps)
    upper = _side(side)
    lo, hi = bracket or (UPPER_BRACKET if upper else LOWER_BRACKET)
    try:
        return kernels.solve_delta(float(observed), math.log(eps), upper, lo, hi, rtol)
    except ArithmeticError:
        raise DeltaSolveError(lo, hi, observed, eps) from None


def delta_approx(observed, eps, side="upper"):
    """Closed-form approximation to :func:`solve_delta_exact`.

    Valid only for ``observed >= -6 ln eps``; the same expression serves
    both sides.
    """
    _side(side)
    _check_prob("eps", eps)
    log_eps = math.log(eps)
    if observed < -6.0 * log_eps:
        raise ValueError(f"approximation needs observed >= {-6.0 * log_eps:.6g}, got {observed!r}")
    return ((math.sqrt(log_eps * log_eps - 8.0 * observed * log_eps) - 3.0 * log_eps)
            / (2.0 * (observed + log_eps)))


def _side(side):
    if side not in ("upper", "lower"):
        raise ValueError(f"side must be 'upper' or 'lower', got {side!r}")
    return side == "upper"


def _improved_upper(observed, eps_hat):
    if observed == 0:
        # limit of the exact equation as observed -> 0
        return math.log(1.0 / eps_hat)
    if observed >= -6.0 * math.log(eps_hat):
        return observed / (1.0 - delta_approx(observed, eps_hat, "upper"))
    try:
        delta = solve_delta_exact(observed, eps_hat, "upper")
    except DeltaSolveError:
        return max(observed, math.log(1.0 / eps_hat))
    return observed / (1.0 - delta)


def _improved_lower(observed, eps):
    if observed == 0:
        return 0.0
    if observed >= -6.0 * math.log(eps):
        return observed / (1.0 + delta_approx(observed, eps, "lower"))
    try:
        delta = solve_delta_exact(observed, eps, "lower")
    except DeltaSolveError:
        return 0.0
    return observed / (1.0 + delta)


def improved_chernoff_interval(observed, eps_hat, eps, n_trials=None, clamp=True):
    """Improved Chernoff interval ``[obs/(1+d_lo), obs/(1-d_hi)]``.

    The closed-form deviation is used wherever it is valid and the exact
    equation elsewhere.  A zero count gives ``[0, ln(1/eps_hat)]``.  If the
    lower-side root sits beyond the solver bracket the lower end is 0.
    """
    _check_counts(observed, n_trials)
    _check_prob("eps_hat", eps_hat)
    _check_prob("eps", eps)
    upper = _improved_upper(observed, eps_hat)
    lower = _improved_lower(observed, eps)
    if clamp:
        upper = _clip_upper(upper, n_trials)
    return ExpectationInterval(lower, max(upper, lower), eps, eps_hat)


def azuma_interval(observed, n_trials, eps_hat_A, eps_A, clamp=True):
    """Azuma interval for unit-difference martingales: ``sqrt(2n ln(1/e))``."""
    _check_counts(observed, n_trials)
    _check_prob("eps_hat_A", eps_hat_A)
    _check_prob("eps_A", eps_A)
    upper = observed + math.sqrt(2.0 * n_trials * math.log(1.0 / eps_hat_A))
    lower = max(0.0, observed - math.sqrt(2.0 * n_trials * math.log(1.0 / eps_A)))
    if clamp:
        upper = _clip_upper(upper, n_trials)
    return ExpectationInterval(lower, upper, eps_A, eps_hat_A)


def interval(model, observed, n_trials, eps_hat, eps, clamp=True):
    """Dispatch to the interval of ``model`` with per-side failure ``eps``.

    For the multiplicative Chernoff bound the Hoeffding pre-test reuses
    ``eps``.
    """
    model = BoundModel.parse(model)
    if model is BoundModel.HOEFFDING:
        return hoeffding_interval(observed, n_trials, eps_hat, eps, clamp)
    if model is BoundModel.MULT_CHERNOFF:
        return mult_chernoff_interval(observed, n_trials, eps, eps, eps_hat, clamp)
    if model is BoundModel.IMPROVED_CHERNOFF:
        return improved_chernoff_interval(observed, eps_hat, eps, n_trials, clamp)
    return azuma_interval(observed, n_trials, eps_hat, eps, clamp)


def improved_chernoff_arrays(observed, eps_hat, eps):
    """Vectorised improved Chernoff bounds over an array of counts.

    Returns ``(lower, upper)`` arrays, with the same rules as
    :func:`improved_chernoff_interval` (no clamping at ``n_trials``).
    """
    obs = np.asarray(observed, dtype=np.float64)
    lower = np.zeros_like(obs)
    upper = np.full_like(obs, math.log(1.0 / eps_hat))
    for is_upper, e, out in ((True, eps_hat, upper), (False, eps, lower)):
        log_e = math.log(e)
        big = obs >= -6.0 * log_e
        t = obs[big]
        d = (np.sqrt(log_e * log_e - 8.0 * t * log_e) - 3.0 * log_e) / (2.0 * (t + log_e))
        out[big] = t / (1.0 - d) if is_upper else t / (1.0 + d)
        small = (~big) & (obs > 0)
        if small.any():
            lo, hi = UPPER_BRACKET if is_upper else LOWER_BRACKET
            t = np.ascontiguousarray(obs[small])
            d = kernels.solve_delta_many(t, log_e, is_upper, lo, hi, 1e-12)
            ok = ~np.isnan(d)
            vals = out[small]
            vals[ok] = t[ok] / (1.0 - d[ok]) if is_upper else t[ok] / (1.0 + d[ok])
            if is_upper:
                vals[~ok] = np.maximum(t[~ok], math.log(1.0 / e))
            out[small] = vals
    return lower, np.maximum(upper, lower)


def gamma_sampling(s_X, s_Z, E, eps_pp):
    """Random-sampling (without replacement) correction to an error rate.

    A zero error rate is replaced by one virtual error, ``E = 1/s_X``.
    """
    if not (s_X >= 1 and s_Z >= 1):
        raise ValueError(f"need s_X, s_Z >= 1, got {s_X!r}, {s_Z!r}")
    _check_prob("eps_pp", eps_pp)
    if not 0 <= E <= 1:
        raise ValueError(f"E must lie in [0, 1], got {E!r}")
    if E == 0:
        E = 1.0 / max(s_X, 2.0)
    elif E == 1:
        E = 1.0 - 1.0 / max(s_X, 2.0)
    total = s_X + s_Z
    variance = total * (1.0 - E) * E / (s_X * s_Z * math.log(2.0))
    log_term = math.log2(total / (s_X * s_Z * eps_pp ** 2 * E * (1.0 - E)))
    return math.sqrt(variance * max(log_term, 0.0))

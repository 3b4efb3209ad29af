"""Security budget, key length and the single-point evaluation pipeline."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .channel import PAIRS, ZeroSignalError, simulate_observables
from .concentration import BoundModel, ConditionsNotMet, interval
from .config import ProtocolConfig
from .decoy import estimate_yields, t_bounds
from .phase_error import MAX_ERROR_RATE, eph_upper, ex_upper, k_coefficients

BUDGET_TERMS = 13


def binary_entropy(x):
    """``h(x) = -x log2 x - (1-x) log2(1-x)``, with ``h(0) = h(1) = 0``."""
    if not 0 <= x <= 1:
        raise ValueError(f"binary entropy needs x in [0, 1], got {x!r}")
    if x == 0 or x == 1:
        return 0.0
    if x > 0.5:
        x = 1.0 - x  # exact for x in [0.5, 1]
    return -x * math.log2(x) - (1.0 - x) * math.log1p(-x) / math.log(2.0)


@dataclass(frozen=True)
class SecurityBudget:
    """Failure probabilities; every role except ``eps_cor`` equals ``eps1``."""

    eps_sec: float
    eps_cor: float
    eps1: float

    # smoothing, sampling, hashing residual, per-pair interval sides, PA
    @property
    def eps_smooth(self):
        return self.eps1

    @property
    def eps_sampling(self):
        return self.eps1

    @property
    def nu(self):
        return self.eps1

    @property
    def eps_upper(self):
        return self.eps1

    @property
    def eps_lower(self):
        return self.eps1

    @property
    def eps_PA(self):
        return self.eps1

    @property
    def share(self):
        """Exact rational value of one budget share, ``eps_sec / 13``."""
        return Fraction(self.eps_sec) / BUDGET_TERMS

    def total(self, exact=True):
        """Secrecy implied by the individual terms.

        With ``exact`` the sum runs over rational shares and equals
        ``eps_sec`` exactly; otherwise the float shares are summed.
        """
        e = self.share if exact else self.eps1
        # 4 pairs x two sides, two smoothing terms, sampling, hashing, PA
        return 4 * (e + e) + 2 * e + e + e + e


def epsilon_budget(eps_sec, eps_cor):
    for name, value in (("eps_sec", eps_sec), ("eps_cor", eps_cor)):
        if not 0 < value < 1:
            raise ValueError(f"{name} must lie in (0, 1), got {value!r}")
    return SecurityBudget(eps_sec, eps_cor, eps_sec / BUDGET_TERMS)


def key_length(s_Z, Eph_up, E_mu_Z, f_EC, budget):
    """Extractable key length in bits, floored and clamped at zero."""
    if s_Z <= 0:
        return 0
    if not 0 <= Eph_up <= MAX_ERROR_RATE:
        raise ValueError(f"Eph_up must lie in [0, 0.5], got {Eph_up!r}")
    value = (s_Z * (1.0 - binary_entropy(Eph_up))
             - s_Z * f_EC * binary_entropy(E_mu_Z)
             - 2.0 * math.log2(1.0 / (2.0 * budget.eps_PA))
             - math.log2(2.0 / budget.eps_cor))
    return max(0, math.floor(value))


def plob_bound(eta):
    """Repeaterless secret-key capacity ``-log2(1 - eta)``."""
    if not 0 < eta < 1:
        raise ValueError(f"eta must lie in (0, 1), got {eta!r}")
    return -math.log1p(-eta) / math.log(2.0)


def loss_to_eta(loss_db):
    if loss_db < 0:
        raise ValueError(f"loss must be nonnegative, got {loss_db!r} dB")
    return 10.0 ** (-loss_db / 10.0)


@dataclass
class KeyRateResult:
    loss_db: float
    eta: float
    N: float
    l: int = 0
    status: str = "ok"
    model: str = ""
    E_mu_X_up: float = math.nan
    E_ph_Z_up: float = math.nan
    E_mu_Z: float = math.nan
    s_Z: float = 0.0
    s_X: float = 0.0
    leak_EC: float = math.nan
    intensities: tuple = ()
    P_Z: float = math.nan
    intervals: dict = field(default_factory=dict)
    fallbacks: list = field(default_factory=list)
    t: object = None
    yields: object = None

    @property
    def R(self):
        return self.l / self.N

    @property
    def ok(self):
        return self.status == "ok"

    def summary(self):
        """Flat ``name -> value`` view for text dumps."""
        out = {
            "loss_db": self.loss_db, "eta": self.eta, "status": self.status,
            "model": self.model, "key_length": self.l, "key_rate": self.R,
            "E_mu_X_up": self.E_mu_X_up, "E_ph_Z_up": self.E_ph_Z_up,
            "E_mu_Z": self.E_mu_Z, "s_Z": self.s_Z, "s_X": self.s_X,
            "leak_EC": self.leak_EC, "P_Z": self.P_Z,
            "fallbacks": " ".join(f"{a}{b}" for a, b in self.fallbacks) or "-",
        }
        for name, value in zip(("mu_Z", "mu_0", "mu_1"), self.intensities):
            out[name] = value
        for (a, b), iv in self.intervals.items():
            out[f"s{a}{b}_lower"] = iv.lower
            out[f"s{a}{b}_upper"] = iv.upper
        if self.yields is not None:
            out.update(vars(self.yields))
        return out


def pair_trials(config, obs, a, b, mode="detections"):
    """Number of Bernoulli trials behind the pair-``(a, b)`` X-basis count.

    ``"detections"``: the X-basis detection events, each assigned to a
    decoy setting at random, so ``s_X`` trials.  ``"per_setting"``: every
    pulse sent with the setting.  ``"total"``: all ``N`` pulses.
    """
    if mode == "detections":
        return max(1.0, obs.s_X)
    if mode == "per_setting":
        return max(1.0, round(config.N_X * config.decoy_prob(a) * config.decoy_prob(b)))
    if mode == "total":
        return config.N
    raise ValueError(f"unknown trial-count mode {mode!r}")


def estimate_from_observables(config, obs, model, result, intensities=None,
                              budget=None, trials="detections", conservative=False,
                              fallback=True):
    """Run interval, decoy, phase-error and key-length steps on ``obs``.

    ``intensities`` (``mu_Z, mu_0, mu_1``) are the values assumed by the
    estimation formulas; they default to the nominal ones.  Fills and
    returns ``result``.

    When the multiplicative Chernoff conditions fail for a pair, that pair
    falls back to the Hoeffding interval (recorded in ``result.fallbacks``)
    unless ``fallback`` is false, in which case the point is abandoned.
    """
    model = BoundModel.parse(model)
    budget = budget or epsilon_budget(config.eps_sec, config.eps_cor)
    mu_Z, mu0, mu1 = intensities or (config.mu_Z, config.mu_0, config.mu_1)
    result.model = model.value
    result.intensities = (mu_Z, mu0, mu1)
    result.P_Z = config.P_Z
    result.s_Z, result.s_X, result.E_mu_Z = obs.s_Z, obs.s_X, obs.E_mu_Z
    result.leak_EC = obs.s_Z * config.f_EC * binary_entropy(obs.E_mu_Z)

    for a, b in PAIRS:
        args = (obs.s_X_pairs[(a, b)], pair_trials(config, obs, a, b, trials),
                budget.eps_upper, budget.eps_lower)
        try:
            result.intervals[(a, b)] = interval(model, *args)
        except ConditionsNotMet as exc:
            if not fallback:
                result.status = f"conditions-not-met: pair {a}{b}: {exc}"
                return result
            result.intervals[(a, b)] = interval(BoundModel.HOEFFDING, *args)
            result.fallbacks.append((a, b))

    result.t = t_bounds(result.intervals, config, obs.N_X, mus=(mu0, mu1))
    result.yields = estimate_yields(result.t, mu0, mu1)
    k = k_coefficients(mu_Z)
    result.E_mu_X_up = ex_upper(result.yields, k, obs.N_Z, obs.s_Z, conservative)
    if result.E_mu_X_up >= MAX_ERROR_RATE:
        result.status = "error-rate-saturated"
        result.E_ph_Z_up = MAX_ERROR_RATE
        return result
    if obs.s_X < 1 or obs.s_Z < 1:
        result.status = "too-few-detections"
        return result
    result.E_ph_Z_up = eph_upper(result.E_mu_X_up, obs.s_X, obs.s_Z, budget.eps_sampling)
    result.l = key_length(obs.s_Z, result.E_ph_Z_up, obs.E_mu_Z, config.f_EC, budget)
    if result.E_ph_Z_up >= MAX_ERROR_RATE:
        result.status = "error-rate-saturated"
    elif result.l == 0:
        result.status = "nonpositive-length"
    return result


def evaluate_point(config: ProtocolConfig, loss_db, model=BoundModel.IMPROVED_CHERNOFF,
                   trials="detections", conservative=False, fallback=True) -> KeyRateResult:
    """Simulate the observables at ``loss_db`` and compute the key rate."""
    eta = loss_to_eta(loss_db)
    result = KeyRateResult(loss_db=loss_db, eta=eta, N=config.N,
                           model=BoundModel.parse(model).value)
    try:
        obs = simulate_observables(config, eta)
    except ZeroSignalError:
        result.status = "zero-signal"
        return result
    return estimate_from_observables(config, obs, model, result, trials=trials,
                                     conservative=conservative, fallback=fallback)


MU_Z_GRID = tuple(float(m) for m in np.geomspace(1e-3, 0.1, 21))
P_Z_GRID = tuple(np.round(np.arange(0.50, 0.95 + 1e-9, 0.05), 10))


def optimize_point(config, loss_db, model=BoundModel.IMPROVED_CHERNOFF,
                   mu_grid=MU_Z_GRID, pz_grid=P_Z_GRID, **kwargs):
    """Best key rate over a coarse ``(mu_Z, P_Z)`` grid at one loss."""
    best = None
    for mu_Z in mu_grid:
        for P_Z in pz_grid:
            result = evaluate_point(config.replace(mu_Z=float(mu_Z), P_Z=float(P_Z)),
                                    loss_db, model, **kwargs)
            if best is None or result.l > best.l:
                best = result
    return best

"""Expected detection statistics under a symmetric linear-loss channel.

Each party reaches the central beamsplitter through transmittance
``sqrt(eta)``; detectors are threshold detectors with dark-count
probability ``P_d``.  Counts are expected values, not samples.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .config import ProtocolConfig
from .kernels import bessel_i0

PAIRS = ((0, 0), (0, 1), (1, 0), (1, 1))


class ZeroSignalError(ArithmeticError):
    """No successful Z-basis detections are expected at this transmittance."""


@dataclass(frozen=True)
class Observables:
    """What the two parties see after sifting.

    ``s_X_pairs`` is keyed by ``(a, b)``: Alice used decoy intensity
    ``mu_a`` and Bob ``mu_b``.
    """

    N_Z: float
    N_X: float
    s_Z: float
    s_X_pairs: dict = field(default_factory=dict)
    E_mu_Z: float = 0.0

    @property
    def s_X(self):
        return sum(self.s_X_pairs.values())


def z_click_probabilities(sqrt_eta, mu_Z, alpha, beta, P_d):
    """Per-pulse probabilities of a successful click and an erroneous one.

    With matching bit values the constructive port carries intensity
    ``x(1 + c)`` and the destructive port ``x(1 - c)``, where
    ``x = sqrt_eta * mu_Z`` and ``c = cos(alpha) cos(beta)``.  An error is
    the destructive port clicking alone.
    """
    x = sqrt_eta * mu_Z
    c = math.cos(alpha) * math.cos(beta)
    keep = 1.0 - P_d
    both_dark = keep * keep * math.exp(-2.0 * x)
    success = keep * (math.exp(-x * c) + math.exp(x * c)) * math.exp(-x) - 2.0 * both_dark
    error = keep * math.exp(-x * (1.0 + c)) - both_dark
    return success, max(error, 0.0)


def x_click_probability(sqrt_eta, mu_a, mu_b, alpha, P_d):
    """Successful-click probability for phase-randomised decoy pulses."""
    keep = 1.0 - P_d
    total = sqrt_eta * (mu_a + mu_b)
    arg = sqrt_eta * math.sqrt(mu_a * mu_b) * math.cos(alpha)
    return 2.0 * keep * ((P_d - 1.0) * math.exp(-total) + math.exp(-0.5 * total) * bessel_i0(arg))


def simulate_observables(config: ProtocolConfig, eta: float, intensities=None) -> Observables:
    """Expected sifted counts at overall transmittance ``eta``.

    ``intensities`` optionally overrides ``(mu_Z, mu_0, mu_1)``.
    Raises :class:`ZeroSignalError` if no Z-basis detections are expected.
    """
    if not 0 < eta <= 1:
        raise ValueError(f"eta must lie in (0, 1], got {eta}")
    mu_Z, mu_0, mu_1 = intensities or (config.mu_Z, config.mu_0, config.mu_1)
    mus = (mu_0, mu_1)
    sqrt_eta = math.sqrt(eta)
    N_Z, N_X = config.N_Z, config.N_X

    p_succ, p_err = z_click_probabilities(sqrt_eta, mu_Z, config.alpha, config.beta, config.P_d)
    s_Z = N_Z * p_succ
    if not s_Z > 0:
        raise ZeroSignalError(f"no Z-basis detections expected at eta={eta:g}")

    pairs = {}
    for a, b in PAIRS:
        weight = config.decoy_prob(a) * config.decoy_prob(b) * N_X
        p = x_click_probability(sqrt_eta, mus[a], mus[b], config.alpha, config.P_d)
        pairs[(a, b)] = weight * max(p, 0.0)

    return Observables(N_Z=N_Z, N_X=N_X, s_Z=s_Z, s_X_pairs=pairs,
                       E_mu_Z=min(N_Z * p_err / s_Z, 1.0))

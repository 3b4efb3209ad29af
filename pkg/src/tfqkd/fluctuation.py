"""Worst-case key rate when source intensities drift within ``+-delta_mu``.

Detection events may then be correlated, so every count interval uses
Azuma's inequality.  The observed statistics stay at their nominal values
and the estimation formulas are re-run for every candidate intensity triple
on a grid; the smallest resulting key length is reported.
"""
from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass

import numpy as np

from .channel import ZeroSignalError, simulate_observables
from .concentration import BoundModel
from .keyrate import KeyRateResult, estimate_from_observables, loss_to_eta


@dataclass(frozen=True)
class IntensityCandidate:
    mu_Z_c: float
    mu_0_c: float
    mu_1_c: float

    def as_tuple(self):
        return (self.mu_Z_c, self.mu_0_c, self.mu_1_c)


def _axis(mu, delta_mu, resolution):
    axis = np.linspace(mu * (1.0 - delta_mu), mu * (1.0 + delta_mu), resolution)
    if resolution % 2:
        axis[resolution // 2] = mu  # keep the nominal value exact
    return axis


def intensity_grid(config, resolution=3, delta_mu=None):
    """Cartesian grid of intensity triples inside the fluctuation ranges.

    Each axis has ``resolution`` points including both endpoints.  With
    ``delta_mu == 0`` only the nominal triple is returned.
    """
    delta_mu = config.delta_mu if delta_mu is None else delta_mu
    if not 0 <= delta_mu < 1:
        raise ValueError(f"delta_mu must lie in [0, 1), got {delta_mu}")
    if resolution < 2:
        raise ValueError(f"resolution must be >= 2, got {resolution}")
    if delta_mu == 0:
        return [IntensityCandidate(config.mu_Z, config.mu_0, config.mu_1)]
    axes = [_axis(mu, delta_mu, resolution) for mu in (config.mu_Z, config.mu_0, config.mu_1)]
    grid, rejected = [], 0
    for mu_Z, mu_0, mu_1 in itertools.product(*axes):
        if mu_1 >= mu_0:
            rejected += 1
            continue
        grid.append(IntensityCandidate(float(mu_Z), float(mu_0), float(mu_1)))
    if rejected:
        warnings.warn(f"dropped {rejected} intensity candidates with mu_1 >= mu_0",
                      RuntimeWarning, stacklevel=2)
    return grid


def worst_case_rate(config, loss_db, resolution=3, delta_mu=None, trials="detections",
                    perturb_channel=False, model=BoundModel.AZUMA):
    """Minimum key length over the intensity grid at one loss.

    Returns ``(result, candidate)``.  With ``perturb_channel`` the observed
    statistics are also recomputed at each candidate's intensities.
    """
    candidates = intensity_grid(config, resolution, delta_mu)
    if not candidates:
        raise ValueError("empty intensity candidate list")
    eta = loss_to_eta(loss_db)
    nominal = None
    worst = worst_candidate = None
    for cand in candidates:
        result = KeyRateResult(loss_db=loss_db, eta=eta, N=config.N,
                               model=BoundModel.parse(model).value)
        try:
            if perturb_channel:
                obs = simulate_observables(config, eta, cand.as_tuple())
            else:
                if nominal is None:
                    nominal = simulate_observables(config, eta)
                obs = nominal
        except ZeroSignalError:
            result.status = "zero-signal"
            result.intensities = cand.as_tuple()
            return result, cand
        estimate_from_observables(config, obs, model, result,
                                  intensities=cand.as_tuple(), trials=trials)
        if worst is None or result.l < worst.l:
            worst, worst_candidate = result, cand
    return worst, worst_candidate

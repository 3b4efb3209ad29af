import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tfqkd.channel import (PAIRS, Observables, simulate_observables, x_click_probability,
                           z_click_probabilities)

D2_REFERENCE = 0.0039800585428722517  # e^-0.004 I0(0.004) - e^-0.008


def test_perfect_interference_closed_form():
    success, error = z_click_probabilities(1.0, 0.1, 0.0, 0.0, 0.0)
    assert success == pytest.approx(1 - math.exp(-0.2), rel=1e-12)
    assert success == pytest.approx(0.181269246922018, rel=1e-12)
    assert error == 0.0


def test_x_basis_reference():
    p = x_click_probability(0.01, 0.4, 0.4, 0.0, 0.0)
    assert p / 2 == pytest.approx(D2_REFERENCE, rel=1e-12)


def test_dark_count_limit():
    # signal contribution is about 2 sqrt(eta) mu_Z = 2e-8, far below P_d
    for P_d in (1e-4, 1e-3, 1e-2):
        success, _ = z_click_probabilities(math.sqrt(1e-12), 0.01, 0.1, 0.1, P_d)
        assert success == pytest.approx(2 * P_d * (1 - P_d), rel=1e-3)


def test_success_is_constructive_plus_destructive():
    x, c, P_d = 0.07, math.cos(0.2) * math.cos(0.1), 1e-4
    success, error = z_click_probabilities(1.0, x, 0.2, 0.1, P_d)
    keep = 1 - P_d
    constructive = keep * math.exp(-x * (1 - c)) - keep ** 2 * math.exp(-2 * x)
    assert success == pytest.approx(constructive + error, rel=1e-12)


@given(a=st.floats(0, 0.6), b=st.floats(0, 0.6))
def test_error_grows_with_misalignment(a, b):
    _, base = z_click_probabilities(0.1, 0.02, a, b, 1e-7)
    _, more = z_click_probabilities(0.1, 0.02, a + 0.05, b + 0.05, 1e-7)
    assert more > base


def test_error_rate_grows_with_dark_counts(base_config):
    rates = [simulate_observables(base_config.replace(P_d=p), 1e-5).E_mu_Z
             for p in (1e-9, 1e-7, 1e-5)]
    assert rates[0] < rates[1] < rates[2]


def test_ideal_alignment_error_is_dark_count_dominated(base_config):
    config = base_config.replace(alpha=0.0, beta=0.0)
    obs = simulate_observables(config, 1e-3)
    x = math.sqrt(1e-3) * config.mu_Z
    dark_only = config.P_d * (1 - config.P_d) * math.exp(-2 * x)
    assert obs.E_mu_Z == pytest.approx(dark_only * obs.N_Z / obs.s_Z, rel=1e-9)
    assert obs.E_mu_Z < 1e-3


def test_ideal_channel_matches_closed_forms(ideal_config):
    eta = 0.36
    obs = simulate_observables(ideal_config, eta)
    x = math.sqrt(eta) * ideal_config.mu_Z
    assert obs.s_Z / obs.N_Z == pytest.approx(1 - math.exp(-2 * x), rel=1e-12)
    assert obs.E_mu_Z == 0.0
    mus = (ideal_config.mu_0, ideal_config.mu_1)
    for a, b in PAIRS:
        w = ideal_config.decoy_prob(a) * ideal_config.decoy_prob(b) * obs.N_X
        t = math.sqrt(eta) * (mus[a] + mus[b])
        expected = 2 * (math.exp(-t / 2) * _i0_series(math.sqrt(eta * mus[a] * mus[b])) - math.exp(-t))
        assert obs.s_X_pairs[(a, b)] / w == pytest.approx(expected, rel=1e-12)


def _i0_series(x):
    return math.fsum((x / 2) ** (2 * k) / math.factorial(k) ** 2 for k in range(40))


def test_observables_totals(base_config):
    obs = simulate_observables(base_config, 1e-4)
    assert isinstance(obs, Observables)
    assert set(obs.s_X_pairs) == set(PAIRS)
    assert obs.s_X == pytest.approx(sum(obs.s_X_pairs.values()))
    assert obs.N_Z == base_config.N * base_config.P_Z ** 2
    # symmetric channel: swapping the parties changes nothing
    assert obs.s_X_pairs[(0, 1)] == pytest.approx(obs.s_X_pairs[(1, 0)], rel=1e-14)


def test_intensity_override(base_config):
    base = simulate_observables(base_config, 1e-3)
    bumped = simulate_observables(base_config, 1e-3, (0.02, 0.4, 1e-5))
    assert bumped.s_Z > base.s_Z


@pytest.mark.parametrize("eta", [0.0, -0.1, 1.5])
def test_rejects_bad_transmittance(base_config, eta):
    with pytest.raises(ValueError):
        simulate_observables(base_config, eta)

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tfqkd import kernels
from tfqkd.kernels import available_backends

# reference values computed with 50-digit arithmetic
I0_REFERENCE = {
    1.0: 1.2660658777520083,
    2.0: 2.2795853023360673,
    20.0: 43558282.559553533,
    50.0: 2.9325537838493363e20,
}
UPPER_ROOT_1E6 = 0.0067555517815979313
LOWER_ROOT_1E6 = 0.0068169547733790499


def series_i0(x, terms=60):
    """Plain power series, summed with fsum."""
    return math.fsum((x / 2.0) ** (2 * k) / math.factorial(k) ** 2 for k in range(terms))


def test_both_backends_importable():
    assert "python" in available_backends()
    assert kernels.BACKEND in available_backends()


@pytest.mark.parametrize("x, expected", sorted(I0_REFERENCE.items()))
def test_bessel_reference_values(backend, x, expected):
    assert backend.bessel_i0(x) == pytest.approx(expected, rel=1e-12)


def test_bessel_matches_series_on_unit_range(backend):
    for x in np.linspace(0.0, 10.0, 401):
        assert backend.bessel_i0(float(x)) == pytest.approx(series_i0(float(x)), rel=1e-12, abs=0)


def test_bessel_is_even_and_starts_at_one(backend):
    assert backend.bessel_i0(0.0) == 1.0
    assert backend.bessel_i0(-3.5) == backend.bessel_i0(3.5)


def test_bessel_against_scipy(backend):
    special = pytest.importorskip("scipy.special")
    xs = np.concatenate([np.linspace(0, 14.9, 50), np.linspace(15, 600, 50)])
    for x in xs:
        assert backend.bessel_i0(float(x)) == pytest.approx(float(special.i0(x)), rel=1e-12)


@pytest.mark.parametrize("upper, expected", [(True, UPPER_ROOT_1E6), (False, LOWER_ROOT_1E6)])
def test_solve_delta_reference(backend, upper, expected):
    hi = 1.0 - 1e-12 if upper else 1e3
    delta = backend.solve_delta(1e6, math.log(1e-10), upper, 1e-12, hi)
    assert delta == pytest.approx(expected, rel=1e-11)
    assert abs(backend.residual(delta, 1e6, math.log(1e-10), upper)) < 1e-10


def test_solve_delta_without_root_raises(backend):
    # lower side with a single count needs delta far beyond 10
    with pytest.raises(ArithmeticError):
        backend.solve_delta(1.0, math.log(1e-10), False, 1e-12, 10.0)


def test_solve_delta_many_matches_scalar(backend):
    obs = np.array([5.0, 50.0, 1e3, 1e5, 1e8])
    many = backend.solve_delta_many(obs, math.log(1e-6), True, 1e-12, 1.0 - 1e-12)
    for o, d in zip(obs, many):
        assert d == backend.solve_delta(float(o), math.log(1e-6), True, 1e-12, 1.0 - 1e-12)


def test_solve_delta_many_marks_missing_roots(backend):
    out = backend.solve_delta_many(np.array([1.0, 1e4]), math.log(1e-10), False, 1e-12, 10.0)
    assert math.isnan(out[0]) and not math.isnan(out[1])


def test_backends_agree():
    backends = list(available_backends().values())
    if len(backends) < 2:
        pytest.skip("compiled backend not built")
    a, b = backends
    for x in (0.0, 0.3, 7.0, 14.99, 15.0, 80.0):
        assert a.bessel_i0(x) == pytest.approx(b.bessel_i0(x), rel=1e-14)
    for obs in (30.0, 400.0, 1e7):
        for upper, hi in ((True, 1 - 1e-12), (False, 1e3)):
            da = a.solve_delta(obs, math.log(1e-10), upper, 1e-12, hi)
            db = b.solve_delta(obs, math.log(1e-10), upper, 1e-12, hi)
            assert da == pytest.approx(db, rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(obs=st.floats(1.0, 1e12), log_eps=st.floats(-60.0, -0.1))
def test_upper_root_is_in_unit_interval(obs, log_eps):
    delta = kernels.solve_delta(obs, log_eps, True, 1e-12, 1.0 - 1e-12)
    assert 0.0 < delta < 1.0
    assert abs(kernels.residual(delta, obs, log_eps, True)) < 1e-8 * max(1.0, -log_eps)

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cpldamp.integrators import (
    IntegratorConfig, IntegratorFailure, rk4_step, rk45_step,
)
from cpldamp.plant import VoltageCollapse


def _decay(t, y):
    return -y


def _rk4_solve(f, y0, t_end, n):
    y, dt = np.array(y0, float), t_end / n
    for k in range(n):
        y = rk4_step(f, k * dt, y, dt)
    return y


def _rk45_solve(f, y0, t_end, rtol, atol=1e-14, dt=1e-3):
    t, y = 0.0, np.array(y0, float)
    while t < t_end:
        trial = min(dt, t_end - t)
        r = rk45_step(f, t, y, trial, rtol, atol)
        t = t_end if r.dt_taken == t_end - t else t + r.dt_taken
        y, dt = r.y, r.dt_next
    return y


def test_config_validation():
    with pytest.raises(ValueError):
        IntegratorConfig(method="euler")
    with pytest.raises(ValueError):
        IntegratorConfig(dt=0.0)
    with pytest.raises(ValueError):
        IntegratorConfig(dt_min=1.0, dt_max=1e-3)


def test_rk4_exponential():
    y = _rk4_solve(_decay, [1.0], 1.0, 100)
    assert abs(y[0] - math.exp(-1.0)) < 1e-7


def test_rk4_order():
    errs = [abs(_rk4_solve(_decay, [1.0], 1.0, n)[0] - math.exp(-1.0)) for n in (10, 20, 40, 80)]
    ratios = [a / b for a, b in zip(errs, errs[1:])]
    assert all(12 <= r <= 20 for r in ratios), ratios


@pytest.mark.parametrize("rtol", [1e-6, 1e-8, 1e-10])
def test_rk45_meets_tolerance(rtol):
    y = _rk45_solve(_decay, [1.0], 1.0, rtol)
    assert abs(y[0] - math.exp(-1.0)) < 10 * rtol


def test_rk45_oscillator():
    y = _rk45_solve(lambda t, y: np.array([y[1], -y[0]]), [1.0, 0.0], 2 * math.pi, 1e-10)
    np.testing.assert_allclose(y, [1.0, 0.0], atol=1e-8)


def test_rk45_stiff_decay_stays_bounded():
    y = _rk45_solve(lambda t, y: -1e6 * y, [1.0], 1e-3, 1e-8, atol=1e-12, dt=1e-4)
    assert abs(y[0]) < 1e-10


@given(c=st.floats(-1e6, 1e6), dt=st.floats(1e-9, 1.0))
def test_constant_solution_has_zero_error(c, dt):
    r = rk45_step(lambda t, y: np.zeros_like(y), 0.0, np.array([c]), dt, 1e-8, 1e-10)
    assert r.y[0] == c and r.error == 0.0 and r.dt_taken == dt
    np.testing.assert_array_equal(rk4_step(lambda t, y: np.zeros_like(y), 0.0, np.array([c]), dt), [c])


def test_step_grows_on_easy_problems():
    r = rk45_step(_decay, 0.0, np.array([1.0]), 1e-6, 1e-8, 1e-10, dt_max=1.0)
    assert r.dt_next > r.dt_taken


def test_rejects_below_dt_min():
    def blowup(t, y):
        return np.array([1.0 / (1.0 - t) ** 2])
    with pytest.raises(IntegratorFailure):
        t, y, dt = 0.0, np.array([1.0]), 1e-2
        while True:
            r = rk45_step(blowup, t, y, dt, 1e-10, 1e-12, dt_min=1e-9)
            t, y, dt = t + r.dt_taken, r.y, r.dt_next


def test_guard_error_shrinks_step_then_propagates():
    def guarded(t, y):
        if t > 0.5:
            raise VoltageCollapse("x2", 0.0)
        return -y
    r = rk45_step(guarded, 0.0, np.array([1.0]), 1.0, 1e-6, 1e-9)
    assert r.dt_taken <= 0.5 / 0.8  # every stage time stays below 0.5 s
    with pytest.raises(VoltageCollapse):
        rk45_step(guarded, 0.6, np.array([1.0]), 1e-3, 1e-6, 1e-9)

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cpldamp.equilibria import (
    PowerOutsideWindow, annihilator, annihilator_residual, assignable_equilibrium,
    equilibrium_input, kappas, max_open_loop_power, open_loop_equilibria,
    optimal_operating_point, power_window,
)
from cpldamp.plant import PlantParams, vector_fields

from .helpers import random_triple


class TestOpenLoop:
    def test_max_power(self, params):
        assert max_open_loop_power(params) == pytest.approx(480.0, rel=1e-12)

    def test_two_roots_at_100W(self, params):
        eq = open_loop_equilibria(params, 100.0)
        assert len(eq.points) == 2
        assert eq.high.v1 == pytest.approx(22.677078252031308, rel=1e-12)
        assert eq.low.v1 == pytest.approx(1.322921747968689, rel=1e-12)
        assert eq.high.i1 == pytest.approx(4.409739159895642, rel=1e-12)
        assert eq.low.i1 == pytest.approx(75.59026084010438, rel=1e-12)

    def test_merged_root_at_480W(self, params):
        eq = open_loop_equilibria(params, 480.0)
        assert len(eq.points) == 1
        assert (eq.high.i1, eq.high.v1) == (40.0, 12.0)

    def test_none_above_480W(self, params):
        eq = open_loop_equilibria(params, 500.0)
        assert eq.points == () and eq.discriminant < 0 and eq.high is None

    def test_no_load(self, params):
        eq = open_loop_equilibria(params, 0.0)
        assert len(eq.points) == 1 and eq.high.v1 == params.E and eq.high.i1 == 0.0

    @given(P=st.floats(1e-3, 479.9))
    def test_vieta(self, P):
        p = PlantParams.reference()
        hi, lo = open_loop_equilibria(p, P).points
        assert hi.v1 + lo.v1 == pytest.approx(p.E, rel=1e-12)
        assert hi.v1 * lo.v1 == pytest.approx(P * p.r1, rel=1e-12)
        for s in (hi, lo):
            assert s.i1 * s.v1 == pytest.approx(P, rel=1e-9)

    def test_high_branch_decreases_with_power(self, params):
        grid = np.linspace(1.0, 479.0, 200)
        v = [open_loop_equilibria(params, P).high.v1 for P in grid]
        h = 1e-3
        for P in grid:
            dv = (open_loop_equilibria(params, P + h).high.v1 - open_loop_equilibria(params, P - h).high.v1) / (2 * h)
            assert dv < 0
        assert np.all(np.diff(v) < 0)


class TestAssignable:
    @pytest.mark.parametrize("P, expected", [
        (100.0, (40, 12, 31.6667, 612.3611)),
        (479.0, (40, 12, 0.0833, 31.6222)),
    ])
    def test_reference_values(self, params, P, expected):
        eq = assignable_equilibrium(params, P, 12.0)
        np.testing.assert_allclose(eq.xbar.as_array(), expected, atol=1e-3, rtol=0)
        assert eq.residual(params) < 1e-9

    def test_duty_cycles(self, params):
        assert assignable_equilibrium(params, 100.0, 12.0).ubar == pytest.approx(0.019337718800857887, rel=1e-12)
        assert assignable_equilibrium(params, 479.0, 12.0).ubar == pytest.approx(0.3794667310845577, rel=1e-12)

    def test_random_triples(self):
        rng = np.random.default_rng(7)
        for _ in range(1000):
            p, P, b = random_triple(rng)
            eq = assignable_equilibrium(p, P, b)
            assert eq.residual(p) < 1e-9 * max(1.0, p.E * eq.xbar.x4)
            assert equilibrium_input(eq.xbar, p, P) == pytest.approx(eq.ubar, rel=1e-9)
            assert eq.xbar.x4 > 0 and eq.ubar > 0

    def test_upper_bound_errors(self, params):
        with pytest.raises(PowerOutsideWindow) as exc:
            assignable_equilibrium(params, 480.0, 12.0)
        assert exc.value.bound == "upper"
        with pytest.raises(PowerOutsideWindow):
            assignable_equilibrium(params, 500.0, 12.0)

    def test_lower_bound_error(self):
        # a large r2 lifts the lower edge above zero
        p = PlantParams(0.3, 85e-6, 200e-6, 24.0, 1.0, 100e-6, 1e-3, 1e3)
        lo, hi = power_window(p, 12.0)
        assert lo > 0
        with pytest.raises(PowerOutsideWindow) as exc:
            assignable_equilibrium(p, 0.5 * lo, 12.0)
        assert exc.value.bound == "lower"

    def test_bad_setpoint(self, params):
        with pytest.raises(ValueError):
            power_window(params, 0.0)

    def test_window_matches_kappa_signs(self):
        rng = np.random.default_rng(3)
        for _ in range(500):
            p, _, b = random_triple(rng)
            lo, hi = power_window(p, b)
            for P in rng.uniform(lo - 0.2 * (hi - lo), hi + 0.2 * (hi - lo), size=5):
                k1, k2 = kappas(p, b, P)
                assert (k1 > 0 and k2 > 0) == (lo < P < hi)

    def test_realizability_bound(self, params):
        op = optimal_operating_point(params)
        assert op.x2bar == 12.0
        assert op.realizability_bound == pytest.approx(479.856, abs=1e-3)
        for P in np.linspace(1.0, 479.99, 400):
            assert (assignable_equilibrium(params, P, 12.0).ubar < 1) == (P < op.realizability_bound)


class TestAnnihilator:
    @settings(max_examples=200)
    @given(x3=st.floats(-100, 100), x4=st.floats(0.01, 800))
    def test_annihilates_input_field(self, x3, x4):
        p = PlantParams.reference()
        x = np.array([1.0, 12.0, x3, x4])
        _, g = vector_fields(x, p, 100.0)
        assert np.all(np.abs(annihilator(x, p) @ g) <= 1e-12 * np.abs(x3 * x4) + 1e-300)

    def test_full_rank(self, params):
        assert np.linalg.matrix_rank(annihilator(np.array([1.0, 12.0, 3.0, 40.0]), params)) == 3

    def test_residual_vanishes_on_equilibria(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            p, P, b = random_triple(rng)
            eq = assignable_equilibrium(p, P, b)
            r = annihilator_residual(eq.xbar, p, P)
            scale = max(p.E * eq.xbar.x1, eq.xbar.x4**2 / p.r3, 1.0)
            assert np.max(np.abs(r)) < 1e-9 * scale

    def test_residual_nonzero_off_equilibrium(self, params):
        assert np.max(np.abs(annihilator_residual(np.array([30.0, 12.0, 5.0, 100.0]), params, 100.0))) > 1


def test_setpoint_maximizes_upper_power(params):
    b = np.linspace(0.5, 23.5, 1001)
    hi = [power_window(params, x)[1] for x in b]
    assert b[int(np.argmax(hi))] == pytest.approx(12.0, abs=0.05)
    assert max(hi) <= 480.0 + 1e-9
    assert math.isclose(power_window(params, 12.0)[1], 480.0)

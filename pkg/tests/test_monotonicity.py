import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from extremal.analytic import AnalyticPair, verify_equality_function
from extremal.core import DiscConfiguration, TorusConfiguration, verify_main_inequality
from extremal.errors import InvalidParam
from extremal.monotonicity import (
    additive_sum,
    corollary_bound,
    corollary_sum,
    g_derivative,
    g_value,
    inequality_gap_via_potential,
    scan_monotonicity,
    verify_additive_inequality,
)


def random_torus(rng, n):
    return TorusConfiguration(rng.uniform(0, 2 * np.pi, n))


def finite_difference(tcfg, a, h=1e-6):
    return (g_value(tcfg, a + h) - g_value(tcfg, a - h)) / (2 * h)


class TestAdditiveSum:
    def test_hand_values(self):
        assert additive_sum(AnalyticPair([0.5])) == pytest.approx(float(Fraction(4, 3)), rel=1e-15)
        # 2 / (1 - 1/4) + 2 / (1 + 1/4)
        assert additive_sum(AnalyticPair([0.5, -0.5])) == pytest.approx(float(Fraction(64, 15)), rel=1e-15)
        assert additive_sum(AnalyticPair([0.5, 0.5])) == pytest.approx(float(Fraction(16, 3)), rel=1e-15)

    def test_equality_and_strict(self):
        eq = verify_additive_inequality(AnalyticPair([0.5, -0.5]))
        assert eq.bound_value == pytest.approx(64 / 15) and eq.equality and eq.passed
        strict = verify_additive_inequality(AnalyticPair([0.5, 0.5]))
        assert strict.gap == pytest.approx(16 / 3 - 64 / 15) and not strict.equality and strict.passed

    def test_single_point_always_equality(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            z = 0.95 * math.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
            rep = verify_additive_inequality(AnalyticPair([z]))
            assert rep.equality

    @settings(max_examples=200, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 8))
    def test_inequality_holds(self, seed, n):
        rng = np.random.default_rng(seed)
        pts = 0.95 * np.sqrt(rng.uniform(0, 1, n)) * np.exp(2j * np.pi * rng.uniform(0, 1, n))
        assert verify_additive_inequality(AnalyticPair(pts)).gap >= -1e-10

    def test_cross_validated_with_equality_function(self):
        rng = np.random.default_rng(2)
        for n in range(2, 7):
            for _ in range(10):
                lam = 0.9**n * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
                eq = AnalyticPair.equality_case(n, lam)
                assert verify_additive_inequality(eq).equality == verify_equality_function(eq).passed is True
                pts = 0.9 * np.sqrt(rng.uniform(0, 1, n)) * np.exp(2j * np.pi * rng.uniform(0, 1, n))
                pair = AnalyticPair(pts)
                assert verify_additive_inequality(pair).equality == verify_equality_function(pair).passed


class TestCorollary:
    def test_regular_two_gon(self):
        t = TorusConfiguration([0, math.pi])
        assert corollary_sum(t, 0.5) == pytest.approx(16 / 3, rel=1e-15)
        assert corollary_bound(2, 0.5) == pytest.approx(16 / 3, rel=1e-15)

    def test_single_point(self):
        t = TorusConfiguration([1.3])
        for a in (0.1, 0.5, 0.9):
            assert corollary_sum(t, a) == pytest.approx(1 / (1 - a))
            assert corollary_bound(1, a) == pytest.approx(1 / (1 - a))

    def test_random_triangles(self):
        rng = np.random.default_rng(3)
        for _ in range(500):
            t = random_torus(rng, 3)
            assert corollary_sum(t, 0.3) >= 9 / (1 - 0.027) - 1e-12

    def test_reduces_to_additive_sum(self):
        rng = np.random.default_rng(4)
        for _ in range(200):
            t = random_torus(rng, int(rng.integers(1, 9)))
            a = float(rng.uniform(0.01, 0.99))
            direct = additive_sum(AnalyticPair(math.sqrt(a) * t.omegas))
            assert corollary_sum(t, a) == pytest.approx(direct, rel=1e-12)

    @pytest.mark.parametrize("a", [0.0, 1.0, -0.2, 1.5])
    def test_rejects_a_outside_open_interval(self, a):
        with pytest.raises(InvalidParam):
            corollary_sum(TorusConfiguration([0.0, 1.0]), a)


class TestPotential:
    def test_zero_at_origin(self):
        rng = np.random.default_rng(5)
        for n in range(1, 9):
            assert g_value(random_torus(rng, n), 0.0) == 0.0

    def test_single_point_identically_zero(self):
        t = TorusConfiguration([0.0])
        for a in np.linspace(0, 0.99, 17):
            assert abs(g_value(t, float(a))) < 1e-14

    def test_two_gon_hand_value(self):
        t = TorusConfiguration([0, math.pi])
        expected = 2 * math.log(0.75) - (2 * math.log(0.5) + 2 * math.log(1.5))
        assert g_value(t, 0.5) == pytest.approx(expected, abs=1e-15)
        assert abs(expected) < 1e-15

    def test_regular_polygon_derivative_vanishes(self):
        for n in range(1, 10):
            t = TorusConfiguration.regular(n, phase=0.37)
            for a in (0.05, 0.4, 0.8, 0.99):
                assert abs(g_derivative(t, a)) <= 1e-10

    def test_two_points_positive_and_matches_fd(self):
        t = TorusConfiguration([0.0, 0.1])
        d = g_derivative(t, 0.5)
        assert d > 0
        assert d == pytest.approx(finite_difference(t, 0.5), abs=1e-6)

    def test_single_point_derivative_zero(self):
        assert g_derivative(TorusConfiguration([2.0]), 0.3) == pytest.approx(0, abs=1e-15)

    def test_derivative_matches_displayed_bracket(self):
        rng = np.random.default_rng(6)
        for _ in range(100):
            n = int(rng.integers(1, 8))
            t = random_torus(rng, n)
            a = float(rng.uniform(0.05, 0.95))
            bracket = -corollary_bound(n, a) + corollary_sum(t, a)
            assert g_derivative(t, a) == pytest.approx(bracket / a, rel=1e-9, abs=1e-11)

    def test_derivative_rejects_endpoints(self):
        with pytest.raises(InvalidParam):
            g_derivative(TorusConfiguration([0.0, 1.0]), 0.0)
        with pytest.raises(InvalidParam):
            g_value(TorusConfiguration([0.0, 1.0]), 1.0)

    def test_potential_equals_main_gap(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            n = int(rng.integers(1, 9))
            rho = float(rng.choice([1.1, 2.0, 10.0]))
            t = random_torus(rng, n)
            gap = verify_main_inequality(DiscConfiguration.from_torus(t, rho))["main_inequality"].gap
            assert inequality_gap_via_potential(t, rho) == pytest.approx(gap, abs=1e-10)


class TestScan:
    def test_regular_is_flat(self):
        curve = scan_monotonicity(TorusConfiguration.regular(5), 50, 0.99)
        assert np.max(np.abs(curve.g_values)) < 1e-10
        assert curve.is_nondecreasing() and curve.derivative_nonnegative()

    def test_random_nondecreasing(self):
        rng = np.random.default_rng(8)
        for _ in range(20):
            curve = scan_monotonicity(random_torus(rng, 4), 100, 0.99)
            assert curve.a_grid[0] == 0 and curve.g_values[0] == 0
            assert np.all(np.diff(curve.a_grid) > 0) and curve.a_grid[-1] < 1
            assert curve.is_nondecreasing(1e-10)
            assert curve.derivative_nonnegative(1e-10)

    def test_single_point_all_zero(self):
        curve = scan_monotonicity(TorusConfiguration([0.4]), 10)
        assert np.all(np.abs(curve.g_values) < 1e-14)
        assert np.all(np.abs(curve.gprime_values) < 1e-12)

    def test_derivative_at_zero_is_the_limit(self):
        t = TorusConfiguration([0.0, 0.5, 2.0])
        curve = scan_monotonicity(t, 11, 0.5)
        assert curve.gprime_values[0] == pytest.approx(abs(np.sum(t.omegas)) ** 2)
        assert curve.gprime_values[0] == pytest.approx(g_derivative(t, 1e-9), abs=1e-7)

    def test_bad_arguments(self):
        with pytest.raises(InvalidParam):
            scan_monotonicity(TorusConfiguration([0.0]), 1)
        with pytest.raises(InvalidParam):
            scan_monotonicity(TorusConfiguration([0.0]), 10, 1.0)

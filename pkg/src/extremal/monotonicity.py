"""Additive kernel inequality, its torus corollary, and the potential g(a).

For w on the unit circle, g(a) = n log(1 - a^n) - sum_{j,k} log|a - conj(w_j) w_k|
satisfies a g'(a) = sum_{j,k} 1 / (1 - a conj(w_j) w_k) - n^2 / (1 - a^n), so
the corollary inequality makes g nondecreasing, and g(rho^-2) is exactly the
gap in the main product inequality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._numerics import stable_sum
from .analytic import AnalyticPair, kernel_double_sum
from .core import TorusConfiguration
from .errors import InvalidParam

DEFAULT_A_MAX = 0.999


@dataclass(frozen=True)
class AdditiveReport:
    sum_value: float
    bound_value: float
    gap: float
    equality: bool
    tolerance: float

    @property
    def passed(self):
        return self.gap >= -self.tolerance


@dataclass(frozen=True)
class PotentialCurve:
    a_grid: np.ndarray
    g_values: np.ndarray
    gprime_values: np.ndarray

    def is_nondecreasing(self, slack=1e-10):
        return bool(np.all(np.diff(self.g_values) >= -slack))

    def derivative_nonnegative(self, slack=1e-10):
        return bool(np.all(self.gprime_values >= -slack))


def _real_part(total, label):
    # the double sums are real in exact arithmetic: the index set is closed under (j, k) -> (k, j)
    if abs(total.imag) > 1e-12 * (1.0 + abs(total)):
        raise ArithmeticError(f"{label} has imaginary part {total.imag!r}")
    return total.real


def additive_sum(pair: AnalyticPair) -> float:
    """Real value of sum_{j,k} 1 / (1 - conj(z_j) z_k)."""
    return _real_part(kernel_double_sum(pair.points), "additive sum")


def additive_bound(pair: AnalyticPair) -> float:
    return pair.n**2 / (1.0 - abs(pair.lam) ** 2)


def verify_additive_inequality(pair: AnalyticPair, tol=1e-10) -> AdditiveReport:
    total = additive_sum(pair)
    bound = additive_bound(pair)
    gap = total - bound
    return AdditiveReport(total, bound, gap, abs(gap) <= tol, tol)


def _check_open_unit(a):
    if not 0.0 < a < 1.0:
        raise InvalidParam(f"a must lie in (0, 1), got {a!r}")


def _unit_products(tcfg):
    # conj(w_j) w_k = exp(i (theta_k - theta_j)), taken from the angle difference directly
    return np.exp(1j * tcfg.differences())


def corollary_sum(tcfg: TorusConfiguration, a: float) -> float:
    """Real value of sum_{j,k} 1 / (1 - a conj(w_j) w_k) for a in (0, 1)."""
    _check_open_unit(a)
    terms = 1.0 / (1.0 - a * _unit_products(tcfg))
    return _real_part(stable_sum(terms, tcfg.n), "corollary sum")


def corollary_bound(n, a):
    """n^2 / (1 - a^n)."""
    return n * n / -math.expm1(n * math.log(a))


def _log_abs_a_minus_unit(a, delta):
    # |a - e^{i delta}|^2 = (1 - a)^2 + 4 a sin^2(delta / 2), free of cancellation near a = 1
    s = np.sin(0.5 * delta)
    return 0.5 * np.log((1.0 - a) ** 2 + 4.0 * a * s * s)


def g_value(tcfg: TorusConfiguration, a: float) -> float:
    """g(a) = n log(1 - a^n) - sum_{j,k} log|a - conj(w_j) w_k| on [0, 1)."""
    if not 0.0 <= a < 1.0:
        raise InvalidParam(f"a must lie in [0, 1), got {a!r}")
    if a == 0.0:
        return 0.0
    n = tcfg.n
    head = n * math.log1p(-(a**n))
    return head - stable_sum(_log_abs_a_minus_unit(a, tcfg.differences()), n)


def _g_derivative(tcfg, a):
    # g'(a) = (1/a) [sum 1/(1 - a u) - n^2/(1 - a^n)] with the 1/a absorbed:
    # sum u/(1 - a u) - n^2 a^(n-1)/(1 - a^n). Finite at a = 0.
    n = tcfg.n
    u = _unit_products(tcfg)
    total = _real_part(stable_sum(u / (1.0 - a * u), n), "derivative sum")
    return total - n * n * a ** (n - 1) / (1.0 - a**n)


def g_derivative(tcfg: TorusConfiguration, a: float) -> float:
    """Closed-form g'(a) for a in (0, 1)."""
    _check_open_unit(a)
    return _g_derivative(tcfg, a)


def inequality_gap_via_potential(tcfg: TorusConfiguration, rho: float) -> float:
    """g(rho^-2): log of the bound minus log of the pairwise product at z = rho * w."""
    if not rho > 1.0:
        raise InvalidParam(f"rho must be > 1, got {rho!r}")
    return g_value(tcfg, rho**-2.0)


def scan_monotonicity(tcfg: TorusConfiguration, grid_size=100, a_max=DEFAULT_A_MAX) -> PotentialCurve:
    """Sample g and g' on a uniform grid of [0, a_max].

    The derivative at a = 0 is its limit value (the closed form with the
    1/a factor cancelled), not an evaluation of the (0, 1) formula.
    """
    if grid_size < 2:
        raise InvalidParam("grid_size must be >= 2")
    if not 0.0 < a_max < 1.0:
        raise InvalidParam("a_max must lie in (0, 1)")
    grid = np.linspace(0.0, a_max, int(grid_size))
    g = np.array([g_value(tcfg, float(a)) for a in grid])
    gp = np.array([_g_derivative(tcfg, float(a)) for a in grid])
    return PotentialCurve(grid, g, gp)

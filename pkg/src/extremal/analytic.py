"""Blaschke product, kernel sum, P/Q/R polynomials and circle quadrature.

The points z_j live strictly inside the unit disc, so every function here is
holomorphic on a neighbourhood of the closed disc and the trapezoidal rule on
the unit circle converges geometrically, at rate max|z_j| per node.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from ._numerics import stable_sum
from .core import TWO_PI, Check, VerificationReport
from .errors import InvalidParam, NoConvergence, PoleProximity

# |z_j| <= 1 - STRICT_MARGIN for an AnalyticPair.
STRICT_MARGIN = 1e-9
POLE_TOL = 1e-14
DOMAIN_SLACK = 1e-9
START_NODES = 256
MAX_NODES = 2**20
SLOW_RADIUS = 0.99


@dataclass(frozen=True)
class AnalyticPair:
    """Points z_j with |z_j| < 1 together with lam = (-1)^n prod z_j."""

    points: np.ndarray
    lam: complex = None

    def __post_init__(self):
        pts = np.atleast_1d(np.asarray(self.points, dtype=complex)).copy()
        if pts.ndim != 1 or pts.size < 1:
            raise InvalidParam("need at least one point")
        if not np.all(np.isfinite(pts)):
            raise InvalidParam("points must be finite")
        radius = np.abs(pts).max()
        if radius > 1.0 - STRICT_MARGIN:
            raise InvalidParam(f"points must satisfy |z| <= 1 - {STRICT_MARGIN}, got {radius!r}")
        lam = complex((-1) ** pts.size * np.prod(pts))
        if self.lam is not None and abs(complex(self.lam) - lam) > 1e-14:
            raise InvalidParam(f"stored lambda {self.lam!r} disagrees with points ({lam!r})")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "lam", lam)

    @property
    def n(self):
        return self.points.size

    @classmethod
    def equality_case(cls, n, lam):
        """The n roots of z^n + lam, i.e. |lam|^(1/n) exp(i (arg(-lam) + 2 pi j) / n)."""
        lam = complex(lam)
        if n < 1:
            raise InvalidParam("n must be >= 1")
        if abs(lam) >= 1.0:
            raise InvalidParam("|lam| must be < 1")
        radius = abs(lam) ** (1.0 / n)
        phase = (np.angle(-lam) + TWO_PI * np.arange(n)) / n
        return cls(radius * np.exp(1j * phase))


def _denominators(pair, z):
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) > 1.0 + DOMAIN_SLACK):
        raise InvalidParam("evaluation point outside the closed unit disc")
    den = 1.0 - np.conj(pair.points) * z[..., None]
    if np.any(np.abs(den) < POLE_TOL):
        raise PoleProximity("evaluation point is at a pole 1/conj(z_j)")
    return z, den


def blaschke_eval(pair: AnalyticPair, z):
    """B(z) = prod (z - z_j) / (1 - conj(z_j) z); vectorised over ``z``."""
    z, den = _denominators(pair, z)
    out = np.prod((z[..., None] - pair.points) / den, axis=-1)
    return complex(out) if out.ndim == 0 else out


def f_eval(pair: AnalyticPair, z):
    """f(z) = sum 1 / (1 - conj(z_j) z); vectorised over ``z``."""
    _, den = _denominators(pair, z)
    out = np.sum(1.0 / den, axis=-1)
    return complex(out) if out.ndim == 0 else out


def elementary_symmetric(values, degree=None):
    """[e_0, e_1, ..., e_degree] of ``values`` along the last axis.

    Uses the one-point-at-a-time recurrence e_m <- e_m + x e_{m-1}, so a
    batch of shape (..., N) returns shape (..., degree + 1). ``degree``
    defaults to N.
    """
    values = np.asarray(values)
    count = values.shape[-1]
    degree = count if degree is None else int(degree)
    if degree < 0:
        raise InvalidParam("degree must be >= 0")
    dtype = np.result_type(values.dtype, float)
    e = np.zeros(values.shape[:-1] + (degree + 1,), dtype=dtype)
    e[..., 0] = 1.0
    for i in range(count):
        x = values[..., i]
        for m in range(min(i + 1, degree), 0, -1):
            e[..., m] += x * e[..., m - 1]
    return e


@dataclass(frozen=True)
class PolynomialCoefficients:
    """coeffs[m] multiplies z^m."""

    coeffs: np.ndarray

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def __call__(self, z):
        return np.polynomial.polynomial.polyval(z, self.coeffs)


def build_PQR(pair: AnalyticPair, check_tol=1e-10):
    """P(z) = prod (z - z_j), Q(z) = prod (1 - conj(z_j) z), R = sum_j prod_{k!=j} (1 - conj(z_k) z).

    Coefficients come from the elementary symmetric functions. Before
    returning, B*Q = P and f*Q = R are checked at 16 points on |z| = 0.9.
    """
    n = pair.n
    e = elementary_symmetric(pair.points)
    m = np.arange(n + 1)
    sign = (-1.0) ** m
    P = PolynomialCoefficients(((-1.0) ** (n - m) * e[n - m]).astype(complex))
    Q = PolynomialCoefficients(sign * np.conj(e))
    R = PolynomialCoefficients((sign * (n - m) * np.conj(e))[:n])

    t = TWO_PI * (np.arange(16) + 0.5 * (math.sqrt(5) - 1)) / 16
    zs = 0.9 * np.exp(1j * t)
    qz = Q(zs)
    for label, lhs, rhs in (
        ("B*Q = P", blaschke_eval(pair, zs) * qz, P(zs)),
        ("f*Q = R", f_eval(pair, zs) * qz, R(zs)),
    ):
        scale = max(1.0, float(np.abs(rhs).max()))
        err = float(np.abs(lhs - rhs).max()) / scale
        if err > check_tol:
            raise ArithmeticError(f"{label} violated by {err:.3e}")
    return P, Q, R


@dataclass(frozen=True)
class QuadratureGrid:
    """Uniform nodes t_k = 2 pi k / M on the circle; M a power of two >= 64."""

    node_count: int = START_NODES

    def __post_init__(self):
        m = self.node_count
        if int(m) != m or m < 64 or (m & (m - 1)):
            raise InvalidParam(f"node_count must be a power of two >= 64, got {m!r}")

    @property
    def nodes(self):
        return TWO_PI * np.arange(self.node_count) / self.node_count


def circle_mean(integrand, grid: QuadratureGrid | None = None, tol=1e-9, full_output=False):
    """(1/2pi) * integral over [0, 2pi] of integrand(t) dt by the trapezoidal rule.

    ``integrand`` takes a numpy array of angles and returns values of the same
    shape. The node count doubles (reusing previous nodes) until two
    successive estimates differ by less than ``tol``. With ``full_output``
    the final node count is returned alongside the estimate.
    """
    grid = grid or QuadratureGrid()
    m = grid.node_count
    estimate = complex(np.mean(integrand(grid.nodes)))
    while True:
        if 2 * m > MAX_NODES:
            raise NoConvergence(f"no convergence to {tol} within {MAX_NODES} nodes")
        odd = TWO_PI * (2 * np.arange(m) + 1) / (2 * m)
        refined = 0.5 * (estimate + complex(np.mean(integrand(odd))))
        m *= 2
        done = abs(refined - estimate) < tol
        estimate = refined
        if done:
            break
    return (estimate, m) if full_output else estimate


def kernel_double_sum(points):
    """sum_{j,k} 1 / (1 - conj(z_j) z_k) as a complex number (real in exact arithmetic)."""
    points = np.asarray(points, dtype=complex)
    return stable_sum(1.0 / (1.0 - np.conj(points)[:, None] * points[None, :]), points.size)


def _check(name, computed, reference, tol):
    gap = abs(computed - reference)
    return Check(name, gap <= tol, computed, reference, gap, tol)


def verify_cauchy_identities(pair: AnalyticPair, tol=1e-9, grid=None) -> VerificationReport:
    """Quadrature checks of the mean-value identities behind the additive inequality.

    Compares circle means against closed forms: |f|^2 against the kernel
    double sum, B*conj(f) against 0, B against lam, f against n,
    |1 - lam*conj(B)|^2 against 1 - |lam|^2, and f*(1 - lam*conj(B))
    against n.
    """
    if np.abs(pair.points).max() > SLOW_RADIUS:
        warnings.warn(
            f"max |z_j| > {SLOW_RADIUS}: quadrature convergence may be slow",
            RuntimeWarning,
            stacklevel=2,
        )
    lam = pair.lam
    n = pair.n
    quad_tol = 0.1 * tol
    node_counts = {}

    def on_circle(fn):
        def integrand(t):
            z = np.exp(1j * t)
            return fn(z)

        return integrand

    def mean(name, fn):
        value, m = circle_mean(on_circle(fn), grid, quad_tol, full_output=True)
        node_counts[name] = m
        return value

    def blaschke(z):
        return blaschke_eval(pair, z)

    def kernel(z):
        return f_eval(pair, z)

    rows = [
        ("mean_abs_f_squared",
         mean("mean_abs_f_squared", lambda z: np.abs(kernel(z)) ** 2),
         kernel_double_sum(pair.points)),
        ("mean_B_conj_f",
         mean("mean_B_conj_f", lambda z: blaschke(z) * np.conj(kernel(z))),
         0.0),
        ("mean_B", mean("mean_B", blaschke), lam),
        ("mean_f", mean("mean_f", kernel), float(n)),
        ("mean_abs_one_minus_lam_conj_B_squared",
         mean("mean_abs_one_minus_lam_conj_B_squared",
              lambda z: np.abs(1.0 - lam * np.conj(blaschke(z))) ** 2),
         1.0 - abs(lam) ** 2),
        ("mean_f_one_minus_lam_conj_B",
         mean("mean_f_one_minus_lam_conj_B",
              lambda z: kernel(z) * (1.0 - lam * np.conj(blaschke(z)))),
         float(n)),
    ]
    report = VerificationReport("cauchy_identities", [_check(*row, tol) for row in rows])
    report.details["node_counts"] = node_counts
    return report


def equality_constant(pair: AnalyticPair):
    """c = n / (1 - |lam|^2), the value forced by evaluating f = c (1 - conj(lam) B) at 0."""
    return pair.n / (1.0 - abs(pair.lam) ** 2)


def verify_equality_function(pair: AnalyticPair, tol=1e-9, samples=64) -> VerificationReport:
    """Max deviation of f from c (1 - conj(lam) B) over ``samples`` points of the unit circle."""
    c = equality_constant(pair)
    z = np.exp(1j * TWO_PI * np.arange(samples) / samples)
    deviation = float(np.abs(f_eval(pair, z) - c * (1.0 - np.conj(pair.lam) * blaschke_eval(pair, z))).max())
    check = Check("equality_function", deviation <= tol, deviation, 0.0, deviation, tol)
    return VerificationReport("equality_function", [check], equality=check.passed)


def verify_coefficient_relations(pair: AnalyticPair, tol=1e-9) -> VerificationReport:
    """Coefficient identities forced by equality, for m = 1..n-1.

    For each m three checks are produced: the relation obtained from the
    z^m coefficient, its conjugate partner from z^(n-m), and the consequence
    (1 - |lam|^2)^2 m (n - m) conj(e_m) = 0. Failing check names carry m.
    """
    n = pair.n
    lam = pair.lam
    s = 1.0 - abs(lam) ** 2
    e = elementary_symmetric(pair.points)
    report = VerificationReport("coefficient_relations")
    for m in range(1, n):
        sm = (-1.0) ** m
        snm = (-1.0) ** (n - m)
        lhs1 = (n - s * (n - m)) * sm * np.conj(e[m])
        rhs1 = n * np.conj(lam) * snm * e[n - m]
        lhs2 = (n - s * m) * snm * e[n - m]
        rhs2 = n * lam * sm * np.conj(e[m])
        consequence = s * s * m * (n - m) * np.conj(e[m])
        report.checks.append(_check(f"relation_1[m={m}]", complex(lhs1), complex(rhs1), tol))
        report.checks.append(_check(f"relation_2[m={m}]", complex(lhs2), complex(rhs2), tol))
        report.checks.append(_check(f"consequence[m={m}]", complex(consequence), 0.0, tol))
    return report

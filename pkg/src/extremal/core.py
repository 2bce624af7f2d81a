"""Configurations, log-domain pairwise products and the closed-form Cassels bound.

Every product here is returned as a sum of logarithms. For n >= 30 and
rho >= 2 the raw product overflows a double, and the bound itself grows
like rho**(2 n**2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ._numerics import log1m_rho_pow, log_rho_sq_minus_one, stable_sum
from .errors import DegenerateFactor, InvalidParam

TWO_PI = 2.0 * math.pi

# Absolute slack on |z_j| - rho accepted at construction.
BOUNDARY_TOL = 1e-12
DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class Check:
    """One named comparison of a computed value against a reference."""

    name: str
    passed: bool
    computed: Any
    reference: Any
    gap: float
    tolerance: float

    def to_dict(self):
        return {
            "name": self.name,
            "pass": bool(self.passed),
            "computed": self.computed,
            "reference": self.reference,
            "gap": self.gap,
            "tolerance": self.tolerance,
        }


@dataclass
class VerificationReport:
    """Results of a group of checks.

    ``equality`` is only meaningful for inequality checks; it is ``None``
    for pure identity checks.
    """

    name: str
    checks: list[Check] = field(default_factory=list)
    equality: bool | None = None
    notes: list[str] = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def __getitem__(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def failures(self):
        return [c.name for c in self.checks if not c.passed]


def _check_rho(rho):
    if not rho > 1.0 or not math.isfinite(rho):
        raise InvalidParam(f"rho must be a finite real > 1, got {rho!r}")


def _check_n(n):
    if int(n) != n or n < 1:
        raise InvalidParam(f"n must be a positive integer, got {n!r}")


@dataclass(frozen=True)
class DiscConfiguration:
    """n complex points in the closed disc of radius ``rho``.

    ``rho = 1`` is accepted so that Schur's unit-disc case can be expressed;
    the Cassels bound functions themselves still require ``rho > 1``.
    Points outside the disc by more than ``BOUNDARY_TOL`` are rejected, never
    clamped.
    """

    points: np.ndarray
    rho: float

    def __post_init__(self):
        pts = np.atleast_1d(np.asarray(self.points, dtype=complex)).copy()
        if pts.ndim != 1 or pts.size < 1:
            raise InvalidParam("a configuration needs at least one point")
        if not np.all(np.isfinite(pts)):
            raise InvalidParam("points must be finite")
        rho = float(self.rho)
        if not rho >= 1.0 or not math.isfinite(rho):
            raise InvalidParam(f"rho must be a finite real >= 1, got {self.rho!r}")
        excess = np.abs(pts) - rho
        if np.any(excess > BOUNDARY_TOL):
            j = int(np.argmax(excess))
            raise InvalidParam(f"point {j} has modulus {abs(pts[j])!r} > rho = {rho!r}")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "rho", rho)

    @property
    def n(self):
        return self.points.size

    @classmethod
    def regular(cls, n, rho, phase=0.0):
        """Vertices of the regular n-gon inscribed in |z| = rho."""
        return cls.from_torus(TorusConfiguration.regular(n, phase), rho)

    @classmethod
    def from_torus(cls, tcfg, rho):
        return cls(rho * tcfg.omegas, rho)

    def on_boundary(self, tol=BOUNDARY_TOL):
        return bool(np.all(np.abs(np.abs(self.points) - self.rho) <= tol))

    def to_torus(self):
        return TorusConfiguration(np.angle(self.points))


@dataclass(frozen=True)
class TorusConfiguration:
    """n unimodular points omega_j = exp(i * angles[j]), angles reduced into [0, 2 pi)."""

    angles: np.ndarray

    def __post_init__(self):
        raw = np.atleast_1d(np.asarray(self.angles, dtype=float))
        if raw.ndim != 1 or raw.size < 1:
            raise InvalidParam("a torus configuration needs at least one angle")
        if not np.all(np.isfinite(raw)):
            raise InvalidParam("angles must be finite")
        reduced = np.mod(raw, TWO_PI)
        # np.mod can return exactly 2 pi for tiny negative inputs
        reduced[reduced >= TWO_PI] = 0.0
        reduced.setflags(write=False)
        object.__setattr__(self, "angles", reduced)

    @property
    def n(self):
        return self.angles.size

    @property
    def omegas(self):
        return np.exp(1j * self.angles)

    @classmethod
    def regular(cls, n, phase=0.0):
        _check_n(n)
        return cls(phase + TWO_PI * np.arange(n) / n)

    def differences(self):
        """Matrix of angle differences angles[k] - angles[j] indexed [j, k]."""
        return self.angles[None, :] - self.angles[:, None]


@dataclass(frozen=True)
class BoundParams:
    n: int
    rho: float
    log_bound: float

    @classmethod
    def of(cls, n, rho):
        return cls(int(n), float(rho), cassels_log_bound(n, rho))


def _factor_matrix(points):
    """Matrix [j, k] -> 1 - conj(z_j) z_k."""
    return 1.0 - np.conj(points)[:, None] * points[None, :]


def log_pairwise_product(cfg: DiscConfiguration) -> float:
    """Sum over j != k of log|1 - conj(z_j) z_k|.

    Raises DegenerateFactor naming the first (j, k) whose factor is exactly 0.
    """
    n = cfg.n
    if n == 1:
        return 0.0
    mags = np.abs(_factor_matrix(cfg.points))
    off = ~np.eye(n, dtype=bool)
    zero = (mags == 0.0) & off
    if np.any(zero):
        j, k = (int(i) for i in np.argwhere(zero)[0])
        raise DegenerateFactor(f"factor 1 - conj(z_{j}) z_{k} vanishes", (j, k))
    return stable_sum(np.log(mags[off]), n)


def full_product_with_diagonal(cfg: DiscConfiguration) -> float:
    """Log of the product over all (j, k), diagonal factors 1 - |z_j|^2 included."""
    diag = np.abs(1.0 - np.abs(cfg.points) ** 2)
    zero = np.flatnonzero(diag == 0.0)
    if zero.size:
        j = int(zero[0])
        raise DegenerateFactor(f"diagonal factor 1 - |z_{j}|^2 vanishes", (j,))
    return log_pairwise_product(cfg) + stable_sum(np.log(diag), cfg.n)


def cassels_log_bound(n: int, rho: float) -> float:
    """n * log((rho^(2n) - 1) / (rho^2 - 1)), evaluated without overflow."""
    _check_n(n)
    _check_rho(rho)
    if n == 1:
        return 0.0
    log_rho = math.log1p(rho - 1.0)
    log_num = 2 * n * log_rho + log1m_rho_pow(rho, 2 * n)
    return n * (log_num - log_rho_sq_minus_one(rho))


def _log_bound_or_schur(n, rho):
    # rho = 1 is the limit of the Cassels bound: n^n (Schur)
    if rho == 1.0:
        return n * math.log(n)
    return cassels_log_bound(n, rho)


def verify_main_inequality(cfg: DiscConfiguration, tol: float = DEFAULT_TOL) -> VerificationReport:
    log_product = log_pairwise_product(cfg)
    log_bound = _log_bound_or_schur(cfg.n, cfg.rho)
    gap = log_bound - log_product
    check = Check("main_inequality", gap >= -tol, log_product, log_bound, gap, tol)
    return VerificationReport("main_inequality", [check], equality=abs(gap) <= tol)


def log_pairwise_product_equiv_form(tcfg: TorusConfiguration, rho: float) -> float:
    """Sum over all (j, k), diagonal included, of log|rho^-2 - conj(w_j) w_k|.

    Cross-checked on every call against the rescaled full product
    rho^(-2 n^2) * prod |1 - rho^2 conj(w_j) w_k|.
    """
    _check_rho(rho)
    w = tcfg.omegas
    inv = rho ** -2.0
    mags = np.abs(inv - np.conj(w)[:, None] * w[None, :])
    value = stable_sum(np.log(mags), tcfg.n)

    rescaled = -2.0 * tcfg.n**2 * math.log(rho) + full_product_with_diagonal(
        DiscConfiguration(rho * w, rho)
    )
    if abs(value - rescaled) > 1e-10 * max(1.0, abs(value)):
        raise ArithmeticError(
            f"equivalent-form cross-check failed: {value!r} vs {rescaled!r}"
        )
    return value


def cassels_condition(n: int, rho: float) -> bool:
    """cos(pi/n) <= rho^2 / (rho^4 - rho^2 + 1)."""
    _check_n(n)
    _check_rho(rho)
    r2 = rho * rho
    return math.cos(math.pi / n) <= r2 / (r2 * r2 - r2 + 1.0)


def alexander_condition(n: int, rho: float) -> bool:
    """cos(pi/n) <= 2 rho^2 / (rho^4 + 1); implied by cassels_condition."""
    _check_n(n)
    _check_rho(rho)
    r2 = rho * rho
    return math.cos(math.pi / n) <= 2.0 * r2 / (r2 * r2 + 1.0)


def dubickas_factorization_check(
    tcfg: TorusConfiguration, rho: float, tol: float = 1e-10
) -> VerificationReport:
    """Compare prod_{j!=k} |1 - conj(z_j) z_k| for z = rho*w with its chord factorization.

    The left side goes through the complex pairwise product; the right side
    is n(n-1) log rho + sum_{j<k} log((rho - 1/rho)^2 + |w_j - w_k|^2).
    """
    _check_rho(rho)
    n = tcfg.n
    lhs = log_pairwise_product(DiscConfiguration(rho * tcfg.omegas, rho))
    w = tcfg.omegas
    iu = np.triu_indices(n, k=1)
    chords = np.abs(w[:, None] - w[None, :])[iu] ** 2
    shift = (rho - 1.0 / rho) ** 2
    rhs = n * (n - 1) * math.log(rho) + stable_sum(np.log(shift + chords), n)
    gap = abs(lhs - rhs) / max(1.0, abs(lhs), abs(rhs))
    check = Check("dubickas_factorization", gap <= tol, lhs, rhs, gap, tol)
    return VerificationReport("dubickas_factorization", [check])

"""Searches over point configurations on the circle.

The torus objective sum_{j!=k} log|1 - rho^2 exp(i (theta_k - theta_j))| depends
only on angle differences, so optimisation fixes theta_0 = 0 (gauge) and moves
the remaining n - 1 angles.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._numerics import max_workers, stable_sum
from .analytic import elementary_symmetric
from .core import (
    TWO_PI,
    DiscConfiguration,
    TorusConfiguration,
    cassels_log_bound,
    log_pairwise_product,
)
from .errors import BoundViolation, InvalidParam

BOUND_RAIL = 1e-9
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class AscentSettings:
    """Projected gradient ascent with Armijo backtracking.

    Each iteration first tries twice the previously accepted step; the very
    first trial moves the largest angle by ``initial_step`` radians.
    """

    initial_step: float = 0.1
    shrink: float = 0.5
    armijo: float = 1e-4
    max_iter: int = 5000
    grad_tol: float = 1e-10
    nonglobal_gap: float = 1e-6

    def to_dict(self):
        return dict(self.__dict__)


@dataclass(frozen=True)
class OptimizationResult:
    angles: TorusConfiguration
    log_product: float
    gradient_norm: float
    iterations: int
    converged: bool
    is_regular_ngon: bool
    start_seed: int
    gap_to_bound: float

    @property
    def status(self):
        if not self.converged:
            return "iteration_cap"
        if self.gap_to_bound > AscentSettings.nonglobal_gap:
            return "converged_nonglobal"
        return "global"


@dataclass(frozen=True)
class SymmetricSearchRecord:
    n: int
    degree: int
    best_value: float
    regular_ngon_value: float
    best_angles: TorusConfiguration
    trials: int
    rel_tol: float = 1e-12

    @property
    def excess(self):
        return self.best_value - self.regular_ngon_value

    @property
    def exceeds(self):
        """Strict exceedance beyond rounding: a counterexample signal."""
        return self.excess > self.rel_tol * max(1.0, abs(self.regular_ngon_value))


def _pair_log_terms(delta, rho):
    # log|1 - rho^2 e^{i delta}| via |.|^2 = (rho^2 - 1)^2 + 4 rho^2 sin^2(delta / 2)
    r2 = rho * rho
    s = np.sin(0.5 * delta)
    return 0.5 * np.log((r2 - 1.0) ** 2 + 4.0 * r2 * s * s)


def _objective(angles, rho):
    n = angles.size
    if n == 1:
        return 0.0
    iu = np.triu_indices(n, k=1)
    delta = (angles[None, :] - angles[:, None])[iu]
    # each unordered pair contributes twice (the factor's modulus is symmetric in j, k)
    return 2.0 * stable_sum(_pair_log_terms(delta, rho), n)


def _gradient(angles, rho):
    r2 = rho * rho
    delta = angles[:, None] - angles[None, :]  # [k, j] -> theta_k - theta_j
    s = np.sin(0.5 * delta)
    den = (r2 - 1.0) ** 2 + 4.0 * r2 * s * s
    return np.sum(2.0 * r2 * np.sin(delta) / den, axis=1)


def torus_log_objective(tcfg: TorusConfiguration, rho: float) -> float:
    """sum_{j!=k} log|1 - rho^2 conj(w_j) w_k| for w_j = exp(i theta_j)."""
    if not rho > 1.0:
        raise InvalidParam(f"rho must be > 1, got {rho!r}")
    return _objective(tcfg.angles, rho)


def torus_gradient(tcfg: TorusConfiguration, rho: float) -> np.ndarray:
    """d/d theta_k = sum_{j!=k} 2 rho^2 sin(theta_k - theta_j) / |1 - rho^2 e^{i(theta_k - theta_j)}|^2."""
    if not rho > 1.0:
        raise InvalidParam(f"rho must be > 1, got {rho!r}")
    return _gradient(tcfg.angles, rho)


def polygon_deviation(tcfg: TorusConfiguration) -> float:
    """Largest |gap - 2 pi / n| over the cyclic gaps between sorted angles."""
    n = tcfg.n
    if n == 1:
        return 0.0
    a = np.sort(tcfg.angles)
    gaps = np.append(np.diff(a), TWO_PI - a[-1] + a[0])
    return float(np.abs(gaps - TWO_PI / n).max())


def detect_regular_ngon(tcfg: TorusConfiguration, tol=1e-6) -> bool:
    """True iff the cyclic gaps between sorted angles all equal 2 pi / n within tol."""
    return polygon_deviation(tcfg) <= tol


def _ascend(angles, rho, bound, settings):
    """Gauge-fixed gradient ascent from ``angles``; returns (angles, value, grad_inf, iters, converged)."""
    x = angles - angles[0]
    value = _objective(x, rho)
    step = None
    grad_inf = math.inf
    for it in range(settings.max_iter + 1):
        g = _gradient(x, rho)
        g[0] = 0.0
        grad_inf = float(np.abs(g).max())
        if grad_inf <= settings.grad_tol:
            return x, value, grad_inf, it, True
        if it == settings.max_iter:
            break
        g2 = float(g @ g)
        t = settings.initial_step / grad_inf if step is None else 2.0 * step
        noise = 8.0 * np.finfo(float).eps * max(1.0, abs(value)) * x.size**2
        while True:
            trial = x + t * g
            trial_value = _objective(trial, rho)
            if t * g2 > noise:
                if trial_value >= value + settings.armijo * t * g2:
                    break
            elif trial_value >= value - noise:
                # predicted gain below rounding noise: the value test would pass on noise
                # alone, so accept only steps that stop short of the line maximum
                g_trial = _gradient(trial, rho)
                g_trial[0] = 0.0
                if float(g_trial @ g) >= 0.0:
                    break
            t *= settings.shrink
            if t * grad_inf < 1e-16:
                # no representable ascent left: stationary to working precision
                return x, value, grad_inf, it, False
        if trial_value > bound + BOUND_RAIL:
            raise BoundViolation(
                f"iterate exceeds the bound: {trial_value!r} > {bound!r} (angles {trial.tolist()})"
            )
        x, value, step = trial, trial_value, t
    return x, value, grad_inf, settings.max_iter, False


def optimize_torus(n, rho, starts=50, seed=0, settings=AscentSettings(), polygon_tol=1e-5):
    """Multi-start maximisation of the pairwise product on |z| = rho.

    Start i draws its angles uniformly on [0, 2 pi) from a PCG64 generator
    seeded with ``seed + i``. Results come back in start order regardless of
    how many worker threads ran them.
    """
    if int(n) != n or n < 2:
        raise InvalidParam(f"n must be an integer >= 2, got {n!r}")
    if not rho > 1.0:
        raise InvalidParam(f"rho must be > 1, got {rho!r}")
    if starts < 1:
        raise InvalidParam("starts must be >= 1")
    n = int(n)
    bound = cassels_log_bound(n, rho)

    def run(i):
        start_seed = seed + i
        rng = np.random.default_rng(start_seed)
        x, value, grad_inf, iters, converged = _ascend(rng.uniform(0.0, TWO_PI, n), rho, bound, settings)
        tcfg = TorusConfiguration(x)
        return OptimizationResult(
            angles=tcfg,
            log_product=value,
            gradient_norm=grad_inf,
            iterations=iters,
            converged=converged,
            is_regular_ngon=detect_regular_ngon(tcfg, polygon_tol),
            start_seed=start_seed,
            gap_to_bound=bound - value,
        )

    workers = min(max_workers(), starts)
    if workers == 1:
        return [run(i) for i in range(starts)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, range(starts)))


def best_result(results):
    """Highest log-product; ties go to the lowest start index."""
    return max(enumerate(results), key=lambda item: (item[1].log_product, -item[0]))[1]


def basin_counts(results, digits=6):
    """Number of starts ending at each (rounded) log-product value."""
    counts = {}
    for r in results:
        key = f"{r.log_product:.{digits}f}"
        counts[key] = counts.get(key, 0) + 1
    return dict(sorted(counts.items(), key=lambda kv: -float(kv[0])))


def golden_section_max(fn, lo, hi, xtol=1e-12, max_iter=200):
    """Maximise a unimodal ``fn`` on [lo, hi]; returns (x, fn(x))."""
    a, b = lo, hi
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(max_iter):
        if b - a <= xtol:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = fn(d)
    return (c, fc) if fc >= fd else (d, fd)


def _grid_then_golden(batch_fn, scalar_fn, grid):
    """Maximise a 2 pi-periodic function: grid scan, then golden section around the best node."""
    nodes = TWO_PI * np.arange(grid) / grid
    values = batch_fn(nodes)
    i = int(np.argmax(values))
    h = TWO_PI / grid
    x, fx = golden_section_max(scalar_fn, nodes[i] - h, nodes[i] + h)
    if values[i] > fx:
        return float(nodes[i]), float(values[i])
    return float(x), float(fx)


def push_to_boundary(cfg: DiscConfiguration, angle_grid=64) -> DiscConfiguration:
    """Move each point in turn onto |z| = rho, maximising the factors that involve it.

    For point k the factors are |1 - conj(z_j) z_k| and |1 - conj(z_k) z_j|,
    equal in modulus, so the target is 2 sum_{j!=k} log|1 - conj(z_j) w| over
    |w| = rho. By the maximum modulus principle the circle maximum is at
    least the current value, so every step is checked to be an ascent; the
    angle grid is refined until it is.
    """
    if angle_grid < 16:
        raise InvalidParam("angle_grid must be >= 16")
    rho = cfg.rho
    z = np.array(cfg.points, dtype=complex)
    n = z.size
    for k in range(n):
        others = np.conj(np.delete(z, k))

        def batch(phi, others=others):
            w = rho * np.exp(1j * np.asarray(phi))
            with np.errstate(divide="ignore"):
                return 2.0 * np.sum(np.log(np.abs(1.0 - others * w[..., None])), axis=-1)

        def scalar(phi, batch=batch):
            return float(batch(np.array([phi]))[0])

        with np.errstate(divide="ignore"):
            current = 2.0 * float(np.sum(np.log(np.abs(1.0 - others * z[k]))))
        grid = int(angle_grid)
        while True:
            phi, value = _grid_then_golden(batch, scalar, grid)
            if value >= current - 1e-12 * max(1.0, abs(current)):
                break
            grid *= 2
            if grid > 2**16:
                raise ArithmeticError(f"no ascent found for point {k}")
        z[k] = rho * np.exp(1j * phi)
    out = DiscConfiguration(z, rho)
    if n > 1 and log_pairwise_product(out) < log_pairwise_product(cfg) - 1e-12 * max(
        1.0, abs(log_pairwise_product(cfg))
    ):
        raise ArithmeticError("boundary push decreased the pairwise product")
    return out


def squared_chords(angles):
    """|w_j - w_k|^2 = 4 sin^2((theta_j - theta_k) / 2) for j < k, along the last axis."""
    angles = np.asarray(angles, dtype=float)
    n = angles.shape[-1]
    j, k = np.triu_indices(n, k=1)
    s = np.sin(0.5 * (angles[..., j] - angles[..., k]))
    return 4.0 * s * s


def symmetric_chord_value(angles, degree):
    """e_degree of the squared chord lengths; batched along leading axes."""
    return elementary_symmetric(squared_chords(angles), degree)[..., degree]


def _polish(angles, degree, sweeps, grid=32):
    """Coordinate-wise grid + golden-section ascent of the chord symmetric function."""
    x = np.array(angles, dtype=float)
    x -= x[0]
    value = float(symmetric_chord_value(x, degree))
    for _ in range(sweeps):
        before = value
        for k in range(1, x.size):

            def batch(phi, k=k):
                trial = np.broadcast_to(x, (np.size(phi), x.size)).copy()
                trial[:, k] = phi
                return symmetric_chord_value(trial, degree)

            def scalar(phi, k=k):
                trial = x.copy()
                trial[k] = phi
                return float(symmetric_chord_value(trial, degree))

            phi, candidate = _grid_then_golden(batch, scalar, grid)
            if candidate > value:
                x[k] = phi
                value = candidate
        if value - before <= 1e-15 * max(1.0, abs(value)):
            break
    return x, value


def symmetric_function_search(n, degree, trials=10_000, seed=0, polish_sweeps=100, chunk=20_000):
    """Look for configurations whose chord symmetric function beats the regular n-gon.

    ``trials`` uniform random configurations are scored in batches; the best
    one is then polished by up to ``polish_sweeps`` coordinate-wise sweeps.
    """
    if int(n) != n or n < 2:
        raise InvalidParam("n must be an integer >= 2")
    pairs = n * (n - 1) // 2
    if int(degree) != degree or not 1 <= degree <= pairs:
        raise InvalidParam(f"degree must lie in [1, {pairs}], got {degree!r}")
    n, degree = int(n), int(degree)
    regular = float(symmetric_chord_value(TorusConfiguration.regular(n).angles, degree))

    rng = np.random.default_rng(seed)
    best_value = -math.inf
    best_angles = TorusConfiguration.regular(n).angles
    done = 0
    while done < trials:
        size = min(chunk, trials - done)
        batch = rng.uniform(0.0, TWO_PI, (size, n))
        values = symmetric_chord_value(batch, degree)
        i = int(np.argmax(values))
        if values[i] > best_value:
            best_value, best_angles = float(values[i]), batch[i]
        done += size
    if trials > 0:
        best_angles, best_value = _polish(best_angles, degree, polish_sweeps)
    else:
        best_value = regular
    return SymmetricSearchRecord(
        n=n,
        degree=degree,
        best_value=best_value,
        regular_ngon_value=regular,
        best_angles=TorusConfiguration(best_angles),
        trials=int(trials),
    )

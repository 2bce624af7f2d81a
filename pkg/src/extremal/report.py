"""Run manifests, JSON report documents and the sweep drivers behind the CLI."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .analytic import (
    AnalyticPair,
    verify_cauchy_identities,
    verify_coefficient_relations,
    verify_equality_function,
)
from .core import (
    TWO_PI,
    Check,
    DiscConfiguration,
    TorusConfiguration,
    dubickas_factorization_check,
    verify_main_inequality,
)
from .errors import BoundViolation, InvalidParam
from .monotonicity import DEFAULT_A_MAX, scan_monotonicity, verify_additive_inequality
from .search import (
    basin_counts,
    best_result,
    optimize_torus,
    polygon_deviation,
    symmetric_function_search,
)

SCHEMA_VERSION = 1
RNG_NAME = "numpy.random.PCG64"

IDENTITY_TOL = 1e-9
INEQUALITY_SLACK = 1e-12
ADDITIVE_SLACK = 1e-10
POLYGON_TOL = 1e-6
OPTIMIZER_TOL = 1e-8
MONOTONE_SLACK = 1e-10
PROVED_DEGREES = 4


class UsageError(Exception):
    """Bad parameters or malformed input; the CLI maps this to exit status 2."""


@dataclass
class RunManifest:
    command: str
    parameters: dict
    seed: int | None
    tolerances: dict
    timestamp: str = ""
    tool_version: str = __version__
    rng: str = RNG_NAME

    def __post_init__(self):
        if not self.timestamp:
            self.timestamp = datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass
class ReportDocument:
    manifest: RunManifest
    checks: list[Check] = field(default_factory=list)
    findings: list[str] = field(default_factory=list)
    data: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    @property
    def exit_status(self):
        return 0 if all(c.passed for c in self.checks) and not self.findings else 1

    def payload(self):
        """Everything except the timestamp; identical for identical manifests."""
        doc = self.to_dict()
        del doc["manifest"]["timestamp"]
        return doc

    def to_dict(self):
        return jsonable(
            {
                "schema": SCHEMA_VERSION,
                "manifest": dataclasses.asdict(self.manifest),
                "checks": [c.to_dict() for c in self.checks],
                "findings": self.findings,
                "data": self.data,
                "notes": self.notes,
                "exit_status": self.exit_status,
            }
        )

    def to_json(self):
        return dumps(self.to_dict())


def jsonable(obj: Any):
    """Convert numpy scalars/arrays, complex numbers and tuples into JSON-ready values."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(doc):
    # float repr is the shortest string that round-trips, so doubles survive exactly
    return json.dumps(doc, indent=2, allow_nan=True) + "\n"


def load_configuration(path):
    """Parse a configuration file into (DiscConfiguration, TorusConfiguration or None).

    Accepts {"rho": R, "points": [{"re": x, "im": y}, ...]} or
    {"rho": R, "angles": [...]}; angles place the points on |z| = rho.
    """
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read configuration {path}: {exc}") from exc
    if not isinstance(raw, dict) or "rho" not in raw:
        raise UsageError("configuration must be an object with a 'rho' field")
    if ("points" in raw) == ("angles" in raw):
        raise UsageError("configuration needs exactly one of 'points' or 'angles'")
    try:
        rho = float(raw["rho"])
        if "angles" in raw:
            tcfg = TorusConfiguration([float(a) for a in raw["angles"]])
            if not rho > 1.0:
                raise InvalidParam("rho must be > 1 for an angle configuration")
            return DiscConfiguration.from_torus(tcfg, rho), tcfg
        points = [complex(float(p["re"]), float(p["im"])) for p in raw["points"]]
        return DiscConfiguration(points, rho), None
    except (TypeError, KeyError, ValueError) as exc:
        raise UsageError(f"malformed configuration: {exc}") from exc


def cmd_verify(input_path, tol=INEQUALITY_SLACK, identities=False, identity_tol=IDENTITY_TOL):
    """Main inequality, chord factorization (boundary inputs) and optional disc identities.

    With ``identities`` the points are rescaled by rho^-2 into the open unit
    disc, which is the corollary's substitution at a = rho^-2, and the
    quadrature identities and additive inequality are checked there.
    """
    cfg, tcfg = load_configuration(input_path)
    manifest = RunManifest(
        "verify",
        {"input": str(input_path), "identities": identities},
        None,
        {"inequality": tol, "identity": identity_tol, "additive": ADDITIVE_SLACK},
    )
    doc = ReportDocument(manifest)
    doc.data.update(n=cfg.n, rho=cfg.rho)

    main = verify_main_inequality(cfg, tol)
    doc.checks.extend(main.checks)
    doc.data["equality"] = main.equality

    if tcfg is None and cfg.rho > 1.0 and cfg.on_boundary():
        tcfg = cfg.to_torus()
    if tcfg is not None:
        doc.checks.extend(dubickas_factorization_check(tcfg, cfg.rho, identity_tol).checks)
    else:
        doc.notes.append("chord factorization skipped: points are not all on |z| = rho")

    if identities:
        if not cfg.rho > 1.0:
            raise UsageError("identity checks need rho > 1")
        pair = AnalyticPair(cfg.points / cfg.rho**2)
        doc.checks.extend(verify_cauchy_identities(pair, identity_tol).checks)
        add = verify_additive_inequality(pair, ADDITIVE_SLACK)
        doc.checks.append(
            Check("additive_inequality", add.passed, add.sum_value, add.bound_value, add.gap, ADDITIVE_SLACK)
        )
    return doc


def cmd_optimize(n, rho, starts=50, seed=0, tol=OPTIMIZER_TOL, polygon_tol=1e-5):
    if n is None or n < 2:
        raise UsageError(f"optimize needs n >= 2, got {n!r}")
    if rho is None or not rho > 1.0:
        raise UsageError(f"optimize needs rho > 1, got {rho!r}")
    if starts < 1:
        raise UsageError("starts must be >= 1")
    manifest = RunManifest(
        "optimize",
        {"n": n, "rho": rho, "starts": starts},
        seed,
        {"bound_match": tol, "polygon": polygon_tol},
    )
    doc = ReportDocument(manifest)
    try:
        results = optimize_torus(n, rho, starts, seed, polygon_tol=polygon_tol)
    except BoundViolation as exc:
        doc.findings.append(f"bound violation: {exc}")
        return doc
    best = best_result(results)
    bound = best.log_product + best.gap_to_bound
    doc.checks.append(
        Check("best_matches_bound", abs(best.gap_to_bound) <= tol, best.log_product, bound,
              best.gap_to_bound, tol)
    )
    deviation = polygon_deviation(best.angles)
    doc.checks.append(
        Check("best_is_regular_ngon", deviation <= polygon_tol, deviation, 0.0, deviation, polygon_tol)
    )
    statuses = {}
    for r in results:
        statuses[r.status] = statuses.get(r.status, 0) + 1
    doc.data.update(
        bound=bound,
        best={
            "angles": best.angles.angles,
            "log_product": best.log_product,
            "gradient_norm": best.gradient_norm,
            "iterations": best.iterations,
            "start_seed": best.start_seed,
            "converged": best.converged,
            "is_regular_ngon": best.is_regular_ngon,
        },
        basins=basin_counts(results),
        statuses=statuses,
        starts=[
            {"seed": r.start_seed, "log_product": r.log_product, "status": r.status,
             "iterations": r.iterations, "gradient_norm": r.gradient_norm}
            for r in results
        ],
    )
    return doc


def random_disc_points(rng, n, radius):
    """n points uniform (by area) in the disc |z| <= radius."""
    r = radius * np.sqrt(rng.uniform(0.0, 1.0, n))
    return r * np.exp(1j * rng.uniform(0.0, TWO_PI, n))


def _worst(name, reports, tol):
    """Fold many single-check results into one: keep the largest gap, pass iff all passed."""
    checks = [c for rep in reports for c in rep]
    worst = max(checks, key=lambda c: c.gap)
    return Check(name, all(c.passed for c in checks), worst.computed, worst.reference, worst.gap, tol)


def cmd_identities(n, trials=100, seed=0, tol=IDENTITY_TOL, radius=0.9):
    """Quadrature identities, additive inequality and equality-case relations over random pairs.

    Each trial draws one random pair (points uniform in |z| <= radius) and
    one generated equality pair (roots of z^n + lam with |lam| <= radius^n).
    """
    if n is None or n < 1:
        raise UsageError(f"identities needs n >= 1, got {n!r}")
    if trials < 0:
        raise UsageError("trials must be >= 0")
    manifest = RunManifest(
        "identities",
        {"n": n, "trials": trials, "radius": radius},
        seed,
        {"identity": tol, "additive": ADDITIVE_SLACK},
    )
    doc = ReportDocument(manifest)
    if trials == 0:
        return doc
    rng = np.random.default_rng(seed)
    cauchy, additive, equality_fn, relations, eq_additive, consistent = [], [], [], [], [], []
    max_nodes = 0
    for trial in range(trials):
        pair = AnalyticPair(random_disc_points(rng, n, radius))
        rep = verify_cauchy_identities(pair, tol)
        max_nodes = max(max_nodes, *rep.details["node_counts"].values())
        cauchy.append(rep.checks)
        add = verify_additive_inequality(pair, ADDITIVE_SLACK)
        additive.append([Check("additive", add.passed, add.sum_value, add.bound_value, -add.gap, ADDITIVE_SLACK)])
        if not add.passed:
            doc.findings.append(f"trial {trial}: additive inequality violated by {-add.gap!r}")
        eq_rep = verify_equality_function(pair, tol)
        agree = eq_rep.equality == add.equality
        consistent.append([Check("consistent", agree, eq_rep.equality, add.equality, 0.0 if agree else 1.0, 0.0)])

        lam = random_disc_points(rng, 1, radius**n)[0]
        eq_pair = AnalyticPair.equality_case(n, lam)
        equality_fn.append(verify_equality_function(eq_pair, tol).checks)
        rel = verify_coefficient_relations(eq_pair, tol).checks
        if rel:
            relations.append(rel)
        eq_add = verify_additive_inequality(eq_pair, ADDITIVE_SLACK)
        eq_additive.append(
            [Check("eq", eq_add.equality, eq_add.sum_value, eq_add.bound_value, abs(eq_add.gap), ADDITIVE_SLACK)]
        )

    doc.checks.append(_worst("cauchy_identities", cauchy, tol))
    # for the additive inequality the stored gap is the violation (bound - sum), so max = worst
    doc.checks.append(_worst("additive_inequality", additive, ADDITIVE_SLACK))
    doc.checks.append(_worst("equality_detection_consistent", consistent, 0.0))
    doc.checks.append(_worst("equality_case_function", equality_fn, tol))
    if relations:
        doc.checks.append(_worst("equality_case_coefficient_relations", relations, tol))
    doc.checks.append(_worst("equality_case_additive", eq_additive, ADDITIVE_SLACK))
    doc.data["max_quadrature_nodes"] = max_nodes
    return doc


def cmd_scan_g(n, seed=0, grid=100, a_max=DEFAULT_A_MAX, regular=False):
    if n is None or n < 1:
        raise UsageError(f"scan-g needs n >= 1, got {n!r}")
    if grid < 2:
        raise UsageError("grid must be >= 2")
    if not 0.0 < a_max < 1.0:
        raise UsageError("a_max must lie in (0, 1)")
    manifest = RunManifest(
        "scan-g",
        {"n": n, "grid": grid, "a_max": a_max, "regular": regular},
        seed,
        {"monotone": MONOTONE_SLACK},
    )
    doc = ReportDocument(manifest)
    if regular:
        tcfg = TorusConfiguration.regular(n)
    else:
        tcfg = TorusConfiguration(np.random.default_rng(seed).uniform(0.0, TWO_PI, n))
    curve = scan_monotonicity(tcfg, grid, a_max)
    min_step = float(np.diff(curve.g_values).min())
    min_slope = float(curve.gprime_values.min())
    doc.checks.append(
        Check("g_nondecreasing", curve.is_nondecreasing(MONOTONE_SLACK), min_step, 0.0,
              max(0.0, -min_step), MONOTONE_SLACK)
    )
    doc.checks.append(
        Check("g_derivative_nonnegative", curve.derivative_nonnegative(MONOTONE_SLACK), min_slope, 0.0,
              max(0.0, -min_slope), MONOTONE_SLACK)
    )
    doc.data.update(
        angles=tcfg.angles,
        a=curve.a_grid,
        g=curve.g_values,
        g_prime=curve.gprime_values,
    )
    return doc


def cmd_dubickas(n, degree, trials=10_000, seed=0):
    """Chord symmetric-function search; only degrees <= 4 (proved cases) can fail the run."""
    if n is None or n < 2:
        raise UsageError(f"dubickas needs n >= 2, got {n!r}")
    pairs = n * (n - 1) // 2
    if degree is None or not 1 <= degree <= pairs:
        raise UsageError(f"degree must lie in [1, {pairs}], got {degree!r}")
    if trials < 0:
        raise UsageError("trials must be >= 0")
    manifest = RunManifest(
        "dubickas",
        {"n": n, "degree": degree, "trials": trials},
        seed,
        {"relative_excess": 1e-12},
    )
    doc = ReportDocument(manifest)
    record = symmetric_function_search(n, degree, trials, seed)
    doc.data["record"] = {
        "degree": record.degree,
        "best_value": record.best_value,
        "regular_ngon_value": record.regular_ngon_value,
        "best_angles": record.best_angles.angles,
        "trials": record.trials,
        "excess": record.excess,
        "exceeds": record.exceeds,
    }
    if degree <= PROVED_DEGREES:
        doc.checks.append(
            Check("regular_ngon_not_exceeded", not record.exceeds, record.best_value,
                  record.regular_ngon_value, record.excess, record.rel_tol)
        )
        if record.exceeds:
            doc.findings.append(
                f"degree {degree} exceeded by {record.excess!r}: contradicts a proved case, implementation bug"
            )
    else:
        verdict = "exceeded" if record.exceeds else "not exceeded"
        doc.notes.append(f"open case degree {degree}: regular n-gon value {verdict} (excess {record.excess!r})")
    return doc

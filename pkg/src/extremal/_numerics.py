"""Small numeric helpers used by several modules."""

import math
import os

import numpy as np

# Above this many points, double sums switch to compensated (exactly rounded) summation.
COMPENSATED_SUM_MIN_N = 100


def stable_sum(values, n_points):
    """Sum ``values`` in a fixed order; compensated once ``n_points`` is large."""
    flat = np.ravel(values)
    if n_points >= COMPENSATED_SUM_MIN_N:
        if np.iscomplexobj(flat):
            return complex(math.fsum(flat.real), math.fsum(flat.imag))
        return math.fsum(flat)
    total = flat.sum()
    return complex(total) if np.iscomplexobj(flat) else float(total)


def log1m_rho_pow(rho, power):
    """Return log(1 - rho**(-power)) for rho > 1 without cancellation near rho = 1."""
    return math.log(-math.expm1(-power * math.log1p(rho - 1.0)))


def log_rho_sq_minus_one(rho):
    """Return log(rho**2 - 1); rho - 1 is exact for rho in (1, 2]."""
    return math.log(rho - 1.0) + math.log(rho + 1.0)


def max_workers():
    """Worker cap taken from EXTREMAL_THREADS (default 1, i.e. serial)."""
    raw = os.environ.get("EXTREMAL_THREADS", "1")
    try:
        value = int(raw)
    except ValueError:
        return 1
    return max(1, value)

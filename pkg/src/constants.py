"""
Named defaults for quadrature, root finding and sweeps.

All quantities are in units of the switching width sigma (sigma = 1), so
tolerances are absolute values of P/lambda^2 or X/lambda^2.
"""

import os
from typing import Optional


# ========== Quadrature ==========

DEFAULT_TOL_1D = 1e-9          # absolute, one-dimensional integrals
DEFAULT_TOL_2D = 1e-6          # absolute, iterated two-dimensional integrals

GAUSS_LOW_ORDER = 10           # embedded estimate rule
GAUSS_HIGH_ORDER = 20          # reported rule

MAX_PANELS = 200_000
MAX_REFINEMENTS = 60
TAIL_FRACTION = 0.1            # share of tol given to a discarded tail

GAUSSIAN_TRUNCATION_WIDTHS = 8.0


# ========== Roots and principal values ==========

DERIVATIVE_FLOOR = 1e-8
PV_WINDOW_MAX = 0.1
ROOT_BISECTION_XTOL = 1e-15     # PV windows must be centred on the pole to machine precision
ROOT_DEDUP_TOL = 1e-10


# ========== Kinematics ==========

SUPERLUMINAL_MARGIN = 1e-9     # reject v > 1 - margin


# ========== Detector response ==========

SHORT_CIRCUIT_BETA = 50.0
SHORT_CIRCUIT_ALPHA = 1e-4
SHORT_CIRCUIT_BOUND = 1e-12
EDR_NOISE_FACTOR = 10.0


# ========== Sweeps and output ==========

DEFAULT_SWEEP_POINTS = 60
FLOAT_FORMAT = "%.17g"
WORKERS_ENV_VAR = "UDW_WORKERS"

QUANTITIES = ("transition", "edr", "x", "concurrence")
OUTPUT_FORMATS = ("csv", "json")


# ========== Helper Functions ==========

def default_workers(environ: Optional[dict] = None) -> int:
    """
    Get the default worker count for sweeps.

    Reads the UDW_WORKERS environment variable, falling back to 1.

    Args:
        environ: Mapping to read instead of os.environ (for tests)

    Returns:
        Positive worker count

    Raises:
        ValueError: If the variable is set but is not a positive integer
    """
    env = os.environ if environ is None else environ
    raw = env.get(WORKERS_ENV_VAR)
    if raw is None or raw.strip() == "":
        return 1
    try:
        workers = int(raw)
    except ValueError:
        raise ValueError(f"{WORKERS_ENV_VAR} must be a positive integer, got {raw!r}")
    if workers < 1:
        raise ValueError(f"{WORKERS_ENV_VAR} must be a positive integer, got {raw!r}")
    return workers


def get_default_tolerance(dimension: int) -> float:
    """
    Get the default absolute tolerance for an integral of given dimension.

    Args:
        dimension: 1 for single integrals, 2 for iterated double integrals

    Returns:
        Default absolute tolerance

    Raises:
        ValueError: If dimension is not 1 or 2
    """
    if dimension == 1:
        return DEFAULT_TOL_1D
    if dimension == 2:
        return DEFAULT_TOL_2D
    raise ValueError(f"Integral dimension must be 1 or 2, got {dimension}")

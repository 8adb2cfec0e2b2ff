"""
Non-local correlation X and concurrence for pairs of detectors.

The general form, with lab times u (later event) and s > 0 (lag), is

    X = -1/(4 pi^2 gamma_A gamma_B) [T_AB + T_BA]

    T_AB = int du exp(-u^2/(2 gamma_B^2) - i Omega u/gamma_B)
             int_0^inf ds exp(-(u-s)^2/(2 gamma_A^2) - i Omega (u-s)/gamma_A) / (h_AB(u, s) - i0)

    h_AB = |x_A(u - s) - x_B(u)|^2 - s^2

T_BA swaps the labels. The outer u integral is Gaussian weighted; the
inner s integral is a principal value through the light-cone roots of h
plus their delta contributions. Special geometries reduce to
one-dimensional integrals in the lag alone.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Tuple

import numpy as np

from src.constants import DEFAULT_TOL_1D, DEFAULT_TOL_2D
from src.detector_response import transition_probability
from src.errors import ScenarioError
from src.motion import CircularTrajectory, Geometry, PairScenario
from src.numerics import (
    Envelope,
    IntegrandSpec,
    find_real_roots,
    integrate_gaussian_weighted,
    integrate_principal_value,
    integrate_semi_infinite,
)

logger = logging.getLogger(__name__)

_PI_32 = math.pi ** 1.5
_FOUR_PI_SQ = 4.0 * math.pi ** 2


class ReductionKind(Enum):
    """Which form of X was evaluated."""
    GENERAL = "general"                    # two-term double integral, coaxial
    SYNCHRONOUS = "synchronous"            # equal angular velocities, 1D
    EQUAL = "equal"                        # equal radius and |omega|, doubled single term
    COMOVING_EQUAL = "comoving-equal"      # identical orbits, 1D
    PERPENDICULAR = "perpendicular"        # two-term double integral, crossed planes
    UNIFORM_PAIR = "uniform-pair"          # uniform acceleration, 1D in proper time


@dataclass(frozen=True)
class XResult:
    """
    Non-local correlation X / lambda^2.

    Attributes:
        value: Complex X / lambda^2
        abs_error_estimate: Quadrature error plus truncation bounds
        light_cone_roots_encountered: Roots of the denominator (per slice maximum
            for the double integrals)
        reduction: Form that was evaluated
    """
    value: complex
    abs_error_estimate: float
    light_cone_roots_encountered: int
    reduction: ReductionKind

    @property
    def magnitude(self) -> float:
        return abs(self.value)


@dataclass(frozen=True)
class HarvestResult:
    """Transition probabilities, correlation and concurrence of a pair, all per lambda^2."""
    p_a: float
    p_b: float
    x: complex
    concurrence: float
    p_a_error: float
    p_b_error: float
    x_error: float
    reduction: ReductionKind


# ========== One-dimensional principal values ==========

def _oscillation_scale(*frequencies: float) -> Optional[float]:
    fastest = max(abs(f) for f in frequencies)
    return 2.0 * math.pi / fastest if fastest > 0 else None


def _scan_step(*omegas: float) -> float:
    return math.pi / (4.0 * max([1.0] + [abs(w) for w in omegas]))


def _light_cone_integral(numerator: Callable, h: Callable, spatial_max: float,
                         rate: float, center: float, scan_step: float,
                         oscillation_scale: Optional[float], tol: float,
                         roots: Optional[list] = None) -> Tuple[complex, float, int]:
    """
    int_0^inf numerator(s) / (h(s) - i0) ds with h = D(s) - s^2 and D <= spatial_max^2.

    Every root lies below S = spatial_max + 1; beyond it |1/h| <= 1/s and
    |numerator| <= exp(-rate (s - center)^2).
    """
    cutoff = spatial_max + 1.0
    if roots is None:
        roots = find_real_roots(h, 0.0, cutoff, scan_step)
    spec = IntegrandSpec(numerator, oscillation_scale=oscillation_scale)
    principal = integrate_principal_value(spec, h, roots, (0.0, cutoff), 0.5 * tol)

    def tail(s):
        return numerator(s) / h(s)

    tail_spec = IntegrandSpec(
        tail,
        envelope=Envelope(1.0, rate=rate, center=center, power=1.0, start=cutoff),
        oscillation_scale=oscillation_scale,
    )
    beyond = integrate_semi_infinite(tail_spec, 0.5 * tol, lower=cutoff)
    value = principal.total + beyond.value
    error = principal.abs_error_estimate + beyond.total_error
    return complex(value), error, len(roots)


def _regulated_light_cone_integral(numerator: Callable, h: Callable, spatial_max: float,
                                   rate: float, center: float, scan_step: float,
                                   oscillation_scale: Optional[float], tol: float,
                                   eps: float) -> Tuple[complex, float, int]:
    """
    int_0^inf numerator(s) / (D(s) - (s + i eps)^2) ds with h = D(s) - s^2.

    The light-cone roots of h become Lorentzian peaks of width ~eps and are
    made panel edges; no principal value is taken.
    """
    cutoff = spatial_max + 1.0
    roots = find_real_roots(h, 0.0, cutoff, scan_step)

    def integrand(s):
        s = np.asarray(s, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            value = numerator(s) / (h(s) + eps ** 2 - 2j * eps * s)
        return np.where(np.isfinite(value), value, 0.0)

    spec = IntegrandSpec(
        integrand,
        envelope=Envelope(2.0, rate=rate, center=center, power=1.0, start=cutoff),
        oscillation_scale=oscillation_scale,
    )
    result = integrate_semi_infinite(spec, tol, breakpoints=roots)
    return complex(result.value), result.total_error, len(roots)


# ========== General double integral ==========

def _lag_term(first: CircularTrajectory, second: CircularTrajectory, delta_max: float,
              omega_gap: float, tol: float,
              eps: Optional[float] = None) -> Tuple[complex, float, int]:
    """
    One term of the double integral: `second` switched at u, `first` at u - s.

    A positive eps replaces the principal value by the regulated lag s + i eps.

    Returns the term, its error estimate and the largest root count of any slice.
    """
    gamma_1, gamma_2 = first.gamma, second.gamma
    spatial_max = delta_max + first.R + second.R
    step = _scan_step(first.omega, second.omega)
    scale = _oscillation_scale(first.omega, second.omega, omega_gap / gamma_1, omega_gap / gamma_2)
    weight_span = math.sqrt(2.0 * math.pi) * gamma_2
    inner_tol = 0.1 * tol / weight_span
    inner_errors = [0.0]
    max_roots = [0]

    def inner(u: float) -> complex:
        x2, y2, z2 = second.position_at_lab_time(u)

        def h(s):
            x1, y1, z1 = first.position_at_lab_time(u - s)
            return (x1 - x2) ** 2 + (y1 - y2) ** 2 + (z1 - z2) ** 2 - np.asarray(s) ** 2

        def numerator(s):
            t = u - np.asarray(s, dtype=float)
            return np.exp(-0.5 * (t / gamma_1) ** 2 - 1j * omega_gap * t / gamma_1)

        if eps is None:
            value, error, n_roots = _light_cone_integral(
                numerator, h, spatial_max, 0.5 / gamma_1 ** 2, u, step, scale, inner_tol)
        else:
            value, error, n_roots = _regulated_light_cone_integral(
                numerator, h, spatial_max, 0.5 / gamma_1 ** 2, u, step, scale, inner_tol, eps)
        inner_errors[0] = max(inner_errors[0], error)
        max_roots[0] = max(max_roots[0], n_roots)
        return value * np.exp(-1j * omega_gap * u / gamma_2)

    outer = integrate_gaussian_weighted(inner, 0.0, gamma_2, 0.9 * tol,
                                        oscillation_scale=scale, vectorized=False)
    error = outer.total_error + weight_span * inner_errors[0]
    return complex(outer.value), error, max_roots[0]


def x_general(scenario: PairScenario, tol: float = DEFAULT_TOL_2D,
              doubled_single_term: bool = False) -> XResult:
    """
    Evaluate X for two circular orbits by the lab-time double integral.

    Args:
        scenario: Coaxial or perpendicular pair
        tol: Absolute tolerance on X / lambda^2
        doubled_single_term: Evaluate only T_BA and double it (valid when the
            two terms coincide: equal radii with omega_A = +-omega_B)

    Returns:
        XResult

    Raises:
        ScenarioError: For uniform pairs
        DegenerateRootError: If a light-cone root is tangential
        ConvergenceError: If a quadrature does not converge
    """
    if scenario.geometry is Geometry.UNIFORM_PAIR:
        raise ScenarioError("double-integral form needs circular orbits", field="geometry")
    a, b = scenario.detector_a, scenario.detector_b
    omega_gap = scenario.params.omega_gap
    prefactor = -1.0 / (_FOUR_PI_SQ * a.gamma * b.gamma)
    term_tol = tol / abs(prefactor) / 2.0

    if doubled_single_term:
        t_ba, err, roots = _lag_term(b, a, scenario.delta_d, omega_gap, term_tol)
        value = 2.0 * t_ba
        error = 2.0 * err
        reduction = ReductionKind.EQUAL
    else:
        t_ab, err_ab, roots_ab = _lag_term(a, b, scenario.delta_d, omega_gap, term_tol)
        t_ba, err_ba, roots_ba = _lag_term(b, a, scenario.delta_d, omega_gap, term_tol)
        value = t_ab + t_ba
        error = err_ab + err_ba
        roots = max(roots_ab, roots_ba)
        reduction = (ReductionKind.PERPENDICULAR if scenario.geometry is Geometry.PERPENDICULAR
                     else ReductionKind.GENERAL)
    logger.debug("X (%s): %d light-cone roots per slice at most", reduction.value, roots)
    return XResult(prefactor * value, abs(prefactor) * error, roots, reduction)


def _require(scenario: PairScenario, geometry: Geometry) -> None:
    if scenario.geometry is not geometry:
        raise ScenarioError(f"expected {geometry.value} geometry, got {scenario.geometry.value}",
                            field="geometry")


def _effective_omega(trajectory: CircularTrajectory) -> float:
    return 0.0 if trajectory.R == 0.0 else trajectory.omega


def _is_synchronous(scenario: PairScenario) -> bool:
    return _effective_omega(scenario.detector_a) == _effective_omega(scenario.detector_b)


def _is_equal(scenario: PairScenario) -> bool:
    a, b = scenario.detector_a, scenario.detector_b
    return a.R == b.R and abs(a.omega) == abs(b.omega)


def x_parallel(scenario: PairScenario, tol: float = DEFAULT_TOL_2D) -> XResult:
    """X for circular orbits in parallel planes (both terms of the double integral)."""
    _require(scenario, Geometry.COAXIAL)
    return x_general(scenario, tol)


def x_perpendicular(scenario: PairScenario, tol: float = DEFAULT_TOL_2D) -> XResult:
    """X for detector A in the xy-plane and detector B in the xz-plane."""
    _require(scenario, Geometry.PERPENDICULAR)
    return x_general(scenario, tol)


def x_parallel_equal(scenario: PairScenario, tol: float = DEFAULT_TOL_2D) -> XResult:
    """
    X for equal radii with omega_A = +-omega_B.

    Both terms of the double integral coincide, so one is evaluated and doubled.

    Raises:
        ScenarioError: If radii or |omega| differ
    """
    _require(scenario, Geometry.COAXIAL)
    if not _is_equal(scenario):
        raise ScenarioError("equal form needs R_A = R_B and omega_A = +-omega_B", field="detector_b")
    return x_general(scenario, tol, doubled_single_term=True)


# ========== One-dimensional reductions ==========

def _synchronous_parts(scenario: PairScenario):
    """Prefactor, numerator, denominator and bounds of the synchronous 1D form."""
    a, b = scenario.detector_a, scenario.detector_b
    omega = _effective_omega(a)
    omega_gap = scenario.params.omega_gap
    g_a, g_b = a.gamma, b.gamma
    S = g_a ** 2 + g_b ** 2
    prefactor = -math.exp(-omega_gap ** 2 * (g_a + g_b) ** 2 / (2.0 * S)) / (_PI_32 * math.sqrt(2.0 * S))
    phase = omega_gap * (g_a - g_b) / S
    constant = (a.R - b.R) ** 2 + scenario.delta_d ** 2
    cross = 4.0 * a.R * b.R

    def numerator(s):
        s = np.asarray(s, dtype=float)
        return np.cos(phase * s) * np.exp(-s * s / (2.0 * S))

    def spatial(s):
        # half-angle form, no 1 - cos cancellation
        return constant + cross * np.sin(0.5 * omega * np.asarray(s, dtype=float)) ** 2

    spatial_max = scenario.delta_d + a.R + b.R
    return prefactor, numerator, spatial, spatial_max, 0.5 / S, (omega, phase)


def x_parallel_synchronous(scenario: PairScenario, tol: float = DEFAULT_TOL_1D) -> XResult:
    """
    X for coaxial orbits with equal angular velocity; radii may differ.

        X = -exp(-Omega^2 (gamma_A + gamma_B)^2 / 2S) / (pi^(3/2) sqrt(2S))
            int_0^inf cos(Omega s (gamma_A - gamma_B)/S) exp(-s^2/2S) / (D(s) - s^2 - i0) ds

    with S = gamma_A^2 + gamma_B^2 and D = (R_A - R_B)^2 + dd^2 + 4 R_A R_B sin^2(omega s / 2).
    """
    _require(scenario, Geometry.COAXIAL)
    if not _is_synchronous(scenario):
        raise ScenarioError("synchronous form needs omega_A = omega_B", field="detector_b.omega")
    prefactor, numerator, spatial, spatial_max, rate, (omega, phase) = _synchronous_parts(scenario)

    def h(s):
        return spatial(s) - np.asarray(s, dtype=float) ** 2

    value, error, roots = _light_cone_integral(
        numerator, h, spatial_max, rate, 0.0, _scan_step(omega),
        _oscillation_scale(omega, phase), tol / abs(prefactor))
    return XResult(prefactor * value, abs(prefactor) * error, roots, ReductionKind.SYNCHRONOUS)


def x_parallel_comoving_equal(scenario: PairScenario, tol: float = DEFAULT_TOL_1D) -> XResult:
    """
    X for two identical coaxial orbits separated by delta_d.

        X = -exp(-Omega^2) / (2 pi^(3/2) gamma)
            int_0^inf exp(-s^2 / 4 gamma^2) / (dd^2 + 4 R^2 sin^2(omega s / 2) - s^2 - i0) ds
    """
    _require(scenario, Geometry.COAXIAL)
    a, b = scenario.detector_a, scenario.detector_b
    if not (a.R == b.R and _is_synchronous(scenario)):
        raise ScenarioError("comoving form needs identical orbits", field="detector_b")
    gamma = a.gamma
    omega = _effective_omega(a)
    prefactor = -math.exp(-scenario.params.omega_gap ** 2) / (2.0 * _PI_32 * gamma)
    dd2 = scenario.delta_d ** 2
    chord2 = 4.0 * a.R ** 2

    def numerator(s):
        s = np.asarray(s, dtype=float)
        return np.exp(-s * s / (4.0 * gamma ** 2))

    def h(s):
        s = np.asarray(s, dtype=float)
        return dd2 + chord2 * np.sin(0.5 * omega * s) ** 2 - s * s

    value, error, roots = _light_cone_integral(
        numerator, h, scenario.delta_d + 2.0 * a.R, 0.25 / gamma ** 2, 0.0, _scan_step(omega),
        _oscillation_scale(omega), tol / abs(prefactor))
    return XResult(prefactor * value, abs(prefactor) * error, roots, ReductionKind.COMOVING_EQUAL)


def _uniform_interval_squared(s, a: float):
    """(2/a)^2 sinh^2(a s / 2), the squared chord of a uniform worldline."""
    with np.errstate(over="ignore"):
        return (2.0 / a * np.sinh(0.5 * a * s)) ** 2


def x_uniform_pair(scenario: PairScenario, tol: float = DEFAULT_TOL_1D) -> XResult:
    """
    X for two detectors with equal uniform acceleration, separated transversely.

        X = -exp(-Omega^2) / (2 pi^(3/2))
            int_0^inf exp(-s^2/4) / (dd^2 - (4/a^2) sinh^2(a s/2) - i0) ds

    in proper time; the single root is s = (2/a) asinh(a dd / 2).
    """
    _require(scenario, Geometry.UNIFORM_PAIR)
    a = scenario.detector_a.a
    dd = scenario.delta_d
    prefactor = -math.exp(-scenario.params.omega_gap ** 2) / (2.0 * _PI_32)

    def numerator(s):
        s = np.asarray(s, dtype=float)
        return np.exp(-0.25 * s * s)

    def h(s):
        return dd ** 2 - _uniform_interval_squared(np.asarray(s, dtype=float), a)

    root = 2.0 / a * math.asinh(0.5 * a * dd)
    value, error, roots = _light_cone_integral(
        numerator, h, dd, 0.25, 0.0, _scan_step(), None, tol / abs(prefactor), roots=[root])
    return XResult(prefactor * value, abs(prefactor) * error, roots, ReductionKind.UNIFORM_PAIR)


def x_regulated_1d(scenario: PairScenario, eps: float, tol: float = 1e-8) -> complex:
    """
    One-dimensional reduction of X at finite regulator eps.

    The lag is shifted s -> s + i eps inside the interval, so the integrand
    is smooth and the principal-value machinery is not used. Extrapolating
    eps -> 0 gives an independent check of the PV-plus-delta evaluation.

    Supports synchronous coaxial pairs and uniform pairs.

    Raises:
        ScenarioError: For geometries without a one-dimensional reduction
    """
    if not eps > 0:
        raise ValueError(f"Regulator must be positive, got eps={eps}")
    if scenario.geometry is Geometry.UNIFORM_PAIR:
        a = scenario.detector_a.a
        dd = scenario.delta_d
        prefactor = -math.exp(-scenario.params.omega_gap ** 2) / (2.0 * _PI_32)
        rate = 0.25

        def numerator(s):
            return np.exp(-0.25 * np.asarray(s, dtype=float) ** 2)

        def denominator(s):
            z = np.asarray(s, dtype=float) + 1j * eps
            with np.errstate(over="ignore", invalid="ignore"):
                return dd ** 2 - (2.0 / a * np.sinh(0.5 * a * z)) ** 2

        spatial_max = dd
        roots = [2.0 / a * math.asinh(0.5 * a * dd)]
        scale = None
    elif scenario.geometry is Geometry.COAXIAL and _is_synchronous(scenario):
        prefactor, numerator, spatial, spatial_max, rate, (omega, phase) = _synchronous_parts(scenario)

        def denominator(s):
            s = np.asarray(s, dtype=float)
            return spatial(s) - (s + 1j * eps) ** 2

        roots = find_real_roots(lambda s: spatial(s) - np.asarray(s) ** 2, 0.0, spatial_max + 1.0,
                                _scan_step(omega))
        scale = _oscillation_scale(omega, phase)
    else:
        raise ScenarioError("no one-dimensional reduction for this scenario", field="geometry")

    def integrand(s):
        with np.errstate(invalid="ignore"):
            value = numerator(s) / denominator(s)
        return np.where(np.isfinite(value), value, 0.0)

    spec = IntegrandSpec(
        integrand,
        envelope=Envelope(2.0, rate=rate, power=1.0, start=spatial_max + 1.0),
        oscillation_scale=scale,
    )
    result = integrate_semi_infinite(spec, tol / abs(prefactor), breakpoints=roots)
    return prefactor * complex(result.value)


def x_regulated_general(scenario: PairScenario, eps: float, tol: float = DEFAULT_TOL_2D) -> complex:
    """
    Double-integral form of X at finite regulator eps.

    Both lag terms are evaluated with the lag shifted to s + i eps inside the
    interval. Extrapolating eps -> 0 checks the general, equal and
    perpendicular evaluations.

    Raises:
        ValueError: If eps is not positive
        ScenarioError: For uniform pairs
    """
    if not eps > 0:
        raise ValueError(f"Regulator must be positive, got eps={eps}")
    if scenario.geometry is Geometry.UNIFORM_PAIR:
        raise ScenarioError("double-integral form needs circular orbits", field="geometry")
    a, b = scenario.detector_a, scenario.detector_b
    omega_gap = scenario.params.omega_gap
    prefactor = -1.0 / (_FOUR_PI_SQ * a.gamma * b.gamma)
    term_tol = tol / abs(prefactor) / 2.0
    t_ab, _, _ = _lag_term(a, b, scenario.delta_d, omega_gap, term_tol, eps=eps)
    t_ba, _, _ = _lag_term(b, a, scenario.delta_d, omega_gap, term_tol, eps=eps)
    return prefactor * (t_ab + t_ba)


# ========== Concurrence and harvesting ==========

def concurrence(p_a: float, p_b: float, x: complex) -> float:
    """
    Concurrence 2 max{0, |X| - sqrt(P_A P_B)} per lambda^2.

    Slightly negative probabilities (quadrature noise) are clamped to zero.
    """
    product = max(p_a, 0.0) * max(p_b, 0.0)
    return 2.0 * max(0.0, abs(x) - math.sqrt(product))


def select_reduction(scenario: PairScenario) -> ReductionKind:
    """Cheapest form of X valid for the scenario."""
    if scenario.geometry is Geometry.UNIFORM_PAIR:
        return ReductionKind.UNIFORM_PAIR
    if scenario.geometry is Geometry.PERPENDICULAR:
        return ReductionKind.PERPENDICULAR
    a, b = scenario.detector_a, scenario.detector_b
    if _is_synchronous(scenario):
        return ReductionKind.COMOVING_EQUAL if a.R == b.R else ReductionKind.SYNCHRONOUS
    if _is_equal(scenario):
        return ReductionKind.EQUAL
    return ReductionKind.GENERAL


_X_FORMS = {
    ReductionKind.GENERAL: x_parallel,
    ReductionKind.SYNCHRONOUS: x_parallel_synchronous,
    ReductionKind.EQUAL: x_parallel_equal,
    ReductionKind.COMOVING_EQUAL: x_parallel_comoving_equal,
    ReductionKind.PERPENDICULAR: x_perpendicular,
    ReductionKind.UNIFORM_PAIR: x_uniform_pair,
}


def compute_x(scenario: PairScenario, tol: Optional[float] = None) -> XResult:
    """X through the cheapest valid reduction."""
    reduction = select_reduction(scenario)
    form = _X_FORMS[reduction]
    if tol is None:
        one_dimensional = reduction in (ReductionKind.SYNCHRONOUS, ReductionKind.COMOVING_EQUAL,
                                        ReductionKind.UNIFORM_PAIR)
        tol = DEFAULT_TOL_1D if one_dimensional else DEFAULT_TOL_2D
    logger.debug("X via %s reduction", reduction.value)
    return form(scenario, tol)


def harvest(scenario: PairScenario, tol: Optional[float] = None) -> HarvestResult:
    """
    Full harvesting calculation for a pair.

    Args:
        scenario: Validated pair
        tol: Tolerance for X (defaults by reduction dimension); transition
            probabilities use DEFAULT_TOL_1D

    Returns:
        HarvestResult with the reduction used
    """
    try:
        p_a = transition_probability(scenario.detector_a, scenario.params)
        p_b = transition_probability(scenario.detector_b, scenario.params)
        x = compute_x(scenario, tol)
    except (ValueError, ArithmeticError) as e:
        logger.warning("Harvesting failed for %s pair (delta_d=%g, Omega=%g): %s",
                       scenario.geometry.value, scenario.delta_d, scenario.params.omega_gap, e)
        raise
    return HarvestResult(
        p_a=p_a.value,
        p_b=p_b.value,
        x=x.value,
        concurrence=concurrence(p_a.value, p_b.value, x.value),
        p_a_error=p_a.total_error,
        p_b_error=p_b.total_error,
        x_error=x.abs_error_estimate,
        reduction=x.reduction,
    )

"""
Single-detector observables.

Transition probabilities (per lambda^2) for static, circular and uniformly
accelerated detectors with Gaussian switching, the response function, the
EDR (excitation-to-de-excitation ratio) temperature, and the asymptotic
formulas used to cross-check them.

The circular result is

    P = K * int_0^inf cos(beta x) exp(-alpha x^2)
            (x^2 - sin^2 x) / (x^2 (x^2 - v^2 sin^2 x)) dx + P_static

with alpha = 1/(omega gamma)^2, beta = 2 Omega / (gamma |omega|) and
K = v^2 gamma |omega| / (4 pi^(3/2)).
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Union

import numpy as np

from src.constants import (
    DEFAULT_TOL_1D,
    EDR_NOISE_FACTOR,
    SHORT_CIRCUIT_ALPHA,
    SHORT_CIRCUIT_BETA,
    SHORT_CIRCUIT_BOUND,
)
from src.errors import NonpositiveResponseError, PopulationInversionError
from src.motion import CircularTrajectory, DetectorParams, Trajectory, UniformTrajectory
from src.numerics import Envelope, IntegrandSpec, erfc, integrate_gaussian_weighted, integrate_semi_infinite

logger = logging.getLogger(__name__)

_PI_32 = math.pi ** 1.5
_SQRT_PI = math.sqrt(math.pi)


class EdrRegime(Enum):
    """Closed-form EDR temperature limits."""
    CIRCULAR_HIGH_SPEED = "circular-high-speed"
    CIRCULAR_SMALL_SPEED = "circular-small-speed"
    UNIFORM = "uniform"
    UNIFORM_FINITE_DURATION = "uniform-finite-duration"


@dataclass(frozen=True)
class ResponseInputs:
    """Parameters of the circular transition-probability integral."""
    params: DetectorParams
    alpha: float
    beta: float
    K_over_lambda2: float

    @classmethod
    def from_trajectory(cls, trajectory: CircularTrajectory, params: DetectorParams) -> "ResponseInputs":
        """
        Derive alpha, beta, K for a moving circular orbit.

        Raises:
            ValueError: If the orbit is static (alpha is undefined)
        """
        if trajectory.is_static:
            raise ValueError("Static orbit has no motion-dependent response term")
        v, gamma, _ = trajectory.kinematics()
        w = abs(trajectory.omega)
        return cls(
            params=params,
            alpha=1.0 / (w * gamma) ** 2,
            beta=2.0 * params.omega_gap / (gamma * w),
            K_over_lambda2=v * v * gamma * w / (4.0 * _PI_32),
        )


@dataclass(frozen=True)
class ResponseResult:
    """
    Transition probability with its numerical error budget.

    Attributes:
        value: P / lambda^2
        abs_error_estimate: Quadrature error of the motion-dependent term
        truncation_bound: Bound on the discarded tail
        evaluations: Integrand evaluations
        short_circuited: True when the oscillatory term was bounded, not integrated
    """
    value: float
    abs_error_estimate: float = 0.0
    truncation_bound: float = 0.0
    evaluations: int = 0
    short_circuited: bool = False

    @property
    def total_error(self) -> float:
        return self.abs_error_estimate + self.truncation_bound


# ========== Integrands ==========

def _sin_deficit_ratio(x):
    """(x^2 - sin^2 x) / x^4, accurate near zero."""
    x = np.asarray(x, dtype=float)
    x2 = x * x
    small = np.abs(x) < 0.1
    safe = np.where(small, 1.0, x)
    direct = (safe - np.sin(safe)) * (safe + np.sin(safe)) / safe ** 4
    series = ((1.0 / 6 - x2 / 120 + x2 ** 2 / 5040 - x2 ** 3 / 362880)
              * (2.0 - x2 / 6 + x2 ** 2 / 120 - x2 ** 3 / 5040))
    return np.where(small, series, direct)


def _csch_deficit(x):
    """1/x^2 - 1/sinh^2 x, accurate near zero and overflow-free."""
    x = np.asarray(x, dtype=float)
    x2 = x * x
    small = np.abs(x) < 0.1
    safe = np.where(small, 1.0, np.abs(x))
    csch = 2.0 * np.exp(-safe) / -np.expm1(-2.0 * safe)
    direct = 1.0 / safe ** 2 - csch ** 2
    series = 1.0 / 3 - x2 / 15 + 2.0 * x2 ** 2 / 189 - x2 ** 3 / 675
    return np.where(small, series, direct)


# ========== Transition probabilities ==========

def transition_probability_static(params: DetectorParams) -> float:
    """
    Transition probability of a detector at rest.

        P = (1/4pi) [exp(-Omega^2) - sqrt(pi) Omega erfc(Omega)]

    Args:
        params: Detector gap (in units of 1/sigma)

    Returns:
        P / lambda^2
    """
    omega = params.omega_gap
    if math.isinf(omega):
        return 0.0 if omega > 0 else math.inf
    return (math.exp(-omega * omega) - _SQRT_PI * omega * erfc(omega)) / (4.0 * math.pi)


def circular_response(trajectory: CircularTrajectory, params: DetectorParams,
                      tol: float = DEFAULT_TOL_1D) -> ResponseResult:
    """
    Transition probability of a circular orbit with its error budget.

    Args:
        trajectory: Circular orbit
        params: Detector gap
        tol: Absolute tolerance on P / lambda^2

    Returns:
        ResponseResult

    Raises:
        ConvergenceError: If the quadrature does not converge
    """
    static = transition_probability_static(params)
    if trajectory.is_static:
        return ResponseResult(static, evaluations=1)

    inputs = ResponseInputs.from_trajectory(trajectory, params)
    alpha, beta, K = inputs.alpha, inputs.beta, inputs.K_over_lambda2
    if abs(beta) > SHORT_CIRCUIT_BETA and alpha < SHORT_CIRCUIT_ALPHA:
        logger.warning("Oscillatory term bounded rather than integrated (alpha=%.3g, beta=%.3g)", alpha, beta)
        return ResponseResult(static, truncation_bound=SHORT_CIRCUIT_BOUND, evaluations=1,
                              short_circuited=True)

    v = trajectory.speed
    one_minus_v2 = 1.0 - v * v

    def integrand(x):
        q = _sin_deficit_ratio(x)
        return np.cos(beta * x) * np.exp(-alpha * x * x) * q / (one_minus_v2 + v * v * x * x * q)

    spec = IntegrandSpec(
        integrand,
        # x^2 - v^2 sin^2 x >= 3x^2/4 and x^2 - sin^2 x <= x^2 for x >= 2
        envelope=Envelope(4.0 / 3.0, rate=alpha, power=2.0, start=2.0),
        oscillation_scale=math.pi / max(1.0, abs(beta)),
    )
    result = integrate_semi_infinite(spec, tol / K)
    logger.debug("Circular response R=%g omega=%g: %d evaluations", trajectory.R, trajectory.omega,
                 result.evaluations)
    return ResponseResult(K * result.value + static, K * result.abs_error_estimate,
                          K * result.truncation_bound, result.evaluations)


def uniform_response(trajectory: UniformTrajectory, params: DetectorParams,
                     tol: float = DEFAULT_TOL_1D) -> ResponseResult:
    """
    Transition probability of a uniformly accelerated detector with its error budget.

        P = (a / 4pi^(3/2)) int_0^inf (1/x^2 - 1/sinh^2 x) cos(2 x Omega / a) exp(-x^2/a^2) dx
            + P_static
    """
    static = transition_probability_static(params)
    a = trajectory.a
    omega = params.omega_gap
    K = a / (4.0 * _PI_32)

    def integrand(x):
        return _csch_deficit(x) * np.cos(2.0 * omega * x / a) * np.exp(-(x / a) ** 2)

    spec = IntegrandSpec(
        integrand,
        envelope=Envelope(1.0, rate=1.0 / a ** 2, power=2.0, start=1.0),
        oscillation_scale=math.pi * a / abs(omega) if omega else None,
    )
    result = integrate_semi_infinite(spec, tol / K)
    return ResponseResult(K * result.value + static, K * result.abs_error_estimate,
                          K * result.truncation_bound, result.evaluations)


def transition_probability_circular(trajectory: CircularTrajectory, params: DetectorParams,
                                    tol: float = DEFAULT_TOL_1D) -> float:
    """Transition probability P / lambda^2 of a circular orbit."""
    return circular_response(trajectory, params, tol).value


def transition_probability_uniform(trajectory: UniformTrajectory, params: DetectorParams,
                                   tol: float = DEFAULT_TOL_1D) -> float:
    """Transition probability P / lambda^2 under uniform acceleration."""
    return uniform_response(trajectory, params, tol).value


def transition_probability(trajectory: Trajectory, params: DetectorParams,
                           tol: float = DEFAULT_TOL_1D) -> ResponseResult:
    """
    Transition probability for any supported trajectory.

    Args:
        trajectory: CircularTrajectory or UniformTrajectory
        params: Detector gap
        tol: Absolute tolerance

    Returns:
        ResponseResult

    Raises:
        TypeError: For unsupported trajectory types
    """
    if isinstance(trajectory, CircularTrajectory):
        return circular_response(trajectory, params, tol)
    if isinstance(trajectory, UniformTrajectory):
        return uniform_response(trajectory, params, tol)
    raise TypeError(f"Unsupported trajectory type: {type(trajectory).__name__}")


def transition_probability_direct(wightman: Callable, params: DetectorParams, eps: float,
                                  tol: float = DEFAULT_TOL_1D) -> complex:
    """
    Transition probability from the regulated Wightman function directly.

        P = sqrt(pi) int exp(-i Omega s) exp(-s^2/4) W(s - i eps) ds

    The result tends to the real transition probability as eps -> 0; the
    imaginary part measures the regulator error.

    Args:
        wightman: Map (dtau, eps) -> complex Wightman function
        params: Detector gap
        eps: Regulator
        tol: Absolute tolerance

    Returns:
        Complex P / lambda^2 at finite eps
    """
    omega = params.omega_gap

    def integrand(s):
        return np.exp(-1j * omega * s) * wightman(s, eps)

    result = integrate_gaussian_weighted(integrand, 0.0, math.sqrt(2.0), tol / _SQRT_PI)
    return _SQRT_PI * result.value


def response_function(P_over_lambda2: float, params: DetectorParams) -> float:
    """Response function F = P / (lambda^2 sigma)."""
    return P_over_lambda2 / params.sigma


# ========== EDR temperature ==========

def edr_temperature(F_plus: float, F_minus: float, omega_gap: float,
                    plus_error: float = 0.0) -> float:
    """
    Effective temperature from the excitation-to-de-excitation ratio.

        T = -Omega / log(F(Omega) / F(-Omega))

    Args:
        F_plus: Response at +Omega
        F_minus: Response at -Omega
        omega_gap: Positive gap
        plus_error: Numerical error of F_plus; F_plus below ten times it is noise

    Returns:
        Temperature in units of 1/sigma

    Raises:
        ValueError: If omega_gap is not positive
        NonpositiveResponseError: If F_plus or F_minus is at the noise floor
        PopulationInversionError: If F_plus >= F_minus
    """
    if not omega_gap > 0:
        raise ValueError(f"EDR temperature needs a positive gap, got {omega_gap}")
    if F_minus <= 0:
        raise NonpositiveResponseError(f"De-excitation response must be positive, got {F_minus:.6g}")
    if F_plus <= 0 or F_plus < EDR_NOISE_FACTOR * plus_error:
        raise NonpositiveResponseError(
            f"Excitation response {F_plus:.6g} is below the noise floor {EDR_NOISE_FACTOR * plus_error:.3g}"
        )
    if F_plus >= F_minus:
        raise PopulationInversionError(
            f"Excitation {F_plus:.6g} >= de-excitation {F_minus:.6g}: no positive temperature"
        )
    return -omega_gap / math.log(F_plus / F_minus)


def edr_temperature_for(trajectory: Trajectory, params: DetectorParams,
                        tol: float = DEFAULT_TOL_1D) -> float:
    """EDR temperature of a trajectory, from quadrature at +|Omega| and -|Omega|."""
    gap = abs(params.omega_gap)
    plus = transition_probability(trajectory, params.with_gap(gap), tol)
    minus = transition_probability(trajectory, params.with_gap(-gap), tol)
    return edr_temperature(response_function(plus.value, params),
                           response_function(minus.value, params),
                           gap, plus_error=response_function(plus.total_error, params))


# ========== Asymptotic formulas ==========

def _acceleration(trajectory: Trajectory) -> float:
    if isinstance(trajectory, CircularTrajectory):
        return trajectory.acceleration
    return trajectory.a


def asymptotic_p_large_acceleration(trajectory: Trajectory, params: DetectorParams) -> float:
    """
    Large-acceleration, high-speed form of the transition probability.

        P ~ a exp(-2 sqrt(3) |Omega| / a) / (8 sqrt(3 pi)) + theta(-Omega) |Omega| / (2 sqrt(pi))
    """
    a = _acceleration(trajectory)
    omega = params.omega_gap
    step = abs(omega) / (2.0 * _SQRT_PI) if omega < 0 else 0.0
    if a == 0.0:
        return step
    return a * math.exp(-2.0 * math.sqrt(3.0) * abs(omega) / a) / (8.0 * math.sqrt(3.0 * math.pi)) + step


def asymptotic_p_small_acceleration(trajectory: Trajectory, params: DetectorParams) -> float:
    """Saddle-point form a^2 exp(-Omega^2) / (24 pi) + P_static."""
    a = _acceleration(trajectory)
    omega = params.omega_gap
    return a * a * math.exp(-omega * omega) / (24.0 * math.pi) + transition_probability_static(params)


def asymptotic_edr_from_large_acceleration(trajectory: Trajectory, params: DetectorParams) -> float:
    """
    EDR temperature built from the large-acceleration formula.

    Evaluated in log space, so it stays finite when exp(-2 sqrt(3) Omega / a)
    underflows.
    """
    a = _acceleration(trajectory)
    omega = abs(params.omega_gap)
    if not omega > 0 or not a > 0:
        raise ValueError(f"Need positive gap and acceleration, got Omega={omega}, a={a}")
    log_excited = math.log(a / (8.0 * math.sqrt(3.0 * math.pi))) - 2.0 * math.sqrt(3.0) * omega / a
    log_deexcited = np.logaddexp(log_excited, math.log(omega / (2.0 * _SQRT_PI)))
    return -omega / (log_excited - float(log_deexcited))


def get_regime(regime: Union[EdrRegime, str]) -> EdrRegime:
    """
    Look up an EDR regime by enum or tag.

    Raises:
        ValueError: If the tag is unknown
    """
    if isinstance(regime, EdrRegime):
        return regime
    try:
        return EdrRegime(regime)
    except ValueError:
        known = ", ".join(r.value for r in EdrRegime)
        raise ValueError(f"Unknown EDR regime: {regime!r} (expected one of {known})")


def asymptotic_edr_limits(trajectory: Trajectory, params: DetectorParams,
                          regime: Union[EdrRegime, str]) -> float:
    """
    Closed-form limits of the EDR temperature.

    Args:
        trajectory: Detector trajectory (supplies a, and v for the small-speed limit)
        params: Detector gap
        regime: Which limit to evaluate

    Returns:
        a/(2 sqrt 3), a v sqrt(1 - v^2)/6, a/(2 pi) or (a + pi |Omega|)/(2 pi)
    """
    regime = get_regime(regime)
    a = _acceleration(trajectory)
    if regime is EdrRegime.CIRCULAR_HIGH_SPEED:
        return a / (2.0 * math.sqrt(3.0))
    if regime is EdrRegime.CIRCULAR_SMALL_SPEED:
        if not isinstance(trajectory, CircularTrajectory):
            raise ValueError("Small-speed limit needs a circular trajectory")
        v = trajectory.speed
        return a * v * math.sqrt(1.0 - v * v) / 6.0
    if regime is EdrRegime.UNIFORM:
        return a / (2.0 * math.pi)
    return (a + math.pi * abs(params.omega_gap)) / (2.0 * math.pi)

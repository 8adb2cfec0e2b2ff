"""
Detector worldlines, kinematics and Wightman functions.

Circular orbits are described by radius R and signed angular velocity omega
(lab frame); uniform acceleration by its proper acceleration a. Only two of
(R, omega, v, gamma, a) are independent for a circular orbit:

    v = |omega| R,  gamma = 1/sqrt(1 - v^2),  a = gamma^2 omega^2 R = gamma^2 v^2 / R

Everything is expressed in units of the switching width sigma.
"""

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import optimize

from src.constants import SUPERLUMINAL_MARGIN
from src.errors import AnalyticityError, CoincidentDetectorError, ScenarioError, SuperluminalError

_FOUR_PI_SQ = 4.0 * math.pi ** 2


class OrbitPlane(Enum):
    """Orientation of a circular orbit."""
    XY = "xy"    # centre (0, 0, offset)
    XZ = "xz"    # centre (offset, 0, 0)


class Geometry(Enum):
    """Relative placement of the two detectors of a pair."""
    COAXIAL = "coaxial"
    PERPENDICULAR = "perpendicular"
    UNIFORM_PAIR = "uniform-pair"


class Kinematics(NamedTuple):
    v: float
    gamma: float
    a: float


def _gamma(v: float) -> float:
    return 1.0 / math.sqrt(1.0 - v * v)


def _check_speed(v: float) -> None:
    if not v < 1.0 - SUPERLUMINAL_MARGIN:
        raise SuperluminalError(f"Speed must satisfy v < 1, got v={v}")


# ========== Trajectories ==========

@dataclass(frozen=True)
class CircularTrajectory:
    """
    Circular orbit with zero initial phase.

    Attributes:
        R: Orbit radius
        omega: Signed lab-frame angular velocity
        plane: Orbit plane
        offset: Displacement of the orbit centre (along z for XY, along x for XZ)
    """
    R: float
    omega: float
    plane: OrbitPlane = OrbitPlane.XY
    offset: float = 0.0

    def __post_init__(self):
        if self.R < 0:
            raise ValueError(f"Radius must be non-negative, got R={self.R}")
        _check_speed(abs(self.omega) * self.R)

    # ----- kinematics -----

    @property
    def speed(self) -> float:
        return abs(self.omega) * self.R

    @property
    def gamma(self) -> float:
        return _gamma(self.speed)

    @property
    def acceleration(self) -> float:
        return self.gamma ** 2 * self.omega ** 2 * self.R

    @property
    def is_static(self) -> bool:
        return self.speed == 0.0

    def kinematics(self) -> Kinematics:
        """Return the derived (v, gamma, a) triple."""
        return kinematics(self)

    @classmethod
    def from_acceleration_speed(cls, a: float, v: float, direction: int = 1,
                                **placement) -> "CircularTrajectory":
        """
        Build an orbit from proper acceleration and speed.

        Raises:
            SuperluminalError: If v >= 1
            ValueError: If exactly one of a, v vanishes
        """
        _check_speed(v)
        if a < 0 or v < 0:
            raise ValueError(f"Acceleration and speed must be non-negative, got a={a}, v={v}")
        if a == 0.0 and v == 0.0:
            return cls(0.0, 0.0, **placement)
        if a == 0.0 or v == 0.0:
            raise ValueError(f"A circular orbit needs a and v both zero or both positive, got a={a}, v={v}")
        gamma_sq = 1.0 / (1.0 - v * v)
        R = gamma_sq * v * v / a
        return cls(R, math.copysign(v / R, direction), **placement)

    @classmethod
    def from_acceleration_radius(cls, a: float, R: float, direction: int = 1,
                                 **placement) -> "CircularTrajectory":
        """
        Build an orbit from proper acceleration and radius.

        Solves a R = v^2 / (1 - v^2) for v.
        """
        if a < 0 or R < 0:
            raise ValueError(f"Acceleration and radius must be non-negative, got a={a}, R={R}")
        if R == 0.0:
            if a != 0.0:
                raise ValueError(f"Zero radius requires zero acceleration, got a={a}")
            return cls(0.0, 0.0, **placement)
        v = math.sqrt(a * R / (1.0 + a * R))
        return cls(R, math.copysign(v / R, direction), **placement)

    @classmethod
    def from_angular_velocity_speed(cls, omega: float, v: float,
                                    **placement) -> "CircularTrajectory":
        """Build an orbit from signed angular velocity and speed."""
        _check_speed(v)
        if v < 0:
            raise ValueError(f"Speed must be non-negative, got v={v}")
        if omega == 0.0:
            if v != 0.0:
                raise ValueError(f"Zero angular velocity requires zero speed, got v={v}")
            return cls(0.0, 0.0, **placement)
        return cls(v / abs(omega), omega, **placement)

    # ----- geometry -----

    def position_at_lab_time(self, t) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Spatial position (x, y, z) at lab time t (array-friendly)."""
        t = np.asarray(t, dtype=float)
        phase = self.omega * t
        c = self.R * np.cos(phase)
        s = self.R * np.sin(phase)
        zero = np.zeros_like(t)
        if self.plane is OrbitPlane.XY:
            return c, s, zero + self.offset
        return c + self.offset, zero, s

    def worldline(self, tau) -> Tuple[np.ndarray, ...]:
        """Event (t, x, y, z) at proper time tau."""
        t = self.gamma * np.asarray(tau, dtype=float)
        return (t,) + self.position_at_lab_time(t)


@dataclass(frozen=True)
class UniformTrajectory:
    """
    Uniformly accelerated worldline t = sinh(a tau)/a, x = cosh(a tau)/a.

    Attributes:
        a: Proper acceleration
        offset: Transverse displacement along z
    """
    a: float
    offset: float = 0.0

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"Uniform acceleration must be positive, got a={self.a}")

    def worldline(self, tau) -> Tuple[np.ndarray, ...]:
        """Event (t, x, y, z) at proper time tau."""
        tau = np.asarray(tau, dtype=float)
        t = np.sinh(self.a * tau) / self.a
        x = np.cosh(self.a * tau) / self.a
        return t, x, np.zeros_like(tau), np.zeros_like(tau) + self.offset


Trajectory = Union[CircularTrajectory, UniformTrajectory]


@dataclass(frozen=True)
class DetectorParams:
    """
    Detector gap and switching width.

    Attributes:
        omega_gap: Energy gap Omega (signed; negative means initially excited)
        sigma: Gaussian switching width; all other inputs are in its units
    """
    omega_gap: float
    sigma: float = 1.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"Switching width must be positive, got sigma={self.sigma}")
        if not math.isfinite(self.omega_gap):
            raise ValueError(f"Energy gap must be finite, got {self.omega_gap}")

    def with_gap(self, omega_gap: float) -> "DetectorParams":
        return replace(self, omega_gap=omega_gap)


@dataclass(frozen=True)
class PairScenario:
    """
    Two detectors sharing gap and switching.

    Detector A is centred at the origin in the xy-plane. Detector B is
    displaced by delta_d: along z in the same orientation (coaxial), or along
    x with its orbit in the xz-plane (perpendicular). Uniform pairs are
    separated by delta_d along z. Use the factory classmethods to get the
    placement right.
    """
    detector_a: Trajectory
    detector_b: Trajectory
    geometry: Geometry
    delta_d: float
    params: DetectorParams

    def __post_init__(self):
        if self.delta_d < 0:
            raise ScenarioError(f"must be non-negative, got {self.delta_d}", field="delta_d")
        a, b = self.detector_a, self.detector_b
        if self.geometry is Geometry.UNIFORM_PAIR:
            if not (isinstance(a, UniformTrajectory) and isinstance(b, UniformTrajectory)):
                raise ScenarioError("uniform-pair geometry needs two uniform trajectories", field="geometry")
            if not math.isclose(a.a, b.a, rel_tol=1e-12):
                raise ScenarioError(f"uniform pair needs equal accelerations, got {a.a} and {b.a}",
                                    field="detector_b.a")
            if self.delta_d == 0.0:
                raise CoincidentDetectorError("Uniform pair with delta_d=0 shares one worldline")
            return

        if not (isinstance(a, CircularTrajectory) and isinstance(b, CircularTrajectory)):
            raise ScenarioError(f"{self.geometry.value} geometry needs two circular trajectories",
                                field="geometry")
        expected_b = OrbitPlane.XY if self.geometry is Geometry.COAXIAL else OrbitPlane.XZ
        if a.plane is not OrbitPlane.XY or a.offset != 0.0:
            raise ScenarioError("detector A must orbit in the xy-plane about the origin", field="detector_a")
        if b.plane is not expected_b or not math.isclose(b.offset, self.delta_d, abs_tol=1e-15):
            raise ScenarioError(f"detector B must orbit in the {expected_b.value}-plane at offset delta_d",
                                field="detector_b")
        if self.delta_d == 0.0 and a.R == b.R and (a.R == 0.0 or (
                self.geometry is Geometry.COAXIAL and a.omega == b.omega)):
            raise CoincidentDetectorError(
                f"Detectors share one worldline (R={a.R}, omega={a.omega}, delta_d=0)"
            )

    @classmethod
    def coaxial(cls, detector_a: CircularTrajectory, detector_b: CircularTrajectory,
                delta_d: float, params: DetectorParams) -> "PairScenario":
        return cls(replace(detector_a, plane=OrbitPlane.XY, offset=0.0),
                   replace(detector_b, plane=OrbitPlane.XY, offset=delta_d),
                   Geometry.COAXIAL, delta_d, params)

    @classmethod
    def perpendicular(cls, detector_a: CircularTrajectory, detector_b: CircularTrajectory,
                      delta_d: float, params: DetectorParams) -> "PairScenario":
        return cls(replace(detector_a, plane=OrbitPlane.XY, offset=0.0),
                   replace(detector_b, plane=OrbitPlane.XZ, offset=delta_d),
                   Geometry.PERPENDICULAR, delta_d, params)

    @classmethod
    def uniform_pair(cls, a: float, delta_d: float, params: DetectorParams) -> "PairScenario":
        return cls(UniformTrajectory(a), UniformTrajectory(a, offset=delta_d),
                   Geometry.UNIFORM_PAIR, delta_d, params)

    def swapped(self) -> "PairScenario":
        """The same pair with the detector labels exchanged (coaxial and uniform only)."""
        if self.geometry is Geometry.PERPENDICULAR:
            raise ScenarioError("perpendicular pairs are not symmetric under relabelling", field="geometry")
        if self.geometry is Geometry.UNIFORM_PAIR:
            return self
        return PairScenario.coaxial(self.detector_b, self.detector_a, self.delta_d, self.params)


# ========== Kinematics ==========

def kinematics(trajectory: CircularTrajectory) -> Kinematics:
    """
    Derive speed, Lorentz factor and proper acceleration of a circular orbit.

    A zero radius is static whatever omega is.

    Args:
        trajectory: Circular orbit

    Returns:
        Kinematics(v, gamma, a)
    """
    v = trajectory.speed
    _check_speed(v)
    gamma = _gamma(v)
    return Kinematics(v, gamma, gamma ** 2 * trajectory.omega ** 2 * trajectory.R)


# ========== Wightman functions ==========

def wightman_minkowski(dt, dx_squared, eps: float):
    """Vacuum Wightman function -1/(4 pi^2) / ((dt - i eps)^2 - |dx|^2)."""
    return -1.0 / (_FOUR_PI_SQ * ((dt - 1j * eps) ** 2 - dx_squared))


def wightman_circular(dtau, trajectory: CircularTrajectory, eps: float):
    """
    Wightman function along a circular orbit as a function of proper-time lag.

        W = -1/(4 pi^2) / ((gamma dtau - i eps)^2 - 4 R^2 sin^2(gamma omega dtau / 2))

    dtau may be complex (analytic continuation) or an array.
    """
    if not eps > 0:
        raise ValueError(f"Regulator must be positive, got eps={eps}")
    gamma = trajectory.gamma
    chord = 2.0 * trajectory.R * np.sin(0.5 * gamma * trajectory.omega * dtau)
    return -1.0 / (_FOUR_PI_SQ * ((gamma * dtau - 1j * eps) ** 2 - chord ** 2))


def wightman_uniform(dtau, a: float, eps: float):
    """
    Wightman function along a uniformly accelerated worldline.

        W = -(a^2 / 16 pi^2) / sinh^2(a (dtau - i eps) / 2)

    a = 0 gives the static result. dtau may be complex or an array.
    """
    if not eps > 0:
        raise ValueError(f"Regulator must be positive, got eps={eps}")
    if a < 0:
        raise ValueError(f"Acceleration must be non-negative, got a={a}")
    z = dtau - 1j * eps
    if a == 0.0:
        interval = z
    else:
        interval = (2.0 / a) * np.sinh(0.5 * a * z)
    return -1.0 / (_FOUR_PI_SQ * interval ** 2)


def circular_analyticity_strip(trajectory: CircularTrajectory) -> float:
    """
    Half-width of the lower strip in which the circular Wightman function is analytic.

    The nearest singularity on the negative imaginary axis is at
    dtau = -2 i x0 / (gamma |omega|) with sinh(x0)/x0 = 1/v. A static
    orbit has no singularity off the real axis.
    """
    v = trajectory.speed
    if v == 0.0:
        return math.inf

    def excess(x):
        return math.sinh(x) / x - 1.0 / v

    hi = 1.0
    while excess(hi) < 0:
        hi *= 2.0
    x0 = optimize.brentq(excess, 1e-12, hi, xtol=1e-14)
    return 2.0 * x0 / (trajectory.gamma * abs(trajectory.omega))


def uniform_analyticity_strip(a: float) -> float:
    """Half-width 2 pi / a of the strip where the uniform Wightman function is analytic."""
    return math.inf if a == 0.0 else 2.0 * math.pi / a


def kms_defect(wightman: Callable, T: float, sample_taus: Sequence[float],
               strip_width: Optional[float] = None) -> float:
    """
    Measure how far a Wightman function is from the KMS condition at temperature T.

    Computes max |W(tau - i/T, tau') - W(tau', tau)| over distinct sample
    pairs, normalised by max |W(tau', tau)|.

    Args:
        wightman: Two-argument map (tau, tau') -> complex, analytic in tau
        T: Temperature (math.inf for no shift)
        sample_taus: Proper times; all ordered pairs of distinct entries are used
        strip_width: Analyticity strip half-width of the Wightman function

    Returns:
        Non-negative defect; zero means KMS holds

    Raises:
        AnalyticityError: If 1/T exceeds the analyticity strip
    """
    if not T > 0:
        raise ValueError(f"Temperature must be positive, got T={T}")
    shift = 0.0 if math.isinf(T) else 1.0 / T
    if strip_width is not None and shift > strip_width * (1.0 + 1e-12):
        raise AnalyticityError(
            f"Imaginary shift 1/T={shift:.6g} exceeds the analyticity strip {strip_width:.6g}"
        )
    pairs = [(t, tp) for t in sample_taus for tp in sample_taus if t != tp]
    if not pairs:
        raise ValueError("KMS check needs at least two distinct sample times")
    shifted = np.array([wightman(t - 1j * shift, tp) for t, tp in pairs])
    reference = np.array([wightman(tp, t) for t, tp in pairs])
    return float(np.max(np.abs(shifted - reference)) / np.max(np.abs(reference)))

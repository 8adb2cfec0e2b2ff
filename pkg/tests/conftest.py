"""
Shared pytest fixtures for the udw-harvest test suite.

This module provides common fixtures used across multiple test files:
- Detector parameters and trajectories for the standard regimes
- Detector pairs for each geometry
- Scenario files written to temporary directories

Fixture Scoping Strategy:
- session scope: Immutable test data (trajectories, parameters, pairs)
  Built once per test session and reused across all tests.
  Safe because every value type is a frozen dataclass.

- function scope (default): Temporary files and directories
  Created fresh for each test to ensure test isolation.
"""

import json

import pytest

from src.motion import CircularTrajectory, DetectorParams, PairScenario, UniformTrajectory


@pytest.fixture(scope="session")
def gap_params():
    """
    Provide the gap used throughout the figure presets (Omega sigma = 0.1).

    Note: Uses session scope - DetectorParams is frozen.
    """
    return DetectorParams(0.1)


@pytest.fixture(scope="session")
def circular_unit():
    """
    Provide a circular orbit with a = 1 and R = 0.5.

    This is the workhorse orbit of the separation figures (v^2 = 1/3).
    """
    return CircularTrajectory.from_acceleration_radius(1.0, 0.5)


@pytest.fixture(scope="session")
def uniform_unit():
    """Provide a uniformly accelerated worldline with a = 1."""
    return UniformTrajectory(1.0)


@pytest.fixture(scope="session")
def comoving_pair(circular_unit, gap_params):
    """
    Provide two identical co-rotating orbits separated by delta_d = 0.1.

    Every reduction of X applies to this pair.
    """
    return PairScenario.coaxial(circular_unit, circular_unit, 0.1, gap_params)


@pytest.fixture(scope="session")
def counter_rotating_pair(gap_params):
    """Provide equal orbits (a = 1, R = 0.5) rotating in opposite senses, delta_d = 0.1."""
    a = CircularTrajectory.from_acceleration_radius(1.0, 0.5)
    b = CircularTrajectory.from_acceleration_radius(1.0, 0.5, direction=-1)
    return PairScenario.coaxial(a, b, 0.1, gap_params)


@pytest.fixture(scope="session")
def static_pair(gap_params):
    """Provide two detectors at rest separated by delta_d = 0.5."""
    rest = CircularTrajectory(0.0, 0.0)
    return PairScenario.coaxial(rest, rest, 0.5, gap_params)


@pytest.fixture(scope="session")
def uniform_pair(gap_params):
    """Provide two uniformly accelerated detectors with a = 1, delta_d = 0.1."""
    return PairScenario.uniform_pair(1.0, 0.1, gap_params)


@pytest.fixture
def write_scenario(tmp_path):
    """
    Provide a helper that writes a scenario dict (or raw text) to a JSON file.

    Returns:
        Function (content, name="scenario.json") -> path string
    """
    def _write(content, name="scenario.json"):
        path = tmp_path / name
        text = content if isinstance(content, str) else json.dumps(content, indent=2)
        path.write_text(text)
        return str(path)
    return _write


@pytest.fixture
def single_scenario_dict():
    """Provide a minimal single-detector scenario dict (static, Omega = 1)."""
    return {
        "geometry": "single",
        "omega_gap": 1.0,
        "detector_a": {"motion": "circular", "R": 0.0, "omega": 0.0},
    }


@pytest.fixture
def static_pair_dict():
    """Provide a minimal static-pair scenario dict."""
    return {
        "geometry": "coaxial",
        "omega_gap": 0.1,
        "delta_d": 0.5,
        "detector_a": {"motion": "circular", "R": 0.0, "omega": 0.0},
        "detector_b": {"motion": "circular", "R": 0.0, "omega": 0.0},
    }

"""
Tests for the non-local correlation X and the concurrence.

The static pair has a closed form in terms of the Dawson function,

    X = -exp(-Omega^2) / (2 pi d) [D(d/2) + i (sqrt(pi)/2) exp(-d^2/4)],

which anchors the one-dimensional reductions. The double integrals are
checked against them and marked slow.
"""

import logging
import math
from unittest.mock import patch

import numpy as np
import pytest
from scipy.special import dawsn

from src.errors import ConvergenceError, ScenarioError
from src.detector_response import transition_probability_static
from src.harvesting import (
    ReductionKind,
    compute_x,
    concurrence,
    harvest,
    select_reduction,
    x_general,
    x_parallel,
    x_parallel_comoving_equal,
    x_parallel_equal,
    x_parallel_synchronous,
    x_perpendicular,
    x_regulated_1d,
    x_regulated_general,
    x_uniform_pair,
)
from src.motion import CircularTrajectory, DetectorParams, PairScenario
from src.numerics import richardson_extrapolate


def static_x(delta_d, omega_gap):
    """Closed-form X for two detectors at rest."""
    return -math.exp(-omega_gap ** 2) / (2 * math.pi * delta_d) * complex(
        dawsn(delta_d / 2), 0.5 * math.sqrt(math.pi) * math.exp(-delta_d ** 2 / 4))


def extrapolated_x(scenario, eps_values=(0.02, 0.01, 0.005, 0.0025)):
    pairs = [(eps, x_regulated_1d(scenario, eps)) for eps in eps_values]
    return richardson_extrapolate(pairs)[0]


class TestSelectReduction:
    """Test select_reduction() across geometries."""

    def test_static_pair(self, static_pair):
        """Test that detectors at rest use the comoving form."""
        assert select_reduction(static_pair) is ReductionKind.COMOVING_EQUAL

    def test_comoving(self, comoving_pair):
        """Test that identical orbits use the comoving form."""
        assert select_reduction(comoving_pair) is ReductionKind.COMOVING_EQUAL

    def test_counter_rotating(self, counter_rotating_pair):
        """Test that opposite senses on equal orbits use the doubled single term."""
        assert select_reduction(counter_rotating_pair) is ReductionKind.EQUAL

    def test_synchronous_unequal_radii(self, gap_params):
        """Test that equal omega with different radii uses the synchronous form."""
        pair = PairScenario.coaxial(CircularTrajectory(0.5, 1.0), CircularTrajectory(0.2, 1.0), 0.1, gap_params)
        assert select_reduction(pair) is ReductionKind.SYNCHRONOUS

    def test_general(self, gap_params):
        """Test that unrelated orbits need the double integral."""
        pair = PairScenario.coaxial(CircularTrajectory(0.5, 1.0), CircularTrajectory(0.2, 2.0), 0.1, gap_params)
        assert select_reduction(pair) is ReductionKind.GENERAL

    def test_perpendicular(self, circular_unit, gap_params):
        """Test that crossed planes always use the double integral."""
        pair = PairScenario.perpendicular(circular_unit, circular_unit, 0.1, gap_params)
        assert select_reduction(pair) is ReductionKind.PERPENDICULAR

    def test_uniform(self, uniform_pair):
        """Test the uniform-pair form."""
        assert select_reduction(uniform_pair) is ReductionKind.UNIFORM_PAIR


class TestOneDimensionalForms:
    """Test the lag-only reductions of X."""

    def test_static_closed_form(self, static_pair):
        """Test X for two detectors at rest against the Dawson closed form."""
        result = x_parallel_comoving_equal(static_pair)
        assert result.value == pytest.approx(static_x(0.5, 0.1), abs=1e-8)
        assert result.light_cone_roots_encountered == 1
        assert result.reduction is ReductionKind.COMOVING_EQUAL

    def test_static_closed_form_other_gap(self):
        """Test the closed form at a larger gap and separation."""
        rest = CircularTrajectory(0.0, 0.0)
        pair = PairScenario.coaxial(rest, rest, 2.0, DetectorParams(1.0))
        assert x_parallel_comoving_equal(pair).value == pytest.approx(static_x(2.0, 1.0), abs=1e-8)

    def test_comoving_matches_synchronous(self, comoving_pair):
        """Test that the comoving form equals the synchronous form for identical orbits."""
        comoving = x_parallel_comoving_equal(comoving_pair).value
        synchronous = x_parallel_synchronous(comoving_pair).value
        assert synchronous == pytest.approx(comoving, rel=1e-6)

    def test_comoving_matches_regulated(self, comoving_pair):
        """Test the principal-value split against the extrapolated regulated integral."""
        expected = extrapolated_x(comoving_pair)
        assert x_parallel_comoving_equal(comoving_pair).value == pytest.approx(expected, abs=1e-4)

    def test_synchronous_matches_regulated(self, gap_params):
        """Test unequal radii against the extrapolated regulated integral."""
        pair = PairScenario.coaxial(CircularTrajectory(0.5, 1.0), CircularTrajectory(0.2, 1.0), 0.3, gap_params)
        expected = extrapolated_x(pair)
        assert x_parallel_synchronous(pair).value == pytest.approx(expected, abs=1e-4)

    def test_uniform_matches_regulated(self, uniform_pair):
        """Test the uniform pair against the extrapolated regulated integral."""
        expected = extrapolated_x(uniform_pair)
        assert x_uniform_pair(uniform_pair).value == pytest.approx(expected, abs=1e-4)

    def test_uniform_small_acceleration_is_static(self):
        """Test that a -> 0 reproduces the static pair."""
        pair = PairScenario.uniform_pair(1e-4, 0.5, DetectorParams(0.1))
        assert x_uniform_pair(pair).value == pytest.approx(static_x(0.5, 0.1), abs=1e-7)

    def test_magnitude_decreases_with_separation(self, gap_params):
        """Test that |X| falls off as the detectors move apart."""
        traj = CircularTrajectory.from_acceleration_radius(1.0, 0.5)
        values = [x_parallel_comoving_equal(PairScenario.coaxial(traj, traj, d, gap_params)).magnitude
                  for d in (0.1, 0.5, 1.0, 2.0)]
        assert all(x > y for x, y in zip(values, values[1:]))

    def test_synchronous_small_unequal_radii(self):
        """Test R_A=0.1, R_B=0.2 at delta_d=0, where the root sits close to the origin."""
        pair = PairScenario.coaxial(CircularTrajectory(0.1, 1.0), CircularTrajectory(0.2, 1.0), 0.0,
                                    DetectorParams(0.1))
        result = x_parallel_synchronous(pair)
        assert result.value == pytest.approx(-0.0785 - 1.3892j, abs=1e-3)
        assert result.value == pytest.approx(x_parallel_synchronous(pair, tol=1e-6).value, abs=2e-6)

    def test_synchronous_exchange_symmetric(self, gap_params):
        """Test that relabelling the detectors leaves X and the concurrence unchanged."""
        pair = PairScenario.coaxial(CircularTrajectory(0.5, 1.0), CircularTrajectory(0.2, 1.0), 0.3, gap_params)
        assert x_parallel_synchronous(pair.swapped()).value == pytest.approx(
            x_parallel_synchronous(pair).value, abs=1e-9)
        assert harvest(pair.swapped()).concurrence == pytest.approx(harvest(pair).concurrence, abs=1e-9)

    def test_synchronous_rejects_counter_rotation(self, counter_rotating_pair):
        """Test that omega_A != omega_B is rejected."""
        with pytest.raises(ScenarioError, match="omega_A = omega_B"):
            x_parallel_synchronous(counter_rotating_pair)

    def test_comoving_rejects_unequal_radii(self, gap_params):
        """Test that the comoving form needs identical orbits."""
        pair = PairScenario.coaxial(CircularTrajectory(0.5, 1.0), CircularTrajectory(0.2, 1.0), 0.1, gap_params)
        with pytest.raises(ScenarioError, match="identical orbits"):
            x_parallel_comoving_equal(pair)

    def test_uniform_form_rejects_circular(self, comoving_pair):
        """Test that the uniform form checks the geometry."""
        with pytest.raises(ScenarioError, match="expected uniform-pair geometry, got coaxial"):
            x_uniform_pair(comoving_pair)


class TestRegulated:
    """Test x_regulated_1d() argument handling."""

    def test_invalid_regulator(self, uniform_pair):
        """Test that eps <= 0 is rejected."""
        with pytest.raises(ValueError, match="Regulator must be positive"):
            x_regulated_1d(uniform_pair, 0.0)

    def test_no_reduction(self, counter_rotating_pair):
        """Test that non-synchronous pairs have no regulated 1D form."""
        with pytest.raises(ScenarioError, match="no one-dimensional reduction"):
            x_regulated_1d(counter_rotating_pair, 0.01)

    def test_converges_as_regulator_shrinks(self, static_pair):
        """Test that the regulated value approaches the closed form."""
        expected = static_x(0.5, 0.1)
        coarse = abs(x_regulated_1d(static_pair, 0.05) - expected)
        fine = abs(x_regulated_1d(static_pair, 0.01) - expected)
        assert fine < coarse


class TestDoubleIntegrals:
    """Test the lab-time double integral against the reductions."""

    def test_rejects_uniform(self, uniform_pair):
        """Test that uniform pairs have no lab-time double integral."""
        with pytest.raises(ScenarioError, match="needs circular orbits"):
            x_general(uniform_pair)

    def test_equal_rejects_unequal(self, gap_params):
        """Test that the doubled single term needs equal orbits."""
        pair = PairScenario.coaxial(CircularTrajectory(0.5, 1.0), CircularTrajectory(0.2, 1.0), 0.1, gap_params)
        with pytest.raises(ScenarioError, match="R_A = R_B"):
            x_parallel_equal(pair)

    def test_parallel_rejects_perpendicular(self, circular_unit, gap_params):
        """Test that x_parallel checks the geometry."""
        pair = PairScenario.perpendicular(circular_unit, circular_unit, 0.1, gap_params)
        with pytest.raises(ScenarioError, match="expected coaxial geometry"):
            x_parallel(pair)

    @pytest.mark.slow
    def test_static_general(self, static_pair):
        """Test the double integral for detectors at rest."""
        result = x_general(static_pair)
        assert result.value == pytest.approx(static_x(0.5, 0.1), abs=1e-5)
        assert result.reduction is ReductionKind.GENERAL

    @pytest.mark.slow
    def test_reduction_tower(self, comoving_pair):
        """Test that the general, equal and comoving forms agree for identical orbits."""
        comoving = x_parallel_comoving_equal(comoving_pair).value
        assert x_parallel(comoving_pair).value == pytest.approx(comoving, rel=1e-3)
        assert x_parallel_equal(comoving_pair).value == pytest.approx(comoving, rel=1e-3)

    @pytest.mark.slow
    def test_synchronous_tower(self, gap_params):
        """Test that the general form matches the synchronous reduction for unequal radii."""
        pair = PairScenario.coaxial(CircularTrajectory(0.5, 1.0), CircularTrajectory(0.2, 1.0), 0.3, gap_params)
        assert x_parallel(pair).value == pytest.approx(x_parallel_synchronous(pair).value, rel=1e-3)

    @pytest.mark.slow
    def test_counter_rotation_barely_matters_far_apart(self, gap_params):
        """Test that reversing one orbit changes X little when R << delta_d."""
        a = CircularTrajectory(0.1, 1.0)
        b = CircularTrajectory(0.1, -1.0)
        counter = x_parallel_equal(PairScenario.coaxial(a, b, 1.0, gap_params)).value
        comoving = x_parallel_comoving_equal(PairScenario.coaxial(a, a, 1.0, gap_params)).value
        assert counter == pytest.approx(comoving, rel=0.02)

    @pytest.mark.slow
    @pytest.mark.parametrize("form, pair", [
        (x_parallel, PairScenario.coaxial(CircularTrajectory(0.5, 1.0), CircularTrajectory(0.3, -1.5),
                                          1.0, DetectorParams(0.1))),
        (x_parallel_equal, PairScenario.coaxial(CircularTrajectory(0.5, 1.0), CircularTrajectory(0.5, -1.0),
                                                1.0, DetectorParams(0.1))),
        (x_perpendicular, PairScenario.perpendicular(CircularTrajectory(0.5, 1.0), CircularTrajectory(0.5, 1.0),
                                                     1.0, DetectorParams(0.1))),
    ], ids=["general", "equal", "perpendicular"])
    def test_matches_regulator(self, form, pair):
        """Test PV plus delta parts against the eps -> 0 limit of the regulated double integral."""
        pairs = [(eps, x_regulated_general(pair, eps)) for eps in (0.04, 0.02, 0.01, 0.005)]
        limit, _ = richardson_extrapolate(pairs)
        assert form(pair).value == pytest.approx(limit, abs=1e-4)

    def test_regulated_rejects_uniform(self, uniform_pair):
        """Test that the regulated double integral needs circular orbits."""
        with pytest.raises(ScenarioError, match="needs circular orbits"):
            x_regulated_general(uniform_pair, 0.01)

    def test_regulated_invalid_regulator(self, comoving_pair):
        """Test that a non-positive regulator is rejected."""
        with pytest.raises(ValueError, match="Regulator must be positive"):
            x_regulated_general(comoving_pair, -0.01)

    @pytest.mark.slow
    @pytest.mark.parametrize("seed", range(10))
    def test_random_reduction_tower(self, seed):
        """Test that all four coaxial forms agree for identical orbits with random parameters."""
        rng = np.random.default_rng(seed)
        orbit = CircularTrajectory.from_angular_velocity_speed(rng.uniform(0.5, 3.0), rng.uniform(0.1, 0.8))
        pair = PairScenario.coaxial(orbit, orbit, rng.uniform(0.2, 2.0), DetectorParams(rng.uniform(-0.5, 1.0)))
        comoving = x_parallel_comoving_equal(pair).value
        assert x_parallel_synchronous(pair).value == pytest.approx(comoving, rel=1e-3)
        assert x_parallel_equal(pair).value == pytest.approx(comoving, rel=1e-3)
        assert x_general(pair).value == pytest.approx(comoving, rel=1e-3)

    @pytest.mark.slow
    def test_general_exchange_symmetric(self, gap_params):
        """Test that relabelling a general pair leaves X and the concurrence unchanged."""
        pair = PairScenario.coaxial(CircularTrajectory(0.5, 1.0), CircularTrajectory(0.3, -1.5), 1.0, gap_params)
        assert x_general(pair.swapped()).value == pytest.approx(x_general(pair).value, abs=2e-6)
        assert harvest(pair.swapped()).concurrence == pytest.approx(harvest(pair).concurrence, abs=4e-6)

    @pytest.mark.slow
    def test_large_counter_rotating_orbit_correlates_less(self):
        """Test |X| counter-rotating < |X| co-rotating for R=2, a=1, delta_d=1."""
        co = CircularTrajectory.from_acceleration_radius(1.0, 2.0)
        counter = CircularTrajectory.from_acceleration_radius(1.0, 2.0, direction=-1)
        params = DetectorParams(0.1)
        counter_x = x_parallel_equal(PairScenario.coaxial(co, counter, 1.0, params)).value
        co_x = x_parallel_comoving_equal(PairScenario.coaxial(co, co, 1.0, params)).value
        assert abs(counter_x) < abs(co_x)

    @pytest.mark.slow
    def test_perpendicular_with_non_rotating_second_detector(self, circular_unit, gap_params):
        """Test that omega_B = 0 with R_B > 0 gives a finite, non-zero X."""
        pair = PairScenario.perpendicular(circular_unit, CircularTrajectory(0.5, 0.0), 0.1, gap_params)
        value = x_perpendicular(pair).value
        assert math.isfinite(value.real) and math.isfinite(value.imag)
        assert abs(value) > 0

    @pytest.mark.slow
    def test_perpendicular_direction_independent(self, gap_params):
        """Test that X is unchanged by reversing either orbit in the perpendicular geometry."""
        plus = CircularTrajectory.from_acceleration_radius(1.0, 0.5)
        minus = CircularTrajectory.from_acceleration_radius(1.0, 0.5, direction=-1)
        reference = x_perpendicular(PairScenario.perpendicular(plus, plus, 0.1, gap_params)).value
        for a, b in ((minus, plus), (plus, minus)):
            value = x_perpendicular(PairScenario.perpendicular(a, b, 0.1, gap_params)).value
            assert value == pytest.approx(reference, abs=1e-6)


class TestConcurrence:
    """Test concurrence() and compute_x()."""

    def test_positive(self):
        """Test 2 (|X| - sqrt(P_A P_B))."""
        assert concurrence(0.01, 0.04, 0.05 + 0j) == pytest.approx(0.06)

    def test_clamped_at_zero(self):
        """Test that weak correlation gives zero."""
        assert concurrence(0.04, 0.04, 0.01j) == 0.0

    def test_negative_probability_clamped(self):
        """Test that quadrature noise below zero counts as zero."""
        assert concurrence(-1e-12, 0.04, 0.01) == pytest.approx(0.02)

    def test_bounded_by_twice_magnitude(self, static_pair, comoving_pair, uniform_pair, gap_params):
        """Test 0 <= C <= 2|X| for harvests in several geometries."""
        synchronous = PairScenario.coaxial(CircularTrajectory(0.5, 1.0), CircularTrajectory(0.2, 1.0),
                                           0.3, gap_params)
        for pair in (static_pair, comoving_pair, uniform_pair, synchronous):
            result = harvest(pair)
            assert 0.0 <= result.concurrence <= 2.0 * abs(result.x)

    def test_compute_x_uses_reduction(self, static_pair):
        """Test that compute_x reports the form it evaluated."""
        result = compute_x(static_pair)
        assert result.reduction is ReductionKind.COMOVING_EQUAL
        assert result.abs_error_estimate < 1e-8


class TestHarvest:
    """Test harvest()."""

    def test_static_pair(self, static_pair):
        """Test the full calculation for detectors at rest."""
        result = harvest(static_pair)
        p = transition_probability_static(static_pair.params)
        assert result.p_a == pytest.approx(p)
        assert result.p_b == pytest.approx(p)
        assert result.x == pytest.approx(static_x(0.5, 0.1), abs=1e-8)
        assert result.concurrence == pytest.approx(concurrence(p, p, result.x))
        assert result.reduction is ReductionKind.COMOVING_EQUAL

    def test_far_apart_has_no_entanglement(self):
        """Test that a large separation harvests nothing."""
        rest = CircularTrajectory(0.0, 0.0)
        result = harvest(PairScenario.coaxial(rest, rest, 5.0, DetectorParams(0.1)))
        assert result.concurrence == 0.0

    def test_uniform_pair(self, uniform_pair):
        """Test that uniform pairs harvest through the uniform form."""
        result = harvest(uniform_pair)
        assert result.reduction is ReductionKind.UNIFORM_PAIR
        assert result.p_a == result.p_b
        assert result.concurrence >= 0.0

    @patch('src.harvesting.compute_x')
    def test_failure_is_logged_and_raised(self, mock_compute, static_pair, caplog):
        """Test that a quadrature failure is logged with the scenario and re-raised."""
        mock_compute.side_effect = ConvergenceError("No convergence")
        with caplog.at_level(logging.WARNING, logger="src.harvesting"):
            with pytest.raises(ConvergenceError):
                harvest(static_pair)
        assert "Harvesting failed for coaxial pair" in caplog.text

"""
Transition probability commands.

This module computes the transition probability of a single detector at
one point or along a parameter sweep.
"""

import sys
from typing import Optional

from src.commands.output import emit_sweep, print_banner
from src.detector_response import transition_probability, transition_probability_static
from src.errors import ScenarioError
from src.motion import CircularTrajectory
from src.sweep import ScenarioSpec, SweepSpec


def describe_trajectory(trajectory) -> str:
    """One-line kinematic summary of a trajectory."""
    if isinstance(trajectory, CircularTrajectory):
        v, gamma, a = trajectory.kinematics()
        return (f"circular R={trajectory.R:g} omega={trajectory.omega:g} "
                f"(v={v:.6g}, gamma={gamma:.6g}, a={a:.6g})")
    return f"uniform a={trajectory.a:g}"


def transition(scenario: ScenarioSpec, sweep: Optional[tuple] = None, tol: Optional[float] = None,
               fmt: str = "csv", output: Optional[str] = None, workers: Optional[int] = None,
               timing: bool = False, verbose: bool = True) -> int:
    """
    Compute the transition probability P / lambda^2.

    Args:
        scenario: Single-detector scenario
        sweep: Optional (parameter, SweepRange) to tabulate
        tol: Absolute tolerance override
        fmt: Table format for sweeps
        output: Table path for sweeps (stdout when None)
        workers: Worker count for sweeps
        timing: Add wall_time to sweep rows
        verbose: Print progress information

    Returns:
        Exit code (0 for success, 1 for failure)
    """
    try:
        if sweep is not None:
            parameter, sweep_range = sweep
            spec = SweepSpec("transition", scenario, parameter, sweep_range, tol=tol)
            return emit_sweep([spec], "TRANSITION PROBABILITY SWEEP", fmt, output, workers, timing, verbose)

        if scenario.is_pair:
            raise ScenarioError("transition needs a single detector", field="geometry")
        built = scenario.build()
        result = transition_probability(built.trajectory, built.params, **({} if tol is None else {"tol": tol}))
        print_banner("TRANSITION PROBABILITY")
        print(f"  Trajectory: {describe_trajectory(built.trajectory)}")
        print(f"  Gap: Omega={built.params.omega_gap:g}")
        print()
        print(f"  P / lambda^2      = {result.value:.12g}")
        print(f"  Static reference  = {transition_probability_static(built.params):.12g}")
        print(f"  Error estimate    = {result.total_error:.3g}")
        if result.short_circuited:
            print("  (oscillatory term bounded, not integrated)")
        if verbose:
            print(f"  Evaluations       = {result.evaluations}")
        return 0

    except (ValueError, ArithmeticError, OSError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return 1

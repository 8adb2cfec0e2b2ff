"""
EDR temperature commands.

This module computes the effective temperature -Omega / log(F(Omega)/F(-Omega))
of a single detector and compares it with the closed-form limits.
"""

import sys
from typing import Optional

from src.commands.output import emit_sweep, print_banner
from src.commands.transition import describe_trajectory
from src.detector_response import EdrRegime, asymptotic_edr_limits, edr_temperature_for
from src.errors import ScenarioError
from src.motion import CircularTrajectory
from src.sweep import ScenarioSpec, SweepSpec


def edr(scenario: ScenarioSpec, sweep: Optional[tuple] = None, tol: Optional[float] = None,
        fmt: str = "csv", output: Optional[str] = None, workers: Optional[int] = None,
        timing: bool = False, verbose: bool = True) -> int:
    """
    Compute the EDR temperature.

    Args:
        scenario: Single-detector scenario (the sign of the gap is ignored)
        sweep: Optional (parameter, SweepRange) to tabulate
        tol: Absolute tolerance override
        fmt: Table format for sweeps
        output: Table path for sweeps (stdout when None)
        workers: Worker count for sweeps
        timing: Add wall_time to sweep rows
        verbose: Print the asymptotic limits alongside the result

    Returns:
        Exit code (0 for success, 1 for failure)
    """
    try:
        if sweep is not None:
            parameter, sweep_range = sweep
            spec = SweepSpec("edr", scenario, parameter, sweep_range, tol=tol)
            return emit_sweep([spec], "EDR TEMPERATURE SWEEP", fmt, output, workers, timing, verbose)

        if scenario.is_pair:
            raise ScenarioError("edr needs a single detector", field="geometry")
        built = scenario.build()
        kwargs = {} if tol is None else {"tol": tol}
        temperature = edr_temperature_for(built.trajectory, built.params, **kwargs)
        print_banner("EDR TEMPERATURE")
        print(f"  Trajectory: {describe_trajectory(built.trajectory)}")
        print(f"  Gap: |Omega|={abs(built.params.omega_gap):g}")
        print()
        print(f"  T_EDR = {temperature:.12g}")

        if verbose:
            if isinstance(built.trajectory, CircularTrajectory):
                regimes = (EdrRegime.CIRCULAR_HIGH_SPEED, EdrRegime.CIRCULAR_SMALL_SPEED)
            else:
                regimes = (EdrRegime.UNIFORM, EdrRegime.UNIFORM_FINITE_DURATION)
            print()
            print("  Closed-form limits (valid only in their regimes):")
            for regime in regimes:
                limit = asymptotic_edr_limits(built.trajectory, built.params, regime)
                print(f"    {regime.value:<26} {limit:.6g}")
        return 0

    except (ValueError, ArithmeticError, OSError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return 1

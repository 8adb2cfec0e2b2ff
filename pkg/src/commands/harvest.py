"""
Entanglement harvesting commands.

This module computes the non-local correlation X and the concurrence for a
pair of detectors, at one point or along a sweep.
"""

import sys
from typing import Optional

from src.commands.output import emit_sweep, print_banner
from src.commands.transition import describe_trajectory
from src.errors import ScenarioError
from src.harvesting import harvest as harvest_pair
from src.sweep import ScenarioSpec, SweepSpec


def harvest(scenario: ScenarioSpec, quantity: str = "concurrence", sweep: Optional[tuple] = None,
            tol: Optional[float] = None, fmt: str = "csv", output: Optional[str] = None,
            workers: Optional[int] = None, timing: bool = False, verbose: bool = True) -> int:
    """
    Compute X and the concurrence for a detector pair.

    Args:
        scenario: Pair scenario
        quantity: "x" or "concurrence" (columns of a sweep table)
        sweep: Optional (parameter, SweepRange) to tabulate
        tol: Tolerance override for X
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
            spec = SweepSpec(quantity, scenario, parameter, sweep_range, tol=tol)
            return emit_sweep([spec], "HARVESTING SWEEP", fmt, output, workers, timing, verbose)

        if not scenario.is_pair:
            raise ScenarioError("harvest needs a pair of detectors", field="geometry")
        pair = scenario.build()
        if verbose:
            print_banner("ENTANGLEMENT HARVESTING")
            print(f"  Geometry: {pair.geometry.value}, delta_d={pair.delta_d:g}, Omega={pair.params.omega_gap:g}")
            print(f"  Detector A: {describe_trajectory(pair.detector_a)}")
            print(f"  Detector B: {describe_trajectory(pair.detector_b)}")
            print()

        result = harvest_pair(pair, tol)
        print(f"  P_A / lambda^2   = {result.p_a:.12g}  (+- {result.p_a_error:.3g})")
        print(f"  P_B / lambda^2   = {result.p_b:.12g}  (+- {result.p_b_error:.3g})")
        print(f"  X / lambda^2     = {result.x.real:.12g} {result.x.imag:+.12g}i  (+- {result.x_error:.3g})")
        print(f"  |X| / lambda^2   = {abs(result.x):.12g}")
        print(f"  C / lambda^2     = {result.concurrence:.12g}")
        print(f"  Reduction used   : {result.reduction.value}")
        return 0

    except (ValueError, ArithmeticError, OSError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return 1

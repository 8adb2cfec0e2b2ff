"""
Shared sweep execution and reporting for the commands.
"""

import sys
import time
from typing import Optional, Sequence

import pandas as pd

from src.sweep import SweepSpec, emit, resolve_workers, run_sweep


def print_banner(title: str, stream=None) -> None:
    stream = stream or sys.stdout
    print("=" * 70, file=stream)
    print(title, file=stream)
    print("=" * 70, file=stream)


def run_curves(curves: Sequence[SweepSpec], workers: Optional[int] = None,
               timing: bool = False, labelled: bool = False) -> pd.DataFrame:
    """
    Run one or more sweeps and stack their rows.

    Args:
        curves: Sweeps sharing quantity and parameter
        workers: Worker count override
        timing: Include wall_time
        labelled: Prefix a "curve" column with each sweep's label
    """
    tables = []
    for spec in curves:
        table = run_sweep(spec, resolve_workers(workers, spec), timing)
        if labelled:
            table.insert(0, "curve", spec.label)
        tables.append(table)
    return pd.concat(tables, ignore_index=True) if len(tables) > 1 else tables[0]


def emit_sweep(curves: Sequence[SweepSpec], title: str, fmt: str = "csv", output: Optional[str] = None,
               workers: Optional[int] = None, timing: bool = False, verbose: bool = True,
               labelled: bool = False) -> int:
    """
    Run sweeps and write the table; progress goes to stderr when the table goes to stdout.

    Returns:
        Exit code (0 even when individual rows failed; their status column says so)
    """
    stream = sys.stdout if output else sys.stderr
    if verbose:
        print_banner(title, stream)
        for spec in curves:
            r = spec.range
            label = f" [{spec.label}]" if spec.label else ""
            print(f"  {spec.quantity}: {spec.parameter} in [{r.start:g}, {r.stop:g}], "
                  f"{r.points} points ({r.scale}){label}", file=stream)
        print(file=stream)

    start_time = time.time()
    table = run_curves(curves, workers, timing, labelled)
    elapsed = time.time() - start_time
    emit(table, fmt, output)

    failed = int((table["status"] != "ok").sum())
    if verbose:
        print(f"Computed {len(table)} rows in {elapsed:.2f}s", file=stream)
        if output:
            print(f"Wrote {fmt.upper()} to {output}", file=stream)
    if failed:
        print(f"Warning: {failed} of {len(table)} points failed (see status column)", file=sys.stderr)
    return 0

"""
Figure reproduction commands.

This module lists the figure presets and runs them into a single table with
one "curve" column per plotted line.
"""

import sys
from typing import Optional

from src.commands.output import emit_sweep, print_banner
from src.presets import get_preset_by_id, list_presets


def figure_list() -> int:
    """
    Print the available presets.

    Returns:
        Exit code (always 0)
    """
    print_banner("FIGURE PRESETS")
    for preset in list_presets():
        marker = " (approximate legend values)" if preset.approximate else ""
        print(f"  {preset.id:<7} {preset.title}{marker}")
        print(f"          {len(preset.curves)} curves, {preset.quantity} vs {preset.parameter}")
    return 0


def figure_run(preset_id: str, points: Optional[int] = None, fmt: str = "csv",
               output: Optional[str] = None, workers: Optional[int] = None,
               timing: bool = False, verbose: bool = True) -> int:
    """
    Run a figure preset.

    Args:
        preset_id: Preset identifier such as "fig5a"
        points: Grid points per curve (preset default when None)
        fmt: Table format
        output: Table path (stdout when None)
        workers: Worker count
        timing: Add wall_time to rows
        verbose: Print progress information

    Returns:
        Exit code (0 for success, 1 for failure)
    """
    try:
        preset = get_preset_by_id(preset_id, points)
        title = f"FIGURE {preset.id.upper()}: {preset.title}"
        return emit_sweep(preset.curves, title, fmt, output, workers, timing, verbose, labelled=True)

    except (ValueError, ArithmeticError, OSError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return 1

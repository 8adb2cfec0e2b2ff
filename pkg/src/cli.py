#!/usr/bin/env python3
"""
Unified command-line interface for udw-harvest.

This provides a single entry point for all detector tools:
- transition: Transition probability of a single detector
- edr: Effective (EDR) temperature of a single detector
- harvest: Non-local correlation and concurrence of a detector pair
- figure: Reproduce a figure preset as a table
"""

import sys
import argparse
import logging

from src.commands import edr, figure, harvest, transition
from src.constants import OUTPUT_FORMATS
from src.errors import ScenarioError
from src.sweep import DetectorSpec, ScenarioSpec, SweepSpec, load_scenario, parse_sweep_arg


def _add_output_arguments(parser):
    """Options shared by every command that can produce a table."""
    parser.add_argument(
        '--sweep',
        type=str,
        help='Sweep one parameter: param=start:stop:points[:log]'
    )
    parser.add_argument(
        '--tol',
        type=float,
        help='Absolute tolerance (default depends on the integral)'
    )
    parser.add_argument(
        '--format',
        type=str,
        choices=list(OUTPUT_FORMATS),
        default='csv',
        help='Table format for sweeps (default: csv)'
    )
    parser.add_argument(
        '--output', '--out',
        dest='output',
        type=str,
        help='Write the table to this file instead of stdout'
    )
    parser.add_argument(
        '--workers',
        type=int,
        help='Worker processes for sweeps (default: $UDW_WORKERS or 1)'
    )
    parser.add_argument(
        '--timing',
        action='store_true',
        help='Add a wall_time column (output is then not reproducible byte for byte)'
    )
    parser.add_argument(
        '--quiet',
        action='store_true',
        help='Suppress progress output'
    )
    parser.add_argument(
        '--verbose',
        action='store_true',
        help='Log numerical diagnostics'
    )


def _add_detector_arguments(parser):
    """Inline single-detector description."""
    parser.add_argument(
        '--scenario',
        type=str,
        help='JSON scenario file (geometry "single")'
    )
    parser.add_argument(
        '--motion',
        type=str,
        choices=['circular', 'uniform'],
        default='circular',
        help='Detector motion (default: circular)'
    )
    for name, text in (('R', 'orbit radius'), ('omega', 'signed angular velocity'),
                       ('a', 'proper acceleration'), ('v', 'orbital speed')):
        parser.add_argument(f'--{name}', type=float, help=f'{text.capitalize()} in units of sigma')
    parser.add_argument(
        '--direction',
        type=int,
        choices=[1, -1],
        default=1,
        help='Sense of rotation when omega is not given (default: 1)'
    )
    parser.add_argument(
        '--gap',
        type=float,
        help='Energy gap Omega*sigma'
    )


def _inline_scenario(args) -> ScenarioSpec:
    if args.gap is None:
        raise ScenarioError("required without --scenario", field="--gap")
    values = tuple(sorted((name, getattr(args, name)) for name in ('R', 'omega', 'a', 'v')
                          if getattr(args, name) is not None))
    if not values:
        raise ScenarioError("give two of --R/--omega/--a/--v, or --motion uniform --a", field="detector")
    return ScenarioSpec("single", args.gap, DetectorSpec(args.motion, values, args.direction))


def _resolve(args, default_quantity=None):
    """
    Combine a scenario file, inline options and overrides.

    Returns:
        Tuple of (scenario, sweep, tol, workers, quantity)
    """
    sweep = tol = workers = None
    quantity = default_quantity
    if getattr(args, 'scenario', None):
        loaded = load_scenario(args.scenario)
        if isinstance(loaded, SweepSpec):
            scenario = loaded.scenario
            sweep = (loaded.parameter, loaded.range)
            tol, workers = loaded.tol, loaded.workers
            if quantity is not None and loaded.quantity in ('x', 'concurrence'):
                quantity = loaded.quantity
        else:
            scenario = loaded
        if getattr(args, 'gap', None) is not None:
            scenario = scenario.with_parameter('omega_gap', args.gap)
        if getattr(args, 'delta_d', None) is not None:
            scenario = scenario.with_parameter('delta_d', args.delta_d)
    else:
        scenario = _inline_scenario(args)

    if args.sweep:
        sweep = parse_sweep_arg(args.sweep)
    if args.tol is not None:
        tol = args.tol
    if args.workers is not None:
        workers = args.workers
    if getattr(args, 'quantity', None):
        quantity = args.quantity
    return scenario, sweep, tol, workers, quantity


def main():
    """Main CLI entry point with subcommand routing."""
    parser = argparse.ArgumentParser(
        prog='udw-harvest',
        description='Unruh-DeWitt detector responses, EDR temperatures and entanglement harvesting',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Transition probability of a circular detector
  udw-harvest transition --a 1 --R 0.5 --gap 0.1

  # Sweep the gap of a uniformly accelerated detector
  udw-harvest transition --motion uniform --a 2 --gap 0.1 --sweep omega_gap=-2:2:41

  # EDR temperature
  udw-harvest edr --motion uniform --a 100 --gap 2

  # Concurrence of a pair described in a scenario file
  udw-harvest harvest --scenario pair.json

  # Reproduce a figure
  udw-harvest figure fig5a --points 20 --output fig5a.csv
  udw-harvest figure --list

All quantities are in units of the switching width sigma and per lambda^2.
For more information on each subcommand:
  udw-harvest <subcommand> --help
        """
    )

    subparsers = parser.add_subparsers(
        title='subcommands',
        description='Available commands',
        dest='command',
        required=True
    )

    # ===== TRANSITION subcommand =====
    transition_parser = subparsers.add_parser(
        'transition',
        help='Transition probability of one detector',
        description='Compute P/lambda^2 for a static, circular or uniformly accelerated detector'
    )
    _add_detector_arguments(transition_parser)
    _add_output_arguments(transition_parser)

    # ===== EDR subcommand =====
    edr_parser = subparsers.add_parser(
        'edr',
        help='EDR temperature of one detector',
        description='Compute -Omega/log(F(Omega)/F(-Omega)) and the closed-form limits'
    )
    _add_detector_arguments(edr_parser)
    _add_output_arguments(edr_parser)

    # ===== HARVEST subcommand =====
    harvest_parser = subparsers.add_parser(
        'harvest',
        help='Non-local correlation and concurrence of a pair',
        description='Compute X/lambda^2 and the concurrence for two detectors'
    )
    harvest_parser.add_argument(
        '--scenario',
        type=str,
        required=True,
        help='JSON scenario file (geometry coaxial, perpendicular or uniform-pair)'
    )
    harvest_parser.add_argument(
        '--gap',
        type=float,
        help='Override the energy gap'
    )
    harvest_parser.add_argument(
        '--delta-d',
        dest='delta_d',
        type=float,
        help='Override the separation'
    )
    harvest_parser.add_argument(
        '--quantity',
        type=str,
        choices=['x', 'concurrence'],
        help='Sweep columns (default: concurrence)'
    )
    _add_output_arguments(harvest_parser)

    # ===== FIGURE subcommand =====
    figure_parser = subparsers.add_parser(
        'figure',
        help='Reproduce a figure preset',
        description='Run the sweeps behind a figure and write one table'
    )
    figure_parser.add_argument(
        'preset',
        nargs='?',
        help='Preset identifier (fig1 ... fig13, fig5a/fig5b, fig6a/fig6b, fig11a/fig11b)'
    )
    figure_parser.add_argument(
        '--id',
        dest='preset_id',
        help='Preset identifier, as an alternative to the positional argument'
    )
    figure_parser.add_argument(
        '--list',
        action='store_true',
        help='List available presets'
    )
    figure_parser.add_argument(
        '--points',
        type=int,
        help='Grid points per curve (default: preset value)'
    )
    figure_parser.add_argument(
        '--format',
        type=str,
        choices=list(OUTPUT_FORMATS),
        default='csv',
        help='Table format (default: csv)'
    )
    figure_parser.add_argument('--output', '--out', dest='output', type=str,
                               help='Write the table to this file')
    figure_parser.add_argument('--workers', type=int, help='Worker processes')
    figure_parser.add_argument('--timing', action='store_true', help='Add a wall_time column')
    figure_parser.add_argument('--quiet', action='store_true', help='Suppress progress output')
    figure_parser.add_argument('--verbose', action='store_true', help='Log numerical diagnostics')

    # Parse arguments
    args = parser.parse_args()

    if args.verbose:
        logging.basicConfig(level=logging.INFO, format='%(levelname)s %(name)s: %(message)s')

    # Route to appropriate command handler
    try:
        if args.command == 'figure':
            if args.list:
                return figure.figure_list()
            if args.preset and args.preset_id and args.preset != args.preset_id:
                parser.error(f"figure: preset given twice ({args.preset} and --id {args.preset_id})")
            preset_id = args.preset_id or args.preset
            if not preset_id:
                parser.error("figure: give a preset identifier or --list")
            return figure.figure_run(
                preset_id,
                points=args.points,
                fmt=args.format,
                output=args.output,
                workers=args.workers,
                timing=args.timing,
                verbose=not args.quiet
            )

        default_quantity = 'concurrence' if args.command == 'harvest' else None
        scenario, sweep, tol, workers, quantity = _resolve(args, default_quantity)
        options = dict(sweep=sweep, tol=tol, fmt=args.format, output=args.output,
                       workers=workers, timing=args.timing, verbose=not args.quiet)

        if args.command == 'transition':
            return transition.transition(scenario, **options)
        elif args.command == 'edr':
            return edr.edr(scenario, **options)
        elif args.command == 'harvest':
            return harvest.harvest(scenario, quantity=quantity, **options)

    except Exception as e:
        print(f"Error: {e}", file=sys.stderr)
        return 1

    return 0


if __name__ == '__main__':
    sys.exit(main())

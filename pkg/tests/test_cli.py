"""
Tests for CLI argument parsing and command routing.

This module tests the command-line interface defined in src/cli.py,
including subcommand structure, argument parsing, and flag handling.
"""

import pytest
from unittest.mock import patch

from src.cli import main
from src.sweep import SweepRange


class TestCLIStructure:
    """Test CLI parser structure and subcommand organization."""

    def test_no_arguments_shows_help(self):
        """Test that running with no arguments shows help."""
        with patch('sys.argv', ['udw-harvest']):
            with pytest.raises(SystemExit):
                main()

    def test_invalid_command(self):
        """Test that invalid commands cause SystemExit."""
        with patch('sys.argv', ['udw-harvest', 'invalid']):
            with pytest.raises(SystemExit):
                main()

    def test_invalid_format(self):
        """Test that unknown output formats are rejected by the parser."""
        with patch('sys.argv', ['udw-harvest', 'transition', '--R', '0', '--omega', '0',
                                '--gap', '1', '--format', 'xml']):
            with pytest.raises(SystemExit):
                main()


class TestTransitionArguments:
    """Test 'transition' subcommand argument parsing."""

    @patch('src.commands.transition.transition')
    def test_inline_circular(self, mock_transition):
        """Test an inline circular detector."""
        mock_transition.return_value = 0

        with patch('sys.argv', ['udw-harvest', 'transition', '--a', '1', '--R', '0.5', '--gap', '0.1']):
            result = main()

        assert result == 0
        scenario = mock_transition.call_args.args[0]
        assert scenario.geometry == "single"
        assert scenario.omega_gap == 0.1
        assert scenario.detector_a.fields == {"a": 1.0, "R": 0.5}
        assert mock_transition.call_args.kwargs['sweep'] is None
        assert mock_transition.call_args.kwargs['verbose'] is True

    @patch('src.commands.transition.transition')
    def test_inline_uniform_with_sweep(self, mock_transition):
        """Test a uniform detector with a gap sweep."""
        mock_transition.return_value = 0

        with patch('sys.argv', ['udw-harvest', 'transition', '--motion', 'uniform', '--a', '2',
                                '--gap', '0.1', '--sweep', 'omega_gap=-2:2:41', '--workers', '3']):
            main()

        kwargs = mock_transition.call_args.kwargs
        assert kwargs['sweep'] == ('omega_gap', SweepRange(-2.0, 2.0, 41))
        assert kwargs['workers'] == 3
        assert mock_transition.call_args.args[0].detector_a.motion == "uniform"

    @patch('src.commands.transition.transition')
    def test_out_alias(self, mock_transition):
        """Test that --out is a registered alias of --output."""
        mock_transition.return_value = 0

        with patch('sys.argv', ['udw-harvest', 'transition', '--R', '0', '--omega', '0', '--gap', '1',
                                '--out', 'o.csv']):
            main()

        assert mock_transition.call_args.kwargs['output'] == 'o.csv'

    @patch('src.commands.transition.transition')
    def test_output_options(self, mock_transition):
        """Test format, output, timing, tolerance and quiet flags."""
        mock_transition.return_value = 0

        with patch('sys.argv', ['udw-harvest', 'transition', '--R', '0', '--omega', '0', '--gap', '1',
                                '--format', 'json', '--output', 'out.json', '--timing',
                                '--tol', '1e-8', '--quiet']):
            main()

        kwargs = mock_transition.call_args.kwargs
        assert kwargs['fmt'] == 'json'
        assert kwargs['output'] == 'out.json'
        assert kwargs['timing'] is True
        assert kwargs['tol'] == 1e-8
        assert kwargs['verbose'] is False

    def test_missing_gap(self, capsys):
        """Test that an inline detector without --gap fails cleanly."""
        with patch('sys.argv', ['udw-harvest', 'transition', '--a', '1', '--R', '0.5']):
            result = main()

        assert result == 1
        assert "--gap: required without --scenario" in capsys.readouterr().err

    def test_missing_detector(self, capsys):
        """Test that no kinematic options fails cleanly."""
        with patch('sys.argv', ['udw-harvest', 'transition', '--gap', '0.1']):
            result = main()

        assert result == 1
        assert "detector:" in capsys.readouterr().err

    @patch('src.commands.transition.transition')
    def test_scenario_file(self, mock_transition, write_scenario, single_scenario_dict):
        """Test that --scenario loads the file and --gap overrides it."""
        mock_transition.return_value = 0
        path = write_scenario(single_scenario_dict)

        with patch('sys.argv', ['udw-harvest', 'transition', '--scenario', path, '--gap', '0.3']):
            main()

        assert mock_transition.call_args.args[0].omega_gap == 0.3

    @patch('src.commands.transition.transition')
    def test_scenario_file_with_sweep(self, mock_transition, write_scenario, single_scenario_dict):
        """Test that a sweep block in the file is passed through."""
        mock_transition.return_value = 0
        data = dict(single_scenario_dict, quantity="transition", tol=1e-7,
                    sweep={"parameter": "omega_gap", "start": 0, "stop": 1, "points": 3})

        with patch('sys.argv', ['udw-harvest', 'transition', '--scenario', write_scenario(data)]):
            main()

        kwargs = mock_transition.call_args.kwargs
        assert kwargs['sweep'] == ('omega_gap', SweepRange(0.0, 1.0, 3))
        assert kwargs['tol'] == 1e-7

    def test_superluminal_scenario(self, capsys):
        """Test that v >= 1 is reported as an error."""
        with patch('sys.argv', ['udw-harvest', 'transition', '--R', '2', '--omega', '1', '--gap', '0.1']):
            main_result = main()

        assert main_result == 1
        assert "Error:" in capsys.readouterr().err


class TestEdrArguments:
    """Test 'edr' subcommand argument parsing."""

    @patch('src.commands.edr.edr')
    def test_edr_routing(self, mock_edr):
        """Test that edr receives the inline scenario."""
        mock_edr.return_value = 0

        with patch('sys.argv', ['udw-harvest', 'edr', '--motion', 'uniform', '--a', '100', '--gap', '2']):
            result = main()

        assert result == 0
        scenario = mock_edr.call_args.args[0]
        assert scenario.detector_a.fields == {"a": 100.0}
        assert scenario.omega_gap == 2.0

    @patch('src.commands.edr.edr')
    def test_edr_direction(self, mock_edr):
        """Test that --direction reaches the detector description."""
        mock_edr.return_value = 0

        with patch('sys.argv', ['udw-harvest', 'edr', '--a', '1', '--v', '0.5', '--gap', '1',
                                '--direction', '-1']):
            main()

        assert mock_edr.call_args.args[0].detector_a.direction == -1


class TestHarvestArguments:
    """Test 'harvest' subcommand argument parsing."""

    def test_scenario_required(self):
        """Test that harvest needs --scenario."""
        with patch('sys.argv', ['udw-harvest', 'harvest']):
            with pytest.raises(SystemExit):
                main()

    @patch('src.commands.harvest.harvest')
    def test_defaults(self, mock_harvest, write_scenario, static_pair_dict):
        """Test that harvest defaults to concurrence."""
        mock_harvest.return_value = 0

        with patch('sys.argv', ['udw-harvest', 'harvest', '--scenario', write_scenario(static_pair_dict)]):
            result = main()

        assert result == 0
        assert mock_harvest.call_args.kwargs['quantity'] == 'concurrence'

    @patch('src.commands.harvest.harvest')
    def test_overrides(self, mock_harvest, write_scenario, static_pair_dict):
        """Test --gap, --delta-d and --quantity."""
        mock_harvest.return_value = 0

        with patch('sys.argv', ['udw-harvest', 'harvest', '--scenario', write_scenario(static_pair_dict),
                                '--gap', '0.2', '--delta-d', '1.5', '--quantity', 'x']):
            main()

        scenario = mock_harvest.call_args.args[0]
        assert scenario.omega_gap == 0.2
        assert scenario.delta_d == 1.5
        assert mock_harvest.call_args.kwargs['quantity'] == 'x'

    @patch('src.commands.harvest.harvest')
    def test_file_quantity(self, mock_harvest, write_scenario, static_pair_dict):
        """Test that the quantity of a sweep file is used when no flag is given."""
        mock_harvest.return_value = 0
        data = dict(static_pair_dict, quantity="x",
                    sweep={"parameter": "delta_d", "start": 0.5, "stop": 1.0, "points": 2})

        with patch('sys.argv', ['udw-harvest', 'harvest', '--scenario', write_scenario(data)]):
            main()

        assert mock_harvest.call_args.kwargs['quantity'] == 'x'

    def test_missing_file(self, capsys, tmp_path):
        """Test that a missing scenario file is reported."""
        with patch('sys.argv', ['udw-harvest', 'harvest', '--scenario', str(tmp_path / 'absent.json')]):
            result = main()

        assert result == 1
        assert "Error:" in capsys.readouterr().err


class TestFigureArguments:
    """Test 'figure' subcommand argument parsing."""

    @patch('src.commands.figure.figure_list')
    def test_list(self, mock_list):
        """Test that --list routes to figure_list."""
        mock_list.return_value = 0

        with patch('sys.argv', ['udw-harvest', 'figure', '--list']):
            result = main()

        assert result == 0
        mock_list.assert_called_once()

    @patch('src.commands.figure.figure_run')
    def test_run(self, mock_run):
        """Test that a preset routes to figure_run with its options."""
        mock_run.return_value = 0

        with patch('sys.argv', ['udw-harvest', 'figure', 'fig5a', '--points', '20',
                                '--output', 'fig5a.csv', '--workers', '2']):
            main()

        assert mock_run.call_args.args[0] == 'fig5a'
        kwargs = mock_run.call_args.kwargs
        assert kwargs['points'] == 20
        assert kwargs['output'] == 'fig5a.csv'
        assert kwargs['workers'] == 2
        assert kwargs['fmt'] == 'csv'

    @patch('src.commands.figure.figure_run')
    def test_run_by_id(self, mock_run):
        """Test that --id selects the preset and --out sets the output file."""
        mock_run.return_value = 0

        with patch('sys.argv', ['udw-harvest', 'figure', '--id', 'fig5a', '--points', '2',
                                '--out', 'fig5a.csv']):
            result = main()

        assert result == 0
        assert mock_run.call_args.args[0] == 'fig5a'
        assert mock_run.call_args.kwargs['points'] == 2
        assert mock_run.call_args.kwargs['output'] == 'fig5a.csv'

    def test_conflicting_ids(self):
        """Test that two different preset identifiers are a usage error."""
        with patch('sys.argv', ['udw-harvest', 'figure', 'fig1', '--id', 'fig2']):
            with pytest.raises(SystemExit):
                main()

    def test_missing_preset(self):
        """Test that figure without a preset or --list is a usage error."""
        with patch('sys.argv', ['udw-harvest', 'figure']):
            with pytest.raises(SystemExit):
                main()

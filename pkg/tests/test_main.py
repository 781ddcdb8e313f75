"""Tests for the command-line entry point."""

import json
import logging
from pathlib import Path
from unittest.mock import patch

import pytest

from spectral_ssl.cli.main import (
    EXIT_CHECKS_FAILED,
    EXIT_ERROR,
    EXIT_OK,
    build_parser,
    main,
    parse_params,
    setup_logging,
)
from spectral_ssl.exceptions import ValidationError

TINY_RUN = ["--param", "n=6", "--param", "k=3", "--param", "trials=2"]


class TestSetupLogging:
    """Tests for setup_logging."""

    def test_level_and_format(self) -> None:
        """Test basicConfig receives the level and the log format.

        Verifies the parsed level.
        """
        with patch("spectral_ssl.cli.main.logging.basicConfig") as basic_config:
            setup_logging("debug")

        kwargs = basic_config.call_args.kwargs
        assert kwargs["level"] == logging.DEBUG
        assert "%(name)s" in kwargs["format"]

    def test_unknown_level_defaults_to_info(self) -> None:
        """Test an unknown level name.

        Verifies INFO is used.
        """
        with patch("spectral_ssl.cli.main.logging.basicConfig") as basic_config:
            setup_logging("loud")

        assert basic_config.call_args.kwargs["level"] == logging.INFO


class TestParsing:
    """Tests for argument and override parsing."""

    def test_parse_params(self) -> None:
        """Test key=value pairs, keeping '=' inside values.

        Verifies keys are stripped and values kept as strings.
        """
        assert parse_params([" n =8", "expr=a=b", "empty="]) == {"n": "8", "expr": "a=b", "empty": ""}

    @pytest.mark.parametrize("pair", ["novalue", "=3"])
    def test_parse_params_rejects(self, pair: str) -> None:
        """Test malformed overrides.

        Verifies ValidationError.
        """
        with pytest.raises(ValidationError, match="Expected key=value"):
            parse_params([pair])

    def test_sources_are_exclusive(self) -> None:
        """Test --experiment and --list together.

        Verifies argparse exits with status 2.
        """
        with pytest.raises(SystemExit) as exc_info:
            build_parser().parse_args(["--list", "--experiment", "rank-bounds"])

        assert exc_info.value.code == 2


@pytest.mark.usefixtures("clean_env")
class TestMain:
    """Tests for main()."""

    def test_list(self, capsys: pytest.CaptureFixture[str]) -> None:
        """Test --list prints every experiment.

        Verifies exit code 0 and name: description lines.
        """
        assert main(["--list"]) == EXIT_OK

        lines = capsys.readouterr().out.splitlines()
        assert len(lines) == 8
        assert lines[0].startswith("bt-collapse: ")

    def test_no_source(self, capsys: pytest.CaptureFixture[str]) -> None:
        """Test running without --experiment, --spec or --list.

        Verifies the usage error.
        """
        assert main([]) == EXIT_ERROR
        assert "One of --experiment, --spec or --list is required." in capsys.readouterr().err

    def test_bad_environment(self, clean_env: pytest.MonkeyPatch, capsys: pytest.CaptureFixture[str]) -> None:
        """Test an invalid log level in the environment.

        Verifies the configuration error message.
        """
        clean_env.setenv("SPECTRAL_SSL_LOG_LEVEL", "CHATTY")

        assert main(["--list"]) == EXIT_ERROR
        assert "Configuration error:" in capsys.readouterr().err

    def test_unknown_experiment(
        self, capsys: pytest.CaptureFixture[str], tmp_path: Path
    ) -> None:
        """Test an unregistered experiment name.

        Verifies exit code 2 and the error line.
        """
        assert main(["--experiment", "nope", "--out", str(tmp_path)]) == EXIT_ERROR
        assert "Error: Unknown experiment 'nope'" in capsys.readouterr().err

    def test_malformed_param(
        self, capsys: pytest.CaptureFixture[str], tmp_path: Path
    ) -> None:
        """Test an override without '='.

        Verifies exit code 2.
        """
        code = main(["--experiment", "graph-estimate-check", "--param", "trials", "--out", str(tmp_path)])

        assert code == EXIT_ERROR
        assert "Expected key=value" in capsys.readouterr().err

    def test_run_experiment(
        self, capsys: pytest.CaptureFixture[str], tmp_path: Path
    ) -> None:
        """Test a small run from the command line.

        Verifies exit code 0, one line per check and the summary path.
        """
        code = main(["--experiment", "graph-estimate-check", *TINY_RUN, "--out", str(tmp_path), "--seed", "2"])

        out = capsys.readouterr().out.splitlines()
        assert code == EXIT_OK
        assert [line.split(":")[0] for line in out[:2]] == ["[PASS] softmax_identity", "[PASS] oracle_agreement"]
        assert out[-1] == f"Summary: {tmp_path / 'graph-estimate-check' / 'summary.json'}"

    def test_failed_check_exit_code(
        self, capsys: pytest.CaptureFixture[str], tmp_path: Path
    ) -> None:
        """Test a failing check sets exit code 1.

        Verifies a negative tolerance makes the oracle check fail.
        """
        code = main(
            ["--experiment", "graph-estimate-check", *TINY_RUN, "--param", "oracle_tol=-1", "--out", str(tmp_path)]
        )

        assert code == EXIT_CHECKS_FAILED
        assert "[FAIL] oracle_agreement" in capsys.readouterr().out

    def test_spec_file_with_overrides(
        self, tmp_path: Path
    ) -> None:
        """Test --spec with command-line overrides on top.

        Verifies the summary records the merged parameters and output path.
        """
        spec_path = tmp_path / "spec.json"
        spec_path.write_text(
            json.dumps({"name": "graph-estimate-check", "params": {"n": 6, "k": 3, "trials": 5}}),
            encoding="utf-8",
        )

        code = main(["--spec", str(spec_path), "--param", "trials=2", "--out", str(tmp_path / "out")])

        summary_path = tmp_path / "out" / "graph-estimate-check" / "summary.json"
        summary = json.loads(summary_path.read_text(encoding="utf-8"))
        assert code == EXIT_OK
        assert summary["params"]["trials"] == 2
        assert summary["params"]["n"] == 6

    def test_env_output_dir(self, clean_env: pytest.MonkeyPatch, tmp_path: Path) -> None:
        """Test the output directory falls back to SPECTRAL_SSL_OUTPUT_DIR.

        Verifies the summary lands under it.
        """
        clean_env.setenv("SPECTRAL_SSL_OUTPUT_DIR", str(tmp_path / "env"))

        assert main(["--experiment", "graph-estimate-check", *TINY_RUN]) == EXIT_OK
        assert (tmp_path / "env" / "graph-estimate-check" / "summary.json").is_file()

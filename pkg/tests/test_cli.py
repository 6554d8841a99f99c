"""Tests for the command-line driver."""

from unittest.mock import patch

from typer.testing import CliRunner

from g2glue.cli import EXIT_CHECK_FAILED, EXIT_INPUT_ERROR, EXIT_OK, app, run
from g2glue.schemas.reports import CheckResult, SuiteReport

runner = CliRunner()
CLEAN_ENV = {"PATH": "/usr/bin:/bin"}


class TestFeasibilityCommand:
    """Tests for the feasibility subcommand."""

    def test_passes_and_writes_csv(self, tmp_path):
        """Test exit 0, PASS lines and the boundary-curve CSV."""
        with patch.dict("os.environ", CLEAN_ENV, clear=True):
            result = runner.invoke(
                app, ["--output-dir", str(tmp_path), "feasibility", "--samples", "5"]
            )
        assert result.exit_code == EXIT_OK, result.output
        assert "region nonempty: PASS" in result.output
        lines = (tmp_path / "feasibility.csv").read_text().split("\n")
        assert lines[0] == "kappa,gamma_lb_mu,gamma_lb_nu,gamma_lb_delta"
        assert len([line for line in lines if line]) == 6
        assert (tmp_path / "feasibility.txt").exists()

    def test_rerun_is_byte_identical(self, tmp_path):
        """Test that two runs produce identical CSV bytes."""
        outputs = []
        for name in ("a", "b"):
            target = tmp_path / name
            with patch.dict("os.environ", CLEAN_ENV, clear=True):
                runner.invoke(app, ["-o", str(target), "feasibility", "--samples", "7"])
            outputs.append((target / "feasibility.csv").read_bytes())
        assert outputs[0] == outputs[1]
        assert b"\r\n" not in outputs[0]


class TestInputErrors:
    """Tests for exit code 2."""

    def test_missing_config_file(self, tmp_path):
        """Test that an unreadable --config exits with 2."""
        with patch.dict("os.environ", CLEAN_ENV, clear=True):
            result = runner.invoke(app, ["--config", str(tmp_path / "absent.ini"), "feasibility"])
        assert result.exit_code == EXIT_INPUT_ERROR

    def test_invalid_parameter(self, tmp_path):
        """Test that a negative δ exits with 2."""
        with patch.dict("os.environ", CLEAN_ENV, clear=True):
            result = runner.invoke(app, ["-o", str(tmp_path), "feasibility", "--delta", "-1"])
        assert result.exit_code == EXIT_INPUT_ERROR

    def test_unknown_link(self, tmp_path):
        """Test that a missing link file exits with 2."""
        with patch.dict("os.environ", CLEAN_ENV, clear=True):
            result = runner.invoke(
                app, ["-o", str(tmp_path), "verify-link", "--link", str(tmp_path / "none.json")]
            )
        assert result.exit_code == EXIT_INPUT_ERROR


class TestRun:
    """Tests for the run entry point."""

    def test_failed_check_exits_one(self, run_config):
        """Test that a failing check maps to exit code 1."""
        failing = SuiteReport(
            suite="feasibility", checks=[CheckResult(name="region nonempty", passed=False)]
        )
        config = run_config.model_copy(update={"command": "feasibility"})
        with patch("g2glue.cli.run_suites", return_value=[failing]):
            assert run(config) == EXIT_CHECK_FAILED

    def test_unwritable_output(self, run_config, tmp_path):
        """Test that an output path blocked by a file exits with 2."""
        blocker = tmp_path / "blocked"
        blocker.write_text("")
        config = run_config.model_copy(update={"command": "feasibility", "output_dir": blocker})
        assert run(config) == EXIT_INPUT_ERROR

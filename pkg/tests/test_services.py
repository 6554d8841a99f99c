"""Tests for the service layer."""

import pytest

from g2glue.errors import CheckFailure, IoFailure
from g2glue.schemas.reports import CheckResult, SuiteReport, Table
from g2glue.services import SUITES, emit_csv, require_passed, run_suites, write_artifacts
from g2glue.services.artifacts import format_cell
from g2glue.geometry import glue_sim
from g2glue.services.suites import _threshold_table, verify_pointwise


@pytest.fixture
def sample_table() -> Table:
    """A small mixed-type table."""
    return Table(
        name="sample",
        header=["s", "region", "ok"],
        rows=[[0.1, "outer", True], [0.25, "total", False]],
    )


class TestArtifacts:
    """Tests for CSV and report writers."""

    def test_format_cell(self):
        """Test 17 significant digits and lower-case booleans."""
        assert format_cell(0.1) == "0.10000000000000001"
        assert format_cell(True) == "true"
        assert format_cell(3) == "3"
        assert format_cell("outer") == "outer"

    def test_emit_csv(self, tmp_path, sample_table):
        """Test header, rows and LF line endings."""
        path = emit_csv(tmp_path / "nested" / "sample.csv", sample_table)
        assert path.read_bytes() == (
            b"s,region,ok\n0.10000000000000001,outer,true\n0.25,total,false\n"
        )

    def test_emit_csv_failure(self, tmp_path, sample_table):
        """Test that an unwritable path raises IoFailure."""
        blocker = tmp_path / "file"
        blocker.write_text("")
        with pytest.raises(IoFailure):
            emit_csv(blocker / "sample.csv", sample_table)

    def test_write_artifacts(self, tmp_path, sample_table):
        """Test one CSV per table plus the suite text report."""
        report = SuiteReport(
            suite="feasibility",
            checks=[CheckResult(name="region nonempty", passed=True, value=0.08)],
            tables=[sample_table],
        )
        written = write_artifacts(tmp_path, report)
        assert [p.name for p in written] == ["sample.csv", "feasibility.txt"]
        assert "region nonempty: PASS" in (tmp_path / "feasibility.txt").read_text()

    def test_ragged_table_rejected(self):
        """Test that a row of the wrong width fails validation."""
        with pytest.raises(ValueError):
            Table(name="bad", header=["a", "b"], rows=[[1]])


class TestSuites:
    """Tests for the suite runner."""

    def test_registry(self):
        """Test that every command has a suite."""
        assert set(SUITES) == {
            "verify-pointwise",
            "verify-link",
            "verify-cone",
            "rates",
            "glue-scan",
            "feasibility",
            "joyce-gate",
        }

    def test_unknown_suite(self, run_config):
        """Test that an unknown suite name raises ValueError."""
        with pytest.raises(ValueError, match="unknown suites"):
            run_suites(["metrics"], run_config)

    def test_feasibility_suite_passes(self, run_config):
        """Test that the default feasibility suite passes with its table."""
        (report,) = run_suites(["feasibility"], run_config)
        assert report.passed, report.render()
        assert report.tables[0].name == "feasibility"

    def test_pointwise_suite_passes(self, run_config):
        """Test that the pointwise suite passes at the default seed."""
        report = verify_pointwise(run_config)
        assert report.passed, report.render()
        assert report.seed == 42

    def test_threshold_table(self, glue_params):
        """Test that the (1/2)-equivalence threshold is a table row, not a check."""
        s_max = glue_sim.equivalence_threshold(glue_params)
        table = _threshold_table(s_max)
        assert table.name == "equivalence_threshold"
        assert table.rows == [[0.5, s_max]]

    def test_joyce_gate_reports_threshold_as_table(self, run_config):
        """Test that the joyce-gate suite carries the threshold only in its tables."""
        (report,) = run_suites(["joyce-gate"], run_config)
        assert "equivalence_threshold" in [t.name for t in report.tables]
        assert not any("equivalence" in c.name for c in report.checks)

    def test_joyce_gate_default_kappa(self, run_config):
        """Test that an unset kappa is half the bound at the configured gamma."""
        p = run_config.glue
        expected = 0.5 * glue_sim.kappa_at_gamma(p.mu, p.nu_prime, p.delta, p.gamma)
        report = SUITES["joyce-gate"](run_config)
        assert report.checks[0].name == "(gamma, kappa) feasible"
        assert report.checks[0].value == pytest.approx(expected)

    def test_require_passed(self):
        """Test that the first failing check is named."""
        good = SuiteReport(suite="a", checks=[CheckResult(name="x", passed=True)])
        bad = SuiteReport(suite="b", checks=[CheckResult(name="y", passed=False)])
        require_passed([good])
        with pytest.raises(CheckFailure) as info:
            require_passed([good, bad])
        assert info.value.check == "y"

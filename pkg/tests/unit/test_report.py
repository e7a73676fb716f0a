"""
Unit tests for check results and the report summary.
"""
import pytest

from models.report import CheckResult, ReportDoc, SuiteReport


@pytest.mark.unit
class TestCheckResult:
    """Tests for the CheckResult constructors."""

    def test_residual_within_threshold_passes(self):
        """Test a residual at the threshold counts as a pass."""
        check = CheckResult.from_residual("ricci_flat", "metric", 1e-10, 1e-10)
        assert check.passed
        assert check.status == "pass"
        assert check.max_residual == 1e-10

    def test_residual_above_threshold_fails(self):
        check = CheckResult.from_residual("ricci_flat", "metric", 2e-9, 1e-9, details={"worst_point": 3})
        assert not check.passed
        assert check.status == "fail"
        assert check.details == {"worst_point": 3}

    def test_nan_residual_fails(self):
        """Test a NaN residual never passes."""
        check = CheckResult.from_residual("ricci_flat", "metric", float("nan"), 1e-9)
        assert check.status == "fail"

    def test_flag_and_skip(self):
        assert CheckResult.from_flag("smoke", "wave", True).status == "pass"
        skipped = CheckResult.skipped("ricci_flat", "metric", "requires cauchy_riemann")
        assert skipped.status == "skipped"
        assert not skipped.passed
        assert skipped.message == "requires cauchy_riemann"


@pytest.mark.unit
class TestReportDoc:
    """Tests for ReportDoc.compute_summary."""

    def _doc(self, checks):
        return ReportDoc(tool_version="0", command="verify", suites=[SuiteReport(name="metric", checks=checks)])

    def test_all_pass(self):
        doc = self._doc([CheckResult.from_residual("a", "metric", 0.0, 1.0)])
        doc.compute_summary()
        assert doc.passed
        assert doc.check_count == 1
        assert doc.failures == []

    def test_failures_are_listed(self):
        doc = self._doc([
            CheckResult.from_residual("a", "metric", 0.0, 1.0),
            CheckResult.from_residual("b", "metric", 2.0, 1.0),
            CheckResult.skipped("c", "metric", "requires b"),
        ])
        doc.compute_summary()
        assert not doc.passed
        assert doc.failures == ["metric.b"]
        assert doc.failure_count == 1
        assert doc.skipped_count == 1

    def test_diagnostic_failures_do_not_count(self):
        """Test a failing diagnostic check leaves the run passing."""
        diagnostic = CheckResult.from_residual("matrix_table", "liealg", 1.0, 0.0, diagnostic=True)
        doc = self._doc([diagnostic])
        doc.compute_summary()
        assert doc.passed
        assert doc.suites[0].passed

    def test_suite_pass_ignores_skipped(self):
        suite = SuiteReport(name="ambrose_singer", checks=[CheckResult.skipped("x", "ambrose_singer", "flat")])
        assert suite.passed

"""Tests for the registered verification suite."""

import pytest

from app.core.exceptions import VerificationFailedError
from app.schemas.params import QParameters
from app.schemas.verification import CheckKind, CheckResult, VerificationReport
from app.services import qhermite_service, verification_service
from app.services.verification_service import VerificationContext, register_check, run_verification

PARAMS = QParameters(q=2.0)


@pytest.fixture(scope="module")
def full_report() -> VerificationReport:
    return run_verification(VerificationContext(PARAMS, 0.5, 0.7))


# ============== Suite Tests ==============


class TestRunVerification:
    """Tests for the complete run at q = 2, b = 0.5, b' = 0.7."""

    def test_all_checks_pass(self, full_report):
        """Every registered check passes."""
        assert full_report.passed, [check.name for check in full_report.failed]
        assert len(full_report.checks) == len(verification_service.CHECKS)

    def test_gate_runs_first(self, full_report):
        """The evaluator gate is the first result."""
        assert full_report.checks[0].name == "evaluator_gate"

    def test_sign_convention_is_a_record(self, full_report):
        """The verbatim-sign observation is recorded, not asserted."""
        record = next(check for check in full_report.checks if check.name == "sign_convention_record")
        assert record.kind == CheckKind.RECORD
        assert record.passed

    def test_selected_names(self):
        """Only the gate and the named checks run."""
        report = run_verification(VerificationContext(PARAMS, 0.5, 0.5), names=["total_mass"])
        assert [check.name for check in report.checks] == ["evaluator_gate", "total_mass"]
        assert report.passed


# ============== Gate Tests ==============


class TestGate:
    """Tests for the evaluator gate."""

    def test_failing_gate_skips_the_rest(self, monkeypatch):
        """A broken recurrence fails the gate and skips every other check."""
        original = qhermite_service.h_poly_rec
        monkeypatch.setattr(qhermite_service, "h_poly_rec", lambda n, x, params: original(n, x, params) + 1.0)
        report = run_verification(VerificationContext(PARAMS, 0.5, 0.7), names=["total_mass", "orthogonality"])
        gate, *rest = report.checks
        assert not gate.passed
        assert rest and all(check.skipped and not check.passed for check in rest)
        assert not report.passed


# ============== Registry Tests ==============


class TestRegistry:
    """Tests for check registration and reporting."""

    def test_duplicate_name_rejected(self):
        """A name can only be registered once."""
        with pytest.raises(ValueError):
            register_check("total_mass", tolerance=1.0)(lambda ctx: (0.0, None))

    def test_ensure_passed_raises(self):
        """A failed report raises VerificationFailedError with the failed names."""
        report = VerificationReport(
            q=2.0,
            b=0.5,
            b_prime=0.5,
            checks=[CheckResult(name="plancherel", deviation=1.0, tolerance=1e-7, passed=False)],
        )
        with pytest.raises(VerificationFailedError) as exc_info:
            verification_service.ensure_passed(report)
        assert exc_info.value.metadata["failed"] == ["plancherel"]

    def test_ensure_passed_accepts_clean_report(self):
        """A passing report raises nothing."""
        report = VerificationReport(q=2.0, b=0.5, b_prime=0.5, checks=[])
        verification_service.ensure_passed(report)

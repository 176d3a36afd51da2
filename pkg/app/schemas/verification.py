from enum import Enum

from pydantic import BaseModel


class CheckKind(str, Enum):
    ASSERTION = "assertion"
    # records an observed fact; it fails only if the fact stops holding
    RECORD = "record"


class CheckResult(BaseModel):
    name: str
    kind: CheckKind = CheckKind.ASSERTION
    deviation: float | None
    tolerance: float
    passed: bool
    skipped: bool = False
    note: str | None = None


class VerificationReport(BaseModel):
    """Outcome of the registered invariant checks for one (q, b, b')."""

    q: float
    b: float
    b_prime: float
    checks: list[CheckResult]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failed(self) -> list[CheckResult]:
        return [check for check in self.checks if not check.passed]

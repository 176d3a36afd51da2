"""
Custom exception classes for the q-oscillator toolkit.
Provides structured error handling with machine-readable error codes,
shared by the HTTP API (status codes) and the CLI (exit codes).
"""

from enum import Enum
from typing import Any


class ErrorCode(str, Enum):
    """Error codes reported in JSON error documents"""

    # Validation errors (422)
    VALIDATION_ERROR = "VALIDATION_ERROR"
    VALIDATION_INVALID_PARAMETER = "VALIDATION_INVALID_PARAMETER"
    WINDOW_TOO_SMALL = "WINDOW_TOO_SMALL"
    WINDOW_MISMATCH = "WINDOW_MISMATCH"

    # Numerical errors (500)
    NUMERIC_OVERFLOW = "NUMERIC_OVERFLOW"
    NUMERIC_NON_CONVERGENCE = "NUMERIC_NON_CONVERGENCE"
    EIGENSOLVER_FAILED = "EIGENSOLVER_FAILED"
    TRANSFORM_VALIDATION_FAILED = "TRANSFORM_VALIDATION_FAILED"
    UNITARITY_VIOLATED = "UNITARITY_VIOLATED"
    VERIFICATION_FAILED = "VERIFICATION_FAILED"

    # Resource errors (404)
    RESOURCE_NOT_FOUND = "RESOURCE_NOT_FOUND"

    # Server errors (500+)
    SERVER_ERROR = "SERVER_ERROR"


class AppException(Exception):
    """
    Base exception class for application errors.
    All custom exceptions should inherit from this class.
    """

    def __init__(
        self,
        message: str,
        code: ErrorCode = ErrorCode.SERVER_ERROR,
        status_code: int = 500,
        exit_code: int = 1,
        field: str | None = None,
        metadata: dict[str, Any] | None = None,
    ):
        self.message = message
        self.code = code
        self.status_code = status_code
        self.exit_code = exit_code
        self.field = field
        self.metadata = metadata or {}
        super().__init__(self.message)

    def to_dict(self) -> dict[str, Any]:
        """Convert exception to response dictionary"""
        response = {
            "detail": self.message,
            "code": self.code.value,
        }
        if self.field:
            response["field"] = self.field
        if self.metadata:
            response["metadata"] = self.metadata
        return response


# Validation Errors (422, exit 2)


class ValidationError(AppException):
    """Validation error"""

    def __init__(
        self,
        message: str = "Invalid input",
        field: str | None = None,
        code: ErrorCode = ErrorCode.VALIDATION_ERROR,
        metadata: dict[str, Any] | None = None,
    ):
        super().__init__(
            message=message,
            code=code,
            status_code=422,
            exit_code=2,
            field=field,
            metadata=metadata,
        )


class InvalidParameterError(ValidationError):
    """A deformation, extension label, window or index is out of range"""

    def __init__(
        self,
        message: str = "Parameter out of range",
        field: str | None = None,
        metadata: dict[str, Any] | None = None,
    ):
        super().__init__(
            message=message,
            field=field,
            code=ErrorCode.VALIDATION_INVALID_PARAMETER,
            metadata=metadata,
        )


class WindowMismatchError(ValidationError):
    """Grid function and transform matrix live on different windows"""

    def __init__(
        self,
        message: str = "Grid function window does not match the transform window",
        metadata: dict[str, Any] | None = None,
    ):
        super().__init__(
            message=message,
            field="window",
            code=ErrorCode.WINDOW_MISMATCH,
            metadata=metadata,
        )


class WindowTooSmallError(AppException):
    """Boundary terms of a windowed sum exceed the truncation threshold"""

    def __init__(
        self,
        message: str = "Spectral window too small for the requested accuracy",
        metadata: dict[str, Any] | None = None,
    ):
        super().__init__(
            message=message,
            code=ErrorCode.WINDOW_TOO_SMALL,
            status_code=422,
            exit_code=1,
            field="window",
            metadata=metadata,
        )


# Numerical Errors (500, exit 1)


class NumericError(AppException):
    """Base numerical error"""

    def __init__(
        self,
        message: str = "Numerical failure",
        code: ErrorCode = ErrorCode.SERVER_ERROR,
        metadata: dict[str, Any] | None = None,
    ):
        super().__init__(
            message=message,
            code=code,
            status_code=500,
            exit_code=1,
            metadata=metadata,
        )


class NumericOverflowError(NumericError):
    """A value left the representable floating point range"""

    def __init__(
        self,
        message: str = "Value exceeds the floating point range",
        metadata: dict[str, Any] | None = None,
    ):
        super().__init__(
            message=message,
            code=ErrorCode.NUMERIC_OVERFLOW,
            metadata=metadata,
        )


class NonConvergenceError(NumericError):
    """Product or series did not reach its tail bound within max_terms"""

    def __init__(
        self,
        message: str = "Truncated product or series did not converge",
        metadata: dict[str, Any] | None = None,
    ):
        super().__init__(
            message=message,
            code=ErrorCode.NUMERIC_NON_CONVERGENCE,
            metadata=metadata,
        )


class EigensolverError(NumericError):
    """Tridiagonal eigensolver failed or returned inaccurate pairs"""

    def __init__(
        self,
        message: str = "Tridiagonal eigensolver failed",
        metadata: dict[str, Any] | None = None,
    ):
        super().__init__(
            message=message,
            code=ErrorCode.EIGENSOLVER_FAILED,
            metadata=metadata,
        )


class TransformValidationError(NumericError):
    """Product-form entries disagree with the defining series"""

    def __init__(
        self,
        message: str = "Transform spot-check against the series form failed",
        metadata: dict[str, Any] | None = None,
    ):
        super().__init__(
            message=message,
            code=ErrorCode.TRANSFORM_VALIDATION_FAILED,
            metadata=metadata,
        )


class UnitarityError(NumericError):
    """Interior column norms of the unitary core deviate from 1"""

    def __init__(
        self,
        message: str = "Transform core is not unitary on the window interior",
        metadata: dict[str, Any] | None = None,
    ):
        super().__init__(
            message=message,
            code=ErrorCode.UNITARITY_VIOLATED,
            metadata=metadata,
        )


class VerificationFailedError(NumericError):
    """At least one registered verification check failed"""

    def __init__(
        self,
        message: str = "Verification failed",
        metadata: dict[str, Any] | None = None,
    ):
        super().__init__(
            message=message,
            code=ErrorCode.VERIFICATION_FAILED,
            metadata=metadata,
        )

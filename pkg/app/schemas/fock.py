from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from app.core.exceptions import InvalidParameterError


class FockOperator(str, Enum):
    annihilation = "annihilation"
    creation = "creation"
    number = "number"
    position = "position"
    momentum = "momentum"
    hamiltonian = "hamiltonian"


class FockVector(BaseModel):
    """Coefficients c_0..c_N of a state in the ladder basis |n>."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    coefficients: np.ndarray
    # set when a creation step pushed amplitude past |N>
    truncation_loss: bool = False

    @field_validator("coefficients", mode="before")
    @classmethod
    def _as_complex_array(cls, value: object) -> np.ndarray:
        array = np.asarray(value, dtype=complex)
        if array.ndim != 1 or array.size == 0:
            raise InvalidParameterError("Fock coefficients must be a non-empty 1-D sequence", field="coefficients")
        return array

    @classmethod
    def basis(cls, n: int, truncation: int) -> "FockVector":
        """|n> inside a space truncated at N."""
        if not 0 <= n <= truncation:
            raise InvalidParameterError(f"Basis index {n} outside 0..{truncation}", field="n")
        coefficients = np.zeros(truncation + 1, dtype=complex)
        coefficients[n] = 1.0
        return cls(coefficients=coefficients)

    @property
    def truncation(self) -> int:
        return self.coefficients.size - 1

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.coefficients))

    def normalized(self, rel_tol: float = 1e-10) -> bool:
        return abs(self.norm - 1.0) < rel_tol

    def __add__(self, other: "FockVector") -> "FockVector":
        return FockVector(
            coefficients=self.coefficients + other.coefficients,
            truncation_loss=self.truncation_loss or other.truncation_loss,
        )

    def __sub__(self, other: "FockVector") -> "FockVector":
        return FockVector(
            coefficients=self.coefficients - other.coefficients,
            truncation_loss=self.truncation_loss or other.truncation_loss,
        )

    def scaled(self, factor: complex) -> "FockVector":
        return FockVector(coefficients=factor * self.coefficients, truncation_loss=self.truncation_loss)

"""Deformation parameters, tolerances, extremal measures and spectral windows."""

import math
from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict, computed_field, model_validator

from app.config import settings
from app.core.exceptions import InvalidParameterError

# b may arrive as exp(-ln q) or 1/q computed elsewhere
_B_LOWER_SLACK = 1e-14


class MeasureKind(str, Enum):
    """Which operator an extension belongs to."""

    POSITION = "position"
    MOMENTUM = "momentum"


class QParameters(BaseModel):
    """Deformation q > 1 with q̆ = 1/q and τ = ln q."""

    model_config = ConfigDict(frozen=True)

    q: float
    relaxed: bool = False

    @model_validator(mode="after")
    def _check_q(self) -> "QParameters":
        if not math.isfinite(self.q) or self.q <= 0 or self.q == 1:
            raise InvalidParameterError(f"q must be a positive real other than 1, got {self.q}", field="q")
        if self.q < 1 and not self.relaxed:
            raise InvalidParameterError(
                f"q must be > 1 for the oscillator, got {self.q}",
                field="q",
            )
        return self

    @classmethod
    def relaxed_q(cls, q: float) -> "QParameters":
        """Allow 0 < q < 1; only meaningful for self-adjointness verdicts."""
        return cls(q=q, relaxed=True)

    @computed_field
    @property
    def qbreve(self) -> float:
        return 1.0 / self.q

    @computed_field
    @property
    def tau(self) -> float:
        return math.log(self.q)


class Tolerance(BaseModel):
    """Accuracy targets and truncation limits for products and series."""

    model_config = ConfigDict(frozen=True)

    rel_tol: float = 1e-10
    tail_eps: float = 1e-16
    max_terms: int = 500

    @model_validator(mode="after")
    def _check_positive(self) -> "Tolerance":
        if not (self.rel_tol > 0 and self.tail_eps > 0):
            raise InvalidParameterError("Tolerances must be strictly positive", field="tolerance")
        if self.max_terms < 8:
            raise InvalidParameterError("max_terms must be at least 8", field="max_terms")
        return self

    @classmethod
    def from_settings(cls, **overrides: float | int | None) -> "Tolerance":
        """Defaults from the environment, with explicit overrides on top."""
        values: dict[str, float | int] = {
            "rel_tol": settings.DEFAULT_REL_TOL,
            "tail_eps": settings.DEFAULT_TAIL_EPS,
            "max_terms": settings.DEFAULT_MAX_TERMS,
        }
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**values)


class SpectralWindow(BaseModel):
    """Finite range r_min..r_max of the lattice index r."""

    model_config = ConfigDict(frozen=True)

    r_min: int
    r_max: int

    @model_validator(mode="after")
    def _check_order(self) -> "SpectralWindow":
        if self.r_min > self.r_max:
            raise InvalidParameterError(
                f"Empty window [{self.r_min}, {self.r_max}]",
                field="window",
            )
        return self

    @classmethod
    def symmetric(cls, radius: int) -> "SpectralWindow":
        return cls(r_min=-radius, r_max=radius)

    @property
    def size(self) -> int:
        return self.r_max - self.r_min + 1

    def indices(self) -> np.ndarray:
        return np.arange(self.r_min, self.r_max + 1)

    def position_of(self, r: int) -> int:
        """Array offset of lattice index r."""
        if not self.r_min <= r <= self.r_max:
            raise InvalidParameterError(f"r={r} outside window [{self.r_min}, {self.r_max}]", field="r")
        return r - self.r_min


class ExtremalMeasure(BaseModel):
    """Self-adjoint extension label b in [q̆, 1) of Q (position) or P (momentum)."""

    model_config = ConfigDict(frozen=True)

    params: QParameters
    b: float
    kind: MeasureKind = MeasureKind.POSITION

    @model_validator(mode="after")
    def _check_b(self) -> "ExtremalMeasure":
        if self.params.relaxed:
            raise InvalidParameterError("Extensions exist only for q > 1", field="q")
        lower = self.params.qbreve * (1.0 - _B_LOWER_SLACK)
        if not (math.isfinite(self.b) and lower <= self.b < 1.0):
            raise InvalidParameterError(
                f"b must lie in [1/q, 1) = [{self.params.qbreve}, 1), got {self.b}",
                field="b",
            )
        return self

    @computed_field
    @property
    def sigma(self) -> float:
        return math.log(self.b)

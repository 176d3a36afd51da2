import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from app.core.exceptions import InvalidParameterError
from app.schemas.params import ExtremalMeasure, SpectralWindow


class GridFunction(BaseModel):
    """Function on the spectral lattice of one extension, F(r) for r in the window.

    Weights are kept as log m_r; far from the center m_r is below the
    smallest positive double while m_r^{1/2}|F(r)| is still an ordinary number.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    measure: ExtremalMeasure
    window: SpectralWindow
    points: np.ndarray
    log_weights: np.ndarray
    values: np.ndarray

    @field_validator("values", mode="before")
    @classmethod
    def _as_complex(cls, value: object) -> np.ndarray:
        return np.asarray(value, dtype=complex)

    @model_validator(mode="after")
    def _check_shapes(self) -> "GridFunction":
        size = self.window.size
        if not (self.points.shape == self.log_weights.shape == self.values.shape == (size,)):
            raise InvalidParameterError(
                f"Grid arrays must have the window size {size}",
                field="values",
            )
        return self

    @property
    def amplitudes(self) -> np.ndarray:
        """m_r^{1/2} F(r)."""
        with np.errstate(over="ignore", invalid="ignore"):
            return np.exp(0.5 * self.log_weights) * self.values

    @property
    def weighted_norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


class OrthogonalityReport(BaseModel):
    """Gram matrix deviation of an orthonormal family on a window."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    max_deviation: float
    worst_pair: tuple[int, int]
    degree: int
    window: SpectralWindow
    boundary_log_term: float
    gram: np.ndarray


class MassIdentityResult(BaseModel):
    """m_r times the partial sum of P_n(x_b(r))^2, which tends to 1."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    value: float
    r: int
    degree: int
    tail_estimate: float
    slow_convergence: bool
    partial_values: np.ndarray


class EigenfunctionValue(BaseModel):
    """Generating function of the coefficient family at one argument y."""

    value: complex
    tail_bound: float
    n_terms: int
    converged: bool = True


class SeparationReport(BaseModel):
    """Relative position of the spectra of two extensions on a common window."""

    b: float
    b_prime: float
    interlaced: bool
    min_gap: float
    shared_points: int
    compared_points: int

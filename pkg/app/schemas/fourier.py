import numpy as np
from pydantic import BaseModel, ConfigDict

from app.schemas.params import QParameters, SpectralWindow


class SeriesValue(BaseModel):
    """Truncated series with the size of its last and largest terms."""

    value: complex
    tail_bound: float
    max_term: float
    n_terms: int


class SpotCheck(BaseModel):
    """One matrix entry computed by both evaluators."""

    r_prime: int
    r: int
    product: complex
    series: complex
    deviation: float


class TransformMatrix(BaseModel):
    """Discrete q-Fourier transform from the momentum grid of b' to the coordinate grid of b.

    t_entries[i, j] is the unitary core T_{r'r} with r' = r_min + i and
    r = r_min + j; entries = (m_r'(b')/m_r(b))^{1/2} T.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    params: QParameters
    b: float
    b_prime: float
    window: SpectralWindow
    log_weights: np.ndarray
    log_weights_prime: np.ndarray
    t_entries: np.ndarray
    entries: np.ndarray
    column_norms: np.ndarray
    row_norms: np.ndarray
    interior_columns: list[int]
    interior_rows: list[int]
    unitarity_deviation: float | None = None
    spot_checks: list[SpotCheck] = []
    n_factors: int

    @property
    def worst_spot_check(self) -> float:
        return max((check.deviation for check in self.spot_checks), default=0.0)

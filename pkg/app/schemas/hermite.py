from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict

from app.schemas.params import MeasureKind, QParameters


class SignConvention(str, Enum):
    """Sign of the position coefficients.

    eq12        (-1)^n q̆^{n(n+1)/4} (q̆;q̆)_n^{-1/2} h_n(x'), so P_1(x) = -x
    eigenvector coefficients of the Q-eigenvector in the ladder basis, P_1(x) = +x
    """

    EQ12 = "eq12"
    EIGENVECTOR = "eigenvector"


class HermiteFamily(BaseModel):
    """h_0..h_N stored as sign and log-magnitude, last axis indexed by n."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    sign: np.ndarray
    log_abs: np.ndarray

    @property
    def degree(self) -> int:
        return self.sign.shape[-1] - 1

    def values(self) -> np.ndarray:
        with np.errstate(over="ignore"):
            return self.sign * np.exp(self.log_abs)


class CoefficientFamily(BaseModel):
    """Eigenvector coefficients P_n (position) or P̃_n (momentum) at one spectral point."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kind: MeasureKind
    params: QParameters
    values: np.ndarray
    eval_point: float
    convention: SignConvention = SignConvention.EIGENVECTOR
    # log m_r of the spectral point, when the family belongs to one
    log_mass: float | None = None

    @property
    def degree(self) -> int:
        return self.values.size - 1

    @property
    def normalized(self) -> np.ndarray:
        """m_r^{1/2} times the family; a unit vector in the limit N -> inf."""
        if self.log_mass is None:
            return self.values
        return np.exp(0.5 * self.log_mass) * self.values

    def squared_partial_sums(self) -> np.ndarray:
        return np.cumsum(np.abs(self.values) ** 2)

from collections.abc import Callable
from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict


class JacobiOperator(BaseModel):
    """Symmetric Jacobi matrix: a(n) off the diagonal, b(n) on it."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    a: Callable[[int], float]
    b: Callable[[int], float]
    label: str


class Verdict(str, Enum):
    """Outcome of the finite-probe self-adjointness criteria."""

    SELF_ADJOINT_BOUNDED = "SelfAdjointBounded"
    SELF_ADJOINT_CARLEMAN = "SelfAdjointCarleman"
    NOT_SELF_ADJOINT = "NotSelfAdjoint"
    INCONCLUSIVE = "Inconclusive"


class VerdictEvidence(BaseModel):
    """Diagnostics the verdict was read from."""

    n_probe: int
    first_quartile_max: float
    last_quartile_max: float
    sup_bound: float | None = None
    increment_raabe: float | None = None
    reciprocal_partial_sum: float
    reciprocal_raabe_min: float
    reciprocal_raabe_max: float
    reciprocal_ratio_max: float
    reciprocal_tail_bound: float | None = None
    partial_sum_slope: float
    diagonal_bounded: bool
    log_convex_from: int | None = None
    criterion: str


class SelfAdjointnessVerdict(BaseModel):
    verdict: Verdict
    label: str
    evidence: VerdictEvidence


class EigenDecomposition(BaseModel):
    """Spectrum of the leading N x N block, eigenvalues ascending."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    max_residual: float

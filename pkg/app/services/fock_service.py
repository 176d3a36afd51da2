"""Fock representation of the q-oscillator on truncated coefficient vectors."""

import logging

import numpy as np

from app.core.exceptions import InvalidParameterError
from app.schemas.fock import FockOperator, FockVector
from app.schemas.params import QParameters
from app.services.qcore_service import q_number

logger = logging.getLogger(__name__)


def ladder_elements(truncation: int, params: QParameters) -> np.ndarray:
    """{n}_q^{1/2} for n = 1..N."""
    return np.sqrt(np.array([q_number(n, params) for n in range(1, truncation + 1)], dtype=float))


def apply_annihilation(v: FockVector, params: QParameters) -> FockVector:
    """a|n> = {n}^{1/2}|n-1>; the top component becomes 0."""
    c = v.coefficients
    out = np.zeros_like(c)
    out[:-1] = ladder_elements(v.truncation, params) * c[1:]
    return FockVector(coefficients=out, truncation_loss=v.truncation_loss)


def apply_creation(v: FockVector, params: QParameters) -> FockVector:
    """a+|n> = {n+1}^{1/2}|n+1>; amplitude pushed past |N> is dropped and flagged."""
    c = v.coefficients
    out = np.zeros_like(c)
    out[1:] = ladder_elements(v.truncation, params) * c[:-1]
    lost = c[-1] != 0
    if lost:
        logger.debug(f"Creation operator dropped amplitude at the truncation N={v.truncation}")
    return FockVector(coefficients=out, truncation_loss=v.truncation_loss or bool(lost))


def apply_number(v: FockVector) -> FockVector:
    return FockVector(
        coefficients=np.arange(v.truncation + 1) * v.coefficients,
        truncation_loss=v.truncation_loss,
    )


def apply_position(v: FockVector, params: QParameters) -> FockVector:
    """Q = a+ + a."""
    return apply_creation(v, params) + apply_annihilation(v, params)


def apply_momentum(v: FockVector, params: QParameters) -> FockVector:
    """P = i(a+ - a)."""
    return (apply_creation(v, params) - apply_annihilation(v, params)).scaled(1j)


def apply_hamiltonian(v: FockVector, params: QParameters) -> FockVector:
    """H = (a a+ + a+ a)/2."""
    up_down = apply_annihilation(apply_creation(v, params), params)
    down_up = apply_creation(apply_annihilation(v, params), params)
    return (up_down + down_up).scaled(0.5)


def hamiltonian_eigenvalue(n: int, params: QParameters) -> float:
    """({n+1}_q + {n}_q)/2 = (q^n (q+1) - 2) / (2(q-1))."""
    if n < 0:
        raise InvalidParameterError(f"Energy level must be >= 0, got {n}", field="n")
    return 0.5 * (q_number(n + 1, params) + q_number(n, params))


def fock_matrix(operator: FockOperator, truncation: int, params: QParameters) -> np.ndarray:
    """Dense matrix of an operator on |0>..|N>, column k = image of |k>."""
    size = truncation + 1
    ladder = ladder_elements(truncation, params)
    lower = np.diag(ladder, 1).astype(complex)  # a
    raise_ = np.diag(ladder, -1).astype(complex)  # a+
    match operator:
        case FockOperator.annihilation:
            return lower
        case FockOperator.creation:
            return raise_
        case FockOperator.number:
            return np.diag(np.arange(size)).astype(complex)
        case FockOperator.position:
            return lower + raise_
        case FockOperator.momentum:
            return 1j * (raise_ - lower)
        case FockOperator.hamiltonian:
            # exact diagonal; the truncated product a a+ would be wrong at |N>
            return np.diag([hamiltonian_eigenvalue(n, params) for n in range(size)]).astype(complex)
    raise InvalidParameterError(f"Unknown operator {operator}", field="operator")

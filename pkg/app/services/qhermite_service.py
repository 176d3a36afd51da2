"""q^{-1}-Hermite polynomials h_n(x|q̆) and the eigenvector coefficient families built from them.

Two evaluators exist: the explicit k-sum (exact, but it cancels badly for
large n) and the three-term recurrence

    h_{m+1}(x) = 2x h_m(x) - (q^m - 1) h_{m-1}(x),  h_0 = 1, h_1 = 2x,

which is checked against the sum for n <= GATE_DEGREE and used beyond it.
The recurrence runs on rescaled mantissas with the binary exponent carried
in a separate log scale, so h_n never overflows.
"""

import logging
import math

import numpy as np

from app.core.exceptions import InvalidParameterError, NumericOverflowError
from app.schemas.hermite import CoefficientFamily, HermiteFamily, SignConvention
from app.schemas.params import MeasureKind, QParameters
from app.services.qcore_service import MAX_LOG, log_q_factorials

logger = logging.getLogger(__name__)

GATE_DEGREE = 12
CANCELLATION_RATIO = 1e12
LN2 = math.log(2.0)


def x_prime(x: float | np.ndarray, params: QParameters) -> float | np.ndarray:
    """x' = (q-1)^{1/2} x / 2; the same map sends p to p'."""
    return 0.5 * math.sqrt(params.q - 1.0) * x


def _log_binomials(n: int, qb: float) -> np.ndarray:
    """log of the q̆-binomial (q̆;q̆)_n / ((q̆;q̆)_k (q̆;q̆)_{n-k}), k = 0..n."""
    logs = log_q_factorials(n, qb)
    return logs[n] - logs - logs[::-1]


def h_poly_sum(n: int, x: float, params: QParameters) -> float:
    """Explicit sum over k of (-1)^k q̆^{k(k-n)} [n choose k]_q̆ e^{(n-2k)ξ}, sinh ξ = x.

    Summands k and n-k are paired into 2 cosh((n-2k)ξ) or 2 sinh((n-2k)ξ),
    evaluated at |x| and reflected by parity, so odd degrees vanish exactly at 0.
    """
    if n < 0:
        raise InvalidParameterError(f"Degree must be >= 0, got {n}", field="n")
    k = np.arange(n // 2 + 1)
    m = n - 2 * k
    xi = math.asinh(abs(x))
    with np.errstate(divide="ignore"):
        if n % 2:
            pair = np.log(-np.expm1(-2.0 * m * xi))
        else:
            pair = np.where(m == 0, 0.0, np.log1p(np.exp(-2.0 * m * xi)))
    log_binomials = _log_binomials(n, params.qbreve)[: k.size]
    log_terms = log_binomials + k * (n - k) * params.tau + m * xi + pair
    if log_terms.max() > MAX_LOG:
        raise NumericOverflowError(
            f"h_{n} summands overflow at x={x}",
            metadata={"n": n, "x": x, "q": params.q},
        )
    terms = np.where(k % 2 == 0, 1.0, -1.0) * np.exp(log_terms)
    result = float(terms.sum())
    if x < 0 and n % 2:
        result = -result
    largest = float(np.abs(terms).max())
    if largest > CANCELLATION_RATIO * max(abs(result), 1.0):
        logger.warning(f"h_{n}({x:g}) explicit sum lost precision: largest summand {largest:.3e} vs result {result:.3e}")
    return result


def hermite_family(xp: float | np.ndarray, N: int, params: QParameters) -> HermiteFamily:
    """h_0..h_N at one or many arguments by the rescaled recurrence."""
    if N < 0:
        raise InvalidParameterError(f"Degree must be >= 0, got {N}", field="N")
    xp = np.asarray(xp, dtype=float)
    shape = xp.shape + (N + 1,)
    sign = np.zeros(shape)
    log_abs = np.full(shape, -np.inf)

    previous = np.zeros_like(xp)
    current = np.ones_like(xp)
    scale = np.zeros_like(xp)
    with np.errstate(divide="ignore"):
        for m in range(N + 1):
            sign[..., m] = np.sign(current)
            log_abs[..., m] = np.log(np.abs(current)) + scale
            if m == N:
                break
            q_m = params.q**m - 1.0
            if not math.isfinite(q_m):
                raise NumericOverflowError(f"q^{m} overflows", metadata={"q": params.q, "m": m})
            previous, current = current, 2.0 * xp * current - q_m * previous
            # renormalize both mantissas by the binary exponent of the larger one
            _, exponent = np.frexp(np.maximum(np.abs(current), np.abs(previous)))
            current = np.ldexp(current, -exponent)
            previous = np.ldexp(previous, -exponent)
            scale = scale + exponent * LN2
    return HermiteFamily(sign=sign, log_abs=log_abs)


def h_poly_rec(n: int, x: float, params: QParameters) -> float:
    """h_n(x|q̆) by the three-term recurrence."""
    family = hermite_family(x, n, params)
    log_abs = float(family.log_abs[n])
    if log_abs > MAX_LOG:
        raise NumericOverflowError(f"h_{n}({x}) exceeds the floating point range", metadata={"log_abs": log_abs})
    return float(family.sign[n] * math.exp(log_abs))


def log_normalizers(N: int, params: QParameters) -> np.ndarray:
    """log of q̆^{n(n+1)/4} (q̆;q̆)_n^{-1/2}, n = 0..N."""
    n = np.arange(N + 1)
    return -0.25 * n * (n + 1) * params.tau - 0.5 * log_q_factorials(N, params.qbreve)


def _scaled_family(xp: float | np.ndarray, N: int, params: QParameters) -> np.ndarray:
    """q̆^{n(n+1)/4} (q̆;q̆)_n^{-1/2} h_n(xp), assembled in log form."""
    family = hermite_family(xp, N, params)
    log_values = family.log_abs + log_normalizers(N, params)
    if np.any(log_values > MAX_LOG):
        logger.warning(f"Coefficient family overflows for N={N}; large entries become inf")
    with np.errstate(over="ignore"):
        return family.sign * np.exp(log_values)


def position_family(
    x: float | np.ndarray,
    N: int,
    params: QParameters,
    convention: SignConvention = SignConvention.EQ12,
) -> np.ndarray:
    """P_0(x)..P_N(x); the last axis is n."""
    values = _scaled_family(x_prime(np.asarray(x, dtype=float), params), N, params)
    if convention == SignConvention.EQ12:
        values = values * np.where(np.arange(N + 1) % 2 == 0, 1.0, -1.0)
    return values


def momentum_family(p: float | np.ndarray, N: int, params: QParameters) -> np.ndarray:
    """P̃_0(p)..P̃_N(p) = i^n q̆^{n(n+1)/4} (q̆;q̆)_n^{-1/2} h_n(p')."""
    values = _scaled_family(x_prime(np.asarray(p, dtype=float), params), N, params)
    return values * (1j ** np.arange(N + 1))


def P_coeff(n: int, x: float, params: QParameters) -> float:
    """Position coefficient with its (-1)^n sign, P_1(x) = -x."""
    if n < 0:
        raise InvalidParameterError(f"Degree must be >= 0, got {n}", field="n")
    return float(position_family(x, n, params, SignConvention.EQ12)[n])


def P_tilde_coeff(n: int, p: float, params: QParameters) -> complex:
    """Momentum coefficient, P̃_1(p) = i p."""
    if n < 0:
        raise InvalidParameterError(f"Degree must be >= 0, got {n}", field="n")
    return complex(momentum_family(p, n, params)[n])


def coefficient_family(
    kind: MeasureKind,
    point: float,
    N: int,
    params: QParameters,
    convention: SignConvention = SignConvention.EIGENVECTOR,
    log_mass: float | None = None,
) -> CoefficientFamily:
    if kind == MeasureKind.MOMENTUM:
        values = momentum_family(point, N, params)
    else:
        values = position_family(point, N, params, convention)
    return CoefficientFamily(
        kind=kind,
        params=params,
        values=values,
        eval_point=point,
        convention=convention,
        log_mass=log_mass,
    )

"""q-numbers and q-Pochhammer symbols with controlled truncation.

Infinite products are accumulated as (log-magnitude, phase) pairs so that
arguments of size q^{|r|+|r'|} never overflow; the plain complex value is
formed only when a caller asks for it.
"""

import logging
import math
import sys

import numpy as np
from pydantic import BaseModel, ConfigDict

from app.core.exceptions import InvalidParameterError, NumericOverflowError
from app.schemas.params import QParameters, Tolerance

logger = logging.getLogger(__name__)

MAX_LOG = math.log(sys.float_info.max)
MIN_FACTORS = 8


class LogComplex(BaseModel):
    """Complex number stored as log|z| and arg z."""

    model_config = ConfigDict(frozen=True)

    log_abs: float
    phase: float = 0.0

    @property
    def is_zero(self) -> bool:
        return self.log_abs == -math.inf

    @property
    def value(self) -> complex:
        if self.is_zero:
            return 0j
        if self.log_abs > MAX_LOG:
            raise NumericOverflowError(
                "Product magnitude exceeds the floating point range",
                metadata={"log_abs": self.log_abs},
            )
        magnitude = math.exp(self.log_abs)
        return complex(magnitude * math.cos(self.phase), magnitude * math.sin(self.phase))

    def __mul__(self, other: "LogComplex") -> "LogComplex":
        return LogComplex(log_abs=self.log_abs + other.log_abs, phase=self.phase + other.phase)

    def __truediv__(self, other: "LogComplex") -> "LogComplex":
        return LogComplex(log_abs=self.log_abs - other.log_abs, phase=self.phase - other.phase)

    @classmethod
    def from_value(cls, z: complex) -> "LogComplex":
        z = complex(z)
        if z == 0:
            return cls(log_abs=-math.inf, phase=0.0)
        return cls(log_abs=math.log(abs(z)), phase=math.atan2(z.imag, z.real))


class ProductResult(BaseModel):
    """Truncated infinite product with its truncation certificate."""

    model_config = ConfigDict(frozen=True)

    log_abs: float
    phase: float
    tail_bound: float
    n_factors: int
    converged: bool

    @property
    def log(self) -> LogComplex:
        return LogComplex(log_abs=self.log_abs, phase=self.phase)

    @property
    def value(self) -> complex:
        return self.log.value


def q_number(n: int, params: QParameters) -> float:
    """{n}_q = (q^n - 1)/(q - 1)."""
    if n < 0:
        raise InvalidParameterError(f"q-number needs n >= 0, got {n}", field="n")
    q = params.q
    try:
        qn = q**n
    except OverflowError as exc:
        raise NumericOverflowError(
            f"q^n overflows for q={q}, n={n}",
            metadata={"q": q, "n": n},
        ) from exc
    if not math.isfinite(qn):
        raise NumericOverflowError(f"q^n overflows for q={q}, n={n}", metadata={"q": q, "n": n})
    return (qn - 1.0) / (q - 1.0)


def q_pochhammer(a: complex, qb: float, n: int) -> complex:
    """Finite product (a; qb)_n = prod_{s<n} (1 - a qb^s); n = 0 gives 1."""
    if n < 0:
        raise InvalidParameterError(f"Pochhammer length must be >= 0, got {n}", field="n")
    if n == 0:
        return 1 + 0j
    factors = 1.0 - complex(a) * qb ** np.arange(n, dtype=float)
    return complex(np.prod(factors))


def log_q_pochhammer(a: complex, qb: float, n: int) -> LogComplex:
    """Finite product in log form."""
    if n < 0:
        raise InvalidParameterError(f"Pochhammer length must be >= 0, got {n}", field="n")
    factors = 1.0 - complex(a) * qb ** np.arange(n, dtype=float)
    return _log_of_factors(factors)


def signed_log_q_pochhammer(a: float, qb: float, n: int) -> tuple[int, float]:
    """(sign, log|(a; qb)_n|) for real arguments; qb may exceed 1."""
    if n < 0:
        raise InvalidParameterError(f"Pochhammer length must be >= 0, got {n}", field="n")
    sign, log_abs = 1, 0.0
    for s in range(n):
        log_term = math.log(abs(a)) + s * math.log(qb) if a != 0 else -math.inf
        if log_term > 36.0:
            # |a qb^s| > 4e15: 1 - a qb^s has the sign of -a
            inverse = math.copysign(math.exp(-log_term), a)
            log_abs += log_term + math.log1p(-inverse)
            sign *= -1 if a > 0 else 1
            continue
        factor = 1.0 - a * qb**s
        if factor == 0:
            return 0, -math.inf
        log_abs += math.log(abs(factor))
        sign *= 1 if factor > 0 else -1
    return sign, log_abs


def log_q_factorials(n_max: int, qb: float) -> np.ndarray:
    """log (qb; qb)_n for n = 0..n_max, 0 < qb < 1."""
    if not 0 < qb < 1:
        raise InvalidParameterError(f"qb must lie in (0, 1), got {qb}", field="qb")
    powers = qb ** np.arange(1, n_max + 1, dtype=float)
    return np.concatenate(([0.0], np.cumsum(np.log1p(-powers))))


def log_q_factorial(n: int, qb: float) -> float:
    """log (qb; qb)_n."""
    if n < 0:
        raise InvalidParameterError(f"Factorial index must be >= 0, got {n}", field="n")
    return float(log_q_factorials(n, qb)[n])


def signed_log_q_factorial_above_one(n: int, q: float) -> tuple[int, float]:
    """(sign, log|(q; q)_n|) for q > 1; every factor 1 - q^s is negative."""
    if q <= 1:
        raise InvalidParameterError(f"Expected q > 1, got {q}", field="q")
    return signed_log_q_pochhammer(q, q, n)


def factor_count(abs_a: float, qb: float, tol: Tolerance) -> tuple[int, bool]:
    """Number of factors needed so that |a| qb^S < tail_eps, and whether max_terms allowed it."""
    if abs_a == 0:
        needed = 0
    else:
        excess = (math.log(abs_a) - math.log(tol.tail_eps)) / -math.log(qb)
        needed = max(0, math.floor(excess) + 1)
    count = max(MIN_FACTORS, needed)
    if count > tol.max_terms:
        return tol.max_terms, False
    return count, True


def log_q_pochhammer_inf(a: complex, qb: float, tol: Tolerance | None = None) -> ProductResult:
    """(a; qb)_inf truncated once |a| qb^s < tail_eps and at least eight factors are in."""
    tol = tol or Tolerance()
    if not 0 < qb < 1:
        raise InvalidParameterError(f"Infinite product needs 0 < qb < 1, got {qb}", field="qb")
    a = complex(a)
    count, converged = factor_count(abs(a), qb, tol)
    if not converged:
        logger.warning(f"(a; qb)_inf did not reach tail_eps within max_terms={tol.max_terms} (|a|={abs(a):g}, qb={qb:g})")
    factors = 1.0 - a * qb ** np.arange(count, dtype=float)
    result = _log_of_factors(factors)
    tail = abs(a) * qb**count / (1.0 - qb)
    return ProductResult(
        log_abs=result.log_abs,
        phase=result.phase,
        tail_bound=tail,
        n_factors=count,
        converged=converged,
    )


def q_pochhammer_inf(a: complex, qb: float, tol: Tolerance | None = None) -> ProductResult:
    """(a; qb)_inf; read `.value` for the number and `.tail_bound` for its certificate."""
    return log_q_pochhammer_inf(a, qb, tol)


def log_q_pochhammer_inf_array(
    a: np.ndarray, qb: float, tol: Tolerance | None = None, count: int | None = None
) -> tuple[np.ndarray, np.ndarray, int, bool]:
    """Vectorized log form of (a; qb)_inf over an array of arguments.

    Every element uses the factor count of the largest |a|, so each one
    meets its own truncation threshold. A caller that needs results
    independent of how the arguments are batched passes `count` itself.
    """
    tol = tol or Tolerance()
    if not 0 < qb < 1:
        raise InvalidParameterError(f"Infinite product needs 0 < qb < 1, got {qb}", field="qb")
    a = np.asarray(a, dtype=complex)
    if count is None:
        count, converged = factor_count(float(np.max(np.abs(a), initial=0.0)), qb, tol)
        if not converged:
            logger.warning(f"Vectorized (a; qb)_inf hit max_terms={tol.max_terms}")
    else:
        converged = True
    factors = 1.0 - a[..., None] * qb ** np.arange(count, dtype=float)
    with np.errstate(divide="ignore"):
        log_abs = np.log(np.abs(factors)).sum(axis=-1)
    phase = np.angle(factors).sum(axis=-1)
    return log_abs, phase, count, converged


def _log_of_factors(factors: np.ndarray) -> LogComplex:
    magnitudes = np.abs(factors)
    if np.any(magnitudes == 0):
        return LogComplex(log_abs=-math.inf, phase=0.0)
    return LogComplex(
        log_abs=float(np.log(magnitudes).sum()),
        phase=float(np.angle(factors).sum()),
    )

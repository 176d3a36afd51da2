"""Symmetric Jacobi operators: recurrence polynomials, truncated spectra, self-adjointness verdicts."""

import logging
import math

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal
from scipy.optimize import brentq

from app.core.exceptions import EigensolverError, InvalidParameterError
from app.schemas.jacobi import (
    EigenDecomposition,
    JacobiOperator,
    SelfAdjointnessVerdict,
    Verdict,
    VerdictEvidence,
)
from app.schemas.params import QParameters, Tolerance
from app.services.qcore_service import q_number

logger = logging.getLogger(__name__)

SCALE_WARNING = 1e100
RESIDUAL_FACTOR = 1e-10
MIN_PROBE = 32


# ============== Instances ==============


def position_jacobi(params: QParameters) -> JacobiOperator:
    """Q e_n = {n}^{1/2} e_{n-1} + {n+1}^{1/2} e_{n+1}."""
    return JacobiOperator(
        a=lambda n: math.sqrt(q_number(n + 1, params)),
        b=lambda n: 0.0,
        label=f"Q(q={params.q:g})",
    )


def momentum_jacobi(params: QParameters) -> JacobiOperator:
    """P in the twisted basis e'_n = i^{-n} e_n has the matrix of Q."""
    return JacobiOperator(
        a=lambda n: math.sqrt(q_number(n + 1, params)),
        b=lambda n: 0.0,
        label=f"P(q={params.q:g})",
    )


def undeformed_jacobi() -> JacobiOperator:
    """Ordinary oscillator: a_n = sqrt(n+1)."""
    return JacobiOperator(a=lambda n: math.sqrt(n + 1), b=lambda n: 0.0, label="Q(undeformed)")


def coefficients(J: JacobiOperator, count: int) -> tuple[np.ndarray, np.ndarray]:
    """(a_0..a_{count-1}, b_0..b_{count-1}); every a_n must be nonzero."""
    a = np.array([J.a(n) for n in range(count)], dtype=float)
    b = np.array([J.b(n) for n in range(count)], dtype=float)
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise InvalidParameterError(f"Non-finite Jacobi coefficient in {J.label}", field="jacobi")
    if np.any(a == 0):
        raise InvalidParameterError(f"Jacobi off-diagonal vanishes in {J.label}", field="jacobi")
    return a, b


def jacobi_matrix(J: JacobiOperator, N: int) -> np.ndarray:
    """Leading N x N block of the Jacobi matrix."""
    if N < 1:
        raise InvalidParameterError(f"Matrix size must be >= 1, got {N}", field="N")
    a, b = coefficients(J, N)
    return np.diag(b) + np.diag(a[:-1], 1) + np.diag(a[:-1], -1)


# ============== Recurrence ==============


def _run_recurrence(a: np.ndarray, b: np.ndarray, x: float, N: int) -> np.ndarray:
    p = np.empty(N + 1)
    p[0] = 1.0
    previous = 0.0
    for n in range(N):
        a_prev = a[n - 1] if n > 0 else 0.0
        p[n + 1] = ((x - b[n]) * p[n] - a_prev * previous) / a[n]
        previous = p[n]
    return p


def recurrence_polynomials(J: JacobiOperator, x: float, N: int) -> np.ndarray:
    """p_0..p_N at x from a_n p_{n+1} + b_n p_n + a_{n-1} p_{n-1} = x p_n, p_0 = 1."""
    if N < 0:
        raise InvalidParameterError(f"Degree must be >= 0, got {N}", field="N")
    a, b = coefficients(J, max(N, 1))
    p = _run_recurrence(a, b, x, N)
    if np.max(np.abs(p)) > SCALE_WARNING:
        logger.warning(f"Recurrence values of {J.label} exceed {SCALE_WARNING:.0e} at x={x:g}, N={N}")
    return p


def recurrence_zeros(J: JacobiOperator, N: int) -> np.ndarray:
    """Zeros of p_N by root bracketing.

    The zeros of p_{N-1} (eigenvalues of the (N-1) block) strictly interlace
    those of p_N, and the Gershgorin radius of the N block closes the outer
    brackets.
    """
    if N < 1:
        return np.empty(0)
    a, b = coefficients(J, N)
    off = np.abs(a[: N - 1])
    radius = np.abs(b) + np.pad(off, (1, 0)) + np.pad(off, (0, 1))
    bound = 1.01 * float(radius.max()) + 1.0

    inner = eigh_tridiagonal(b[: N - 1], a[: N - 2], eigvals_only=True) if N > 2 else b[: N - 1]
    edges = np.concatenate(([-bound], np.sort(inner), [bound]))

    def p_N(x: float) -> float:
        return _run_recurrence(a, b, x, N)[N]

    return np.array(
        [brentq(p_N, lo, hi, xtol=1e-15 * bound) for lo, hi in zip(edges[:-1], edges[1:])]
    )


# ============== Spectra ==============


def truncated_eigendecomposition(J: JacobiOperator, N: int) -> EigenDecomposition:
    """Eigenpairs of the N x N leading block, ascending, residual-checked."""
    if N < 1:
        raise InvalidParameterError(f"Truncation must be >= 1, got {N}", field="N")
    a, b = coefficients(J, N)
    off = a[: N - 1]
    if N == 1:
        values, vectors = b[:1].copy(), np.ones((1, 1))
    else:
        try:
            values, vectors = eigh_tridiagonal(b, off)
        except LinAlgError as exc:
            raise EigensolverError(f"eigh_tridiagonal failed for {J.label}, N={N}: {exc}") from exc

    matrix = np.diag(b) + np.diag(off, 1) + np.diag(off, -1)
    scale = max(float(np.max(np.abs(values))), 1.0)
    residual = float(np.max(np.linalg.norm(matrix @ vectors - vectors * values, axis=0)))
    if residual > RESIDUAL_FACTOR * scale:
        raise EigensolverError(
            f"Eigenpair residual {residual:.3e} too large for {J.label}, N={N}",
            metadata={"residual": residual, "scale": scale},
        )
    return EigenDecomposition(eigenvalues=values, eigenvectors=vectors, max_residual=residual)


# ============== Self-adjointness ==============


def _raabe(u: np.ndarray, start: int) -> np.ndarray:
    """n (u_n / u_{n+1} - 1) for consecutive nonzero terms; > 1 means sum u_n converges."""
    n = np.arange(start, start + u.size - 1) + 1
    with np.errstate(divide="ignore", invalid="ignore"):
        stats = n * (u[:-1] / u[1:] - 1.0)
    return stats[np.isfinite(stats)]


def _bounded(s: np.ndarray, quarter: int, tol: Tolerance) -> tuple[bool, float | None, float | None]:
    """Finite-probe boundedness: (bounded, sup estimate, Raabe statistic of the increments)."""
    first_max, last_max = float(s[:quarter].max()), float(s[-quarter:].max())
    if last_max <= first_max * (1.0 + tol.rel_tol):
        return True, float(s.max()), None
    increments = np.abs(np.diff(s))[-quarter:]
    if np.all(increments <= tol.rel_tol * s.max()):
        return True, float(s.max()), None
    nonzero = increments[increments > 0]
    stats = _raabe(nonzero, s.size - quarter)
    if stats.size == 0:
        return False, None, None
    raabe = float(stats.min())
    ratio = float(np.max(nonzero[1:] / nonzero[:-1]))
    if raabe > 1.0 and ratio < 1.0:
        return True, float(s[-1] + nonzero[-1] * ratio / (1.0 - ratio)), raabe
    return False, None, raabe


def _log_convex_from(a: np.ndarray, tol: Tolerance) -> int | None:
    """Smallest j <= N/2 with a_{n-1} a_{n+1} <= a_n^2 for all n >= j."""
    log_a = np.log(np.abs(a))
    holds = log_a[:-2] + log_a[2:] <= 2.0 * log_a[1:-1] + tol.rel_tol  # index n-1 for n = 1..N-2
    failing = np.nonzero(~holds)[0]
    j = 1 if failing.size == 0 else int(failing[-1]) + 2
    return j if j <= a.size // 2 else None


def self_adjointness_verdict(
    J: JacobiOperator,
    N_probe: int = 64,
    tol: Tolerance | None = None,
) -> SelfAdjointnessVerdict:
    """
    Finite-probe reading of the three classical criteria, tried in order:

    (a) bounded coefficients -> self-adjoint;
    (b) sum 1/a_n diverges (Carleman) -> self-adjoint;
    (c) bounded b_n, log-convex a_n and certified finite sum 1/a_n -> not self-adjoint.
    """
    tol = tol or Tolerance()
    if N_probe < MIN_PROBE:
        raise InvalidParameterError(f"N_probe must be >= {MIN_PROBE}, got {N_probe}", field="n_probe")
    a, b = coefficients(J, N_probe)
    quarter = N_probe // 4
    s = np.maximum(np.abs(a), np.abs(b))

    bounded, sup_bound, increment_raabe = _bounded(s, quarter, tol)

    u = 1.0 / np.abs(a)
    partial = np.cumsum(u)
    half = N_probe // 2
    slope = float(np.polyfit(np.arange(half, N_probe), partial[half:], 1)[0])
    stats = _raabe(u[-quarter:], N_probe - quarter)
    ratios = u[-quarter:][1:] / u[-quarter:][:-1]
    raabe_min, raabe_max = float(stats.min()), float(stats.max())
    ratio_max = float(ratios.max())
    certified = raabe_min > 1.0 and ratio_max < 1.0
    tail_bound = float(u[-1] * ratio_max / (1.0 - ratio_max)) if certified else None

    diagonal_bounded = _bounded(np.abs(b), quarter, tol)[0] if np.any(b) else True
    log_convex_from = _log_convex_from(a, tol)

    if bounded:
        verdict, criterion = Verdict.SELF_ADJOINT_BOUNDED, "(a) coefficients bounded"
    elif not certified and raabe_max < 1.0 and slope > 0:
        verdict, criterion = Verdict.SELF_ADJOINT_CARLEMAN, "(b) sum of 1/a_n diverges"
    elif certified and diagonal_bounded and log_convex_from is not None:
        verdict, criterion = (
            Verdict.NOT_SELF_ADJOINT,
            "(c) bounded b_n, log-convex a_n, finite sum of 1/a_n",
        )
    else:
        verdict, criterion = Verdict.INCONCLUSIVE, "no criterion applies on the probe"

    evidence = VerdictEvidence(
        n_probe=N_probe,
        first_quartile_max=float(s[:quarter].max()),
        last_quartile_max=float(s[-quarter:].max()),
        sup_bound=sup_bound,
        increment_raabe=increment_raabe,
        reciprocal_partial_sum=float(partial[-1]),
        reciprocal_raabe_min=raabe_min,
        reciprocal_raabe_max=raabe_max,
        reciprocal_ratio_max=ratio_max,
        reciprocal_tail_bound=tail_bound,
        partial_sum_slope=slope,
        diagonal_bounded=diagonal_bounded,
        log_convex_from=log_convex_from,
        criterion=criterion,
    )
    logger.info(f"Verdict for {J.label}: {verdict.value} ({criterion})")
    return SelfAdjointnessVerdict(verdict=verdict, label=J.label, evidence=evidence)

"""Self-adjoint extensions of Q and P: spectral lattices, weights, eigenfunctions and isometries.

An extension is labelled by b in [q̆, 1), σ = ln b. Its spectrum is the lattice

    x_b(r) = 2 sinh(τr - σ) / (q-1)^{1/2},  r in Z,

carrying the masses

    m_r = b^{4r} q̆^{r(2r-1)} (1 + b² q̆^{2r}) / ((-b²; q̆)_∞ (-q̆/b²; q̆)_∞ (q̆; q̆)_∞),

which sum to one. Everything indexed by r is evaluated through log m_r and
log|P_n|, since m_r falls below the double range within a few dozen sites.
"""

import logging
import math
from collections.abc import Callable
from functools import lru_cache

import numpy as np
from scipy.special import logsumexp

from app.config import settings
from app.core.exceptions import (
    InvalidParameterError,
    NumericOverflowError,
    WindowTooSmallError,
)
from app.schemas.fock import FockVector
from app.schemas.hermite import CoefficientFamily, SignConvention
from app.schemas.params import (
    ExtremalMeasure,
    MeasureKind,
    QParameters,
    SpectralWindow,
    Tolerance,
)
from app.schemas.spectra import (
    EigenfunctionValue,
    GridFunction,
    MassIdentityResult,
    OrthogonalityReport,
    SeparationReport,
)
from app.services.fock_service import apply_momentum, apply_position
from app.services.qcore_service import (
    MAX_LOG,
    log_q_factorials,
    log_q_pochhammer_inf,
)
from app.services.qhermite_service import (
    coefficient_family,
    hermite_family,
    log_normalizers,
    x_prime,
)

logger = logging.getLogger(__name__)

LOG_TINY = math.log(np.finfo(float).tiny)
SNAP_TOL = 1e-12


# ============== Spectral lattice ==============


def spectrum_point(m: ExtremalMeasure, r: int) -> float:
    """x_b(r) = 2 sinh(τr - σ)/(q-1)^{1/2}; the momentum lattice p_b(r) has the same form."""
    try:
        return 2.0 * math.sinh(m.params.tau * r - m.sigma) / math.sqrt(m.params.q - 1.0)
    except OverflowError as exc:
        raise NumericOverflowError(
            f"Spectral point r={r} exceeds the floating point range",
            metadata={"q": m.params.q, "b": m.b, "r": r},
        ) from exc


def spectrum_point_ratio_form(m: ExtremalMeasure, r: int) -> float:
    """(q^r b^{-1} - b q^{-r})/(q-1)^{1/2}, evaluated as printed."""
    q = m.params.q
    return (q**r / m.b - m.b * q ** (-r)) / math.sqrt(q - 1.0)


def hermite_arguments(m: ExtremalMeasure, window: SpectralWindow) -> np.ndarray:
    """x'_b(r) = sinh(τr - σ), the argument of h_n at each lattice site."""
    with np.errstate(over="raise"):
        try:
            return np.sinh(m.params.tau * window.indices() - m.sigma)
        except FloatingPointError as exc:
            raise NumericOverflowError(
                f"Spectral points overflow on window [{window.r_min}, {window.r_max}]",
                metadata={"q": m.params.q, "b": m.b},
            ) from exc


def spectrum_points(m: ExtremalMeasure, window: SpectralWindow) -> np.ndarray:
    return 2.0 * hermite_arguments(m, window) / math.sqrt(m.params.q - 1.0)


def locate_extension(
    x0: float,
    params: QParameters,
    kind: MeasureKind = MeasureKind.POSITION,
) -> tuple[float, int]:
    """The unique (b, r) with x_b(r) = x0, b in [q̆, 1)."""
    if not math.isfinite(x0):
        raise InvalidParameterError(f"x0 must be finite, got {x0}", field="x0")
    tau = params.tau
    theta = math.asinh(0.5 * math.sqrt(params.q - 1.0) * x0)
    r = math.ceil(theta / tau) - 1
    sigma = tau * r - theta
    # ceil can land one step off when theta/tau is an integer up to rounding
    if sigma > -SNAP_TOL:
        r -= 1
        sigma = tau * r - theta
    elif sigma < -tau - SNAP_TOL:
        r += 1
        sigma = tau * r - theta
    b = params.qbreve if sigma <= -tau + SNAP_TOL else math.exp(sigma)
    logger.debug(f"Located x0={x0:g} of {kind.value} on b={b:.17g}, r={r}")
    return b, r


# ============== Weights ==============


@lru_cache(maxsize=256)
def _log_normalizer(qb: float, b: float, tail_eps: float, max_terms: int) -> float:
    tol = Tolerance(tail_eps=tail_eps, max_terms=max_terms)
    return (
        log_q_pochhammer_inf(-(b**2), qb, tol).log_abs
        + log_q_pochhammer_inf(-qb / b**2, qb, tol).log_abs
        + log_q_pochhammer_inf(qb, qb, tol).log_abs
    )


def log_weight_normalizer(m: ExtremalMeasure, tol: Tolerance | None = None) -> float:
    """log of (-b²; q̆)_∞ (-q̆/b²; q̆)_∞ (q̆; q̆)_∞."""
    tol = tol or Tolerance()
    return _log_normalizer(m.params.qbreve, m.b, tol.tail_eps, tol.max_terms)


def log_weights(m: ExtremalMeasure, window: SpectralWindow, tol: Tolerance | None = None) -> np.ndarray:
    """log m_r over the window."""
    r = window.indices().astype(float)
    tau, sigma = m.params.tau, m.sigma
    numerator = 4.0 * r * sigma - r * (2.0 * r - 1.0) * tau + np.logaddexp(0.0, 2.0 * sigma - 2.0 * r * tau)
    return numerator - log_weight_normalizer(m, tol)


def log_weight(m: ExtremalMeasure, r: int, tol: Tolerance | None = None) -> float:
    return float(log_weights(m, SpectralWindow(r_min=r, r_max=r), tol)[0])


def weight(m: ExtremalMeasure, r: int, tol: Tolerance | None = None) -> float:
    """m_r; 0.0 once it leaves the double range."""
    value = log_weight(m, r, tol)
    if value < LOG_TINY:
        logger.warning(f"Weight m_{r} underflows (log m_r = {value:.1f}) and is returned as 0")
        return 0.0
    return math.exp(value)


# ============== Coefficient families ==============


def _log_family(m: ExtremalMeasure, window: SpectralWindow, N: int) -> tuple[np.ndarray, np.ndarray]:
    """Sign and log|P_n| (eigenvector convention) on every lattice site, shape (window, N+1)."""
    family = hermite_family(hermite_arguments(m, window), N, m.params)
    return family.sign, family.log_abs + log_normalizers(N, m.params)


def _phases(m: ExtremalMeasure, N: int, convention: SignConvention) -> np.ndarray:
    n = np.arange(N + 1)
    if m.kind == MeasureKind.MOMENTUM:
        return 1j**n
    if convention == SignConvention.EQ12:
        return np.where(n % 2 == 0, 1.0, -1.0).astype(complex)
    return np.ones(N + 1, dtype=complex)


def family_on_window(
    m: ExtremalMeasure,
    window: SpectralWindow,
    N: int,
    convention: SignConvention = SignConvention.EIGENVECTOR,
) -> np.ndarray:
    """P_n(x_b(r)) (or P̃_n(p_b(r))) as a (window, N+1) matrix."""
    sign, log_abs = _log_family(m, window, N)
    if np.any(log_abs > MAX_LOG):
        logger.warning(f"Coefficient family exceeds the double range on [{window.r_min}, {window.r_max}]")
    with np.errstate(over="ignore"):
        return sign * np.exp(log_abs) * _phases(m, N, convention)


def weighted_family(
    m: ExtremalMeasure,
    window: SpectralWindow,
    N: int,
    tol: Tolerance | None = None,
) -> np.ndarray:
    """m_r^{1/2} P_n(x_b(r)): the columns are orthonormal in the limit of a full lattice."""
    sign, log_abs = _log_family(m, window, N)
    half_weights = 0.5 * log_weights(m, window, tol)[:, None]
    return sign * np.exp(log_abs + half_weights) * _phases(m, N, SignConvention.EIGENVECTOR)


def eigenvector_coefficients(
    m: ExtremalMeasure,
    r: int,
    N: int,
    tol: Tolerance | None = None,
    convention: SignConvention = SignConvention.EIGENVECTOR,
) -> CoefficientFamily:
    """P_n at the spectral point x_b(r), n = 0..N, with log m_r attached."""
    if N < 0:
        raise InvalidParameterError(f"N must be >= 0, got {N}", field="N")
    return coefficient_family(
        m.kind,
        spectrum_point(m, r),
        N,
        m.params,
        convention=convention,
        log_mass=log_weight(m, r, tol),
    )


def mass_identity(m: ExtremalMeasure, r: int, N: int, tol: Tolerance | None = None) -> MassIdentityResult:
    """m_r Σ_{n<=N} |P_n(x_b(r))|², which converges to 1."""
    if N < 1:
        raise InvalidParameterError(f"N must be >= 1, got {N}", field="N")
    window = SpectralWindow(r_min=r, r_max=r)
    _, log_abs = _log_family(m, window, N)
    terms = np.exp(2.0 * log_abs[0] + log_weights(m, window, tol)[0])
    partial = np.cumsum(terms)
    value = float(partial[-1])

    if N < 3:
        tail = math.inf
    else:
        # pairs of consecutive terms, so a vanishing odd or even row does not stall the ratio
        last, before = terms[-1] + terms[-2], terms[-3] + terms[-4]
        if last == 0:
            tail = 0.0
        elif before == 0 or last >= before:
            tail = math.inf
        else:
            rho = last / before
            tail = float(last * rho / (1.0 - rho))
    slow = tail > 0.5 * value
    if slow:
        logger.warning(f"Mass identity at r={r} converges slowly: tail {tail:.3e} vs partial {value:.3e} (N={N})")
    return MassIdentityResult(
        value=value,
        r=r,
        degree=N,
        tail_estimate=tail,
        slow_convergence=slow,
        partial_values=partial,
    )


def dual_orthogonality(
    m: ExtremalMeasure,
    r: int,
    r_prime: int,
    N: int,
    tol: Tolerance | None = None,
) -> complex:
    """(m_r m_r')^{1/2} Σ_{n<=N} conj(P_n(r)) P_n(r'), which tends to δ_rr'."""
    if N < 1:
        raise InvalidParameterError(f"N must be >= 1, got {N}", field="N")
    rows = []
    for site in (r, r_prime):
        rows.append(weighted_family(m, SpectralWindow(r_min=site, r_max=site), N, tol)[0])
    return complex(np.vdot(rows[0], rows[1]))


# ============== Windows ==============


def family_boundary_term(m: ExtremalMeasure, N: int, tol: Tolerance | None = None) -> Callable[[int], float]:
    """r -> log max_n m_r |P_n(x_b(r))|²."""

    def term(r: int) -> float:
        window = SpectralWindow(r_min=r, r_max=r)
        _, log_abs = _log_family(m, window, N)
        return float(2.0 * log_abs.max() + log_weights(m, window, tol)[0])

    return term


def vector_boundary_term(v: FockVector, m: ExtremalMeasure, tol: Tolerance | None = None) -> Callable[[int], float]:
    """r -> log of m_r (Σ_n |v_n| |P_n(x_b(r))|)², an upper bound for the edge term of Ωv."""
    magnitudes = np.abs(v.coefficients)

    def term(r: int) -> float:
        window = SpectralWindow(r_min=r, r_max=r)
        _, log_abs = _log_family(m, window, v.truncation)
        if not magnitudes.any():
            return -math.inf
        return float(2.0 * logsumexp(log_abs[0], b=magnitudes) + log_weights(m, window, tol)[0])

    return term


def moment_boundary_term(m: ExtremalMeasure, n: int, tol: Tolerance | None = None) -> Callable[[int], float]:
    """r -> log m_r |x_b(r)|^n."""

    def term(r: int) -> float:
        x = abs(spectrum_point(m, r))
        log_power = 0.0 if n == 0 else (n * math.log(x) if x > 0 else -math.inf)
        return log_weight(m, r, tol) + log_power

    return term


def auto_window(
    m: ExtremalMeasure,
    boundary_term: Callable[[int], float] | None = None,
    tol: Tolerance | None = None,
) -> SpectralWindow:
    """Smallest [-R, R] whose boundary terms at ±R and ±(R+1) are below tail_eps."""
    tol = tol or Tolerance()
    term = boundary_term or (lambda r: log_weight(m, r, tol))
    threshold = math.log(tol.tail_eps)
    for radius in range(1, settings.MAX_WINDOW_RADIUS + 1):
        edges = (-radius, radius, -radius - 1, radius + 1)
        if all(term(r) < threshold for r in edges):
            logger.info(f"Auto window for q={m.params.q:g}, b={m.b:g}: [-{radius}, {radius}]")
            return SpectralWindow.symmetric(radius)
    raise WindowTooSmallError(
        f"No window up to radius {settings.MAX_WINDOW_RADIUS} meets tail_eps={tol.tail_eps}",
        metadata={"q": m.params.q, "b": m.b, "max_radius": settings.MAX_WINDOW_RADIUS},
    )


def _check_boundary(log_term: float, window: SpectralWindow, tol: Tolerance, what: str) -> None:
    if log_term >= math.log(tol.tail_eps):
        raise WindowTooSmallError(
            f"Boundary {what} term {math.exp(min(log_term, MAX_LOG)):.3e} exceeds tail_eps={tol.tail_eps} "
            f"on window [{window.r_min}, {window.r_max}]",
            metadata={"log_boundary_term": log_term, "r_min": window.r_min, "r_max": window.r_max},
        )


def _edge_log_term(m: ExtremalMeasure, window: SpectralWindow, N: int, tol: Tolerance) -> float:
    term = family_boundary_term(m, N, tol)
    return max(term(window.r_min), term(window.r_max))


# ============== Orthogonality ==============


def _gram_report(gram: np.ndarray, window: SpectralWindow, N: int, boundary: float) -> OrthogonalityReport:
    deviation = np.abs(gram - np.eye(N + 1))
    worst = np.unravel_index(int(np.argmax(deviation)), deviation.shape)
    return OrthogonalityReport(
        max_deviation=float(deviation.max()),
        worst_pair=(int(worst[0]), int(worst[1])),
        degree=N,
        window=window,
        boundary_log_term=boundary,
        gram=gram,
    )


def verify_orthogonality(
    m: ExtremalMeasure,
    N: int,
    window: SpectralWindow | None = None,
    tol: Tolerance | None = None,
) -> OrthogonalityReport:
    """max over n, n' <= N of |Σ_r m_r conj(P_n) P_n' - δ_nn'| on the window."""
    tol = tol or Tolerance()
    if N < 0:
        raise InvalidParameterError(f"N must be >= 0, got {N}", field="N")
    window = window or auto_window(m, family_boundary_term(m, N, tol), tol)
    boundary = _edge_log_term(m, window, N, tol)
    _check_boundary(boundary, window, tol, "orthogonality")
    A = weighted_family(m, window, N, tol)
    report = _gram_report(A.conj().T @ A, window, N, boundary)
    logger.info(f"Orthogonality q={m.params.q:g} b={m.b:g} N={N}: max deviation {report.max_deviation:.3e}")
    return report


def hermite_orthogonality(
    m: ExtremalMeasure,
    N: int,
    window: SpectralWindow | None = None,
    tol: Tolerance | None = None,
) -> OrthogonalityReport:
    """Σ_r m_r h_n(z_r) h_n'(z_r) (q̆^{n(n+1)/2}/(q̆;q̆)_n)^{1/2} (same for n') against δ_nn'.

    z_r = (q^r b^{-1} - b q^{-r})/2 is evaluated in that ratio form, so this
    check shares neither the x' map nor the coefficient normalization code
    with verify_orthogonality.
    """
    tol = tol or Tolerance()
    window = window or auto_window(m, family_boundary_term(m, N, tol), tol)
    boundary = _edge_log_term(m, window, N, tol)
    _check_boundary(boundary, window, tol, "orthogonality")
    q, b = m.params.q, m.b
    r = window.indices().astype(float)
    z = 0.5 * (q**r / b - b * q ** (-r))
    family = hermite_family(z, N, m.params)
    n = np.arange(N + 1)
    log_norms = 0.5 * (-0.5 * n * (n + 1) * m.params.tau - log_q_factorials(N, m.params.qbreve))
    A = family.sign * np.exp(family.log_abs + log_norms + 0.5 * log_weights(m, window, tol)[:, None])
    return _gram_report(A.T @ A, window, N, boundary)


# ============== Isometries ==============


def grid_function(
    m: ExtremalMeasure,
    window: SpectralWindow,
    values: np.ndarray,
    tol: Tolerance | None = None,
) -> GridFunction:
    return GridFunction(
        measure=m,
        window=window,
        points=spectrum_points(m, window),
        log_weights=log_weights(m, window, tol),
        values=values,
    )


def isometry_omega(
    v: FockVector,
    m: ExtremalMeasure,
    window: SpectralWindow | None = None,
    tol: Tolerance | None = None,
    convention: SignConvention = SignConvention.EIGENVECTOR,
) -> GridFunction:
    """Ω: e_n -> P_n(x_b(r)) for a position extension, Ω': e_n -> P̃_n(p_b(r)) for a momentum one."""
    tol = tol or Tolerance()
    N = v.truncation
    window = window or auto_window(m, vector_boundary_term(v, m, tol), tol)
    values = family_on_window(m, window, N, convention) @ v.coefficients
    grid = grid_function(m, window, values, tol)
    with np.errstate(divide="ignore"):
        edge_terms = grid.log_weights[[0, -1]] + 2.0 * np.log(np.abs(values[[0, -1]]))
    _check_boundary(float(edge_terms.max()), window, tol, "isometry")
    return grid


def multiplication_residual(
    v: FockVector,
    m: ExtremalMeasure,
    window: SpectralWindow | None = None,
    tol: Tolerance | None = None,
    convention: SignConvention = SignConvention.EIGENVECTOR,
    sign: float | None = None,
) -> float:
    """Weighted norm of Ω(Qv) - sign·x·Ωv, or of Ω'(Pv) - sign·p·Ω'v.

    With e_n -> P_n (eigenvector convention) Q is multiplication by +x. With
    e_n -> P̃_n, P is multiplication by -p, so the momentum default is sign = -1.
    """
    if sign is None:
        sign = -1.0 if m.kind == MeasureKind.MOMENTUM else 1.0
    # one extra slot so Q and P act without truncation
    padded = FockVector(coefficients=np.append(v.coefficients, 0.0))
    image = apply_momentum(padded, m.params) if m.kind == MeasureKind.MOMENTUM else apply_position(padded, m.params)
    tol = tol or Tolerance()
    if window is None:
        edge_terms = [vector_boundary_term(image, m, tol), vector_boundary_term(padded, m, tol)]
        window = auto_window(m, lambda r: max(term(r) for term in edge_terms), tol)
    left = isometry_omega(image, m, window, tol, convention)
    right = isometry_omega(padded, m, window, tol, convention)
    residual = left.amplitudes - sign * right.points * right.amplitudes
    return float(np.linalg.norm(residual))


# ============== Eigenfunctions ==============


def _product_value(a1: complex, a2: complex, qb: float, tol: Tolerance) -> EigenfunctionValue:
    first = log_q_pochhammer_inf(a1, qb, tol)
    second = log_q_pochhammer_inf(a2, qb, tol)
    return EigenfunctionValue(
        value=(first.log * second.log).value,
        tail_bound=first.tail_bound + second.tail_bound,
        n_terms=max(first.n_factors, second.n_factors),
        converged=first.converged and second.converged,
    )


def eigenfunction_product(x: float, y: float, params: QParameters, tol: Tolerance | None = None) -> EigenfunctionValue:
    """φ_x(y) = Π_n (1 + 2y x' q̆^{n+1} - y² q̆^{2n+2}) = (-y q̆ e^ξ; q̆)_∞ (y q̆ e^{-ξ}; q̆)_∞, sinh ξ = x'."""
    tol = tol or Tolerance()
    qb, xi = params.qbreve, math.asinh(x_prime(x, params))
    return _product_value(-y * qb * math.exp(xi), y * qb * math.exp(-xi), qb, tol)


def momentum_eigenfunction_product(
    p: float, y: float, params: QParameters, tol: Tolerance | None = None
) -> EigenfunctionValue:
    """ξ_p(y) = Π_n (1 - 2iy p' q̆^{n+1} + y² q̆^{2n+2})."""
    tol = tol or Tolerance()
    qb, eta = params.qbreve, math.asinh(x_prime(p, params))
    return _product_value(1j * y * qb * math.exp(eta), -1j * y * qb * math.exp(-eta), qb, tol)


def _generating_series(xp: float, t: complex, params: QParameters, N: int) -> EigenfunctionValue:
    """Σ_{n<=N} t^n q̆^{n(n+1)/2}/(q̆;q̆)_n h_n(xp)."""
    if N < 0:
        raise InvalidParameterError(f"N must be >= 0, got {N}", field="N")
    if t == 0:
        return EigenfunctionValue(value=1.0, tail_bound=0.0, n_terms=1)
    n = np.arange(N + 1)
    family = hermite_family(xp, N, params)
    log_terms = family.log_abs - 0.5 * n * (n + 1) * params.tau - log_q_factorials(N, params.qbreve) + n * math.log(abs(t))
    terms = family.sign * np.exp(log_terms) * (t / abs(t)) ** n
    return EigenfunctionValue(value=complex(terms.sum()), tail_bound=float(abs(terms[-1])), n_terms=N + 1)


def eigenfunction_series(x: float, y: float, params: QParameters, N: int) -> EigenfunctionValue:
    """φ_x(y) = Σ_n y^n q̆^{n(n+1)/2}/(q̆;q̆)_n h_n(x'|q̆), truncated at N."""
    return _generating_series(x_prime(x, params), complex(y), params, N)


def momentum_eigenfunction_series(p: float, y: float, params: QParameters, N: int) -> EigenfunctionValue:
    """ξ_p(y): the position series at -iy with h_n(p')."""
    return _generating_series(x_prime(p, params), -1j * y, params, N)


# ============== Moments ==============


def compute_moment(
    m: ExtremalMeasure,
    n: int,
    window: SpectralWindow | None = None,
    tol: Tolerance | None = None,
) -> float:
    """c_n = Σ_r m_r x_b(r)^n."""
    tol = tol or Tolerance()
    if n < 0:
        raise InvalidParameterError(f"Moment order must be >= 0, got {n}", field="n")
    term = moment_boundary_term(m, n, tol)
    window = window or auto_window(m, term, tol)
    _check_boundary(max(term(window.r_min), term(window.r_max)), window, tol, "moment")
    points = spectrum_points(m, window)
    lw = log_weights(m, window, tol)
    if n == 0:
        return float(np.exp(lw).sum())
    with np.errstate(divide="ignore"):
        log_terms = lw + n * np.log(np.abs(points))
    signs = np.sign(points) ** n
    return float((signs * np.exp(log_terms)).sum())


# ============== Separation ==============


def separation_report(b: float, b_prime: float, params: QParameters, window: SpectralWindow) -> SeparationReport:
    """Interlacing and minimal gap between the spectra of two extensions."""
    first = spectrum_points(ExtremalMeasure(params=params, b=b), window)
    second = spectrum_points(ExtremalMeasure(params=params, b=b_prime), window)
    merged = np.concatenate((first, second))
    labels = np.concatenate((np.zeros(first.size), np.ones(second.size)))
    order = np.argsort(merged, kind="stable")
    merged, labels = merged[order], labels[order]
    gaps = np.diff(merged)
    scale = np.maximum(1.0, np.abs(merged[:-1]))
    shared = int(np.count_nonzero(gaps <= 1e-9 * scale))
    interlaced = bool(np.all(labels[1:] != labels[:-1])) and shared == 0
    return SeparationReport(
        b=b,
        b_prime=b_prime,
        interlaced=interlaced,
        min_gap=float(gaps.min()) if gaps.size else math.inf,
        shared_points=shared,
        compared_points=int(merged.size),
    )

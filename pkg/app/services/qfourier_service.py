"""Discrete q-Fourier transform between the momentum grid p_b'(r') and the coordinate grid x_b(r).

Kernel, as a sum over the coefficient families:

    F_{r'r} = m_r'(b') Σ_n (-i)^n q̆^{n(n+1)/2}/(q̆;q̆)_n h_n(p'_r') h_n(x'_r)

and in closed form, from the bilinear generating function of h_n at argument -iq̆:

    F_{r'r} = m_r'(b') (α++; q̆)_∞ (α--; q̆)_∞ (α+-; q̆)_∞ (α-+; q̆)_∞ / (-q̆; q̆)_∞

    α++ = i q̆^{r+r'+1} b b'        α-- = i q̆^{1-r-r'} / (b b')
    α+- = -i q̆^{r-r'+1} b / b'     α-+ = -i q̆^{1-r+r'} b' / b

The closed form fills the matrix; the series spot-checks it. The unitary core
T = (m_r/m_r')^{1/2} F is assembled in log form, since m_r and m_r' leave
the double range long before T does.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from app.config import settings
from app.core.exceptions import (
    InvalidParameterError,
    NonConvergenceError,
    TransformValidationError,
    UnitarityError,
    WindowMismatchError,
)
from app.core.serialization import finite
from app.schemas.documents import MatrixEntry, SpotCheckEntry, TransformDocument
from app.schemas.fourier import SeriesValue, SpotCheck, TransformMatrix
from app.schemas.params import ExtremalMeasure, MeasureKind, QParameters, SpectralWindow, Tolerance
from app.schemas.spectra import GridFunction
from app.services.qcore_service import LogComplex, factor_count, log_q_pochhammer_inf, log_q_pochhammer_inf_array
from app.services.qhermite_service import hermite_family, log_normalizers
from app.services.spectra_service import grid_function, hermite_arguments, log_weight, log_weights

logger = logging.getLogger(__name__)

SPOT_CHECK_TOL = 1e-7
SPOT_CHECK_RADIUS = 6


def _measures(b_prime: float, b: float, params: QParameters) -> tuple[ExtremalMeasure, ExtremalMeasure]:
    momentum = ExtremalMeasure(params=params, b=b_prime, kind=MeasureKind.MOMENTUM)
    position = ExtremalMeasure(params=params, b=b, kind=MeasureKind.POSITION)
    return momentum, position


# ============== Series form ==============


def bilinear_series(u: float, v: float, params: QParameters, N: int) -> SeriesValue:
    """Σ_{n<=N} (-i)^n q̆^{n(n+1)/2}/(q̆;q̆)_n h_n(u) h_n(v)."""
    if N < 0:
        raise InvalidParameterError(f"N must be >= 0, got {N}", field="N")
    family = hermite_family(np.array([u, v], dtype=float), N, params)
    log_terms = family.log_abs[0] + family.log_abs[1] + 2.0 * log_normalizers(N, params)
    terms = family.sign[0] * family.sign[1] * np.exp(log_terms) * (-1j) ** np.arange(N + 1)
    value = complex(terms.sum())
    largest = float(np.abs(terms).max())
    if largest > 1e12 * max(abs(value), 1e-300):
        logger.warning(f"Bilinear series at ({u:g}, {v:g}) lost precision: largest term {largest:.3e} vs sum {abs(value):.3e}")
    return SeriesValue(value=value, tail_bound=float(abs(terms[-1])), max_term=largest, n_terms=N + 1)


def _site_argument(m: ExtremalMeasure, r: int) -> float:
    return float(hermite_arguments(m, SpectralWindow(r_min=r, r_max=r))[0])


def transform_entry_series(
    r_prime: int,
    r: int,
    b_prime: float,
    b: float,
    params: QParameters,
    N: int | None = None,
) -> SeriesValue:
    """F_{r'r} by partial summation through n = N."""
    N = settings.SERIES_TERMS if N is None else N
    momentum, position = _measures(b_prime, b, params)
    series = bilinear_series(_site_argument(momentum, r_prime), _site_argument(position, r), params, N)
    mass = math.exp(log_weight(momentum, r_prime))
    return SeriesValue(
        value=mass * series.value,
        tail_bound=mass * series.tail_bound,
        max_term=mass * series.max_term,
        n_terms=series.n_terms,
    )


# ============== Product form ==============


def _alphas(r_prime: np.ndarray, r: np.ndarray, b_prime: float, b: float, tau: float) -> list[np.ndarray]:
    return [
        1j * np.exp(-tau * (r + r_prime + 1)) * b * b_prime,
        1j * np.exp(-tau * (1 - r - r_prime)) / (b * b_prime),
        -1j * np.exp(-tau * (r - r_prime + 1)) * b / b_prime,
        -1j * np.exp(-tau * (1 - r + r_prime)) * b_prime / b,
    ]


def _log_kernel(
    r_prime: np.ndarray,
    r: np.ndarray,
    b_prime: float,
    b: float,
    params: QParameters,
    tol: Tolerance,
    counts: list[int] | None = None,
) -> tuple[np.ndarray, np.ndarray, int, bool]:
    """log of Π(α; q̆)_∞ / (-q̆; q̆)_∞ as (log|.|, phase) arrays.

    `counts` fixes the number of factors of each of the four products.
    """
    qb = params.qbreve
    log_abs = np.zeros(np.broadcast(r_prime, r).shape)
    phase = np.zeros_like(log_abs)
    n_factors, converged = 0, True
    alphas = _alphas(r_prime.astype(float), r.astype(float), b_prime, b, params.tau)
    for k, alpha in enumerate(alphas):
        fixed = None if counts is None else counts[k]
        part_abs, part_phase, count, ok = log_q_pochhammer_inf_array(alpha, qb, tol, count=fixed)
        log_abs += part_abs
        phase += part_phase
        n_factors, converged = max(n_factors, count), converged and ok
    log_abs -= log_q_pochhammer_inf(-qb, qb, tol).log_abs
    return log_abs, phase, n_factors, converged


def _window_factor_counts(
    window: SpectralWindow, b_prime: float, b: float, params: QParameters, tol: Tolerance
) -> tuple[list[int], bool]:
    """Factor count of each product over the whole window, so row blocks share one truncation."""
    sites = window.indices().astype(float)
    counts, converged = [], True
    for alpha in _alphas(sites[:, None], sites[None, :], b_prime, b, params.tau):
        count, ok = factor_count(float(np.abs(alpha).max()), params.qbreve, tol)
        counts.append(count)
        converged = converged and ok
    return counts, converged


def transform_entry_log(
    r_prime: int,
    r: int,
    b_prime: float,
    b: float,
    params: QParameters,
    tol: Tolerance | None = None,
) -> LogComplex:
    """T_{r'r} = (m_r m_r')^{1/2} Π(α; q̆)_∞ / (-q̆; q̆)_∞ in log form."""
    tol = tol or Tolerance()
    momentum, position = _measures(b_prime, b, params)
    log_abs, phase, _, _ = _log_kernel(np.array(r_prime), np.array(r), b_prime, b, params, tol)
    half_weights = 0.5 * (log_weight(position, r, tol) + log_weight(momentum, r_prime, tol))
    return LogComplex(log_abs=float(log_abs) + half_weights, phase=float(phase))


def transform_entry_product(
    r_prime: int,
    r: int,
    b_prime: float,
    b: float,
    params: QParameters,
    tol: Tolerance | None = None,
) -> complex:
    """F_{r'r} = m_r'(b') Π(α; q̆)_∞ / (-q̆; q̆)_∞."""
    tol = tol or Tolerance()
    momentum, _ = _measures(b_prime, b, params)
    log_abs, phase, _, converged = _log_kernel(np.array(r_prime), np.array(r), b_prime, b, params, tol)
    if not converged:
        logger.warning(f"Product form of F[{r_prime}, {r}] hit max_terms={tol.max_terms}")
    return LogComplex(log_abs=float(log_abs) + log_weight(momentum, r_prime, tol), phase=float(phase)).value


# ============== Matrix ==============


def interior_columns(
    params: QParameters,
    b_prime: float,
    b: float,
    window: SpectralWindow,
    margin: int | None = None,
) -> list[int]:
    """Columns r whose two coupling bands, r' ≈ r and r' ≈ (σ+σ')/τ - r, lie margin sites inside the window.

    |T_{r'r}|² decays like q^{-|r'-r|} away from each band, so only those
    columns can reach unit norm to within q^{-margin} on a finite window.
    """
    margin = unitarity_margin(params) if margin is None else margin
    mirror_center = round((math.log(b) + math.log(b_prime)) / params.tau)
    lo, hi = window.r_min + margin, window.r_max - margin
    return [int(r) for r in window.indices() if lo <= r <= hi and lo <= mirror_center - r <= hi]


def interior_rows(
    params: QParameters,
    b_prime: float,
    b: float,
    window: SpectralWindow,
    margin: int | None = None,
) -> list[int]:
    """Rows r' whose bands lie inside the window; the band structure is symmetric in r and r'."""
    return interior_columns(params, b, b_prime, window, margin)


def unitarity_margin(params: QParameters, tol: float | None = None) -> int:
    tol = settings.UNITARITY_TOL if tol is None else tol
    return math.ceil(math.log(1.0 / tol) / params.tau) + 3


def _spot_pairs(window: SpectralWindow, count: int) -> list[tuple[int, int]]:
    lo, hi = max(window.r_min, -SPOT_CHECK_RADIUS), min(window.r_max, SPOT_CHECK_RADIUS)
    if lo > hi:
        lo, hi = window.r_min, window.r_min
    sites = np.arange(lo, hi + 1)
    pairs = [(int(rp), int(r)) for rp in sites for r in sites]
    rng = np.random.default_rng(0)
    chosen = rng.choice(len(pairs), size=min(count, len(pairs)), replace=False)
    return [pairs[i] for i in sorted(chosen)]


def _spot_check(M_core: np.ndarray, window: SpectralWindow, lw: np.ndarray, lw_prime: np.ndarray,
                momentum: ExtremalMeasure, position: ExtremalMeasure, count: int, N: int) -> list[SpotCheck]:
    checks = []
    for r_prime, r in _spot_pairs(window, count):
        i, j = window.position_of(r_prime), window.position_of(r)
        series = bilinear_series(_site_argument(momentum, r_prime), _site_argument(position, r), position.params, N)
        expected = np.exp(0.5 * (lw[j] + lw_prime[i])) * series.value
        product = complex(M_core[i, j])
        deviation = abs(product - expected) / max(abs(expected), np.finfo(float).tiny)
        checks.append(SpotCheck(r_prime=r_prime, r=r, product=product, series=complex(expected), deviation=float(deviation)))
    return checks


def build_transform(
    b_prime: float,
    b: float,
    params: QParameters,
    window: SpectralWindow,
    tol: Tolerance | None = None,
    spot_checks: int | None = None,
    threads: int | None = None,
    series_terms: int | None = None,
) -> TransformMatrix:
    """Fill T and F from the product form, spot-check against the series and check interior unitarity."""
    tol = tol or Tolerance()
    spot_checks = settings.SERIES_SPOT_CHECKS if spot_checks is None else spot_checks
    threads = settings.TRANSFORM_THREADS if threads is None else max(1, threads)
    series_terms = settings.SERIES_TERMS if series_terms is None else series_terms
    momentum, position = _measures(b_prime, b, params)

    lw = log_weights(position, window, tol)
    lw_prime = log_weights(momentum, window, tol)
    if max(lw[0], lw[-1], lw_prime[0], lw_prime[-1]) >= math.log(tol.tail_eps):
        logger.warning(
            f"Window [{window.r_min}, {window.r_max}] keeps boundary weights above tail_eps; "
            "unitarity holds only approximately"
        )

    counts, converged = _window_factor_counts(window, b_prime, b, params, tol)
    n_factors = max(counts)
    if not converged:
        raise NonConvergenceError(
            f"Transform products did not reach tail_eps={tol.tail_eps:g} within max_terms={tol.max_terms}",
            metadata={"max_terms": tol.max_terms, "n_factors": n_factors},
        )

    sites = window.indices()
    row_blocks = np.array_split(np.arange(window.size), threads)

    def fill(rows: np.ndarray) -> tuple[np.ndarray, np.ndarray, int, bool]:
        return _log_kernel(sites[rows][:, None], sites[None, :], b_prime, b, params, tol, counts)

    with ThreadPoolExecutor(max_workers=threads) as pool:
        blocks = list(pool.map(fill, [rows for rows in row_blocks if rows.size]))
    log_abs = np.vstack([block[0] for block in blocks])
    phase = np.vstack([block[1] for block in blocks])

    log_core = log_abs + 0.5 * (lw_prime[:, None] + lw[None, :])
    core = np.exp(log_core) * np.exp(1j * phase)
    with np.errstate(over="ignore"):
        entries = np.exp(log_abs + lw_prime[:, None]) * np.exp(1j * phase)
    if not np.all(np.isfinite(entries)):
        logger.warning("Some F entries exceed the double range; the unitary core T is unaffected")

    checks = _spot_check(core, window, lw, lw_prime, momentum, position, spot_checks, series_terms) if spot_checks else []
    worst = max((check.deviation for check in checks), default=0.0)
    if worst > SPOT_CHECK_TOL:
        bad = max(checks, key=lambda check: check.deviation)
        raise TransformValidationError(
            f"Product form disagrees with the series at (r'={bad.r_prime}, r={bad.r}): {worst:.3e}",
            metadata={"r_prime": bad.r_prime, "r": bad.r, "deviation": worst},
        )

    column_norms = (np.abs(core) ** 2).sum(axis=0)
    row_norms = (np.abs(core) ** 2).sum(axis=1)
    columns = interior_columns(params, b_prime, b, window)
    rows = interior_rows(params, b_prime, b, window)
    deviation = None
    if columns:
        deviation = float(np.abs(column_norms[[window.position_of(r) for r in columns]] - 1.0).max())
        if deviation > settings.UNITARITY_TOL:
            raise UnitarityError(
                f"Interior column norms deviate from 1 by {deviation:.3e}",
                metadata={"deviation": deviation, "columns": columns},
            )
    else:
        logger.info(f"Window [{window.r_min}, {window.r_max}] has no interior columns; unitarity not asserted")

    logger.info(
        f"Built {window.size}x{window.size} transform q={params.q:g} b={b:g} b'={b_prime:g}: "
        f"worst spot check {worst:.2e}, interior deviation {deviation}"
    )
    return TransformMatrix(
        params=params,
        b=b,
        b_prime=b_prime,
        window=window,
        log_weights=lw,
        log_weights_prime=lw_prime,
        t_entries=core,
        entries=entries,
        column_norms=column_norms,
        row_norms=row_norms,
        interior_columns=columns,
        interior_rows=rows,
        unitarity_deviation=deviation,
        spot_checks=checks,
        n_factors=n_factors,
    )


# ============== Action ==============


def _check_grid(M: TransformMatrix, grid: GridFunction, b: float, side: str) -> None:
    if grid.window != M.window or not math.isclose(grid.measure.b, b, rel_tol=1e-12):
        raise WindowMismatchError(
            f"{side} grid [{grid.window.r_min}, {grid.window.r_max}] with b={grid.measure.b} does not match "
            f"the transform window [{M.window.r_min}, {M.window.r_max}] with b={b}",
            metadata={"side": side},
        )


def apply_transform(M: TransformMatrix, Fhat: GridFunction, tol: Tolerance | None = None) -> GridFunction:
    """F(x_b(r)) = Σ_r' F_{r'r} F̂(p_b'(r')), carried out on amplitudes m^{1/2}F."""
    _check_grid(M, Fhat, M.b_prime, "momentum")
    amplitudes = M.t_entries.T @ Fhat.amplitudes
    with np.errstate(over="ignore", invalid="ignore"):
        values = amplitudes * np.exp(-0.5 * M.log_weights)
    _, position = _measures(M.b_prime, M.b, M.params)
    return grid_function(position, M.window, values, tol)


def apply_inverse(M: TransformMatrix, F: GridFunction, tol: Tolerance | None = None) -> GridFunction:
    """F̂(p_b'(r')) = Σ_r (m_r/m_r')^{1/2} conj(T_{r'r}) F(x_b(r))."""
    _check_grid(M, F, M.b, "coordinate")
    amplitudes = M.t_entries.conj() @ F.amplitudes
    with np.errstate(over="ignore", invalid="ignore"):
        values = amplitudes * np.exp(-0.5 * M.log_weights_prime)
    momentum, _ = _measures(M.b_prime, M.b, M.params)
    return grid_function(momentum, M.window, values, tol)


def round_trip_deviation(M: TransformMatrix, Fhat: GridFunction, tol: Tolerance | None = None) -> float:
    """max |inverse(transform(F̂)) - F̂| over the amplitudes of the interior rows.

    Rows within the unitarity margin of the window edge lose the mass of the
    columns cut off by the window and are not compared.
    """
    rows = [M.window.position_of(r) for r in M.interior_rows]
    if not rows:
        raise InvalidParameterError(
            f"Window [{M.window.r_min}, {M.window.r_max}] has no interior rows to compare",
            field="window",
        )
    back = apply_inverse(M, apply_transform(M, Fhat, tol), tol)
    return float(np.abs(back.amplitudes[rows] - Fhat.amplitudes[rows]).max())


# ============== Export ==============


def matrix_document(M: TransformMatrix, core: bool = False) -> TransformDocument:
    """Entries of F, or of T when core is set; non-finite F entries become null."""
    matrix = M.t_entries if core else M.entries
    sites = M.window.indices()
    return TransformDocument(
        q=M.params.q,
        b=M.b,
        b_prime=M.b_prime,
        matrix="T" if core else "F",
        window=(M.window.r_min, M.window.r_max),
        entries=[
            MatrixEntry(
                r_prime=int(r_prime),
                r=int(r),
                re=finite(matrix[i, j].real),
                im=finite(matrix[i, j].imag),
            )
            for i, r_prime in enumerate(sites)
            for j, r in enumerate(sites)
        ],
        column_norms=[float(x) for x in M.column_norms],
        row_norms=[float(x) for x in M.row_norms],
        interior_columns=M.interior_columns,
        unitarity_deviation=M.unitarity_deviation,
        spot_checks=[
            SpotCheckEntry(r_prime=check.r_prime, r=check.r, deviation=check.deviation)
            for check in M.spot_checks
        ],
    )

"""Builders for the output documents of every command, shared by the CLI and the API."""

import logging
from enum import Enum

import numpy as np

from app.core.exceptions import InvalidParameterError
from app.core.serialization import dump_json, finite, write_csv
from app.schemas.documents import (
    Document,
    EigenfunctionDocument,
    EigenfunctionPoint,
    EnergyLevel,
    HamiltonianDocument,
    LocateDocument,
    PolysDocument,
    PolyValue,
    SpectrumDocument,
    SpectrumPoint,
    TransformDocument,
    VerdictDocument,
    VerifyDocument,
)
from app.schemas.hermite import SignConvention
from app.schemas.params import ExtremalMeasure, MeasureKind, QParameters, SpectralWindow, Tolerance
from app.services import (
    fock_service,
    jacobi_service,
    qfourier_service,
    qhermite_service,
    spectra_service,
    verification_service,
)

logger = logging.getLogger(__name__)


class OutputFormat(str, Enum):
    JSON = "json"
    CSV = "csv"


class OperatorChoice(str, Enum):
    """Jacobi operators the verdict command can probe."""

    POSITION = "position"
    MOMENTUM = "momentum"
    UNDEFORMED = "undeformed"


def render(document: Document, fmt: OutputFormat = OutputFormat.JSON) -> str:
    if fmt == OutputFormat.CSV:
        return write_csv(document.CSV_HEADER, document.rows())
    return dump_json(document)


def window_from_bounds(r_min: int | None, r_max: int | None) -> SpectralWindow | None:
    """Both bounds or neither; neither means an automatic window."""
    if r_min is None and r_max is None:
        return None
    if r_min is None or r_max is None:
        raise InvalidParameterError("Give both rmin and rmax, or neither", field="window")
    return SpectralWindow(r_min=r_min, r_max=r_max)


# ============== Spectrum ==============


def spectrum(
    params: QParameters,
    b: float,
    n: int = 0,
    window: SpectralWindow | None = None,
    kind: MeasureKind = MeasureKind.POSITION,
    tol: Tolerance | None = None,
) -> SpectrumDocument:
    """Lattice points, masses and the coefficient of degree n at each site."""
    tol = tol or Tolerance()
    if n < 0:
        raise InvalidParameterError(f"n must be >= 0, got {n}", field="n")
    m = ExtremalMeasure(params=params, b=b, kind=kind)
    window = window or spectra_service.auto_window(m, spectra_service.family_boundary_term(m, n, tol), tol)
    values = spectra_service.family_on_window(m, window, n)[:, n]
    grid = spectra_service.grid_function(m, window, values, tol)
    weights = np.where(grid.log_weights >= spectra_service.LOG_TINY, np.exp(grid.log_weights), 0.0)
    points = [
        SpectrumPoint(
            r=int(r),
            x=float(x),
            weight=float(w),
            log_weight=float(lw),
            value_re=finite(value.real),
            value_im=finite(value.imag),
        )
        for r, x, w, lw, value in zip(window.indices(), grid.points, weights, grid.log_weights, grid.values)
    ]
    return SpectrumDocument(
        q=params.q,
        b=b,
        kind=kind,
        n=n,
        window=(window.r_min, window.r_max),
        points=points,
    )


def locate(params: QParameters, x0: float, kind: MeasureKind = MeasureKind.POSITION) -> LocateDocument:
    b, r = spectra_service.locate_extension(x0, params, kind)
    roundtrip = spectra_service.spectrum_point(ExtremalMeasure(params=params, b=b, kind=kind), r)
    return LocateDocument(q=params.q, kind=kind, x0=x0, b=b, r=r, x0_roundtrip=roundtrip)


# ============== Oscillator ==============


def hamiltonian(params: QParameters, n_max: int) -> HamiltonianDocument:
    if n_max < 0:
        raise InvalidParameterError(f"n_max must be >= 0, got {n_max}", field="n_max")
    levels = [EnergyLevel(n=n, energy=fock_service.hamiltonian_eigenvalue(n, params)) for n in range(n_max + 1)]
    return HamiltonianDocument(q=params.q, levels=levels)


def polys(
    params: QParameters,
    x: float,
    n_max: int,
    kind: MeasureKind = MeasureKind.POSITION,
    convention: SignConvention = SignConvention.EQ12,
) -> PolysDocument:
    if n_max < 0:
        raise InvalidParameterError(f"n_max must be >= 0, got {n_max}", field="n_max")
    family = qhermite_service.coefficient_family(kind, x, n_max, params, convention)
    values = [
        PolyValue(n=n, value=finite(complex(value).real), imag=finite(complex(value).imag))
        for n, value in enumerate(family.values)
    ]
    return PolysDocument(q=params.q, kind=kind, x=x, convention=convention, values=values)


def eigenfunction(
    params: QParameters,
    x: float,
    ys: list[float],
    n_terms: int,
    kind: MeasureKind = MeasureKind.POSITION,
    tol: Tolerance | None = None,
) -> EigenfunctionDocument:
    """Product and truncated series of the generating function at each y."""
    tol = tol or Tolerance()
    if kind == MeasureKind.MOMENTUM:
        product_at, series_at = spectra_service.momentum_eigenfunction_product, spectra_service.momentum_eigenfunction_series
    else:
        product_at, series_at = spectra_service.eigenfunction_product, spectra_service.eigenfunction_series
    points = []
    for y in ys:
        product = product_at(x, y, params, tol)
        series = series_at(x, y, params, n_terms)
        scale = max(abs(product.value), 1e-300)
        points.append(
            EigenfunctionPoint(
                y=y,
                product_re=finite(product.value.real),
                product_im=finite(product.value.imag),
                series_re=finite(series.value.real),
                series_im=finite(series.value.imag),
                deviation=finite(abs(product.value - series.value) / scale),
                n_factors=product.n_terms,
                n_terms=series.n_terms,
            )
        )
    return EigenfunctionDocument(q=params.q, kind=kind, x=x, points=points)


# ============== Transform ==============


def transform(
    params: QParameters,
    b: float,
    b_prime: float,
    window: SpectralWindow | None = None,
    tol: Tolerance | None = None,
    threads: int | None = None,
    validate: int | None = None,
    core: bool = False,
) -> TransformDocument:
    """Transform matrix on the given window, or on the smallest window with an interior column."""
    if window is None:
        window = SpectralWindow.symmetric(qfourier_service.unitarity_margin(params) + 2)
    M = qfourier_service.build_transform(b_prime, b, params, window, tol, spot_checks=validate, threads=threads)
    return qfourier_service.matrix_document(M, core)


# ============== Verdicts and verification ==============


def verdict(
    params: QParameters,
    operator: OperatorChoice = OperatorChoice.POSITION,
    n_probe: int = 64,
    tol: Tolerance | None = None,
) -> VerdictDocument:
    match operator:
        case OperatorChoice.UNDEFORMED:
            J = jacobi_service.undeformed_jacobi()
        case OperatorChoice.MOMENTUM:
            J = jacobi_service.momentum_jacobi(params)
        case _:
            J = jacobi_service.position_jacobi(params)
    result = jacobi_service.self_adjointness_verdict(J, n_probe, tol)
    return VerdictDocument(
        q=params.q,
        operator=result.label,
        verdict=result.verdict,
        evidence=result.evidence,
    )


def verify(
    params: QParameters,
    b: float,
    b_prime: float | None = None,
    tol: Tolerance | None = None,
    names: list[str] | None = None,
) -> VerifyDocument:
    """Run the registered checks; b' defaults to b."""
    b_prime = b if b_prime is None else b_prime
    ctx = verification_service.VerificationContext(params, b, b_prime, tol)
    report = verification_service.run_verification(ctx, names)
    checks = [
        check.model_copy(update={"deviation": finite(check.deviation)}) if check.deviation is not None else check
        for check in report.checks
    ]
    if not report.passed:
        logger.warning(f"Verification failed: {', '.join(check.name for check in report.failed)}")
    return VerifyDocument(q=params.q, b=b, b_prime=b_prime, passed=report.passed, checks=checks)

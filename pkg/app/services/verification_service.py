"""Registered invariant checks run by `qosc verify` and GET /api/v1/verify.

A check is a function of a VerificationContext returning (deviation, note);
it passes when the deviation is within its registered tolerance. Checks are
registered in order; the evaluator gate runs first and a failing gate skips
the rest, since every later check evaluates h_n through the recurrence.
"""

import logging
import math
from collections.abc import Callable
from functools import cached_property

import numpy as np

from app.core.exceptions import AppException, VerificationFailedError
from app.schemas.fock import FockOperator, FockVector
from app.schemas.fourier import TransformMatrix
from app.schemas.hermite import SignConvention
from app.schemas.jacobi import Verdict
from app.schemas.params import ExtremalMeasure, MeasureKind, QParameters, SpectralWindow, Tolerance
from app.schemas.spectra import GridFunction
from app.schemas.verification import CheckKind, CheckResult, VerificationReport
from app.services import (
    fock_service,
    jacobi_service,
    qcore_service,
    qfourier_service,
    qhermite_service,
    spectra_service,
)

logger = logging.getLogger(__name__)

CheckFunction = Callable[["VerificationContext"], tuple[float, str | None]]

GATE_POINTS = (0.0, 0.5, -0.5, 1.5, -1.5, 3.0, -3.0)
EIGENFUNCTION_X = (0.0, 0.5, -0.5, 1.5, -1.5)
EIGENFUNCTION_Y = (0.0, 0.3, -0.3)
SUPPORT_RADIUS = 4


class VerificationContext:
    """Parameters of one verification run plus the expensive shared objects."""

    def __init__(
        self,
        params: QParameters,
        b: float,
        b_prime: float,
        tol: Tolerance | None = None,
        seed: int = 0,
    ):
        self.params = params
        self.b = b
        self.b_prime = b_prime
        self.tol = tol or Tolerance()
        self.seed = seed

    @cached_property
    def position(self) -> ExtremalMeasure:
        return ExtremalMeasure(params=self.params, b=self.b)

    @cached_property
    def momentum(self) -> ExtremalMeasure:
        return ExtremalMeasure(params=self.params, b=self.b_prime, kind=MeasureKind.MOMENTUM)

    @cached_property
    def transform_window(self) -> SpectralWindow:
        """Wide enough that interior columns exist around the support of the test inputs."""
        return SpectralWindow.symmetric(qfourier_service.unitarity_margin(self.params) + 2 * SUPPORT_RADIUS)

    @cached_property
    def transform(self) -> TransformMatrix:
        return qfourier_service.build_transform(self.b_prime, self.b, self.params, self.transform_window, self.tol)

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)


class RegisteredCheck:
    def __init__(self, name: str, function: CheckFunction, tolerance: float, kind: CheckKind, gate: bool):
        self.name = name
        self.function = function
        self.tolerance = tolerance
        self.kind = kind
        self.gate = gate


CHECKS: dict[str, RegisteredCheck] = {}


def register_check(
    name: str,
    tolerance: float,
    kind: CheckKind = CheckKind.ASSERTION,
    gate: bool = False,
) -> Callable[[CheckFunction], CheckFunction]:
    """Add a check to the suite under a unique name."""

    def decorator(function: CheckFunction) -> CheckFunction:
        if name in CHECKS:
            raise ValueError(f"Check {name!r} is already registered")
        CHECKS[name] = RegisteredCheck(name, function, tolerance, kind, gate)
        return function

    return decorator


def _run_one(check: RegisteredCheck, ctx: VerificationContext) -> CheckResult:
    try:
        deviation, note = check.function(ctx)
    except AppException as exc:
        logger.warning(f"Check {check.name} raised {exc.code.value}: {exc.message}")
        return CheckResult(
            name=check.name,
            kind=check.kind,
            deviation=None,
            tolerance=check.tolerance,
            passed=False,
            note=exc.message,
        )
    passed = math.isfinite(deviation) and deviation <= check.tolerance
    return CheckResult(
        name=check.name,
        kind=check.kind,
        deviation=deviation,
        tolerance=check.tolerance,
        passed=passed,
        note=note,
    )


def run_verification(ctx: VerificationContext, names: list[str] | None = None) -> VerificationReport:
    """Run the gate checks, then every other registered check (or only `names`)."""
    selected = [check for check in CHECKS.values() if names is None or check.gate or check.name in names]
    gates = [check for check in selected if check.gate]
    others = [check for check in selected if not check.gate]

    results = [_run_one(check, ctx) for check in gates]
    if all(result.passed for result in results):
        results.extend(_run_one(check, ctx) for check in others)
    else:
        logger.error("Evaluator gate failed; remaining checks skipped")
        results.extend(
            CheckResult(
                name=check.name,
                kind=check.kind,
                deviation=None,
                tolerance=check.tolerance,
                passed=False,
                skipped=True,
                note="skipped: evaluator gate failed",
            )
            for check in others
        )

    report = VerificationReport(q=ctx.params.q, b=ctx.b, b_prime=ctx.b_prime, checks=results)
    logger.info(f"Verification q={ctx.params.q:g} b={ctx.b:g} b'={ctx.b_prime:g}: {len(report.failed)} failed")
    return report


def ensure_passed(report: VerificationReport) -> None:
    if not report.passed:
        raise VerificationFailedError(
            f"{len(report.failed)} verification check(s) failed",
            metadata={"failed": [check.name for check in report.failed]},
        )


# ============== Evaluators ==============


@register_check("evaluator_gate", tolerance=1e-9, gate=True)
def _evaluator_gate(ctx: VerificationContext) -> tuple[float, str | None]:
    worst = 0.0
    for n in range(qhermite_service.GATE_DEGREE + 1):
        for x in GATE_POINTS:
            explicit = qhermite_service.h_poly_sum(n, x, ctx.params)
            recurred = qhermite_service.h_poly_rec(n, x, ctx.params)
            worst = max(worst, abs(recurred - explicit) / max(1.0, abs(explicit)))
    return worst, f"n <= {qhermite_service.GATE_DEGREE}, x in {list(GATE_POINTS)}"


# ============== Fock space ==============


@register_check("fock_commutation", tolerance=1e-12)
def _fock_commutation(ctx: VerificationContext) -> tuple[float, str | None]:
    N = 20
    a = fock_service.fock_matrix(FockOperator.annihilation, N, ctx.params)
    a_dag = fock_service.fock_matrix(FockOperator.creation, N, ctx.params)
    relation = a @ a_dag - ctx.params.q * a_dag @ a
    # the top row/column feels the truncation
    block = relation[:N, :N] - np.eye(N)
    scale = qcore_service.q_number(N, ctx.params)
    return float(np.abs(block).max()) / scale, f"a a+ - q a+ a = 1 below the truncation, relative to [{N}]"


@register_check("hamiltonian_spectrum", tolerance=1e-12)
def _hamiltonian_spectrum(ctx: VerificationContext) -> tuple[float, str | None]:
    q = ctx.params.q
    worst = 0.0
    for n in range(31):
        expected = (q**n * (q + 1.0) - 2.0) / (2.0 * (q - 1.0))
        worst = max(worst, abs(fock_service.hamiltonian_eigenvalue(n, ctx.params) - expected) / expected)
    return worst, "n <= 30, relative"


# ============== Jacobi operators ==============


@register_check("jacobi_eigen_vs_recurrence", tolerance=1e-9)
def _jacobi_eigen_vs_recurrence(ctx: VerificationContext) -> tuple[float, str | None]:
    J = jacobi_service.position_jacobi(ctx.params)
    N = 20
    eigen = jacobi_service.truncated_eigendecomposition(J, N).eigenvalues
    zeros = jacobi_service.recurrence_zeros(J, N)
    scale = max(1.0, float(np.abs(eigen).max()))
    return float(np.abs(eigen - zeros).max()) / scale, f"N={N}, relative to the spectral radius"


@register_check("self_adjointness_verdicts", tolerance=0.0)
def _verdicts(ctx: VerificationContext) -> tuple[float, str | None]:
    cases = [
        (jacobi_service.position_jacobi(ctx.params), Verdict.NOT_SELF_ADJOINT),
        (jacobi_service.position_jacobi(QParameters.relaxed_q(0.5)), Verdict.SELF_ADJOINT_BOUNDED),
        (jacobi_service.undeformed_jacobi(), Verdict.SELF_ADJOINT_CARLEMAN),
    ]
    wrong = [
        f"{J.label}: {outcome.verdict.value}"
        for J, expected in cases
        if (outcome := jacobi_service.self_adjointness_verdict(J, tol=ctx.tol)).verdict != expected
    ]
    return float(len(wrong)), "; ".join(wrong) or None


# ============== Extremal measures ==============


@register_check("total_mass", tolerance=1e-10)
def _total_mass(ctx: VerificationContext) -> tuple[float, str | None]:
    return abs(spectra_service.compute_moment(ctx.position, 0, tol=ctx.tol) - 1.0), None


@register_check("orthogonality", tolerance=1e-8)
def _orthogonality(ctx: VerificationContext) -> tuple[float, str | None]:
    report = spectra_service.verify_orthogonality(ctx.position, 15, tol=ctx.tol)
    return report.max_deviation, f"N=15, window [{report.window.r_min}, {report.window.r_max}]"


@register_check("hermite_orthogonality", tolerance=1e-8)
def _hermite_orthogonality(ctx: VerificationContext) -> tuple[float, str | None]:
    return spectra_service.hermite_orthogonality(ctx.position, 15, tol=ctx.tol).max_deviation, "N=15"


@register_check("momentum_orthogonality", tolerance=1e-8)
def _momentum_orthogonality(ctx: VerificationContext) -> tuple[float, str | None]:
    return spectra_service.verify_orthogonality(ctx.momentum, 15, tol=ctx.tol).max_deviation, "N=15, b'"


@register_check("mass_identity", tolerance=1e-6)
def _mass_identity(ctx: VerificationContext) -> tuple[float, str | None]:
    worst = max(
        abs(spectra_service.mass_identity(ctx.position, r, 80, ctx.tol).value - 1.0) for r in range(-5, 6)
    )
    return worst, "r in [-5, 5], N=80"


@register_check("dual_orthogonality", tolerance=1e-5)
def _dual_orthogonality(ctx: VerificationContext) -> tuple[float, str | None]:
    pairs = [(0, 1), (-2, 2), (-1, 0)]
    worst = max(abs(spectra_service.dual_orthogonality(ctx.position, r, rp, 120, ctx.tol)) for r, rp in pairs)
    return worst, f"pairs {pairs}, N=120"


@register_check("locate_round_trip", tolerance=1e-12)
def _locate_round_trip(ctx: VerificationContext) -> tuple[float, str | None]:
    worst = 0.0
    for r in range(-5, 6):
        x0 = spectra_service.spectrum_point(ctx.position, r)
        b, r_found = spectra_service.locate_extension(x0, ctx.params)
        if r_found != r:
            return math.inf, f"r={r} located at r={r_found}"
        x = spectra_service.spectrum_point(ExtremalMeasure(params=ctx.params, b=b), r_found)
        worst = max(worst, abs(x - x0) / max(1.0, abs(x0)))
    return worst, "r in [-5, 5]"


@register_check("spectra_separation", tolerance=0.0)
def _separation(ctx: VerificationContext) -> tuple[float, str | None]:
    other = ctx.b_prime if not math.isclose(ctx.b, ctx.b_prime) else 0.5 * (ctx.b + 1.0)
    report = spectra_service.separation_report(ctx.b, other, ctx.params, SpectralWindow.symmetric(10))
    ok = report.interlaced and report.min_gap > 1e-9
    return (0.0 if ok else 1.0), f"b={ctx.b:g} vs {other:g}: min gap {report.min_gap:.3e}"


@register_check("moment_indeterminacy", tolerance=1e-8)
def _moments(ctx: VerificationContext) -> tuple[float, str | None]:
    other = ExtremalMeasure(params=ctx.params, b=ctx.b_prime if not math.isclose(ctx.b, ctx.b_prime) else 0.5 * (ctx.b + 1.0))
    J = jacobi_service.jacobi_matrix(jacobi_service.position_jacobi(ctx.params), 8)
    worst = 0.0
    for n in range(7):
        first = spectra_service.compute_moment(ctx.position, n, tol=ctx.tol)
        second = spectra_service.compute_moment(other, n, tol=ctx.tol)
        exact = float(np.linalg.matrix_power(J, n)[0, 0])
        scale = max(1.0, abs(exact))
        worst = max(worst, abs(first - second) / scale, abs(first - exact) / scale)
    return worst, "n <= 6, two extensions and (J^n)_00"


# ============== Eigenfunctions ==============


def _relative(a: complex, b: complex) -> float:
    return abs(a - b) / max(1.0, abs(b))


@register_check("eigenfunction_product_vs_series", tolerance=1e-10)
def _eigenfunction(ctx: VerificationContext) -> tuple[float, str | None]:
    worst = 0.0
    for x in EIGENFUNCTION_X:
        for y in EIGENFUNCTION_Y:
            product = spectra_service.eigenfunction_product(x, y, ctx.params, ctx.tol).value
            series = spectra_service.eigenfunction_series(x, y, ctx.params, 40).value
            worst = max(worst, _relative(product, series))
    return worst, "N=40"


@register_check("momentum_eigenfunction_product_vs_series", tolerance=1e-10)
def _momentum_eigenfunction(ctx: VerificationContext) -> tuple[float, str | None]:
    worst = 0.0
    for p in EIGENFUNCTION_X:
        for y in EIGENFUNCTION_Y:
            product = spectra_service.momentum_eigenfunction_product(p, y, ctx.params, ctx.tol).value
            series = spectra_service.momentum_eigenfunction_series(p, y, ctx.params, 40).value
            worst = max(worst, _relative(product, series))
    return worst, "N=40"


@register_check("multiplication_realization", tolerance=1e-8)
def _multiplication(ctx: VerificationContext) -> tuple[float, str | None]:
    window = ctx.transform_window
    worst = max(
        spectra_service.multiplication_residual(FockVector.basis(n, 12), ctx.position, window, ctx.tol)
        for n in range(13)
    )
    return worst, "Omega(Qv) = x Omega(v), v = |n>, n <= 12"


@register_check("momentum_multiplication_realization", tolerance=1e-8)
def _momentum_multiplication(ctx: VerificationContext) -> tuple[float, str | None]:
    window = ctx.transform_window
    worst = max(
        spectra_service.multiplication_residual(FockVector.basis(n, 12), ctx.momentum, window, ctx.tol)
        for n in range(13)
    )
    return worst, "Omega'(Pv) = -p Omega'(v) with e_n -> P̃_n"


@register_check("sign_convention_record", tolerance=1e-8, kind=CheckKind.RECORD)
def _sign_convention(ctx: VerificationContext) -> tuple[float, str | None]:
    v = FockVector.basis(1, 4)
    residual = spectra_service.multiplication_residual(
        v, ctx.position, ctx.transform_window, ctx.tol, convention=SignConvention.EQ12, sign=-1.0
    )
    return residual, "with the (-1)^n coefficients, Omega(Qv) = -x Omega(v); Omega uses the eigenvector convention"


# ============== Fourier transform ==============


@register_check("fourier_product_vs_series", tolerance=1e-7)
def _fourier(ctx: VerificationContext) -> tuple[float, str | None]:
    rng = ctx.rng()
    worst = 0.0
    for r_prime, r in rng.integers(-6, 7, size=(25, 2)):
        product = qfourier_service.transform_entry_product(int(r_prime), int(r), ctx.b_prime, ctx.b, ctx.params, ctx.tol)
        series = qfourier_service.transform_entry_series(int(r_prime), int(r), ctx.b_prime, ctx.b, ctx.params).value
        worst = max(worst, abs(product - series) / abs(series))
    return worst, "25 random (r', r) in [-6, 6]^2"


@register_check("unitarity", tolerance=1e-6)
def _unitarity(ctx: VerificationContext) -> tuple[float, str | None]:
    M = ctx.transform
    columns = [M.window.position_of(r) for r in M.interior_columns]
    rows = [M.window.position_of(r) for r in M.interior_rows]
    deviation = max(
        float(np.abs(M.column_norms[columns] - 1.0).max()),
        float(np.abs(M.row_norms[rows] - 1.0).max()),
    )
    return deviation, f"{len(columns)} interior columns, {len(rows)} interior rows of [{M.window.r_min}, {M.window.r_max}]"


def _random_momentum_grid(ctx: VerificationContext) -> GridFunction:
    M = ctx.transform
    rng = ctx.rng()
    amplitudes = np.zeros(M.window.size, dtype=complex)
    support = [M.window.position_of(r) for r in range(-SUPPORT_RADIUS, SUPPORT_RADIUS + 1)]
    amplitudes[support] = rng.normal(size=len(support)) + 1j * rng.normal(size=len(support))
    amplitudes /= np.linalg.norm(amplitudes)
    values = amplitudes * np.exp(-0.5 * M.log_weights_prime)
    return spectra_service.grid_function(ctx.momentum, M.window, values, ctx.tol)


@register_check("plancherel", tolerance=1e-7)
def _plancherel(ctx: VerificationContext) -> tuple[float, str | None]:
    Fhat = _random_momentum_grid(ctx)
    F = qfourier_service.apply_transform(ctx.transform, Fhat, ctx.tol)
    return abs(F.weighted_norm - Fhat.weighted_norm), f"random input on [-{SUPPORT_RADIUS}, {SUPPORT_RADIUS}]"


@register_check("fourier_round_trip", tolerance=1e-6)
def _round_trip(ctx: VerificationContext) -> tuple[float, str | None]:
    M = ctx.transform
    deviation = qfourier_service.round_trip_deviation(M, _random_momentum_grid(ctx), ctx.tol)
    return deviation, f"inverse(transform(F̂)) on the amplitudes of {len(M.interior_rows)} interior rows"


@register_check("isometry_consistency", tolerance=1e-6)
def _isometry_consistency(ctx: VerificationContext) -> tuple[float, str | None]:
    M = ctx.transform
    worst = 0.0
    for n in range(11):
        v = FockVector.basis(n, 10)
        Fhat = spectra_service.isometry_omega(v, ctx.momentum, M.window, ctx.tol)
        F = spectra_service.isometry_omega(v, ctx.position, M.window, ctx.tol)
        transformed = qfourier_service.apply_transform(M, Fhat, ctx.tol)
        worst = max(worst, float(np.linalg.norm(transformed.amplitudes - F.amplitudes)))
    return worst, "transform(Omega'|n>) = Omega|n>, n <= 10"

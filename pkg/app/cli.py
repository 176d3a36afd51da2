"""
Command-line front end: `python -m app.cli <command> ...`.

Every command writes one document (JSON by default, CSV with --format csv)
to stdout or --output. Exit codes: 0 on success, 1 on numeric failure or a
failed verification, 2 on invalid arguments.
"""

import functools
import json
import logging
from collections.abc import Callable
from pathlib import Path

import click

from app.config import settings
from app.core.exceptions import AppException
from app.schemas.documents import Document, VerifyDocument
from app.schemas.hermite import SignConvention
from app.schemas.params import MeasureKind, QParameters, Tolerance
from app.services import document_service
from app.services.document_service import OperatorChoice, OutputFormat

logger = logging.getLogger(__name__)

EXIT_VERIFICATION_FAILED = 1


def common_options(command: Callable) -> Callable:
    """Options shared by every subcommand."""
    decorators = [
        click.option("--q", "q", type=float, required=True, help="Deformation parameter q."),
        click.option(
            "--format",
            "fmt",
            type=click.Choice([f.value for f in OutputFormat]),
            default=OutputFormat.JSON.value,
            show_default=True,
        ),
        click.option("--output", type=click.Path(dir_okay=False, path_type=Path), default=None),
        click.option("--rel-tol", type=float, default=None, help="Relative tolerance override."),
        click.option("--tail-eps", type=float, default=None, help="Tail threshold override."),
        click.option("--max-terms", type=int, default=None, help="Product/series truncation limit."),
        click.option("--verbose", is_flag=True, help="Log at DEBUG level."),
    ]
    for decorator in reversed(decorators):
        command = decorator(command)
    return command


def _configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else settings.LOG_LEVEL,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def _emit(document: Document, fmt: str, output: Path | None) -> None:
    text = document_service.render(document, OutputFormat(fmt))
    if output is None:
        click.echo(text, nl=False)
    else:
        output.write_text(text)
        logger.info(f"Wrote {document.command} document to {output}")


def run_command(build: Callable[..., Document]) -> Callable:
    """Wrap a document builder into a click callback with logging, output and exit codes."""

    @functools.wraps(build)
    def callback(
        fmt: str,
        output: Path | None,
        rel_tol: float | None,
        tail_eps: float | None,
        max_terms: int | None,
        verbose: bool,
        **kwargs,
    ) -> None:
        _configure_logging(verbose)
        try:
            tol = Tolerance.from_settings(rel_tol=rel_tol, tail_eps=tail_eps, max_terms=max_terms)
            document = build(tol=tol, **kwargs)
        except AppException as exc:
            logger.debug(f"{exc.code.value}: {exc.message}")
            click.echo(json.dumps(exc.to_dict(), sort_keys=True, default=str), err=True)
            raise click.exceptions.Exit(exc.exit_code) from exc
        _emit(document, fmt, output)
        if isinstance(document, VerifyDocument) and not document.passed:
            raise click.exceptions.Exit(EXIT_VERIFICATION_FAILED)

    return callback


def _params(q: float, relaxed: bool = False) -> QParameters:
    return QParameters(q=q, relaxed=relaxed)


kind_option = click.option(
    "--kind",
    type=click.Choice([k.value for k in MeasureKind]),
    default=MeasureKind.POSITION.value,
    show_default=True,
)


@click.group(name="qosc")
def cli() -> None:
    """Spectra, eigenfunctions and the q-Fourier transform of the q-oscillator."""


# ============== Spectrum ==============


@cli.command()
@common_options
@click.option("--b", type=float, required=True, help="Extension label b in [1/q, 1).")
@click.option("--rmin", type=int, default=None)
@click.option("--rmax", type=int, default=None)
@click.option("--n", "n", type=int, default=0, show_default=True, help="Degree of the tabulated coefficient.")
@kind_option
@run_command
def spectrum(tol: Tolerance, q: float, b: float, rmin: int | None, rmax: int | None, n: int, kind: str) -> Document:
    """Spectral points x_b(r), masses m_r and P_n(x_b(r))."""
    window = document_service.window_from_bounds(rmin, rmax)
    return document_service.spectrum(_params(q), b, n, window, MeasureKind(kind), tol)


@cli.command()
@common_options
@click.option("--x0", type=float, required=True)
@kind_option
@run_command
def locate(tol: Tolerance, q: float, x0: float, kind: str) -> Document:
    """Extension b and index r whose spectrum contains x0."""
    return document_service.locate(_params(q), x0, MeasureKind(kind))


# ============== Oscillator ==============


@cli.command()
@common_options
@click.option("--n-max", type=int, default=10, show_default=True)
@run_command
def hamiltonian(tol: Tolerance, q: float, n_max: int) -> Document:
    """Energy levels of H = (a a⁺ + a⁺ a)/2."""
    return document_service.hamiltonian(_params(q), n_max)


@cli.command()
@common_options
@click.option("--x", type=float, required=True, help="Evaluation point (x, or p for momentum).")
@click.option("--n-max", type=int, default=10, show_default=True)
@kind_option
@click.option(
    "--convention",
    type=click.Choice([c.value for c in SignConvention]),
    default=SignConvention.EQ12.value,
    show_default=True,
)
@run_command
def polys(tol: Tolerance, q: float, x: float, n_max: int, kind: str, convention: str) -> Document:
    """Coefficient polynomials P_n(x) or P̃_n(p) for n = 0..n_max."""
    return document_service.polys(_params(q), x, n_max, MeasureKind(kind), SignConvention(convention))


@cli.command()
@common_options
@click.option("--x", type=float, required=True)
@click.option("--y", "ys", type=float, multiple=True, required=True, help="Repeat for several y.")
@click.option("--n-terms", type=int, default=None, help="Series truncation (default SERIES_TERMS).")
@kind_option
@run_command
def eigenfunction(
    tol: Tolerance, q: float, x: float, ys: tuple[float, ...], n_terms: int | None, kind: str
) -> Document:
    """Eigenfunction φ_x(y) (or ξ_p(y)) from its product and its series."""
    n_terms = settings.SERIES_TERMS if n_terms is None else n_terms
    return document_service.eigenfunction(_params(q), x, list(ys), n_terms, MeasureKind(kind), tol)


# ============== Transform ==============


@cli.command()
@common_options
@click.option("--b", type=float, required=True)
@click.option("--bprime", "b_prime", type=float, required=True)
@click.option("--rmin", type=int, default=None)
@click.option("--rmax", type=int, default=None)
@click.option("--threads", type=click.IntRange(min=1), default=None)
@click.option("--validate", type=click.IntRange(min=0), default=None, help="Series spot checks to run.")
@click.option("--core", is_flag=True, help="Emit the unitary core T instead of F.")
@run_command
def transform(
    tol: Tolerance,
    q: float,
    b: float,
    b_prime: float,
    rmin: int | None,
    rmax: int | None,
    threads: int | None,
    validate: int | None,
    core: bool,
) -> Document:
    """Discrete q-Fourier transform matrix between the grids of b' and b."""
    window = document_service.window_from_bounds(rmin, rmax)
    return document_service.transform(_params(q), b, b_prime, window, tol, threads, validate, core)


# ============== Verdicts and verification ==============


@cli.command()
@common_options
@click.option(
    "--operator",
    type=click.Choice([o.value for o in OperatorChoice]),
    default=OperatorChoice.POSITION.value,
    show_default=True,
)
@click.option("--undeformed", is_flag=True, help="Shorthand for --operator undeformed.")
@click.option("--n-probe", type=int, default=64, show_default=True)
@run_command
def verdict(tol: Tolerance, q: float, operator: str, undeformed: bool, n_probe: int) -> Document:
    """Self-adjointness verdict for a Jacobi operator; 0 < q < 1 is allowed here."""
    choice = OperatorChoice.UNDEFORMED if undeformed else OperatorChoice(operator)
    return document_service.verdict(_params(q, relaxed=True), choice, n_probe, tol)


@cli.command()
@common_options
@click.option("--b", type=float, required=True)
@click.option("--bprime", "b_prime", type=float, default=None, help="Momentum extension (defaults to b).")
@click.option("--check", "names", multiple=True, help="Run only these checks (the gate always runs).")
@run_command
def verify(tol: Tolerance, q: float, b: float, b_prime: float | None, names: tuple[str, ...]) -> Document:
    """Run the invariant suite; exits 1 unless every assertion passes."""
    document = document_service.verify(_params(q), b, b_prime, tol, list(names) or None)
    for check in document.checks:
        status = "skip" if check.skipped else ("ok" if check.passed else "FAIL")
        click.echo(f"{status:>4}  {check.name:<40} {check.deviation!s:<24} tol={check.tolerance:g}", err=True)
    return document


if __name__ == "__main__":
    cli()

"""Output documents shared by the CLI (JSON/CSV) and the HTTP API.

Every document carries schema_version, command and q. The CSV form of a
document is its CSV_HEADER followed by rows().
"""

from collections.abc import Iterable, Sequence
from typing import ClassVar, Literal

from pydantic import BaseModel

from app.schemas.hermite import SignConvention
from app.schemas.jacobi import Verdict, VerdictEvidence
from app.schemas.params import MeasureKind
from app.schemas.verification import CheckResult

SCHEMA_VERSION = "1"


class Document(BaseModel):
    schema_version: str = SCHEMA_VERSION
    command: str
    q: float

    CSV_HEADER: ClassVar[tuple[str, ...]] = ()

    def rows(self) -> Iterable[Sequence[object]]:
        return []


# ============== Spectrum ==============


class SpectrumPoint(BaseModel):
    r: int
    x: float
    weight: float
    log_weight: float
    value_re: float | None
    value_im: float | None


class SpectrumDocument(Document):
    """Lattice x_b(r), masses m_r and P_n(x_b(r)) on a window."""

    command: Literal["spectrum"] = "spectrum"
    b: float
    kind: MeasureKind
    n: int
    window: tuple[int, int]
    points: list[SpectrumPoint]

    CSV_HEADER: ClassVar[tuple[str, ...]] = ("r", "x", "m_r", "value_re", "value_im")

    def rows(self) -> Iterable[Sequence[object]]:
        return [(p.r, p.x, p.weight, p.value_re, p.value_im) for p in self.points]


class LocateDocument(Document):
    command: Literal["locate"] = "locate"
    kind: MeasureKind
    x0: float
    b: float
    r: int
    x0_roundtrip: float

    CSV_HEADER: ClassVar[tuple[str, ...]] = ("x0", "b", "r", "x0_roundtrip")

    def rows(self) -> Iterable[Sequence[object]]:
        return [(self.x0, self.b, self.r, self.x0_roundtrip)]


# ============== Oscillator ==============


class EnergyLevel(BaseModel):
    n: int
    energy: float


class HamiltonianDocument(Document):
    command: Literal["hamiltonian"] = "hamiltonian"
    levels: list[EnergyLevel]

    CSV_HEADER: ClassVar[tuple[str, ...]] = ("n", "energy")

    def rows(self) -> Iterable[Sequence[object]]:
        return [(level.n, level.energy) for level in self.levels]


class PolyValue(BaseModel):
    n: int
    value: float | None
    imag: float | None


class PolysDocument(Document):
    """P_n(x) or P̃_n(p) for n = 0..n_max at one point."""

    command: Literal["polys"] = "polys"
    kind: MeasureKind
    x: float
    convention: SignConvention
    values: list[PolyValue]

    CSV_HEADER: ClassVar[tuple[str, ...]] = ("n", "value", "imag")

    def rows(self) -> Iterable[Sequence[object]]:
        return [(v.n, v.value, v.imag) for v in self.values]


class EigenfunctionPoint(BaseModel):
    y: float
    product_re: float | None
    product_im: float | None
    series_re: float | None
    series_im: float | None
    deviation: float | None
    n_factors: int
    n_terms: int


class EigenfunctionDocument(Document):
    """Generating function φ_x(y) (or ξ_p(y)) from the product and from the series."""

    command: Literal["eigenfunction"] = "eigenfunction"
    kind: MeasureKind
    x: float
    points: list[EigenfunctionPoint]

    CSV_HEADER: ClassVar[tuple[str, ...]] = (
        "y",
        "product_re",
        "product_im",
        "series_re",
        "series_im",
        "deviation",
    )

    def rows(self) -> Iterable[Sequence[object]]:
        return [
            (p.y, p.product_re, p.product_im, p.series_re, p.series_im, p.deviation)
            for p in self.points
        ]


# ============== Transform ==============


class MatrixEntry(BaseModel):
    r_prime: int
    r: int
    re: float | None
    im: float | None


class SpotCheckEntry(BaseModel):
    r_prime: int
    r: int
    deviation: float


class TransformDocument(Document):
    """Entries of F (or of the unitary core T) with the construction diagnostics."""

    command: Literal["transform"] = "transform"
    b: float
    b_prime: float
    matrix: Literal["F", "T"]
    window: tuple[int, int]
    entries: list[MatrixEntry]
    column_norms: list[float]
    row_norms: list[float]
    interior_columns: list[int]
    unitarity_deviation: float | None
    spot_checks: list[SpotCheckEntry]

    CSV_HEADER: ClassVar[tuple[str, ...]] = ("r_prime", "r", "re", "im")

    def rows(self) -> Iterable[Sequence[object]]:
        return [(e.r_prime, e.r, e.re, e.im) for e in self.entries]


# ============== Verdicts and verification ==============


class VerdictDocument(Document):
    command: Literal["verdict"] = "verdict"
    operator: str
    verdict: Verdict
    evidence: VerdictEvidence

    CSV_HEADER: ClassVar[tuple[str, ...]] = ("field", "value")

    def rows(self) -> Iterable[Sequence[object]]:
        fields = [("operator", self.operator), ("verdict", self.verdict.value)]
        return fields + list(self.evidence.model_dump().items())


class VerifyDocument(Document):
    command: Literal["verify"] = "verify"
    b: float
    b_prime: float
    passed: bool
    checks: list[CheckResult]

    CSV_HEADER: ClassVar[tuple[str, ...]] = (
        "name",
        "kind",
        "deviation",
        "tolerance",
        "passed",
        "skipped",
        "note",
    )

    def rows(self) -> Iterable[Sequence[object]]:
        return [
            (c.name, c.kind.value, c.deviation, c.tolerance, c.passed, c.skipped, c.note)
            for c in self.checks
        ]

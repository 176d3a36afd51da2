from app.schemas.fock import FockOperator, FockVector
from app.schemas.fourier import SeriesValue, SpotCheck, TransformMatrix
from app.schemas.hermite import CoefficientFamily, HermiteFamily, SignConvention
from app.schemas.jacobi import (
    EigenDecomposition,
    JacobiOperator,
    SelfAdjointnessVerdict,
    Verdict,
    VerdictEvidence,
)
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
from app.schemas.verification import CheckKind, CheckResult, VerificationReport

__all__ = [
    "QParameters",
    "Tolerance",
    "MeasureKind",
    "ExtremalMeasure",
    "SpectralWindow",
    "FockOperator",
    "FockVector",
    "JacobiOperator",
    "Verdict",
    "VerdictEvidence",
    "SelfAdjointnessVerdict",
    "EigenDecomposition",
    "SignConvention",
    "HermiteFamily",
    "CoefficientFamily",
    "GridFunction",
    "OrthogonalityReport",
    "MassIdentityResult",
    "EigenfunctionValue",
    "SeparationReport",
    "SeriesValue",
    "SpotCheck",
    "TransformMatrix",
    "CheckKind",
    "CheckResult",
    "VerificationReport",
]

from typing import Annotated

from fastapi import APIRouter, Depends, Query

from app.api.deps import get_tolerance
from app.config import settings
from app.schemas.documents import EigenfunctionDocument, HamiltonianDocument, PolysDocument
from app.schemas.hermite import SignConvention
from app.schemas.params import MeasureKind, QParameters, Tolerance
from app.services import document_service

router = APIRouter(prefix="", tags=["oscillator"])


@router.get("/hamiltonian", response_model=HamiltonianDocument)
def get_hamiltonian(
    q: float = Query(..., gt=1),
    n_max: int = Query(10, ge=0, le=1000),
) -> HamiltonianDocument:
    return document_service.hamiltonian(QParameters(q=q), n_max)


@router.get("/polys", response_model=PolysDocument)
def get_polys(
    q: float = Query(..., gt=1),
    x: float = Query(...),
    n_max: int = Query(10, ge=0, le=1000),
    kind: MeasureKind = Query(MeasureKind.POSITION),
    convention: SignConvention = Query(SignConvention.EQ12),
) -> PolysDocument:
    """P_n(x) or P̃_n(p) for n = 0..n_max."""
    return document_service.polys(QParameters(q=q), x, n_max, kind, convention)


@router.get("/eigenfunction", response_model=EigenfunctionDocument)
def get_eigenfunction(
    tol: Annotated[Tolerance, Depends(get_tolerance)],
    q: float = Query(..., gt=1),
    x: float = Query(...),
    y: list[float] = Query(...),
    n_terms: int = Query(settings.SERIES_TERMS, ge=1, le=2000),
    kind: MeasureKind = Query(MeasureKind.POSITION),
) -> EigenfunctionDocument:
    """Product and series forms of the eigenfunction at each y."""
    return document_service.eigenfunction(QParameters(q=q), x, y, n_terms, kind, tol)

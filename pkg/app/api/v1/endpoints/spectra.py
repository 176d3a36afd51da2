from typing import Annotated

from fastapi import APIRouter, Depends, Query

from app.api.deps import get_tolerance
from app.schemas.documents import LocateDocument, SpectrumDocument
from app.schemas.params import MeasureKind, QParameters, Tolerance
from app.services import document_service

router = APIRouter(prefix="", tags=["spectra"])


@router.get("/spectrum", response_model=SpectrumDocument)
def get_spectrum(
    tol: Annotated[Tolerance, Depends(get_tolerance)],
    q: float = Query(..., gt=1),
    b: float = Query(..., gt=0, lt=1),
    n: int = Query(0, ge=0),
    rmin: int | None = Query(None),
    rmax: int | None = Query(None),
    kind: MeasureKind = Query(MeasureKind.POSITION),
) -> SpectrumDocument:
    """Spectral points, masses and P_n on a window (automatic when rmin/rmax are omitted)."""
    window = document_service.window_from_bounds(rmin, rmax)
    return document_service.spectrum(QParameters(q=q), b, n, window, kind, tol)


@router.get("/locate", response_model=LocateDocument)
def get_locate(
    q: float = Query(..., gt=1),
    x0: float = Query(...),
    kind: MeasureKind = Query(MeasureKind.POSITION),
) -> LocateDocument:
    """The extension b and index r whose spectrum contains x0."""
    return document_service.locate(QParameters(q=q), x0, kind)

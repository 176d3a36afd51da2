from typing import Annotated

from fastapi import APIRouter, Depends, Query

from app.api.deps import get_tolerance
from app.schemas.documents import TransformDocument
from app.schemas.params import QParameters, Tolerance
from app.services import document_service

router = APIRouter(prefix="", tags=["transforms"])


@router.get("/transform", response_model=TransformDocument)
def get_transform(
    tol: Annotated[Tolerance, Depends(get_tolerance)],
    q: float = Query(..., gt=1),
    b: float = Query(..., gt=0, lt=1),
    bprime: float = Query(..., gt=0, lt=1),
    rmin: int | None = Query(None),
    rmax: int | None = Query(None),
    validate: int | None = Query(None, ge=0, le=100),
    core: bool = Query(False),
) -> TransformDocument:
    """Transform matrix F (or its unitary core T) with construction diagnostics."""
    window = document_service.window_from_bounds(rmin, rmax)
    return document_service.transform(QParameters(q=q), b, bprime, window, tol, validate=validate, core=core)

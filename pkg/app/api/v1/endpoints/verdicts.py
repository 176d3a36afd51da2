from typing import Annotated

from fastapi import APIRouter, Depends, Query

from app.api.deps import get_tolerance
from app.schemas.documents import VerdictDocument
from app.schemas.params import QParameters, Tolerance
from app.services import document_service
from app.services.document_service import OperatorChoice

router = APIRouter(prefix="", tags=["verdicts"])


@router.get("/verdict", response_model=VerdictDocument)
def get_verdict(
    tol: Annotated[Tolerance, Depends(get_tolerance)],
    q: float = Query(..., gt=0),
    operator: OperatorChoice = Query(OperatorChoice.POSITION),
    n_probe: int = Query(64, ge=32, le=4096),
) -> VerdictDocument:
    """Self-adjointness verdict; 0 < q < 1 is accepted for the bounded case."""
    return document_service.verdict(QParameters(q=q, relaxed=True), operator, n_probe, tol)

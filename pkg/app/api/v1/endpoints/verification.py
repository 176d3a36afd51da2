import logging
from typing import Annotated

from fastapi import APIRouter, Depends, Query

from app.api.deps import get_tolerance
from app.schemas.documents import VerifyDocument
from app.schemas.params import QParameters, Tolerance
from app.services import document_service

logger = logging.getLogger(__name__)

router = APIRouter(prefix="", tags=["verification"])


@router.get("/verify", response_model=VerifyDocument)
def get_verify(
    tol: Annotated[Tolerance, Depends(get_tolerance)],
    q: float = Query(..., gt=1),
    b: float = Query(..., gt=0, lt=1),
    bprime: float | None = Query(None, gt=0, lt=1),
    check: list[str] | None = Query(None),
) -> VerifyDocument:
    """
    Run the invariant suite for (q, b, b').

    A failed check is reported in the body with passed=false; the status stays 200.
    """
    document = document_service.verify(QParameters(q=q), b, bprime, tol, check)
    if not document.passed:
        logger.info(f"Verify q={q:g} b={b:g} reported failures")
    return document

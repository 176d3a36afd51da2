from typing import Annotated

from fastapi import Query

from app.schemas.params import Tolerance


def get_tolerance(
    rel_tol: Annotated[float | None, Query(gt=0)] = None,
    tail_eps: Annotated[float | None, Query(gt=0)] = None,
    max_terms: Annotated[int | None, Query(ge=8)] = None,
) -> Tolerance:
    """Tolerance from the settings with per-request overrides."""
    return Tolerance.from_settings(rel_tol=rel_tol, tail_eps=tail_eps, max_terms=max_terms)

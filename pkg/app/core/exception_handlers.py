"""
FastAPI exception handlers.
Every error leaves the API as {"detail": ..., "code": ...}, the same
document the CLI writes to stderr, with an X-Request-ID header.
"""

import logging
import uuid
from typing import Any

from fastapi import Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from starlette.exceptions import HTTPException as StarletteHTTPException

from app.core.exceptions import AppException, ErrorCode

logger = logging.getLogger(__name__)

STATUS_TO_CODE = {
    400: ErrorCode.VALIDATION_ERROR,
    404: ErrorCode.RESOURCE_NOT_FOUND,
    422: ErrorCode.VALIDATION_ERROR,
    500: ErrorCode.SERVER_ERROR,
}


def generate_request_id() -> str:
    return str(uuid.uuid4())[:8]


def _error_response(status_code: int, content: dict[str, Any], request_id: str) -> JSONResponse:
    return JSONResponse(status_code=status_code, content=content, headers={"X-Request-ID": request_id})


async def app_exception_handler(request: Request, exc: AppException) -> JSONResponse:
    """Invalid parameters (422) and numerical failures (500) raised by the services."""
    request_id = generate_request_id()
    log = logger.warning if exc.status_code < 500 else logger.error
    log(f"{exc.code.value} on {request.url.path} (request_id={request_id}): {exc.message}")
    return _error_response(exc.status_code, exc.to_dict(), request_id)


async def validation_exception_handler(request: Request, exc: RequestValidationError) -> JSONResponse:
    """Query parameters rejected by FastAPI, reported with their locations."""
    request_id = generate_request_id()
    errors = [{"loc": list(error["loc"]), "msg": error["msg"], "type": error["type"]} for error in exc.errors()]
    logger.warning(f"Query validation failed on {request.url.path} (request_id={request_id}): {errors}")
    content = {"detail": errors, "code": ErrorCode.VALIDATION_ERROR.value}
    return _error_response(422, content, request_id)


async def http_exception_handler(request: Request, exc: StarletteHTTPException) -> JSONResponse:
    request_id = generate_request_id()
    code = STATUS_TO_CODE.get(exc.status_code, ErrorCode.SERVER_ERROR)
    logger.warning(f"HTTP {exc.status_code} on {request.url.path} (request_id={request_id}): {exc.detail}")
    content = {"detail": exc.detail or "An error occurred", "code": code.value}
    return _error_response(exc.status_code, content, request_id)


async def generic_exception_handler(request: Request, exc: Exception) -> JSONResponse:
    request_id = generate_request_id()
    logger.exception(f"Unhandled exception on {request.url.path} (request_id={request_id}): {exc}")
    content = {"detail": "Internal computation error", "code": ErrorCode.SERVER_ERROR.value}
    return _error_response(500, content, request_id)

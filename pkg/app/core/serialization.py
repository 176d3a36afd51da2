"""Byte-stable JSON and CSV output shared by the CLI and the API."""

import csv
import io
import json
import math
from collections.abc import Iterable, Sequence

from pydantic import BaseModel


def finite(value: float) -> float | None:
    """JSON has no inf or nan; those become null."""
    value = float(value)
    return value if math.isfinite(value) else None


def format_number(value: object) -> str:
    if isinstance(value, bool) or value is None:
        return "" if value is None else str(value).lower()
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def dump_json(document: BaseModel) -> str:
    """Sorted-key JSON. Floats use repr: the shortest text that parses back to the same double,
    never more than 17 significant digits, so it carries exactly what `format_number` does."""
    return json.dumps(document.model_dump(mode="json"), sort_keys=True, indent=2) + "\n"


def write_csv(header: Sequence[str], rows: Iterable[Sequence[object]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_number(cell) for cell in row])
    return buffer.getvalue()

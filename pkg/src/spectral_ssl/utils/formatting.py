"""Deterministic text formatting for report files and console output."""

import math
from typing import Any

import numpy as np

from ..models.experiment import CheckResult

# Significant digits written for floats; enough to round-trip the checks
FLOAT_DIGITS = 12


def format_float(value: float) -> str:
    """Format a float with FLOAT_DIGITS significant digits.

    Non-finite values are written as nan, inf and -inf.
    """
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.{FLOAT_DIGITS}g}"


def format_value(value: Any) -> str:
    """Format one CSV cell; None becomes the empty string."""
    if value is None:
        return ""
    if isinstance(value, bool | np.bool_):
        return "true" if value else "false"
    if isinstance(value, int | np.integer):
        return str(int(value))
    if isinstance(value, float | np.floating):
        return format_float(value)
    return str(value)


def to_jsonable(value: Any) -> Any:
    """Convert numpy scalars and arrays (recursively) to JSON-ready values.

    Floats are rounded to FLOAT_DIGITS significant digits; non-finite
    floats become their string form since JSON has no literal for them.
    """
    if isinstance(value, dict):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if isinstance(value, list | tuple):
        return [to_jsonable(item) for item in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(item) for item in value.tolist()]
    if isinstance(value, bool | np.bool_):
        return bool(value)
    if isinstance(value, int | np.integer):
        return int(value)
    if isinstance(value, float | np.floating):
        if not math.isfinite(value):
            return format_float(value)
        return float(format_float(value))
    return value


def format_check(check: CheckResult) -> str:
    """One console line per check: status, name, measured and threshold."""
    status = "PASS" if check.passed else "FAIL"
    line = (
        f"[{status}] {check.name}: measured={format_value(check.measured)} "
        f"threshold={format_value(check.threshold)}"
    )
    if check.detail:
        line += f" ({check.detail})"
    return line

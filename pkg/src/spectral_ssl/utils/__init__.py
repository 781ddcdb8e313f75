"""Utility functions for spectral-ssl."""

from .formatting import format_check, format_float, format_value, to_jsonable

__all__ = [
    "format_check",
    "format_float",
    "format_value",
    "to_jsonable",
]

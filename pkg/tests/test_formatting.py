"""Tests for the formatting utilities."""

import numpy as np
import pytest

from spectral_ssl.models import CheckResult
from spectral_ssl.utils.formatting import format_check, format_float, format_value, to_jsonable


class TestFormatFloat:
    """Tests for format_float."""

    @pytest.mark.parametrize(
        ("value", "expected"),
        [
            (0.1, "0.1"),
            (1 / 3, "0.333333333333"),
            (1e-20, "1e-20"),
            (2.0, "2"),
            (float("nan"), "nan"),
            (float("inf"), "inf"),
            (float("-inf"), "-inf"),
        ],
    )
    def test_fixed_digits(self, value: float, expected: str) -> None:
        """Test twelve significant digits and non-finite spellings.

        Verifies the formatted text.
        """
        assert format_float(value) == expected


class TestFormatValue:
    """Tests for format_value."""

    @pytest.mark.parametrize(
        ("value", "expected"),
        [
            (None, ""),
            (True, "true"),
            (np.bool_(False), "false"),
            (np.int64(7), "7"),
            (np.float32(0.5), "0.5"),
            ("sgd", "sgd"),
            ([1, 2], "[1, 2]"),
        ],
    )
    def test_cells(self, value: object, expected: str) -> None:
        """Test each cell type.

        Verifies booleans are not formatted as integers.
        """
        assert format_value(value) == expected


class TestToJsonable:
    """Tests for to_jsonable."""

    def test_nested_numpy_values(self) -> None:
        """Test conversion of nested numpy scalars and arrays.

        Verifies plain Python types come back.
        """
        result = to_jsonable({"a": np.arange(2), "b": (np.float64(0.25), np.bool_(True)), 3: "x"})

        assert result == {"a": [0, 1], "b": [0.25, True], "3": "x"}
        assert type(result["a"][0]) is int
        assert type(result["b"][1]) is bool

    def test_rounding_and_non_finite(self) -> None:
        """Test floats are rounded and non-finite values become strings.

        Verifies 1/3 and nan.
        """
        assert to_jsonable(1 / 3) == 0.333333333333
        assert to_jsonable(np.float64("nan")) == "nan"


class TestFormatCheck:
    """Tests for format_check."""

    def test_pass_line(self) -> None:
        """Test a passed check with detail.

        Verifies the console line.
        """
        check = CheckResult("gap", True, 0.25, 0.5, "relative")

        assert format_check(check) == "[PASS] gap: measured=0.25 threshold=0.5 (relative)"

    def test_fail_line_without_detail(self) -> None:
        """Test a failed check.

        Verifies FAIL and no trailing detail.
        """
        check = CheckResult("rank", False, 3, ">= 4")

        assert format_check(check) == "[FAIL] rank: measured=3 threshold=>= 4"

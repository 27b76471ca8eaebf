"""
Input Validation Utilities for Logicmon

Validation functions for truth values, kernel sizes, shapes and paths.
Used by the pydantic models and by the kernels that take raw numbers.
"""

from typing import Any, Optional, List, Union, Type
from pathlib import Path
import math

import numpy as np

from .exceptions import (
    InvalidInputError,
    DataValidationError,
    KernelSizeError,
    ValueRangeError,
)


def validate_type(
    value: Any,
    expected_type: Union[Type, tuple],
    field_name: str = "value",
) -> None:
    """
    Validate that a value is of the expected type.

    Raises:
        DataValidationError: If type validation fails
    """
    if not isinstance(value, expected_type):
        if isinstance(expected_type, tuple):
            expected_str = " or ".join(t.__name__ for t in expected_type)
        else:
            expected_str = expected_type.__name__
        raise DataValidationError(field_name, expected_str, value)


def validate_string(
    value: Any,
    field_name: str = "value",
    allowed_values: Optional[List[str]] = None,
) -> str:
    """
    Validate a string value, optionally against an enumeration.

    Raises:
        DataValidationError: If value is not a string
        InvalidInputError: If value is not one of allowed_values
    """
    validate_type(value, str, field_name)

    if allowed_values is not None and value not in allowed_values:
        raise InvalidInputError(
            field_name,
            f"must be one of: {', '.join(allowed_values)}",
            value,
        )

    return value


def validate_integer(
    value: Any,
    field_name: str = "value",
    min_value: Optional[int] = None,
    max_value: Optional[int] = None,
) -> int:
    """
    Validate an integer value with optional bounds.

    Raises:
        DataValidationError: If value is not an int
        InvalidInputError: If a bound is violated
    """
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise DataValidationError(field_name, "int", value)
    value = int(value)

    if min_value is not None and value < min_value:
        raise InvalidInputError(field_name, f"must be at least {min_value}", value)

    if max_value is not None and value > max_value:
        raise InvalidInputError(field_name, f"must be at most {max_value}", value)

    return value


def validate_float(
    value: Any,
    field_name: str = "value",
    min_value: Optional[float] = None,
    max_value: Optional[float] = None,
) -> float:
    """
    Validate a finite float value with optional bounds.

    Raises:
        InvalidInputError: If validation fails
    """
    validate_type(value, (int, float, np.floating, np.integer), field_name)
    value = float(value)

    if math.isnan(value):
        raise InvalidInputError(field_name, "must not be NaN", value)

    if min_value is not None and value < min_value:
        raise InvalidInputError(field_name, f"must be at least {min_value}", value)

    if max_value is not None and value > max_value:
        raise InvalidInputError(field_name, f"must be at most {max_value}", value)

    return value


def validate_truth_value(value: Any, field_name: str = "truth value") -> float:
    """Validate a scalar truth degree in [0,1]; NaN is rejected."""
    return validate_float(value, field_name, min_value=0.0, max_value=1.0)


def validate_odd_ksize(value: Any, field_name: str = "ksize") -> int:
    """
    Validate an odd positive kernel size.

    Raises:
        KernelSizeError: If the value is not an odd positive integer
    """
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise KernelSizeError(value)
    if value < 1 or value % 2 == 0:
        raise KernelSizeError(value)
    return int(value)


def validate_truth_array(values: Any, what: str = "mask") -> np.ndarray:
    """
    Validate an array of truth degrees, returning it as float64.

    Raises:
        ValueRangeError: On NaN or values outside [0,1]
    """
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        return arr
    if np.isnan(arr).any():
        raise ValueRangeError(what, float("nan"), float("nan"))
    low, high = float(arr.min()), float(arr.max())
    if low < 0.0 or high > 1.0:
        raise ValueRangeError(what, low, high)
    return arr


def validate_shape(value: Any, field_name: str = "shape") -> tuple:
    """Validate a (height, width) pair of positive integers."""
    validate_type(value, (tuple, list), field_name)
    if len(value) != 2:
        raise InvalidInputError(field_name, "must have exactly two entries", value)
    return (
        validate_integer(value[0], f"{field_name}[0]", min_value=1),
        validate_integer(value[1], f"{field_name}[1]", min_value=1),
    )


def validate_file_path(
    value: Any,
    field_name: str = "file_path",
    must_exist: bool = False,
    must_be_file: bool = False,
    must_be_dir: bool = False,
) -> Path:
    """
    Validate a file path.

    Raises:
        InvalidInputError: If validation fails
    """
    validate_type(value, (str, Path), field_name)
    path = Path(value)

    if must_exist and not path.exists():
        raise InvalidInputError(field_name, "path does not exist", value)

    if must_be_file and not path.is_file():
        raise InvalidInputError(field_name, "path must be a file", value)

    if must_be_dir and not path.is_dir():
        raise InvalidInputError(field_name, "path must be a directory", value)

    return path.resolve()


__all__ = [
    "validate_type",
    "validate_string",
    "validate_integer",
    "validate_float",
    "validate_truth_value",
    "validate_odd_ksize",
    "validate_truth_array",
    "validate_shape",
    "validate_file_path",
]

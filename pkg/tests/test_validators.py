"""
Unit Tests for Logicmon Validators

Tests for the validation functions used by the models and kernels.
"""

import numpy as np
import pytest
from src.utils.exceptions import (
    DataValidationError,
    InvalidInputError,
    KernelSizeError,
    ValueRangeError,
)
from src.utils.validators import (
    validate_file_path,
    validate_float,
    validate_integer,
    validate_odd_ksize,
    validate_shape,
    validate_string,
    validate_truth_array,
    validate_truth_value,
)


class TestScalarValidation:
    """Test string, integer and float validation."""

    def test_validate_string_allowed(self):
        """Test enumeration check."""
        assert validate_string("mean", allowed_values=["mean", "tnorm_reduce"]) == "mean"
        with pytest.raises(InvalidInputError):
            validate_string("median", allowed_values=["mean", "tnorm_reduce"])

    def test_validate_string_type(self):
        """Test non-string rejection."""
        with pytest.raises(DataValidationError):
            validate_string(3)

    def test_validate_integer_bounds(self):
        """Test integer bounds and bool rejection."""
        assert validate_integer(np.int64(4), min_value=1) == 4
        with pytest.raises(InvalidInputError):
            validate_integer(0, min_value=1)
        with pytest.raises(DataValidationError):
            validate_integer(True)

    def test_validate_float_nan(self):
        """Test NaN rejection."""
        with pytest.raises(InvalidInputError):
            validate_float(float("nan"))


class TestTruthValidation:
    """Test truth degree validation."""

    def test_truth_value(self):
        """Test scalar truth degrees."""
        assert validate_truth_value(0) == 0.0
        assert validate_truth_value(1.0) == 1.0
        with pytest.raises(InvalidInputError):
            validate_truth_value(1.01)

    def test_truth_array(self):
        """Test arrays of truth degrees."""
        arr = validate_truth_array([[0.0, 0.5], [1.0, 0.25]])
        assert arr.dtype == np.float64
        with pytest.raises(ValueRangeError):
            validate_truth_array([0.2, np.nan])
        with pytest.raises(ValueRangeError):
            validate_truth_array([-0.1, 0.5])

    def test_truth_array_empty(self):
        """Empty arrays pass."""
        assert validate_truth_array([]).size == 0


class TestKernelAndShapeValidation:
    """Test kernel size and shape validation."""

    @pytest.mark.parametrize("ksize", [1, 3, 33])
    def test_odd_ksize(self, ksize):
        """Odd positive sizes pass."""
        assert validate_odd_ksize(ksize) == ksize

    @pytest.mark.parametrize("ksize", [0, 2, -3, 3.0, True])
    def test_bad_ksize(self, ksize):
        """Even, negative, float and bool sizes fail."""
        with pytest.raises(KernelSizeError):
            validate_odd_ksize(ksize)

    def test_shape(self):
        """Test (height, width) validation."""
        assert validate_shape([4, 6]) == (4, 6)
        with pytest.raises(InvalidInputError):
            validate_shape((4, 6, 3))
        with pytest.raises(InvalidInputError):
            validate_shape((0, 6))


class TestPathValidation:
    """Test path validation."""

    def test_existing_file(self, tmp_path):
        """Test file checks."""
        path = tmp_path / "rule.fzr"
        path.write_text("forall p: eye(p)")
        assert validate_file_path(path, must_exist=True, must_be_file=True) == path.resolve()

    def test_missing_file(self, tmp_path):
        """Test missing path."""
        with pytest.raises(InvalidInputError):
            validate_file_path(tmp_path / "nope.fzr", must_exist=True)

    def test_dir_is_not_file(self, tmp_path):
        """Test directory passed as file."""
        with pytest.raises(InvalidInputError):
            validate_file_path(tmp_path, must_be_file=True)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])

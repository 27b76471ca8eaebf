"""
Logicmon Custom Exception Classes

Provides the exception hierarchy used across the rule engine. Every family
carries the CLI exit code it maps to, so the command layer can turn any
raised exception into a machine-readable error record.
"""

from typing import Optional, Any, Dict, Tuple


class LogicmonException(Exception):
    """Base exception class for all Logicmon exceptions."""

    exit_code: int = 2

    def __init__(self, message: str, context: Optional[Dict[str, Any]] = None):
        """
        Initialize exception with optional context.

        Args:
            message: Human-readable error message
            context: Optional dict with additional error context
        """
        super().__init__(message)
        self.message = message
        self.context = context or {}


# Configuration exceptions
class ConfigException(LogicmonException):
    """Base exception for configuration-related errors."""

    exit_code = 1


class UnknownConfigFieldError(ConfigException):
    """Raised when setting an unknown configuration field."""

    def __init__(self, field: str):
        super().__init__(f"Configuration field '{field}' does not exist")
        self.field = field


class UnknownConfigFileError(ConfigException):
    """Raised when a configuration file is not found."""

    def __init__(self, filepath: str):
        super().__init__(f"Configuration file '{filepath}' not found")
        self.filepath = filepath


class ConfigValidationError(ConfigException):
    """Raised when configuration validation fails."""

    def __init__(self, field: str, value: Any, reason: str):
        super().__init__(
            f"Configuration field '{field}' with value '{value}' is invalid: {reason}"
        )
        self.field = field
        self.value = value
        self.reason = reason


# Input exceptions
class InvalidInputError(ConfigException):
    """Raised when input validation fails."""

    def __init__(self, field: str, reason: str, value: Optional[Any] = None):
        msg = f"Invalid input for field '{field}': {reason}"
        if value is not None:
            msg += f" (got: {value})"
        super().__init__(msg)
        self.field = field
        self.reason = reason
        self.value = value


class MissingRequiredFieldError(ConfigException):
    """Raised when a required field is missing."""

    def __init__(self, field: str):
        super().__init__(f"Required field '{field}' is missing")
        self.field = field


# Rule language exceptions
class RuleException(LogicmonException):
    """Base exception for rule parsing, binding and lowering errors."""

    pass


class RuleSyntaxError(RuleException):
    """Raised on lexical or syntax errors in rule text."""

    def __init__(self, reason: str, line: int, column: int):
        super().__init__(
            f"Syntax error at line {line}, col {column}: {reason}",
            {"line": line, "column": column},
        )
        self.reason = reason
        self.line = line
        self.column = column


class UnboundVariableError(RuleException):
    """Raised when a pixel variable is used outside any binding quantifier."""

    def __init__(self, variable: str, allowed_free: Tuple[str, ...] = ()):
        msg = f"Variable '{variable}' is not bound by any quantifier"
        if allowed_free:
            msg += f" (declared free: {', '.join(allowed_free)})"
        super().__init__(msg)
        self.variable = variable


class UnknownPredicateError(RuleException):
    """Raised when a predicate does not resolve against the scene manifest."""

    def __init__(self, name: str):
        super().__init__(f"Predicate '{name}' has no matching channel in the manifest")
        self.name = name


class BindError(RuleException):
    """Raised when a formula cannot be bound to a manifest."""

    def __init__(self, reason: str, channel: Optional[str] = None):
        msg = f"Cannot bind formula: {reason}"
        if channel:
            msg += f" (channel: {channel})"
        super().__init__(msg)
        self.reason = reason
        self.channel = channel


# Mask algebra exceptions
class MaskException(LogicmonException):
    """Base exception for mask shape and kernel errors."""

    pass


class ShapeMismatchError(MaskException):
    """Raised when masks that must share a shape do not."""

    def __init__(self, expected: Tuple[int, ...], got: Tuple[int, ...], what: str = "mask"):
        super().__init__(f"Shape mismatch for {what}: expected {expected}, got {got}")
        self.expected = expected
        self.got = got


class ScaleDirectionError(MaskException):
    """Raised when a scaling op is asked to go the wrong direction."""

    def __init__(self, op: str, source: Tuple[int, int], target: Tuple[int, int]):
        super().__init__(f"{op} cannot scale {source} to {target}")
        self.op = op
        self.source = source
        self.target = target


class BlockSizeError(MaskException):
    """Raised when maxpool downscaling needs a non-integer block size."""

    def __init__(self, source: Tuple[int, int], target: Tuple[int, int]):
        super().__init__(
            f"Cannot downscale {source} to {target}: source dims are not integer "
            "multiples of target dims; upscale instead"
        )
        self.source = source
        self.target = target


class KernelSizeError(MaskException):
    """Raised for invalid kernel sizes."""

    def __init__(self, ksize: Any):
        super().__init__(f"Kernel size must be an odd positive integer (got: {ksize})")
        self.ksize = ksize


# Data exceptions
class DataException(LogicmonException):
    """Base exception for data-related errors."""

    pass


class DataParsingError(DataException):
    """Raised when data parsing fails."""

    def __init__(self, data_type: str, reason: str, raw_data: Optional[Any] = None):
        msg = f"Failed to parse {data_type}: {reason}"
        if raw_data:
            msg += f" (data: {raw_data})"
        super().__init__(msg)
        self.data_type = data_type
        self.reason = reason
        self.raw_data = raw_data


class DataValidationError(DataException):
    """Raised when data has the wrong type."""

    def __init__(self, field: str, expected: str, got: Any):
        super().__init__(
            f"Invalid data for field '{field}': expected {expected}, got {type(got).__name__}"
        )
        self.field = field
        self.expected = expected
        self.got = got


class ChannelShapeError(DataException):
    """Raised when a channel file does not match its declared shape."""

    def __init__(self, channel: str, reason: str):
        super().__init__(f"Shape mismatch in channel '{channel}': {reason}")
        self.channel = channel
        self.reason = reason


class ValueRangeError(DataException):
    """Raised when decoded truth values fall outside [0,1]."""

    def __init__(self, what: str, low: float, high: float):
        super().__init__(f"Values of {what} outside [0,1] (range [{low}, {high}])")
        self.what = what
        self.low = low
        self.high = high


class UnknownChannelKindError(DataException):
    """Raised for an unknown channel kind in a manifest."""

    def __init__(self, channel: str, kind: str):
        super().__init__(f"Channel '{channel}' has unknown kind '{kind}'")
        self.channel = channel
        self.kind = kind


class MissingChannelError(DataException):
    """Raised when a scene lacks a channel a plan needs."""

    def __init__(self, channel: str, scene_id: Optional[str] = None):
        msg = f"Channel '{channel}' is missing"
        if scene_id:
            msg += f" in scene '{scene_id}'"
        super().__init__(msg)
        self.channel = channel
        self.scene_id = scene_id


class LayoutError(DataException):
    """Raised when a synthetic scene layout cannot be satisfied."""

    def __init__(self, reason: str):
        super().__init__(f"Unsatisfiable scene layout: {reason}")
        self.reason = reason


class EmptyInputError(DataException):
    """Raised when an operation needs a non-empty input."""

    def __init__(self, what: str):
        super().__init__(f"{what} must not be empty")
        self.what = what


# Numeric exceptions
class NumericException(LogicmonException):
    """Base exception for numeric failures."""

    exit_code = 3


class TrainingDivergedError(NumericException):
    """Raised when the training loss becomes NaN or infinite."""

    def __init__(self, epoch: int, loss: float):
        super().__init__(f"Training diverged in epoch {epoch} (loss: {loss})")
        self.epoch = epoch
        self.loss = loss


class SingularMatrixError(NumericException):
    """Raised when a matrix that must be positive-definite fails to factorize."""

    def __init__(self, what: str):
        super().__init__(f"{what} is not symmetric positive-definite")
        self.what = what


class MissingPosteriorError(NumericException):
    """Raised when calibrated prediction is requested from a head without posterior."""

    def __init__(self, layer_id: str):
        super().__init__(f"Concept head '{layer_id}' has no fitted Laplace posterior")
        self.layer_id = layer_id


__all__ = [
    "LogicmonException",
    # Config exceptions
    "ConfigException",
    "UnknownConfigFieldError",
    "UnknownConfigFileError",
    "ConfigValidationError",
    "InvalidInputError",
    "MissingRequiredFieldError",
    # Rule exceptions
    "RuleException",
    "RuleSyntaxError",
    "UnboundVariableError",
    "UnknownPredicateError",
    "BindError",
    # Mask exceptions
    "MaskException",
    "ShapeMismatchError",
    "ScaleDirectionError",
    "BlockSizeError",
    "KernelSizeError",
    # Data exceptions
    "DataException",
    "DataParsingError",
    "DataValidationError",
    "ChannelShapeError",
    "ValueRangeError",
    "UnknownChannelKindError",
    "MissingChannelError",
    "LayoutError",
    "EmptyInputError",
    # Numeric exceptions
    "NumericException",
    "TrainingDivergedError",
    "SingularMatrixError",
    "MissingPosteriorError",
]

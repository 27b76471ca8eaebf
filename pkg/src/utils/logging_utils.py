"""
Logging Constants and Utilities for Logicmon

Category loggers and structured message helpers shared by the library and
the command layer.
"""

from enum import Enum
from typing import Optional
import logging


class LogCategory(Enum):
    """Log categories for organized logging."""
    STARTUP = "STARTUP"
    CONFIG = "CONFIG"
    PARSE = "PARSE"
    PLAN = "PLAN"
    EVAL = "EVAL"
    MONITOR = "MONITOR"
    TRAIN = "TRAIN"
    CALIBRATION = "CALIBRATION"
    METRICS = "METRICS"
    DATAGEN = "DATAGEN"
    IO = "IO"
    PERFORMANCE = "PERFORMANCE"


def get_category_logger(category: LogCategory) -> logging.Logger:
    """
    Get a logger for a specific category.

    Args:
        category: LogCategory enum value

    Returns:
        Logger instance named logicmon.<category>
    """
    return logging.getLogger(f"logicmon.{category.value.lower()}")


def _with_context(msg: str, context: dict) -> str:
    context_str = " | ".join(f"{k}={v}" for k, v in context.items())
    if context_str:
        msg += f" [{context_str}]"
    return msg


def log_operation_start(
    logger: logging.Logger,
    operation_name: str,
    **context
) -> None:
    """
    Log the start of an operation.

    Args:
        logger: Logger instance
        operation_name: Name of the operation
        **context: Additional context information
    """
    logger.info(_with_context(f"Starting {operation_name}", context))


def log_operation_complete(
    logger: logging.Logger,
    operation_name: str,
    duration_ms: Optional[float] = None,
    **context
) -> None:
    """
    Log the completion of an operation.

    Args:
        logger: Logger instance
        operation_name: Name of the operation
        duration_ms: Optional duration in milliseconds
        **context: Additional context information
    """
    msg = f"Completed {operation_name}"
    if duration_ms is not None:
        msg += f" in {duration_ms:.1f}ms"
    logger.info(_with_context(msg, context))


def log_operation_error(
    logger: logging.Logger,
    operation_name: str,
    error: Exception,
    **context
) -> None:
    """
    Log an operation error with its traceback.

    Args:
        logger: Logger instance
        operation_name: Name of the operation
        error: Exception that occurred
        **context: Additional context information
    """
    logger.error(_with_context(f"Error in {operation_name}: {error}", context), exc_info=True)


def log_performance_metric(
    logger: logging.Logger,
    metric_name: str,
    value: float,
    unit: str = "ms",
    **context
) -> None:
    """
    Log a performance metric.

    Args:
        logger: Logger instance
        metric_name: Name of the metric
        value: Metric value
        unit: Unit of measurement
        **context: Additional context information
    """
    logger.info(_with_context(f"Metric: {metric_name} = {value}{unit}", context))


__all__ = [
    "LogCategory",
    "get_category_logger",
    "log_operation_start",
    "log_operation_complete",
    "log_operation_error",
    "log_performance_metric",
]

"""
Command Response Utilities for Logicmon

Standardized success and error records for the command line. Error
records are written to stderr as one JSON object so that callers can
parse failures without scraping log output.
"""

from typing import Any, Dict, Optional, Union
from enum import Enum
import json
import argparse

from .exceptions import LogicmonException


class ExitCode(Enum):
    """Process exit codes."""
    SUCCESS = 0
    USAGE_ERROR = 1
    DATA_ERROR = 2
    NUMERIC_FAILURE = 3


class ResponseStatus(Enum):
    """Application response status indicators."""
    SUCCESS = "success"
    ERROR = "error"


def exit_code_for(error: BaseException) -> int:
    """Exit code of an exception; unknown exceptions count as data errors."""
    if isinstance(error, LogicmonException):
        return error.exit_code
    if isinstance(error, argparse.ArgumentError):
        return ExitCode.USAGE_ERROR.value
    return ExitCode.DATA_ERROR.value


def create_success_response(
    data: Any = None,
    message: str = "Command completed successfully",
) -> Dict[str, Any]:
    """
    Create a standardized success record.

    Args:
        data: Command summary
        message: Human-readable success message

    Returns:
        Standardized response dictionary
    """
    return {
        "status": ExitCode.SUCCESS.value,
        "status_enum": ResponseStatus.SUCCESS.value,
        "message": message,
        "data": data,
    }


def create_error_response(
    error: Union[str, Exception],
    status_code: Optional[int] = None,
    error_type: Optional[str] = None,
    details: Optional[Dict[str, Any]] = None,
) -> Dict[str, Any]:
    """
    Create a standardized error record.

    Args:
        error: Error message or exception
        status_code: Exit code; derived from the exception when omitted
        error_type: Type of error (e.g., "RuleSyntaxError")
        details: Additional error details; a LogicmonException's context is used when omitted

    Returns:
        Standardized error response dictionary
    """
    error_message = str(error)
    if error_type is None and isinstance(error, Exception):
        error_type = error.__class__.__name__
    if status_code is None:
        status_code = (
            exit_code_for(error) if isinstance(error, Exception) else ExitCode.DATA_ERROR.value
        )
    if details is None and isinstance(error, LogicmonException):
        details = error.context

    return {
        "status": status_code,
        "status_enum": ResponseStatus.ERROR.value,
        "message": error_message,
        "error_type": error_type,
        "details": details or {},
    }


def format_response(response: Dict[str, Any]) -> str:
    """One-line JSON rendering of a response record."""
    return json.dumps(response, sort_keys=True, default=str)


__all__ = [
    "ExitCode",
    "ResponseStatus",
    "exit_code_for",
    "create_success_response",
    "create_error_response",
    "format_response",
]

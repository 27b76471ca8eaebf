"""
Logicmon command-line entry point.
Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.
"""

import asyncio
import logging
import signal
import sys

from utils.args import parse_args
from utils.commands import load_command
from utils.config import Config
from utils.exceptions import LogicmonException
from utils.logging import setup_logger
from utils.response_utils import (
    ExitCode,
    create_error_response,
    create_success_response,
    exit_code_for,
    format_response,
)

# 128 + SIGINT
INTERRUPTED = 130


def handle_shutdown(signum, frame):
    """Handle shutdown signals gracefully"""
    sig_name = signal.Signals(signum).name
    logging.info(f"Received {sig_name}, stopping...")
    sys.exit(INTERRUPTED)


def _fail(error: Exception) -> int:
    sys.stderr.write(format_response(create_error_response(error)) + "\n")
    return exit_code_for(error)


def load_config(args) -> Config:
    """Config file first, then every flag that was given on the command line."""
    config = Config()
    if args.config:
        config.load_from_name(args.config)
    fields = config.get_config_dict()
    overrides = {k: v for k, v in vars(args).items() if k in fields and v is not None}
    if overrides:
        config.load_from_dict(**overrides)
    return config


def run(argv=None) -> int:
    try:
        args = parse_args(argv)
    except LogicmonException as e:
        return _fail(e)

    setup_logger(args.log_level, args.log_dir, args.silent)
    try:
        config = load_config(args)
        command = load_command(args.command, config, args.silent)
        summary = asyncio.run(command())
    except LogicmonException as e:
        return _fail(e)
    except Exception as e:
        logging.exception("Unexpected failure in {}".format(args.command))
        return _fail(e)

    print(format_response(create_success_response(summary, f"{args.command} completed")))
    return ExitCode.SUCCESS.value


def main():
    # Register signal handlers
    signal.signal(signal.SIGINT, handle_shutdown)
    signal.signal(signal.SIGTERM, handle_shutdown)

    # Windows-specific: handle Ctrl+C properly
    if sys.platform == "win32":
        signal.signal(signal.SIGBREAK, handle_shutdown)

    sys.exit(run())


if __name__ == "__main__":
    main()

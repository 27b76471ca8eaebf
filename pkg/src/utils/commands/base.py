import time
from pathlib import Path
from typing import Any, Dict, Optional

from ..config import Config
from ..exceptions import LogicmonException, MissingRequiredFieldError
from ..helpers.time import elapsed_ms
from ..logging_utils import (
    LogCategory,
    get_category_logger,
    log_operation_complete,
    log_operation_error,
    log_operation_start,
)
from ..rules import Formula, parse_file
from ..validators import validate_file_path, validate_string

logger = get_category_logger(LogCategory.STARTUP)


class Command:
    """
    One CLI command. Subclasses implement _run() and return a JSON-ready
    summary; __call__ wraps it with timing and structured logs.
    """

    name: str = "command"

    def __init__(self, config: Config, silent: bool = False):
        self.config = config
        self.silent = silent

    async def __call__(self) -> Dict[str, Any]:
        start_time = time.perf_counter()
        log_operation_start(logger, self.name, config=self.config.current_config)
        try:
            summary = await self._run()
        except LogicmonException as e:
            log_operation_error(logger, self.name, e)
            raise
        log_operation_complete(logger, self.name, duration_ms=elapsed_ms(start_time))
        return summary

    ## TO BE IMPLEMENTED ####
    async def _run(self) -> Dict[str, Any]:
        raise NotImplementedError

    ## Shared helpers ####
    def require(self, field: str) -> Any:
        value = getattr(self.config, field)
        if value is None:
            raise MissingRequiredFieldError(field)
        return value

    def existing_file(self, field: str) -> Path:
        return validate_file_path(self.require(field), field, must_exist=True, must_be_file=True)

    def output_dir(self, *parts: str) -> Path:
        path = Path(self.config.output_dir, *parts)
        path.mkdir(parents=True, exist_ok=True)
        return path

    def rule(self) -> Formula:
        return parse_file(self.existing_file("rule_file"))

    @property
    def rule_id(self) -> str:
        if self.config.rule_id is not None:
            return validate_string(self.config.rule_id, "rule_id")
        return Path(self.require("rule_file")).stem

    def provenance(self, **extra) -> Dict[str, Any]:
        record: Dict[str, Optional[Any]] = {
            "command": self.name,
            "config": self.config.current_config,
            "config_fingerprint": self.config.fingerprint(),
        }
        record.update(extra)
        return record

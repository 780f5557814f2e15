"""Structured logging for checks, sweeps and command failures.

Reports own stdout, so every log line goes to stderr (or to the configured
log file) as JSON or plain console text.
"""

import logging
import sys
import time
from typing import Any, Dict, Mapping, Optional, TextIO

import structlog
from structlog.types import EventDict, Processor

from subfitlab.config import get_settings

# open log file, replaced on every setup_logging call
_log_file: Optional[TextIO] = None


def add_run_context(logger: Any, method_name: str, event_dict: EventDict) -> EventDict:
    settings = get_settings()
    event_dict.setdefault("service", settings.app_name)
    event_dict.setdefault("version", settings.app_version)
    event_dict.setdefault("environment", settings.environment)
    return event_dict


def setup_logging() -> None:
    """Configure structlog from the logging settings."""
    cfg = get_settings().logging
    level = logging.getLevelName(cfg.log_level.upper())
    if not isinstance(level, int):
        level = logging.WARNING

    processors: list[Processor] = [
        structlog.contextvars.merge_contextvars,
        structlog.processors.add_log_level,
        structlog.processors.TimeStamper(fmt="iso", utc=True),
        add_run_context,
    ]
    if cfg.log_format == "json":
        processors += [structlog.processors.dict_tracebacks, structlog.processors.JSONRenderer(sort_keys=True)]
    else:
        processors.append(structlog.dev.ConsoleRenderer(colors=False))

    global _log_file
    if _log_file is not None:
        _log_file.close()
    _log_file = sink = open(cfg.log_file, "a", encoding="utf-8") if cfg.log_file else None
    structlog.configure(
        processors=processors,
        wrapper_class=structlog.make_filtering_bound_logger(level),
        # stderr is looked up per logger so a redirected stream is picked up
        logger_factory=lambda *args: structlog.WriteLogger(sink or sys.stderr),
        cache_logger_on_first_use=False,
    )


def get_logger(name: str) -> structlog.BoundLogger:
    return structlog.get_logger(name)


class CheckLogger:
    """One event per finished check, carrying its counters."""

    def __init__(self, logger_name: str = "subfitlab.checks"):
        self.logger = get_logger(logger_name)

    def record_check(
        self,
        check: str,
        instances: int,
        failures: int,
        elapsed: float,
        coverage: Optional[Mapping[str, int]] = None,
    ) -> None:
        log = self.logger.bind(check=check, instances=instances, failures=failures)
        fields = {"elapsed_ms": round(elapsed * 1000, 2), "coverage": dict(coverage or {})}
        if failures:
            log.warning("check_failed", **fields)
        else:
            log.info("check_passed", **fields)


class ErrorTracker:
    """Logs unexpected command failures under an id the CLI echoes back."""

    def __init__(self, logger_name: str = "subfitlab.errors"):
        self.logger = get_logger(logger_name)
        self._seq = 0

    def track_error(
        self,
        error: Exception,
        context: Optional[Dict[str, Any]] = None,
        severity: str = "error",
    ) -> str:
        self._seq += 1
        error_id = f"err_{time.strftime('%Y%m%d_%H%M%S', time.gmtime())}_{self._seq:04d}"
        log = self.logger.bind(
            error_id=error_id,
            error_type=type(error).__name__,
            error_message=str(error),
            context=context or {},
        )
        if severity == "critical":
            log.critical("command_crashed", exc_info=error)
        else:
            log.error("command_failed", exc_info=error)
        return error_id


check_logger = CheckLogger()
error_tracker = ErrorTracker()

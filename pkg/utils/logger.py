"""
Logging setup for the UPB state toolkit
Configures structlog once per process; library modules only call get_logger
"""

import logging
import os
import sys
from typing import Any, Optional

import structlog

LOG_LEVEL_ENV = "UPB_LOG_LEVEL"

_configured = False


def configure_logging(level: Optional[str] = None, json_output: bool = False) -> None:
    """
    Configure structlog and the stdlib root handler

    Args:
        level: Log level name; falls back to UPB_LOG_LEVEL, then WARNING
        json_output: Render events as JSON lines instead of console text
    """
    global _configured

    level_name = (level or os.environ.get(LOG_LEVEL_ENV) or "WARNING").upper()
    numeric_level = getattr(logging, level_name, None)
    if not isinstance(numeric_level, int):
        numeric_level = logging.WARNING

    # stdout carries reports, logs always go to stderr
    logging.basicConfig(format="%(message)s", stream=sys.stderr, level=numeric_level, force=True)

    renderer: Any
    if json_output:
        renderer = structlog.processors.JSONRenderer(sort_keys=True)
    else:
        renderer = structlog.dev.ConsoleRenderer(colors=False)

    structlog.configure(
        processors=[
            structlog.contextvars.merge_contextvars,
            structlog.processors.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.StackInfoRenderer(),
            structlog.processors.format_exc_info,
            renderer,
        ],
        wrapper_class=structlog.make_filtering_bound_logger(numeric_level),
        logger_factory=structlog.PrintLoggerFactory(file=sys.stderr),
        cache_logger_on_first_use=False,
    )
    _configured = True


def get_logger(name: str) -> Any:
    """Return a bound structlog logger, configuring defaults on first use"""
    if not _configured:
        configure_logging()
    return structlog.get_logger(name)

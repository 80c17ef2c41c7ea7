"""Structured JSON logging for the auditor, written to standard error."""

import logging
import sys
from typing import Optional

from pythonjsonlogger import jsonlogger

from app.config import settings

LOG_FORMAT = "%(asctime)s %(name)s %(levelname)s %(message)s"

# Libraries whose own records stay at WARNING regardless of --log-level
QUIET_LOGGERS = ("qiskit", "matplotlib", "py.warnings")


def setup_logging(log_level: Optional[str] = None) -> logging.Logger:
    """
    Route every record of the library and the CLI through one JSON handler.

    Standard output is reserved for reports and model files, so the handler
    writes to standard error. Floating-point warnings raised by numpy/scipy
    (overflow in expm, ill-conditioned solves) are captured into the same
    stream instead of being printed raw.

    Args:
        log_level: Level name; falls back to LOG_LEVEL, then WARNING
    """
    level_name = (log_level or settings.LOG_LEVEL).upper()
    level = logging.getLevelName(level_name)
    if not isinstance(level, int):
        level = logging.WARNING

    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(jsonlogger.JsonFormatter(LOG_FORMAT, datefmt="%Y-%m-%d %H:%M:%S"))

    root_logger = logging.getLogger()
    root_logger.handlers.clear()
    root_logger.addHandler(handler)
    root_logger.setLevel(level)

    logging.captureWarnings(True)
    for name in QUIET_LOGGERS:
        logging.getLogger(name).setLevel(max(level, logging.WARNING))

    return root_logger


def get_logger(name: str) -> logging.Logger:
    """Logger for `name` (normally the calling module's __name__)."""
    return logging.getLogger(name)

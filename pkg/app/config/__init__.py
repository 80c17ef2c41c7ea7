"""Configuration modules - logging, numerical settings."""

from app.config import settings
from app.config.logging import setup_logging, get_logger

__all__ = [
    "settings",
    "setup_logging",
    "get_logger",
]

"""Command-line surface: argument parsing, handlers and renderers."""

from app.cli.commands import build_parser

__all__ = ["build_parser"]

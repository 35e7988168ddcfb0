"""Command-line interface for stabilizer-ft."""

from .app import app

__all__ = ["app"]

"""Command-line interface for s3nmf."""

from .main import main

__all__ = ["main"]

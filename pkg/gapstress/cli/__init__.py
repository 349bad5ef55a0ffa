"""
Command-line interface for gapstress.
"""

from .main import app

__all__ = ["app"]

"""Utility modules."""

from .config import Config
from .errors import ImportanceError
from .logger import setup_logger

__all__ = ["Config", "ImportanceError", "setup_logger"]

"""
Shared utilities: logging, errors, validators
"""
from src.utils import errors
from src.utils.errors import *  # noqa: F401,F403
from src.utils.logger import get_logger, logger

__all__ = ["get_logger", "logger"] + errors.__all__

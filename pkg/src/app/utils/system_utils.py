# system_utils.py
import logging
import sys
from typing import Optional, TextIO

from app.config import CONFIG


def configure_logging(verbose: bool = False, stream: Optional[TextIO] = None) -> int:
    """Configure the root logger once for the whole process.

    Logs go to stderr so stdout stays reserved for reports.

    Returns:
        The numeric level that was applied.
    """
    level = logging.DEBUG if verbose else logging.getLevelName(CONFIG.LOG_LEVEL)
    logging.basicConfig(level=level, format=CONFIG.LOG_FORMAT, stream=stream or sys.stderr, force=True)
    return level

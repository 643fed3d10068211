"""Logging configuration shared by the CLI and the HTTP app."""

import logging
import os
from typing import Optional

LOG_FORMAT = "[%(name)s] %(levelname)s: %(message)s"


def configure_logging(level: Optional[str] = None) -> None:
    level = (level or os.getenv("HR_LAB_LOG_LEVEL", "INFO")).upper()
    root = logging.getLogger()
    if not root.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        root.addHandler(handler)
    root.setLevel(level)

from __future__ import annotations

import logging
import os

LOG_FORMAT = "%(process)s %(asctime)s %(levelname)s %(name)s %(message)s"

default_level = os.environ.get("VORTEXFORGE_LOG_LEVEL", "INFO")


def configure_logging(level: str | int | None = None) -> None:
    level = level if level is not None else default_level
    if isinstance(level, str):
        level = level.upper()
    logging.basicConfig(level=level, format=LOG_FORMAT, force=True)

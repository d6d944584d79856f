"""
Logging setup shared by the HTTP service and the CLI.
"""
import logging
from logging.config import fileConfig
from pathlib import Path
from typing import Optional

LOGGING_INI = Path(__file__).resolve().parent.parent / "logging.ini"
LOG_FORMAT = "%(levelname)-5.5s [%(name)s] %(message)s"


def setup_logging(config_file: Optional[Path] = None, level: Optional[str] = None) -> None:
    """
    Configure logging from an ini file, falling back to one stderr handler.

    :param config_file: ``[loggers]/[handlers]/[formatters]`` ini file,
        ``logging.ini`` of the project by default
    :type config_file: Path | None
    :param level: overrides the level of the ``services`` logger
    :type level: str | None
    """
    config_file = Path(config_file) if config_file is not None else LOGGING_INI
    if config_file.exists():
        fileConfig(config_file, disable_existing_loggers=False)
    else:
        logging.basicConfig(format=LOG_FORMAT, level=logging.WARNING)
        logging.getLogger("services").setLevel(logging.INFO)
    if level is not None:
        logging.getLogger("services").setLevel(level.upper())

"""Logging-Setup: farbige Ausgabe auf stderr, optional zusätzlich in eine Datei."""

import logging
import sys
from typing import Optional

import colorlog

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def setup_logging(level: str = "INFO", log_file: Optional[str] = None):
    """
    Konfiguriert den Root-Logger (einmalig, bestehende Handler werden ersetzt)

    Args:
        level: Log-Level als Name
        log_file: Optionaler Pfad für eine zusätzliche Log-Datei
    """
    stream = colorlog.StreamHandler(sys.stderr)
    stream.setFormatter(
        colorlog.ColoredFormatter(
            "%(log_color)s" + LOG_FORMAT,
            log_colors={
                "DEBUG": "cyan",
                "INFO": "green",
                "WARNING": "yellow",
                "ERROR": "red",
                "CRITICAL": "bold_red",
            },
        )
    )
    handlers: list[logging.Handler] = [stream]
    if log_file:
        file_handler = logging.FileHandler(log_file, encoding="utf-8")
        file_handler.setFormatter(logging.Formatter(LOG_FORMAT))
        handlers.append(file_handler)

    logging.basicConfig(level=getattr(logging, level.upper(), logging.INFO), handlers=handlers, force=True)

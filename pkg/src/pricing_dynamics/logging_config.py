"""Logging configuration for pricing-dynamics."""

from __future__ import annotations

import copy
import logging
import logging.handlers
import sys
import time
from functools import wraps
from pathlib import Path
from typing import Any, Callable, Optional, TypeVar

T = TypeVar("T")

ROOT_LOGGER = "pricing_dynamics"
DEFAULT_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
LOG_FILE_BYTES = 10 * 1024 * 1024
LOG_FILE_BACKUPS = 5


class ColoredFormatter(logging.Formatter):
    """Colors the level name on terminal output."""

    COLORS = {
        "DEBUG": "\033[36m",
        "INFO": "\033[32m",
        "WARNING": "\033[33m",
        "ERROR": "\033[31m",
        "CRITICAL": "\033[35m",
    }
    RESET = "\033[0m"

    def format(self, record: logging.LogRecord) -> str:
        # other handlers share the record
        colored = copy.copy(record)
        color = self.COLORS.get(record.levelname)
        if color:
            colored.levelname = f"{color}{record.levelname}{self.RESET}"
        return super().format(colored)


def setup_logging(
    level: str = "INFO",
    log_file: Optional[Path] = None,
    format_string: str = DEFAULT_FORMAT,
    enable_color: bool = True,
) -> logging.Logger:
    """Configure the ``pricing_dynamics`` logger tree and return its root.

    Console output goes to stderr so stdout carries only command results.
    A ``log_file`` adds a rotating file handler at the same level.
    """
    numeric_level = logging.getLevelName(level.upper())
    if not isinstance(numeric_level, int):
        raise ValueError(f"Unknown log level: {level}")

    logger = logging.getLogger(ROOT_LOGGER)
    logger.setLevel(numeric_level)
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()

    console = logging.StreamHandler(sys.stderr)
    use_color = enable_color and sys.stderr.isatty()
    console.setFormatter(ColoredFormatter(format_string) if use_color else logging.Formatter(format_string))
    logger.addHandler(console)

    if log_file:
        path = Path(log_file)
        path.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.handlers.RotatingFileHandler(
            path, maxBytes=LOG_FILE_BYTES, backupCount=LOG_FILE_BACKUPS, encoding="utf-8"
        )
        file_handler.setFormatter(logging.Formatter(format_string))
        logger.addHandler(file_handler)
    return logger


def log_performance(operation: str) -> Callable[[Callable[..., T]], Callable[..., T]]:
    """Log the wall time of ``operation`` at DEBUG, or at ERROR when it raises."""

    def decorator(func: Callable[..., T]) -> Callable[..., T]:
        @wraps(func)
        def wrapper(*args: Any, **kwargs: Any) -> T:
            logger = logging.getLogger(func.__module__)
            started = time.perf_counter()
            try:
                result = func(*args, **kwargs)
            except Exception as exc:
                elapsed_ms = (time.perf_counter() - started) * 1000
                logger.error(
                    f"{operation} failed after {elapsed_ms:.1f} ms: {exc}",
                    extra={"operation": operation, "elapsed_ms": elapsed_ms},
                )
                raise
            elapsed_ms = (time.perf_counter() - started) * 1000
            logger.debug(
                f"{operation} finished in {elapsed_ms:.1f} ms",
                extra={"operation": operation, "elapsed_ms": elapsed_ms},
            )
            return result

        return wrapper

    return decorator

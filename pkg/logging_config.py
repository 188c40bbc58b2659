"""
Centralized logging configuration for nanostripe
Console logging for interactive runs, rotating file logs in production batch runs
"""
import logging
import logging.handlers
import sys
import os
from pathlib import Path
from config import settings


def setup_logging(verbose: bool = False):
    """
    Configure centralized logging system.

    Development:
      - Console output
      - INFO level (DEBUG with --verbose or NANOSTRIPE_DEBUG)
      - Short timestamps

    Production:
      - Console output
      - File rotation (logs/nanostripe.log)
      - WARNING level by default
      - Detailed format with source location
    """
    if settings.is_development:
        log_level = logging.DEBUG if (settings.debug or verbose) else logging.INFO
    else:
        log_level = logging.DEBUG if verbose else logging.WARNING

    # Allow environment variable override
    log_level_env = os.getenv("LOG_LEVEL", "").upper()
    if log_level_env in ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]:
        log_level = getattr(logging, log_level_env)

    if settings.is_development:
        formatter = logging.Formatter(
            fmt='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
            datefmt='%H:%M:%S'
        )
    else:
        formatter = logging.Formatter(
            fmt='%(asctime)s - %(name)s - %(levelname)s - [%(filename)s:%(lineno)d] - %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        )

    root_logger = logging.getLogger()
    root_logger.setLevel(log_level)
    root_logger.handlers.clear()

    # Diagnostics go to stderr; stdout carries the written paths
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(log_level)
    console_handler.setFormatter(formatter)
    root_logger.addHandler(console_handler)

    log_dir = Path("logs")
    if settings.is_production:
        log_dir.mkdir(exist_ok=True)
        file_handler = logging.handlers.RotatingFileHandler(
            filename=log_dir / "nanostripe.log",
            maxBytes=10 * 1024 * 1024,  # 10 MB
            backupCount=5,
            encoding='utf-8'
        )
        file_handler.setLevel(log_level)
        file_handler.setFormatter(formatter)
        root_logger.addHandler(file_handler)

    logger = logging.getLogger(__name__)
    logger.debug(f"Logging initialized - Environment: {settings.env}, Level: {logging.getLevelName(log_level)}")

    if settings.is_production:
        logger.info(f"Log files: {log_dir.absolute()}/nanostripe.log")

    return logger


def get_logger(name: str) -> logging.Logger:
    """
    Get a logger instance for a module.

    Usage:
        from logging_config import get_logger
        logger = get_logger(__name__)
    """
    return logging.getLogger(name)


class LogLevelContext:
    """
    Temporarily set the level of one or more loggers for a block of code.

    Levels are restored on exit, including when the block raises.

    Usage:
        with LogLevelContext(logging.WARNING, "spinwave"):
            fd_eigensolve(potential, n_max, extrapolate=True)
    """

    def __init__(self, level: int, *logger_names: str):
        self.level = level
        self.loggers = [logging.getLogger(name) for name in logger_names] or [logging.getLogger()]
        self.original_levels = []

    def __enter__(self):
        self.original_levels = [logger.level for logger in self.loggers]
        for logger in self.loggers:
            logger.setLevel(self.level)
        return self.loggers[0]

    def __exit__(self, exc_type, exc_val, exc_tb):
        for logger, level in zip(self.loggers, self.original_levels):
            logger.setLevel(level)


def log_computation(logger: logging.Logger, operation: str, duration_ms: float, **params):
    """
    Log a finished numerical operation in a structured format.

    Args:
        logger: Logger instance
        operation: Operation name (tm_eigensolve, find_x_optim, ...)
        duration_ms: Wall time in milliseconds
        params: Key figures worth keeping (grid size, mode count, root, ...)
    """
    details = " ".join(f"{key}={value}" for key, value in params.items())
    extra_info = f" [{details}]" if details else ""
    logger.info(f"CALC {operation} - {duration_ms:.2f}ms{extra_info}")


def log_output_file(logger: logging.Logger, path, rows: int = None, success: bool = True, error: Exception = None):
    """
    Log an emitted data file.

    Args:
        logger: Logger instance
        path: File written
        rows: Optional number of data rows
        success: Whether the write succeeded
        error: Optional exception if the write failed
    """
    row_info = f" [rows={rows}]" if rows is not None else ""

    if success:
        logger.info(f"WROTE {path}{row_info}")
    else:
        error_msg = f": {str(error)}" if error else ""
        logger.error(f"WRITE FAILED: {path}{row_info}{error_msg}")


def log_numeric_event(logger: logging.Logger, event: str, details: str, severity: str = "warning"):
    """
    Log numerical health events.

    Args:
        logger: Logger instance
        event: Event type (INCOMPLETE_SPECTRUM, SCAN_RESOLUTION, CALIBRATION, ...)
        details: Event details
        severity: Log level (info, warning, error, critical)
    """
    log_func = getattr(logger, severity.lower(), logger.warning)
    log_func(f"NUMERIC {event}: {details}")

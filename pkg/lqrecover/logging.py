"""
Logging configuration for the lqrecover library.

Sweeps run their trials in joblib worker processes. Each worker imports the
package afresh, so the level travels through ``LQRECOVER_LOG_LEVEL`` and the
default format carries the process id to tell interleaved lines apart.
"""

import logging
import os
import sys
from typing import Optional

LEVEL_ENVVAR = 'LQRECOVER_LOG_LEVEL'
DEFAULT_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - [%(process)d] %(message)s'


def level_from_env(default: int = logging.INFO) -> int:
    """
    Read the log level from ``LQRECOVER_LOG_LEVEL``.

    Accepts level names (``"debug"``, ``"WARNING"``) or numbers; anything
    else falls back to ``default``.
    """
    raw = os.environ.get(LEVEL_ENVVAR, '').strip()
    if not raw:
        return default
    if raw.isdigit():
        return int(raw)
    level = logging.getLevelName(raw.upper())
    return level if isinstance(level, int) else default


def cli_level(verbose: bool = False, quiet: bool = False) -> int:
    """DEBUG for --verbose, WARNING for --quiet, INFO otherwise; --verbose wins."""
    if verbose:
        return logging.DEBUG
    if quiet:
        return logging.WARNING
    return logging.INFO


def configure_logging(
    level: Optional[int] = None,
    log_file: Optional[str] = None,
    log_format: Optional[str] = None,
    export: bool = False,
) -> logging.Logger:
    """
    Configure the ``lqrecover`` logger.

    Args:
        level: The logging level (default: ``LQRECOVER_LOG_LEVEL`` or INFO)
        log_file: Path to a file to log to as well as stderr
        log_format: Custom log format string (default: DEFAULT_FORMAT)
        export: Also write the level to ``LQRECOVER_LOG_LEVEL`` so worker
            processes started afterwards log at the same level

    Returns:
        The configured package logger
    """
    if level is None:
        level = level_from_env()
    logger = logging.getLogger('lqrecover')
    logger.setLevel(level)
    if export:
        os.environ[LEVEL_ENVVAR] = logging.getLevelName(level)

    for handler in logger.handlers[:]:
        logger.removeHandler(handler)
        handler.close()

    formatter = logging.Formatter(log_format or DEFAULT_FORMAT)

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    if log_file:
        file_handler = logging.FileHandler(log_file, encoding='utf-8')
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    return logger


def get_logger(name: str) -> logging.Logger:
    """
    Get a logger below the package logger.

    Args:
        name: A component name such as ``"sweep"``, or a full module name

    Returns:
        The ``lqrecover.<name>`` logger
    """
    if name == 'lqrecover' or name.startswith('lqrecover.'):
        return logging.getLogger(name)
    return logging.getLogger(f'lqrecover.{name}')

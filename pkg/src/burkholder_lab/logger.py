"""Logging for command-line runs.

A run logs progress to stdout and, with `APP__LOG_TO_FILE`, also to
`<report dir>/<run name>.log`, next to the `<run name>.json`, `.md` and
`.csv` artifacts the same run writes.
"""

import logging
import sys
from pathlib import Path

LOGGER_NAME = "burkholder_lab"
CONSOLE_FORMAT = "%(asctime)s %(levelname)-7s %(name)s: %(message)s"
RUN_FORMAT = "%(asctime)s %(levelname)-7s [%(run)s] %(name)s: %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


class _RunFilter(logging.Filter):
    """Stamps every record with the run name."""

    def __init__(self, run: str) -> None:
        super().__init__()
        self.run = run

    def filter(self, record: logging.LogRecord) -> bool:
        record.__dict__["run"] = self.run
        return True


def setup_logging(log_level: str = "INFO") -> logging.Logger:
    """
    Configure the `burkholder_lab` logger with a single stdout handler.

    Library modules log through `logging.getLogger(__name__)` and inherit this
    configuration. Calling it again replaces the handlers, so repeated runs in
    one process (tests) do not duplicate lines.
    """
    logger = logging.getLogger(LOGGER_NAME)
    logger.setLevel(getattr(logging, log_level.upper()))
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()

    # stderr is left to argparse
    console = logging.StreamHandler(sys.stdout)
    console.setFormatter(logging.Formatter(CONSOLE_FORMAT, datefmt=DATE_FORMAT))
    logger.addHandler(console)
    return logger


def attach_run_log(report_dir: Path, run_name: str) -> Path | None:
    """Also log to the run's `.log` file in its report directory; returns the path.

    An unwritable report directory degrades to console-only logging.
    """
    logger = logging.getLogger(LOGGER_NAME)
    path = report_dir / f"{run_name}.log"
    try:
        report_dir.mkdir(parents=True, exist_ok=True)
        handler = logging.FileHandler(path, mode="w", encoding="utf-8")
    except OSError as exc:
        logger.warning("could not open run log %s: %s", path, exc)
        return None
    handler.addFilter(_RunFilter(run_name))
    handler.setFormatter(logging.Formatter(RUN_FORMAT, datefmt=DATE_FORMAT))
    logger.addHandler(handler)
    return path

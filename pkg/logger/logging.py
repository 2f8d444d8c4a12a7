import logging
from logging.handlers import RotatingFileHandler
import os
from dotenv import load_dotenv

load_dotenv()

LOGGER_NAME = os.getenv("APPLICATION_NAME", "fwm-entangler")
LOG_FILE_PATH = os.getenv("LOG_DIR", "logs")
LOG_LEVEL = os.getenv("LOG_LEVEL", "DEBUG").upper()
MAX_BYTES = 5 * 1024 * 1024  # Maximum log file size before rotation (5 MB)
BACKUP_COUNT = 5             # Number of backup log files to keep


def get_logger() -> logging.Logger:
    """
    Creates and returns the application-wide logger.

    The logger writes through a RotatingFileHandler into ``LOG_DIR/app.log``.
    When the file reaches MAX_BYTES it is rotated and up to BACKUP_COUNT
    older files are kept.

    Returns
    -------
    logging.Logger
        Configured logger instance with a rotating file handler.

    Notes
    -----
    - Logger name, directory and level come from the environment
      (``APPLICATION_NAME``, ``LOG_DIR``, ``LOG_LEVEL``), optionally via ``.env``.
    - The log directory is created if it does not exist.
    - Multiple calls return the same logger instance without duplicate handlers.
    - Simulation results never depend on these settings.
    """

    # Ensure log directory exists (creates if missing)
    os.makedirs(LOG_FILE_PATH, exist_ok=True)

    log_file = os.path.join(LOG_FILE_PATH, "app.log")

    logger = logging.getLogger(LOGGER_NAME)
    logger.setLevel(getattr(logging, LOG_LEVEL, logging.DEBUG))

    # Avoid adding multiple handlers if logger already configured
    if not logger.handlers:
        handler = RotatingFileHandler(
            filename=log_file,
            maxBytes=MAX_BYTES,
            backupCount=BACKUP_COUNT,
            encoding="utf-8"
        )
        formatter = logging.Formatter(
            "[%(asctime)s] [%(levelname)s] %(name)s - %(message)s",
            datefmt="%Y-%m-%d %H:%M:%S"
        )
        handler.setFormatter(formatter)
        logger.addHandler(handler)
        # Keep records out of the root logger (stdout belongs to CSV/report output)
        logger.propagate = False

    return logger

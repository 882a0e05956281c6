import logging
import os
from pathlib import Path
from typing import Optional

import numpy as np

LOG_DIR = Path(os.path.expanduser("~/.local/share/liesym/logs"))
LOG_FILE_NAME = "liesym.log"

LOG_FORMAT = '%(asctime)s [%(levelname)s] %(name)s: %(message)s'


def setup_logging(log_dir: Optional[Path] = None, file_name: str = LOG_FILE_NAME,
                  level: int = logging.INFO) -> Optional[Path]:
    """
    Initializes the logging system.
    Creates the directory structure if it doesn't exist and points the
    root logger at a file inside it. Returns the log file path.
    """
    target_dir = Path(log_dir) if log_dir is not None else LOG_DIR
    try:
        target_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        print(f"CRITICAL: Failed to create log directory: {e}")
        return None

    log_file = target_dir / file_name

    logging.basicConfig(
        filename=str(log_file),
        level=level,
        format=LOG_FORMAT,
        filemode='a',
        force=True,
    )

    logging.getLogger("System").info(f"Logging initialized at {log_file}")
    return log_file


def get_logger(name: str) -> logging.Logger:
    """Returns a named logger instance."""
    return logging.getLogger(name)


def summarize_array(values, max_len: int = 6) -> str:
    """
    Short rendering of an array for log lines.
    Small vectors are printed, anything larger is reduced to shape and norm.
    """
    if values is None:
        return "[NONE]"

    arr = np.asarray(values)
    if arr.ndim <= 1 and arr.size <= max_len:
        return np.array2string(arr, precision=3, separator=", ")

    return f"[array shape={arr.shape} norm={np.linalg.norm(arr):.3e}]"

import logging
import os

from src.constants import LOGS_DIR


def custom_path_filter(path: str) -> str:
    """
    Filters the provided file path to shorten it by removing the project root portion.
    """
    marker = os.sep + "src" + os.sep

    idx = path.rfind(marker)
    if idx != -1:
        path = path[idx + 1 :]
    return path


class CustomLogRecord(logging.LogRecord):
    """
    CustomLogRecord modifies the default LogRecord to filter and shorten the file path in log messages.
    """

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.pathname = custom_path_filter(self.pathname)


def setup_logger(log_filename: str = "rxkit.log", log_dir: str = None) -> logging.Logger:
    """
    Sets up and configures the toolkit logger with custom log record handling and file/stream handlers.
    """
    log_dir = log_dir or os.getenv("RXKIT_LOG_DIR", LOGS_DIR)
    if not os.path.exists(log_dir):
        os.makedirs(log_dir, exist_ok=True)

    log_filepath = os.path.join(log_dir, log_filename)

    # Quiet mode keeps stdout/stderr clean for machine-readable CLI output
    quiet = os.getenv("RXKIT_QUIET", "false").lower() == "true"

    logging.setLogRecordFactory(CustomLogRecord)

    file_handler = logging.FileHandler(log_filepath)
    file_handler.setLevel(logging.INFO)

    stream_handler = logging.StreamHandler()
    stream_handler.setLevel(logging.WARNING if quiet else logging.INFO)

    formatter = logging.Formatter("%(asctime)s [%(levelname)s] [%(module)s] [%(pathname)s]: %(message)s")
    file_handler.setFormatter(formatter)
    stream_handler.setFormatter(formatter)

    toolkit_logger = logging.getLogger("rxkit")
    toolkit_logger.setLevel(logging.INFO)
    toolkit_logger.handlers.clear()
    toolkit_logger.addHandler(stream_handler)
    toolkit_logger.addHandler(file_handler)
    toolkit_logger.propagate = False

    return toolkit_logger


def set_console_level(level: int) -> None:
    """
    Adjust the console handler level at runtime (the CLI lowers it for --quiet runs).
    """
    for handler in logger.handlers:
        if isinstance(handler, logging.StreamHandler) and not isinstance(handler, logging.FileHandler):
            handler.setLevel(level)


logger = setup_logger()

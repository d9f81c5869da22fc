import logging
import sys
import time

LOG_FORMAT = 'time="%(asctime)s" level=%(levelname_lc)s logger=%(name)s msg="%(message_kv)s"'
LOG_DATE_FORMAT = "%Y-%m-%dT%H:%M:%SZ"


def escape_value(text: str) -> str:
    """Quote-safe, single-line rendering of a key=value field."""
    return text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")


class UTCKeyValueFormatter(logging.Formatter):
    """One ``key=value`` line per record, UTC timestamps.

    Messages are escaped so captured warnings (multi-line, quoted reprs) stay on one line.
    """

    converter = time.gmtime

    def format(self, record: logging.LogRecord) -> str:
        record.levelname_lc = record.levelname.lower()
        record.message_kv = escape_value(record.getMessage())
        line = super().format(record)
        if record.exc_text:
            # Traceback text is appended by the base class after a newline.
            head, _, trace = line.partition("\n")
            line = f'{head} exc="{escape_value(trace)}"'
        return line


def configure_logging(log_level: str) -> None:
    """Route every logger through one stderr handler; stdout stays free for results."""
    root_logger = logging.getLogger()
    root_logger.handlers.clear()
    root_logger.setLevel(log_level.upper())

    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(UTCKeyValueFormatter(LOG_FORMAT, LOG_DATE_FORMAT))
    root_logger.addHandler(handler)

    for logger_obj in logging.root.manager.loggerDict.values():
        if isinstance(logger_obj, logging.Logger):
            logger_obj.handlers.clear()
            logger_obj.propagate = True

    # warnings.warn() output goes through the same handler.
    logging.captureWarnings(True)

import logging
import logging.config

# below WARNING to stdout, WARNING and above to stderr
STDOUT_MAX_LEVEL = logging.WARNING


class _BelowLevel(logging.Filter):
    def __init__(self, level=STDOUT_MAX_LEVEL):
        super().__init__()
        self.level = level

    def filter(self, record):
        return record.levelno < self.level


LOG_CONF = {
    "version": 1,
    "disable_existing_loggers": False,
    "filters": {
        "below_warning": {"()": _BelowLevel},
    },
    "formatters": {
        "default": {
            # strategies run on pool threads
            "format": "%(asctime)s %(levelname)s [%(threadName)s] %(name)s: %(message)s",
        },
    },
    "handlers": {
        "stdout": {
            "level": "DEBUG",
            "formatter": "default",
            "filters": ["below_warning"],
            "class": "logging.StreamHandler",
            "stream": "ext://sys.stdout",
        },
        "stderr": {
            "level": "WARNING",
            "formatter": "default",
            "class": "logging.StreamHandler",
            "stream": "ext://sys.stderr",
        },
    },
    "loggers": {
        "sigport": {
            "handlers": ["stdout", "stderr"],
            "level": "WARNING",
            "propagate": False,
        },
    },
}


def configure(level=None):
    """Apply LOG_CONF; `level` overrides the package level (--log-level)."""
    logging.config.dictConfig(LOG_CONF)
    _logger = logging.getLogger("sigport")
    if level is not None:
        _logger.setLevel(level)
    return _logger


logger = logging.getLogger("sigport")

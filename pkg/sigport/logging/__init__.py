from .logger import LOG_CONF, configure, logger

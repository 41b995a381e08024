import logging
from datetime import date
from typing import Optional

logger = logging.getLogger(__name__)


################################################################
# Exceptions
################################################################
class SigportException(Exception):
    pass


class ConfigError(SigportException, ValueError):
    pass


class PriceDataError(SigportException, ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        if line is not None:
            message = f"{message} at line {line}"
        super().__init__(message)
        self.line = line


class EligibilityError(SigportException, ValueError):
    def __init__(self, message: str, symbol: Optional[str] = None, at: Optional[date] = None):
        super().__init__(message)
        self.symbol = symbol
        self.at = at


class CalendarError(SigportException, ValueError):
    pass


class SignatureError(SigportException, ValueError):
    pass


class ClusteringError(SigportException, ValueError):
    pass


class OptimizationError(SigportException, RuntimeError):
    def __init__(self, message: str, residual: Optional[float] = None):
        if residual is not None:
            message = f"{message} (residual {residual:.3e})"
        super().__init__(message)
        self.residual = residual


class BacktestError(SigportException, RuntimeError):
    pass


class MetricsError(SigportException, ValueError):
    pass

from . import calendar, prices
from .calendar import UniverseCalendar, WindowPolicy, build_calendar, window_slice
from .prices import PriceStream, inspect_prices, load_prices, price_frame

__all__ = ["calendar", "prices"]

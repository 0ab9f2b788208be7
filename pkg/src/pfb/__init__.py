"""Forecasting toolkit and rolling-evaluation harness for daily COVID-19 deaths."""
from .series import TimeSeries

__version__ = "0.1.0"
__all__ = ["TimeSeries", "__version__"]

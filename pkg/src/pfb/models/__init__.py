"""Statistical forecasting models."""
from .ar import ArModel, fit_ar_yule_walker, forecast_ar, is_stationary, yule_walker
from .regression import (RegressionTsModel, VarModel, fit_regression_ts, fit_var,
                         forecast_regression_ts, forecast_var)
from .sarima import (ModelOrder, SarimaModel, aic, expand_ar, expand_ma, fit_arima,
                     fit_sarima, forecast_sarima, in_sample_predictions, min_length,
                     select_order_aic)
from .simple import rw_forecast, ses_fit_forecast

__all__ = [
    "ArModel", "ModelOrder", "RegressionTsModel", "SarimaModel", "VarModel", "aic",
    "expand_ar", "expand_ma", "fit_ar_yule_walker", "fit_arima", "fit_regression_ts",
    "fit_sarima", "fit_var", "forecast_ar", "forecast_regression_ts", "forecast_sarima",
    "forecast_var", "in_sample_predictions", "is_stationary", "min_length", "rw_forecast",
    "select_order_aic", "ses_fit_forecast", "yule_walker",
]

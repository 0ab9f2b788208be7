"""Random walk and simple exponential smoothing."""
import numpy as np

from ..errors import InsufficientDataError
from ..series import values_of

SES_GRID = np.round(np.arange(1, 21) * 0.05, 2)


def rw_forecast(s, h):
    """Every horizon repeats the last observation."""
    y = values_of(s)
    if y.size == 0:
        raise InsufficientDataError("random walk needs at least one value")
    if h < 1:
        raise ValueError("h must be >= 1")
    return np.full(h, y[-1])


def ses_levels(y, alpha):
    """Level recursion ``l_t = alpha*y_t + (1-alpha)*l_{t-1}`` with ``l_0 = y_0``."""
    lev = np.empty(y.size)
    lev[0] = y[0]
    for t in range(1, y.size):
        lev[t] = alpha * y[t] + (1.0 - alpha) * lev[t - 1]
    return lev


def ses_select_alpha(y):
    """Grid value of alpha minimising one-step in-sample squared error."""
    best, best_sse = None, np.inf
    for a in SES_GRID:
        lev = ses_levels(y, a)
        sse = float(np.sum((y[1:] - lev[:-1]) ** 2))
        if sse < best_sse:
            best, best_sse = float(a), sse
    return best


def ses_fit_forecast(s, alpha="auto", h=1):
    y = values_of(s)
    if y.size < 2:
        raise InsufficientDataError("SES needs at least two values")
    if alpha == "auto" or alpha is None:
        alpha = ses_select_alpha(y)
    alpha = float(alpha)
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    return np.full(h, ses_levels(y, alpha)[-1])

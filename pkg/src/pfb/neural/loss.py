import numpy as np

# denominators are floored at one death/day so near-zero days cannot blow up
MAPE_FLOOR = 1.0


def mape_loss(pred, target, floor=MAPE_FLOOR):
    """Mean absolute percentage error, in percent, over every element."""
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    denom = np.maximum(np.abs(target), floor)
    return float(100.0 * np.mean(np.abs(target - pred) / denom))


def mape_grad(pred, target, floor=MAPE_FLOOR):
    """Gradient of :func:`mape_loss` with respect to ``pred`` (0 at the kink)."""
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    denom = np.maximum(np.abs(target), floor)
    return 100.0 * np.sign(pred - target) / denom / pred.size

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class TrainConfig:
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    epochs: int = 2000
    batch_size: int | None = None   # None = full batch
    seed: int = 0
    val_fraction: float = 0.1

    def __post_init__(self):
        if self.lr <= 0:
            raise ValueError("learning rate must be positive")
        if not (0 < self.beta1 < 1 and 0 < self.beta2 < 1):
            raise ValueError("ADAM betas must lie in (0, 1)")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if not 0 <= self.val_fraction < 1:
            raise ValueError("val_fraction must lie in [0, 1)")


def init_moments(params):
    return ({k: np.zeros_like(v) for k, v in params.items()},
            {k: np.zeros_like(v) for k, v in params.items()})


def adam_step(params, grads, moments, config, t):
    """One bias-corrected ADAM update; returns new params and moments."""
    if t < 1:
        raise ValueError("step index t starts at 1")
    m, v = moments
    b1, b2 = config.beta1, config.beta2
    c1 = 1.0 - b1 ** t
    c2 = 1.0 - b2 ** t
    new_p, new_m, new_v = {}, {}, {}
    for k, theta in params.items():
        g = grads[k]
        mk = b1 * m[k] + (1.0 - b1) * g
        vk = b2 * v[k] + (1.0 - b2) * g * g
        new_p[k] = theta - config.lr * (mk / c1) / (np.sqrt(vk / c2) + config.eps)
        new_m[k], new_v[k] = mk, vk
    return new_p, (new_m, new_v)

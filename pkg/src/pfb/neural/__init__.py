"""From-scratch neural forecasters trained with ADAM on a MAPE loss."""
from .adam import TrainConfig, adam_step, init_moments
from .gru import (GruCell, GruForecaster, gru_forward, gru_loss_and_grads, gru_predict,
                  init_cell, init_gru_forecaster)
from .loss import MAPE_FLOOR, mape_grad, mape_loss
from .mlp import MlpForecaster, Scaler, init_mlp, mlp_backward, mlp_forward, predict_multi_horizon
from .train import TrainHistory, gru_design, train_gru, train_mlp

__all__ = [
    "GruCell", "GruForecaster", "MAPE_FLOOR", "MlpForecaster", "Scaler", "TrainConfig",
    "TrainHistory", "adam_step", "gru_design", "gru_forward", "gru_loss_and_grads",
    "gru_predict", "init_cell", "init_gru_forecaster", "init_mlp", "init_moments",
    "mape_grad", "mape_loss", "mlp_backward", "mlp_forward", "predict_multi_horizon",
    "train_gru", "train_mlp",
]

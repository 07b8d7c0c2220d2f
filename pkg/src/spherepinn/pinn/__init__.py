"""Physics-informed sinusoidal networks with Rowdy activations."""

from .activation import RowdyParams, rowdy_eval
from .modelio import load_model, model_from_bytes, model_to_bytes, save_model
from .network import Layer, MlpParams, PinnModel, forward, init_mlp, laplacian
from .objective import Gradient, LossTerms, ObservationSet, loss, loss_grad, pde_term
from .training import Adam, TrainConfig, collocation_points, cosine_lr, init_params, predict, predict_geometry, train

__all__ = [
    "Adam",
    "Gradient",
    "Layer",
    "LossTerms",
    "MlpParams",
    "ObservationSet",
    "PinnModel",
    "RowdyParams",
    "TrainConfig",
    "collocation_points",
    "cosine_lr",
    "forward",
    "init_mlp",
    "init_params",
    "laplacian",
    "load_model",
    "loss",
    "loss_grad",
    "model_from_bytes",
    "model_to_bytes",
    "pde_term",
    "predict",
    "predict_geometry",
    "rowdy_eval",
    "save_model",
    "train",
]

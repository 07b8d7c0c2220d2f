"""Full-batch Adam training with cosine annealing, and prediction."""

import dataclasses
import logging
import math
from dataclasses import dataclass

import numpy as np

from ..exceptions import NonFiniteLossError
from ..sma_core import ArrayGeometry, ComplexPressureField, fibonacci_directions, unit_vectors
from .network import PinnModel, forward, init_mlp
from .objective import loss_grad

log = logging.getLogger(__name__)

COLLOCATION_MODES = ("fibonacci", "uniform")


@dataclass(frozen=True)
class TrainConfig:
    iterations: int = 10000
    lr0: float = 1e-4
    lr_min: float = 0.0
    lambda_pde: float = 1e-12
    collocation_count: int = 512
    collocation_mode: str = "fibonacci"
    seed: int = 0
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    hidden_layers: int = 4
    hidden_width: int = 512
    omega0_first: float = 1.0
    omega0_hidden: float = 5.0
    rowdy_W: int = 6
    rowdy_n_init: float = 1.0
    log_every: int = 0

    def __post_init__(self):
        if self.iterations < 0 or self.hidden_layers < 0 or self.rowdy_W < 0:
            raise ValueError("iterations, hidden_layers and rowdy_W must be non-negative")
        if self.collocation_count < 1 or self.hidden_width < 1:
            raise ValueError("collocation_count and hidden_width must be >= 1")
        if not (self.lr0 > 0 and self.lr_min >= 0 and self.lambda_pde >= 0):
            raise ValueError("learning rates and lambda_pde must be non-negative (lr0 > 0)")
        if self.omega0_first <= 0 or self.omega0_hidden <= 0:
            raise ValueError("omega0 values must be positive")
        if self.collocation_mode not in COLLOCATION_MODES:
            raise ValueError(f"collocation_mode must be one of {COLLOCATION_MODES}")

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def to_dict(self):
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data):
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ValueError(f"unknown training options: {sorted(unknown)}")
        return cls(**data)


def cosine_lr(t, config):
    """``lr_min + (lr0 - lr_min) (1 + cos(pi t / iterations)) / 2``."""
    if config.iterations == 0:
        return config.lr0
    if not 0 <= t <= config.iterations:
        raise ValueError("iteration outside schedule")
    return config.lr_min + 0.5 * (config.lr0 - config.lr_min) * (
        1.0 + math.cos(math.pi * t / config.iterations))


def init_params(config, wavenumbers, radius, seed=None, pressure_scale=1.0):
    """Fresh model; the real net is drawn before the imaginary one."""
    rng = np.random.default_rng(config.seed if seed is None else seed)
    K = np.atleast_1d(wavenumbers).size
    kw = dict(hidden_layers=config.hidden_layers, hidden_width=config.hidden_width,
              omega0_first=config.omega0_first, omega0_hidden=config.omega0_hidden,
              rowdy_W=config.rowdy_W, rowdy_n_init=config.rowdy_n_init)
    real_net = init_mlp(rng, K, **kw)
    imag_net = init_mlp(rng, K, **kw)
    return PinnModel(real_net, imag_net, wavenumbers, radius, radius, pressure_scale,
                     config.to_dict())


def collocation_points(count, mode="fibonacci", rng=None):
    """Unit-sphere collocation directions, shape ``(count, 3)``."""
    if mode == "fibonacci":
        return unit_vectors(*fibonacci_directions(count))
    v = rng.standard_normal((count, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


class Adam:
    """Adam over a fixed list of arrays, updated in place."""

    def __init__(self, params, beta1=0.9, beta2=0.999, eps=1e-8):
        self.params = params
        self.beta1, self.beta2, self.eps = beta1, beta2, eps
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]
        self.t = 0

    def step(self, grads, lr):
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        c1 = 1.0 - b1 ** self.t
        c2 = 1.0 - b2 ** self.t
        for p, g, m, v in zip(self.params, grads, self.m, self.v):
            m *= b1
            m += (1.0 - b1) * g
            v *= b2
            v += (1.0 - b2) * g * g
            p -= lr * (m / c1) / (np.sqrt(v / c2) + self.eps)


def train(obs, config, model=None):
    """Fit a model to observations.

    Parameters
    ----------
    obs : ObservationSet
    config : TrainConfig
    model : PinnModel, optional
        Starting point; a fresh :func:`init_params` model otherwise.

    Returns
    -------
    (PinnModel, ndarray)
        Trained model and an ``(iterations, 3)`` trace of
        ``(total, data, pde)`` evaluated before each update.

    Raises
    ------
    NonFiniteLossError
        If the loss stops being finite.
    """
    if model is None:
        peak = float(np.max(np.abs(obs.pressures))) if obs.pressures.size else 0.0
        model = init_params(config, obs.wavenumbers, obs.radius,
                            pressure_scale=peak if peak > 0 else 1.0)
    else:
        model = model.copy()
    rng = np.random.default_rng([config.seed, 1])
    colloc = collocation_points(config.collocation_count, config.collocation_mode, rng)
    opt = Adam(model.arrays(), config.adam_beta1, config.adam_beta2, config.adam_eps)
    trace = np.zeros((config.iterations, 3))
    for t in range(config.iterations):
        if config.collocation_mode == "uniform" and t > 0:
            colloc = collocation_points(config.collocation_count, "uniform", rng)
        terms, grad = loss_grad(model, obs, colloc, config.lambda_pde)
        if not math.isfinite(terms.total):
            raise NonFiniteLossError(t, terms.total)
        trace[t] = terms
        opt.step(grad.arrays(), cosine_lr(t, config))
        if config.log_every and t % config.log_every == 0:
            log.info("iter %d  total %.4e  data %.4e  pde %.4e", t, *terms)
    return model, trace


def predict(model, theta, phi):
    """Model pressures at directions on the array sphere.

    Returns a :class:`ComplexPressureField` with uniform weights (an empty
    target list gives an empty array of shape ``(0, K)`` instead, since a
    geometry needs at least one capsule).
    """
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    if theta.size == 0:
        return np.zeros((0, model.wavenumbers.size), dtype=complex)
    x = unit_vectors(theta, phi) * (model.radius / model.coord_scale)
    re, im = forward(model, x)
    geom = ArrayGeometry(model.radius, theta, phi, model.config.get("enclosure", "open"))
    return ComplexPressureField(geom, model.wavenumbers, re + 1j * im)


def predict_geometry(model, geometry, spectrum=None):
    """Predict at every capsule of ``geometry``, keeping its weights/enclosure."""
    x = geometry.directions * (geometry.radius / model.coord_scale)
    re, im = forward(model, x)
    return ComplexPressureField(geometry, model.wavenumbers, re + 1j * im, spectrum)

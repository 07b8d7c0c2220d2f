"""Sinusoidal MLPs with Rowdy activations and exact input-space Laplacians.

Each network maps a 3-D position to K outputs. Besides the value, the
forward pass can carry per-axis first and second derivatives ("jets")
through every layer:

    u   = W a + b            g_u = W g            h_u = W h
    a'  = s(u)               g'  = s'(u) g_u      h'  = s''(u) g_u**2 + s'(u) h_u

so the Laplacian of the output is ``sum_i h_i`` to machine precision. The
matching reverse pass (:func:`backward`) accumulates parameter gradients of
any loss written in terms of output values and output second derivatives.
"""

from dataclasses import dataclass, field

import numpy as np

from .activation import RowdyJet, RowdyParams

INPUT_DIM = 3


@dataclass
class Layer:
    """Affine map ``u = W x + b`` followed by a Rowdy activation (or identity)."""

    weights: np.ndarray
    biases: np.ndarray
    activation: RowdyParams = None

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        self.biases = np.asarray(self.biases, dtype=float)
        if self.weights.ndim != 2 or self.biases.shape != (self.weights.shape[0],):
            raise ValueError("weights must be (out, in) and biases (out,)")

    @property
    def shape(self):
        return self.weights.shape

    def copy(self):
        act = None if self.activation is None else self.activation.copy()
        return Layer(self.weights.copy(), self.biases.copy(), act)


@dataclass
class MlpParams:
    layers: list

    def __post_init__(self):
        if not self.layers:
            raise ValueError("an MLP needs at least one layer")
        if self.layers[0].weights.shape[1] != INPUT_DIM:
            raise ValueError("first layer must take 3-D positions")
        for prev, nxt in zip(self.layers, self.layers[1:]):
            if nxt.weights.shape[1] != prev.weights.shape[0]:
                raise ValueError("layer dimensions do not chain")
        if self.layers[-1].activation is not None:
            raise ValueError("final layer must be linear")

    @property
    def output_dim(self):
        return self.layers[-1].weights.shape[0]

    def copy(self):
        return MlpParams([layer.copy() for layer in self.layers])

    def arrays(self):
        """Trainable arrays in a fixed order (W, b, n, alpha per layer)."""
        out = []
        for layer in self.layers:
            out += [layer.weights, layer.biases]
            if layer.activation is not None:
                out += [layer.activation.n, layer.activation.alpha]
        return out

    def zeros_like(self):
        layers = []
        for layer in self.layers:
            act = layer.activation
            if act is not None:
                act = RowdyParams(act.omega0, np.zeros_like(act.n), np.zeros_like(act.alpha))
            layers.append(Layer(np.zeros_like(layer.weights), np.zeros_like(layer.biases), act))
        return MlpParams(layers)


@dataclass
class PinnModel:
    """Two parallel MLPs for the real and imaginary pressure parts.

    Inputs are positions divided by ``coord_scale`` (the sphere radius by
    default). Network outputs are multiplied by ``pressure_scale``.
    """

    real_net: MlpParams
    imag_net: MlpParams
    wavenumbers: np.ndarray
    radius: float
    coord_scale: float = None
    pressure_scale: float = 1.0
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        self.wavenumbers = np.atleast_1d(np.asarray(self.wavenumbers, dtype=float))
        if self.coord_scale is None:
            self.coord_scale = self.radius
        if not self.coord_scale > 0:
            raise ValueError("coord_scale must be positive")
        K = self.wavenumbers.size
        if self.real_net.output_dim != K or self.imag_net.output_dim != K:
            raise ValueError("both networks must emit one output per wavenumber")

    @property
    def nets(self):
        return (self.real_net, self.imag_net)

    @property
    def scaled_wavenumbers(self):
        """Wavenumbers in normalised input units, ``k * coord_scale``."""
        return self.wavenumbers * self.coord_scale

    def copy(self):
        return PinnModel(self.real_net.copy(), self.imag_net.copy(), self.wavenumbers.copy(),
                         self.radius, self.coord_scale, self.pressure_scale, dict(self.config))

    def arrays(self):
        return self.real_net.arrays() + self.imag_net.arrays()


def init_mlp(rng, out_dim, hidden_layers=4, hidden_width=512, omega0_first=1.0,
             omega0_hidden=5.0, rowdy_W=6, rowdy_n_init=1.0):
    """Sinusoidal-network initialisation.

    First layer ``U(-1/3, 1/3)``; later layers ``U(+-sqrt(6/fan_in)/omega0)``
    with the hidden ``omega0``; zero biases; Rowdy ``n_w = n_init``,
    ``alpha_w = w``. Layout: input layer, ``hidden_layers`` hidden layers,
    linear read-out.
    """
    layers = []
    fan_in = INPUT_DIM
    w = rng.uniform(-1.0 / fan_in, 1.0 / fan_in, size=(hidden_width, fan_in))
    layers.append(Layer(w, np.zeros(hidden_width),
                        RowdyParams.initial(omega0_first, rowdy_W, rowdy_n_init)))
    bound = np.sqrt(6.0 / hidden_width) / omega0_hidden
    for _ in range(hidden_layers):
        w = rng.uniform(-bound, bound, size=(hidden_width, hidden_width))
        layers.append(Layer(w, np.zeros(hidden_width),
                            RowdyParams.initial(omega0_hidden, rowdy_W, rowdy_n_init)))
    w = rng.uniform(-bound, bound, size=(out_dim, hidden_width))
    layers.append(Layer(w, np.zeros(out_dim)))
    return MlpParams(layers)


# --------------------------------------------------------------------------
# forward / reverse passes for one network
# --------------------------------------------------------------------------

class _Tape:
    """Per-layer intermediates of one forward pass."""

    def __init__(self):
        self.inputs = []   # (a, G, H) entering each layer
        self.gu = []       # per-layer W g (None when jets are off)
        self.hu = []
        self.acts = []     # RowdyJet or None


def net_forward(mlp, x, jets=False, tape=None):
    """Run one network on inputs ``x`` of shape ``(B, 3)``.

    Returns ``(value, G, H)`` with value ``(B, K)`` and, when ``jets`` is
    set, ``G``/``H`` of shape ``(3, B, K)`` holding the first and second
    derivatives along each input axis (else ``None``).
    """
    a = np.asarray(x, dtype=float)
    B = a.shape[0]
    G = H = None  # None encodes the identity/zero jets of the raw input
    for idx, layer in enumerate(mlp.layers):
        W, b = layer.weights, layer.biases
        if tape is not None:
            tape.inputs.append((a, G, H))
        u = a @ W.T + b
        gu = hu = None
        if jets:
            if idx == 0:
                gu = np.broadcast_to(W.T[:, None, :], (INPUT_DIM, B, W.shape[0]))
            else:
                gu = G @ W.T
                hu = None if H is None else H @ W.T
        act = layer.activation
        if act is None:
            a, G, H = u, gu, hu
            jet = None
        else:
            jet = RowdyJet(u, act, need_jets=jets)
            a = jet.s0
            if jets:
                G = jet.s1 * gu
                H = jet.s2 * gu * gu
                if hu is not None:
                    H = H + jet.s1 * hu
        if tape is not None:
            tape.gu.append(gu)
            tape.hu.append(hu)
            tape.acts.append(jet)
    if jets and H is None:
        H = np.zeros((INPUT_DIM, B, a.shape[1]))
    return a, G, H


def _contract(d, x):
    # sum_{i,b} d[i,b,k] x[i,b,j]
    return d.reshape(-1, d.shape[-1]).T @ x.reshape(-1, x.shape[-1])


def net_backward(mlp, tape, d_out, d_hout=None):
    """Reverse pass through a taped :func:`net_forward`.

    Parameters
    ----------
    d_out : (B, K) ndarray
        Loss gradient w.r.t. the output values.
    d_hout : (3, B, K) ndarray, optional
        Loss gradient w.r.t. the output second derivatives.

    Returns
    -------
    MlpParams
        Gradient with the same layout as ``mlp``.
    """
    grad = mlp.zeros_like()
    dA = d_out
    dG = None
    dH = d_hout
    for idx in range(len(mlp.layers) - 1, -1, -1):
        layer = mlp.layers[idx]
        W = layer.weights
        a_in, G_in, H_in = tape.inputs[idx]
        gu, hu, jet = tape.gu[idx], tape.hu[idx], tape.acts[idx]
        if jet is None:
            du, dgu, dhu = dA, dG, dH
        else:
            c0 = dA
            c1 = c2 = None
            dgu = dhu = None
            if dG is not None or dH is not None:
                c1 = np.zeros_like(jet.u)
                dgu = np.zeros_like(gu) if dG is None else dG * jet.s1
                if dG is not None:
                    c1 = c1 + np.sum(dG * gu, axis=0)
                if dH is not None:
                    c2 = np.sum(dH * gu * gu, axis=0)
                    dgu = dgu + 2.0 * dH * jet.s2 * gu
                    if hu is not None:
                        c1 = c1 + np.sum(dH * hu, axis=0)
                    dhu = dH * jet.s1
            du = c0 * jet.s1
            if c1 is not None:
                du = du + c1 * jet.s2
            if c2 is not None:
                du = du + c2 * jet.s3
            g_n, g_a = jet.param_grads(c0, c1, c2)
            grad.layers[idx].activation.n[:] = g_n
            grad.layers[idx].activation.alpha[:] = g_a
        gW = du.T @ a_in
        if dgu is not None:
            if idx == 0:
                # g entering layer 0 is the identity: gu_i = W[:, i]
                gW = gW + np.sum(dgu, axis=1).T
            else:
                gW = gW + _contract(dgu, G_in)
        if dhu is not None and H_in is not None:
            gW = gW + _contract(dhu, H_in)
        grad.layers[idx].weights[:] = gW
        grad.layers[idx].biases[:] = du.sum(axis=0)
        if idx > 0:
            dA = du @ W
            dG = None if dgu is None else dgu @ W
            dH = None if dhu is None else dhu @ W
    return grad


# --------------------------------------------------------------------------
# model-level evaluation
# --------------------------------------------------------------------------

def _positions(position):
    x = np.asarray(position, dtype=float)
    return x[None, :] if x.ndim == 1 else x


def forward(model, position):
    """Pressure estimate at unit-sphere input positions.

    Parameters
    ----------
    position : (3,) or (B, 3) array_like
        Normalised positions (physical position / ``coord_scale``).

    Returns
    -------
    (real, imag) : tuple of ndarray
        Each ``(B, K)`` (or ``(K,)`` for a single position), already
        multiplied by ``pressure_scale``.
    """
    x = _positions(position)
    re = net_forward(model.real_net, x)[0] * model.pressure_scale
    im = net_forward(model.imag_net, x)[0] * model.pressure_scale
    if np.ndim(position) == 1:
        return re[0], im[0]
    return re, im


def laplacian(model, position):
    """Complex pressure and its Laplacian w.r.t. normalised coordinates.

    Returns ``(value, lap)``, complex arrays of shape ``(B, K)`` (or ``(K,)``),
    scaled by ``pressure_scale``.
    """
    x = _positions(position)
    vr, _, hr = net_forward(model.real_net, x, jets=True)
    vi, _, hi = net_forward(model.imag_net, x, jets=True)
    s = model.pressure_scale
    value = s * (vr + 1j * vi)
    lap = s * (hr.sum(axis=0) + 1j * hi.sum(axis=0))
    if np.ndim(position) == 1:
        return value[0], lap[0]
    return value, lap

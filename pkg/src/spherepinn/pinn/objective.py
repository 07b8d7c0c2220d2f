"""Data-fidelity plus Helmholtz-residual objective and its exact gradient.

Everything is evaluated in normalised units: inputs are positions divided
by ``model.coord_scale`` and targets are pressures divided by
``model.pressure_scale``. In those units the Helmholtz operator reads
``lap_u p + (k * coord_scale)**2 p``.
"""

from collections import namedtuple
from dataclasses import dataclass

import numpy as np

from ..exceptions import ShapeMismatchError
from .network import net_backward, net_forward, _Tape

LossTerms = namedtuple("LossTerms", "total data pde")


@dataclass(frozen=True, eq=False)
class ObservationSet:
    """Observed capsule pressures used as training targets.

    ``positions`` are unit vectors ``(Q, 3)``, ``pressures`` complex
    ``(Q, K)``.
    """

    positions: np.ndarray
    pressures: np.ndarray
    wavenumbers: np.ndarray
    radius: float

    def __post_init__(self):
        pos = np.atleast_2d(np.asarray(self.positions, dtype=float))
        p = np.asarray(self.pressures, dtype=complex)
        k = np.atleast_1d(np.asarray(self.wavenumbers, dtype=float))
        if p.ndim == 1:
            p = p[:, None]
        if pos.shape[1] != 3 or p.shape != (pos.shape[0], k.size):
            raise ShapeMismatchError("positions (Q,3), pressures (Q,K) and K wavenumbers must agree")
        if not (np.all(np.isfinite(pos)) and np.all(np.isfinite(p))):
            raise ValueError("observations contain non-finite values")
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "pressures", p)
        object.__setattr__(self, "wavenumbers", k)

    @classmethod
    def from_field(cls, field):
        """Observations from a :class:`ComplexPressureField`."""
        g = field.geometry
        return cls(g.directions, field.pressures, field.wavenumbers, g.radius)


@dataclass
class Gradient:
    real_net: object
    imag_net: object

    def arrays(self):
        return self.real_net.arrays() + self.imag_net.arrays()


def _targets(model, obs):
    if obs.wavenumbers.size != model.wavenumbers.size:
        raise ShapeMismatchError("observation and model frequency counts differ")
    return obs.pressures / model.pressure_scale


def pde_term(evaluate, colloc, scaled_wavenumbers):
    """Mean squared Helmholtz residual ``mean_{s,k} |lap p + kappa_k**2 p|**2``.

    ``evaluate`` maps ``(S, 3)`` normalised points to ``(value, lap)``,
    complex ``(S, K)`` arrays; any closed-form field can stand in for the
    network here.
    """
    value, lap = evaluate(np.atleast_2d(np.asarray(colloc, dtype=float)))
    res = lap + np.asarray(scaled_wavenumbers) ** 2 * value
    return float(np.mean(np.abs(res) ** 2))


def _network_jets(model):
    def evaluate(x):
        vr, _, hr = net_forward(model.real_net, x, jets=True)
        vi, _, hi = net_forward(model.imag_net, x, jets=True)
        return vr + 1j * vi, hr.sum(axis=0) + 1j * hi.sum(axis=0)
    return evaluate


def loss(model, obs, colloc, lambda_pde):
    """Return ``LossTerms(total, data, pde)``.

    ``data = mean_{q,k} |p_hat - p|^2`` over observations and
    ``pde = mean_{s,k} |lap p_hat + (k R)^2 p_hat|^2`` over collocation
    directions; ``total = data + lambda_pde * pde``.
    """
    target = _targets(model, obs)
    x = obs.positions
    vr = net_forward(model.real_net, x)[0]
    vi = net_forward(model.imag_net, x)[0]
    data = float(np.mean((vr - target.real) ** 2 + (vi - target.imag) ** 2))
    pde = 0.0
    if lambda_pde != 0 and len(colloc):
        pde = pde_term(_network_jets(model), colloc, model.scaled_wavenumbers)
    return LossTerms(data + lambda_pde * pde, data, pde)


def loss_grad(model, obs, colloc, lambda_pde):
    """Loss terms and the exact gradient w.r.t. every model parameter.

    Returns ``(LossTerms, Gradient)``; the gradient mirrors the layout of
    ``model.real_net`` / ``model.imag_net`` (weights, biases, Rowdy ``n``
    and ``alpha``).

    The PDE term is skipped entirely when ``lambda_pde == 0``.
    """
    target = _targets(model, obs)
    x = obs.positions
    Q, K = target.shape
    grads = []
    data = 0.0
    parts = (target.real, target.imag)
    for net, tgt in zip(model.nets, parts):
        tape = _Tape()
        v = net_forward(net, x, tape=tape)[0]
        diff = v - tgt
        data += float(np.sum(diff ** 2))
        grads.append(net_backward(net, tape, 2.0 * diff / (Q * K)))
    data /= Q * K

    pde = 0.0
    colloc = np.atleast_2d(np.asarray(colloc, dtype=float)) if len(colloc) else None
    if lambda_pde != 0 and colloc is not None:
        S = colloc.shape[0]
        kappa2 = model.scaled_wavenumbers ** 2
        for j, net in enumerate(model.nets):
            tape = _Tape()
            v, _, H = net_forward(net, colloc, jets=True, tape=tape)
            res = H.sum(axis=0) + kappa2 * v
            pde += float(np.sum(res ** 2))
            dres = 2.0 * lambda_pde * res / (S * K)
            d_h = np.broadcast_to(dres, (3,) + dres.shape)
            g = net_backward(net, tape, dres * kappa2, d_h)
            _accumulate(grads[j], g)
        pde /= S * K
    return LossTerms(data + lambda_pde * pde, data, pde), Gradient(grads[0], grads[1])


def _accumulate(into, other):
    for a, b in zip(into.arrays(), other.arrays()):
        a += b

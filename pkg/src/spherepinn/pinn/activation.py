"""Rowdy sinusoidal activation and its derivatives."""

from dataclasses import dataclass

import numpy as np


@dataclass
class RowdyParams:
    """``sigma(x) = sin(omega0 x) + sum_w n_w sin(alpha_w x)``.

    ``omega0`` is fixed; ``n`` and ``alpha`` (length W) are trainable.
    """

    omega0: float
    n: np.ndarray
    alpha: np.ndarray

    def __post_init__(self):
        self.n = np.atleast_1d(np.asarray(self.n, dtype=float))
        self.alpha = np.atleast_1d(np.asarray(self.alpha, dtype=float))
        if self.n.shape != self.alpha.shape or self.n.ndim != 1:
            raise ValueError("n and alpha must be 1-D arrays of equal length")
        if not self.omega0 > 0:
            raise ValueError("omega0 must be positive")

    @property
    def width(self):
        return self.n.size

    @classmethod
    def initial(cls, omega0, W, n_init=1.0):
        """Paper initialisation: ``n_w = n_init`` (1 by default), ``alpha_w = w``."""
        return cls(omega0, np.full(W, float(n_init)), np.arange(1, W + 1, dtype=float))

    def copy(self):
        return RowdyParams(self.omega0, self.n.copy(), self.alpha.copy())


def rowdy_eval(x, params, order=0):
    """Evaluate ``sigma`` (order 0) or its first/second/third derivative."""
    if order not in (0, 1, 2, 3):
        raise ValueError("order must be 0, 1, 2 or 3")
    x = np.asarray(x, dtype=float)
    w0 = params.omega0
    # d^k/dx^k sin(a x) = a^k sin(a x + k pi/2)
    shift = order * np.pi / 2
    out = w0 ** order * np.sin(w0 * x + shift)
    for n_w, a_w in zip(params.n, params.alpha):
        out = out + n_w * a_w ** order * np.sin(a_w * x + shift)
    return out.item() if out.ndim == 0 else out


class RowdyJet:
    """``sigma`` and derivatives at a pre-activation array, kept for backprop.

    With ``need_jets`` false only ``s0`` and ``s1`` are formed (enough for
    the value path and its reverse pass).
    """

    __slots__ = ("u", "sw", "cw", "s0", "s1", "s2", "s3", "params")

    def __init__(self, u, params, need_jets=True):
        self.u = u
        self.params = params
        w0 = params.omega0
        S = np.sin(w0 * u)
        C = np.cos(w0 * u)
        self.s0 = S
        self.s1 = w0 * C
        self.s2 = self.s3 = None
        if need_jets:
            self.s2 = -w0 ** 2 * S
            self.s3 = -w0 ** 3 * C
        if params.width:
            a, n = params.alpha, params.n
            au = np.multiply.outer(a, u)
            self.sw = np.sin(au)
            self.cw = np.cos(au)
            # contractions over the W axis run as BLAS products
            self.s0 = self.s0 + np.tensordot(n, self.sw, axes=1)
            self.s1 = self.s1 + np.tensordot(n * a, self.cw, axes=1)
            if need_jets:
                self.s2 = self.s2 - np.tensordot(n * a ** 2, self.sw, axes=1)
                self.s3 = self.s3 - np.tensordot(n * a ** 3, self.cw, axes=1)
        else:
            self.sw = self.cw = None

    def param_grads(self, c0, c1, c2):
        """Gradients w.r.t. ``n`` and ``alpha`` given upstream coefficients.

        The loss depends on this layer's activation through
        ``c0 * sigma + c1 * sigma' + c2 * sigma''`` (elementwise, summed).
        """
        p = self.params
        if not p.width:
            return np.zeros(0), np.zeros(0)
        W = p.width
        a, n = p.alpha, p.n
        u = self.u.ravel()
        sw = self.sw.reshape(W, -1)
        cw = self.cw.reshape(W, -1)
        c0 = c0.ravel()
        # d sigma/dn = sin(a u)           d sigma/da = n u cos(a u)
        g_n = sw @ c0
        g_a = n * (cw @ (u * c0))
        if c1 is not None:
            # d sigma'/dn = a cos(a u)    d sigma'/da = n cos(a u) - n a u sin(a u)
            c1 = c1.ravel()
            cos_c1 = cw @ c1
            g_n = g_n + a * cos_c1
            g_a = g_a + n * cos_c1 - n * a * (sw @ (u * c1))
        if c2 is not None:
            # d sigma''/dn = -a^2 sin(a u)  d sigma''/da = -2 n a sin(a u) - n a^2 u cos(a u)
            c2 = c2.ravel()
            sin_c2 = sw @ c2
            g_n = g_n - a ** 2 * sin_c2
            g_a = g_a - 2 * n * a * sin_c2 - n * a ** 2 * (cw @ (u * c2))
        return g_n, g_a

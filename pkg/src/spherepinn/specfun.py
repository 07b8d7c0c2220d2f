"""Special functions for spherical acoustics.

Associated Legendre functions, complex spherical harmonics, spherical
Bessel/Neumann/Hankel functions with first derivatives, and the radial
term coupling spherical-harmonic coefficients to surface pressure on open
and rigid spheres.

Conventions
-----------
* The Condon-Shortley phase ``(-1)**m`` is included in
  :func:`assoc_legendre`, so ``Y_{n,-m} = (-1)**m * conj(Y_{nm})``.
* ``theta`` is the inclination (colatitude) in ``[0, pi]`` and ``phi`` the
  azimuth.
* Hankel functions are of the first kind, ``h_n = j_n + i y_n``, matching
  an ``exp(-i omega t)`` time convention.

All functions accept scalars or numpy arrays for the continuous argument
and are pure.
"""

import enum
import math

import numpy as np

__all__ = [
    "MAX_ORDER",
    "Enclosure",
    "assoc_legendre",
    "sph_harm",
    "sh_matrix",
    "sh_index",
    "sph_bessel_j",
    "sph_bessel_y",
    "sph_hankel1",
    "radial_term_b",
]

#: Highest order any routine here accepts.
MAX_ORDER = 30

_SERIES_CUTOFF = 1e-4


class Enclosure(enum.Enum):
    """Array enclosure type."""

    OPEN = "open"
    RIGID = "rigid"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown enclosure {value!r}; expected 'open' or 'rigid'")


def _check_order(n):
    if n < 0:
        raise ValueError(f"order must be non-negative, got {n}")
    if n > MAX_ORDER:
        raise ValueError(f"order {n} exceeds the supported maximum {MAX_ORDER}")


def sh_index(n, m):
    """Linear (order-major) index of ``Y_nm``: ``n**2 + n + m``."""
    return n * n + n + m


# --------------------------------------------------------------------------
# Legendre / spherical harmonics
# --------------------------------------------------------------------------

def legendre_table(nmax, x):
    """All ``P_nm(x)`` for ``0 <= m <= n <= nmax``.

    Returns an array of shape ``(nmax + 1, nmax + 1) + x.shape`` indexed
    ``[n, m]``; entries with ``m > n`` are zero.
    """
    x = np.asarray(x, dtype=float)
    out = np.zeros((nmax + 1, nmax + 1) + x.shape)
    somx2 = np.sqrt(np.clip(1.0 - x * x, 0.0, None))
    pmm = np.ones_like(x)
    for m in range(nmax + 1):
        if m > 0:
            pmm = -(2 * m - 1) * somx2 * pmm
        out[m, m] = pmm
        if m + 1 <= nmax:
            out[m + 1, m] = x * (2 * m + 1) * pmm
        for n in range(m + 2, nmax + 1):
            out[n, m] = ((2 * n - 1) * x * out[n - 1, m]
                         - (n + m - 1) * out[n - 2, m]) / (n - m)
    return out


def assoc_legendre(n, m, x):
    """Associated Legendre function ``P_nm(x)`` with Condon-Shortley phase.

    Parameters
    ----------
    n : int
        Order, ``0 <= n <= MAX_ORDER``.
    m : int
        Degree, ``0 <= m <= n``.
    x : float or array_like
        Argument in ``[-1, 1]``.
    """
    _check_order(n)
    if not 0 <= m <= n:
        raise ValueError(f"degree m={m} outside [0, {n}]")
    xa = np.asarray(x, dtype=float)
    if np.any(np.abs(xa) > 1.0):
        raise ValueError("assoc_legendre argument outside [-1, 1]")
    val = legendre_table(n, xa)[n, m]
    return float(val) if val.ndim == 0 else val


def _norm(n, m):
    return math.sqrt((2 * n + 1) / (4 * math.pi)
                     * math.factorial(n - m) / math.factorial(n + m))


def sph_harm(n, m, theta, phi):
    """Complex spherical harmonic ``Y_nm(theta, phi)``.

    Negative degrees follow ``Y_{n,-m} = (-1)**m conj(Y_nm)``.
    """
    _check_order(n)
    if abs(m) > n:
        raise ValueError(f"|m|={abs(m)} exceeds order n={n}")
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    ma = abs(m)
    p = legendre_table(n, np.cos(theta))[n, ma]
    y = _norm(n, ma) * p * np.exp(1j * ma * phi)
    if m < 0:
        y = (-1) ** ma * np.conj(y)
    return complex(y) if y.ndim == 0 else y


def sh_matrix(order, theta, phi):
    """Spherical harmonics up to ``order`` evaluated at many directions.

    Parameters
    ----------
    order : int
        Maximum order N.
    theta, phi : (P,) array_like
        Inclination and azimuth of the P directions.

    Returns
    -------
    Y : (P, (N+1)**2) complex ndarray
        Column ``n**2 + n + m`` holds ``Y_nm``.
    """
    _check_order(order)
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    table = legendre_table(order, np.cos(theta))
    Y = np.empty((theta.size, (order + 1) ** 2), dtype=complex)
    for n in range(order + 1):
        for m in range(n + 1):
            y = _norm(n, m) * table[n, m] * np.exp(1j * m * phi)
            Y[:, sh_index(n, m)] = y
            if m > 0:
                Y[:, sh_index(n, -m)] = (-1) ** m * np.conj(y)
    return Y


# --------------------------------------------------------------------------
# Spherical Bessel family
# --------------------------------------------------------------------------

def _double_factorial_odd(n):
    # (2n+1)!!
    out = 1.0
    for k in range(3, 2 * n + 2, 2):
        out *= k
    return out


def _jn_series(nmax, x):
    """Small-argument series for ``j_0..j_nmax``."""
    out = np.empty((nmax + 1,) + x.shape)
    x2 = x * x
    for n in range(nmax + 1):
        lead = x ** n / _double_factorial_odd(n)
        out[n] = lead * (1.0 - x2 / (2 * (2 * n + 3))
                         + x2 * x2 / (8 * (2 * n + 3) * (2 * n + 5)))
    return out


def bessel_j_table(nmax, x):
    """``j_0..j_nmax`` at ``x >= 0``, shape ``(nmax + 1,) + x.shape``.

    Upward recurrence where ``x`` exceeds the order, Miller's downward
    recurrence otherwise, and the power series below ``_SERIES_CUTOFF``.
    """
    x = np.asarray(x, dtype=float)
    out = np.zeros((nmax + 1,) + x.shape)
    small = x < _SERIES_CUTOFF
    big = ~small
    if np.any(small):
        out[:, small] = _jn_series(nmax, x[small])
    if not np.any(big):
        return out
    xb = x[big]
    s, c = np.sin(xb), np.cos(xb)
    j0 = s / xb
    j1 = s / xb ** 2 - c / xb

    up = np.empty((nmax + 1,) + xb.shape)
    up[0] = j0
    if nmax >= 1:
        up[1] = j1
    for n in range(1, nmax):
        up[n + 1] = (2 * n + 1) / xb * up[n] - up[n - 1]

    start = nmax + 20 + int(np.ceil(xb.max()))
    down = np.zeros((nmax + 2,) + xb.shape)
    f_next = np.zeros_like(xb)
    f_cur = np.ones_like(xb)
    for n in range(start, 0, -1):
        f_prev = (2 * n + 1) / xb * f_cur - f_next
        f_next, f_cur = f_cur, f_prev
        if n - 1 <= nmax + 1:
            down[n - 1] = f_cur
        big_mag = np.abs(f_cur) > 1e100
        if np.any(big_mag):
            scale = np.where(big_mag, 1e-100, 1.0)
            f_cur = f_cur * scale
            f_next = f_next * scale
            down *= scale
    # Normalise against the closed forms of j0 and j1 jointly, which stays
    # well conditioned near zeros of either.
    denom = down[0] ** 2 + down[1] ** 2
    scale = (j0 * down[0] + j1 * down[1]) / denom
    down = down[: nmax + 1] * scale

    orders = np.arange(nmax + 1).reshape((-1,) + (1,) * xb.ndim)
    use_up = xb[None, ...] >= orders
    out[:, big] = np.where(use_up, up, down)
    return out


def bessel_y_table(nmax, x):
    """``y_0..y_nmax`` at ``x > 0`` by upward recurrence."""
    x = np.asarray(x, dtype=float)
    s, c = np.sin(x), np.cos(x)
    out = np.empty((nmax + 1,) + x.shape)
    out[0] = -c / x
    if nmax >= 1:
        out[1] = -c / x ** 2 - s / x
    for n in range(1, nmax):
        out[n + 1] = (2 * n + 1) / x * out[n] - out[n - 1]
    return out


def table_derivative(table, n):
    # f_n' = n/(2n+1) f_{n-1} - (n+1)/(2n+1) f_{n+1};  f_0' = -f_1
    if n == 0:
        return -table[1]
    return (n * table[n - 1] - (n + 1) * table[n + 1]) / (2 * n + 1)


def _scalarize(v):
    return v.item() if np.ndim(v) == 0 else v


def sph_bessel_j(n, x, deriv=0):
    """Spherical Bessel function of the first kind ``j_n(x)`` or ``j_n'(x)``."""
    _check_order(n)
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("sph_bessel_j requires x >= 0")
    table = bessel_j_table(n + 1, x)
    val = table[n] if deriv == 0 else table_derivative(table, n)
    return _scalarize(val)


def sph_bessel_y(n, x, deriv=0):
    """Spherical Bessel function of the second kind ``y_n(x)`` or ``y_n'(x)``."""
    _check_order(n)
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("sph_bessel_y is singular at x <= 0")
    table = bessel_y_table(n + 1, x)
    val = table[n] if deriv == 0 else table_derivative(table, n)
    return _scalarize(val)


def sph_hankel1(n, x, deriv=0):
    """Spherical Hankel function of the first kind ``h_n = j_n + i y_n``."""
    _check_order(n)
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("sph_hankel1 is singular at x <= 0")
    jt = bessel_j_table(n + 1, x)
    yt = bessel_y_table(n + 1, x)
    if deriv == 0:
        val = jt[n] + 1j * yt[n]
    else:
        val = table_derivative(jt, n) + 1j * table_derivative(yt, n)
    return _scalarize(val)


def radial_terms(nmax, x, enclosure):
    """Radial terms ``b_0..b_nmax`` at ``x``, shape ``(nmax + 1,) + x.shape``.

    Vectorised companion of :func:`radial_term_b`.
    """
    _check_order(nmax)
    enclosure = Enclosure.parse(enclosure)
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("radial term requires kR >= 0")
    jt = bessel_j_table(nmax + 1, x)
    if enclosure is Enclosure.OPEN:
        return jt[: nmax + 1].astype(complex)
    if np.any(x == 0):
        raise ValueError("rigid-sphere radial term is singular at kR = 0")
    yt = bessel_y_table(nmax + 1, x)
    out = np.empty((nmax + 1,) + x.shape, dtype=complex)
    for n in range(nmax + 1):
        jd = table_derivative(jt, n)
        hd = jd + 1j * table_derivative(yt, n)
        out[n] = jt[n] - jd / hd * (jt[n] + 1j * yt[n])
    return out


def radial_term_b(n, kr, enclosure):
    """Radial term ``b_n(kR)``.

    ``j_n(kR)`` for an open sphere and
    ``j_n(kR) - j_n'(kR) / h_n'(kR) * h_n(kR)`` for a rigid sphere.
    """
    _check_order(n)
    val = radial_terms(n, kr, enclosure)[n]
    return _scalarize(val)

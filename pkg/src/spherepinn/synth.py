"""Ground-truth sound fields for simulation studies.

Analytic plane waves (open or rigid sphere), free-field point sources,
image-source shoebox impulse responses at the capsules, and additive
noise.
"""

import math
from dataclasses import dataclass

import numpy as np

from .evalkit import TimeSignalSet
from .exceptions import EnclosureUnsupportedError, GeometryError
from .sma_core import ComplexPressureField, unit_vectors
from .specfun import MAX_ORDER, Enclosure, bessel_j_table, bessel_y_table, legendre_table, table_derivative

FD_TAPS = 81


@dataclass(frozen=True)
class PlaneWaveSpec:
    """Plane wave travelling towards direction ``(theta, phi)``."""

    theta: float
    phi: float
    amplitude: complex = 1.0

    @property
    def unit(self):
        return unit_vectors(self.theta, self.phi)[0]


@dataclass(frozen=True)
class PointSourceSpec:
    """Monopole at a Cartesian ``position`` (metres, array-centred)."""

    position: tuple
    amplitude: complex = 1.0


@dataclass(frozen=True)
class ShoeboxSpec:
    """Rectangular room with frequency-independent walls."""

    dimensions: tuple
    source: tuple
    array_center: tuple
    reflection_order: int = 2
    wall_reflection_coeff: float = 0.8
    fs: float = 16000.0
    length: int = 1024
    c: float = 343.0

    def __post_init__(self):
        if not 0 <= self.reflection_order <= 6:
            raise ValueError("reflection_order must lie in [0, 6]")
        if not 0.0 <= self.wall_reflection_coeff <= 1.0:
            raise ValueError("wall_reflection_coeff must lie in [0, 1]")
        if not self.fs > 0 or self.length < 1:
            raise ValueError("fs and length must be positive")


def default_truncation(kr):
    return min(MAX_ORDER, int(math.ceil(kr)) + 12)


# --------------------------------------------------------------------------
# plane waves
# --------------------------------------------------------------------------

def plane_wave_pressure(spec, points, k, radius, enclosure=Enclosure.OPEN, truncation=None):
    """Plane-wave pressure at Cartesian ``points`` around a sphere.

    Uses ``p = A sum_n i^n (2n+1) R_n(kr) P_n(cos gamma)`` which equals
    ``4 pi A sum_nm i^n R_n conj(Y_nm(k_hat)) Y_nm(r_hat)``; ``R_n = j_n``
    for an open sphere and ``j_n(kr) - j_n'(kR)/h_n'(kR) h_n(kr)`` for a
    rigid one (valid for ``r >= R``).
    """
    enclosure = Enclosure.parse(enclosure)
    points = np.atleast_2d(np.asarray(points, dtype=float))
    r = np.linalg.norm(points, axis=1)
    if truncation is None:
        # near-surface points share the sphere's order so finite-difference
        # stencils straddling r = R see one consistent series
        reach = radius if r.max() <= 1.1 * radius else r.max()
        truncation = default_truncation(k * reach)
    N = truncation
    safe = np.where(r > 0, r, 1.0)
    cosg = np.clip(points @ spec.unit / safe, -1.0, 1.0)
    P = legendre_table(N, cosg)
    kr = k * r
    jt = bessel_j_table(N + 1, kr)
    radial = jt[: N + 1].astype(complex)
    if enclosure is Enclosure.RIGID:
        kR = np.asarray(k * radius)
        jR = bessel_j_table(N + 1, kR)
        yR = bessel_y_table(N + 1, kR)
        yt = bessel_y_table(N, np.where(kr > 0, kr, 1.0))
        for n in range(N + 1):
            ratio = table_derivative(jR, n) / (table_derivative(jR, n) + 1j * table_derivative(yR, n))
            radial[n] = radial[n] - ratio * (jt[n] + 1j * yt[n])
    n = np.arange(N + 1)[:, None]
    terms = (1j ** n) * (2 * n + 1) * radial * P[:, 0]
    return spec.amplitude * terms.sum(axis=0)


def plane_wave_field(spec, geometry, k, truncation=None):
    """Plane-wave pressure at every capsule of ``geometry``."""
    return plane_wave_pressure(spec, geometry.positions, k, geometry.radius,
                               geometry.enclosure, truncation)


def plane_wave_free(spec, k):
    """Closed-form free plane wave ``A exp(i k k_hat . x)`` and its Laplacian."""
    kvec = k * spec.unit

    def value(points):
        return spec.amplitude * np.exp(1j * np.atleast_2d(points) @ kvec)

    def laplacian(points):
        # sum_i d^2/dx_i^2 exp(i k.x) = sum_i (i k_i)^2 exp(i k.x)
        return np.sum((1j * kvec) ** 2) * value(points)

    return value, laplacian


# --------------------------------------------------------------------------
# point sources
# --------------------------------------------------------------------------

def _as_sources(spec):
    if isinstance(spec, PointSourceSpec):
        return [spec]
    return list(spec)


def point_source_pressure(spec, points, k):
    """Free-field pressure ``A exp(ikd)/(4 pi d)`` summed over sources."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    out = np.zeros(points.shape[0], dtype=complex)
    for src in _as_sources(spec):
        d = np.linalg.norm(points - np.asarray(src.position, dtype=float), axis=1)
        out += src.amplitude * np.exp(1j * k * d) / (4 * np.pi * d)
    return out


def point_source_laplacian(spec, points, k):
    """Closed-form Laplacian ``G'' + 2 G'/d`` of :func:`point_source_pressure`."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    out = np.zeros(points.shape[0], dtype=complex)
    for src in _as_sources(spec):
        d = np.linalg.norm(points - np.asarray(src.position, dtype=float), axis=1)
        g = src.amplitude * np.exp(1j * k * d) / (4 * np.pi * d)
        a = 1j * k - 1.0 / d
        g1 = a * g
        g2 = (a * a + 1.0 / d ** 2) * g
        out += g2 + 2.0 / d * g1
    return out


def point_source_field(spec, geometry, k):
    """Point-source pressure at the capsules of an open array."""
    if geometry.enclosure is not Enclosure.OPEN:
        raise EnclosureUnsupportedError("point sources are modelled for open arrays only")
    for src in _as_sources(spec):
        if np.linalg.norm(src.position) <= geometry.radius:
            raise GeometryError("point source must lie outside the array sphere")
    return point_source_pressure(spec, geometry.positions, k)


def broadband_field(scene_fn, geometry, wavenumbers, spectrum=None):
    """Stack single-frequency capsule fields ``scene_fn(geometry, k)`` over bins."""
    cols = [scene_fn(geometry, float(k)) for k in wavenumbers]
    return ComplexPressureField(geometry, wavenumbers, np.stack(cols, axis=1), spectrum)


# --------------------------------------------------------------------------
# image-source room simulation
# --------------------------------------------------------------------------

def fractional_delay_kernel(delay, taps=FD_TAPS):
    """Hann-windowed sinc centred on a fractional ``delay`` (samples).

    Returns ``(first_index, coefficients)``.
    """
    half = taps // 2
    centre = int(round(delay))
    n = np.arange(centre - half, centre + half + 1)
    x = n - delay
    window = 0.5 * (1.0 + np.cos(np.pi * x / (half + 1)))
    return centre - half, np.sinc(x) * window


def image_sources(spec):
    """Image positions and bounce counts up to ``spec.reflection_order``."""
    L = np.asarray(spec.dimensions, dtype=float)
    src = np.asarray(spec.source, dtype=float)
    order = spec.reflection_order
    axis_terms = []
    for ax in range(3):
        terms = []
        for l in range(-order, order + 1):
            for u in (0, 1):
                bounces = abs(l - u) + abs(l)
                if bounces <= order:
                    terms.append(((1 - 2 * u) * src[ax] + 2 * l * L[ax], bounces))
        axis_terms.append(terms)
    pos, bnc = [], []
    for (x, bx) in axis_terms[0]:
        for (y, by) in axis_terms[1]:
            for (z, bz) in axis_terms[2]:
                b = bx + by + bz
                if b <= order:
                    pos.append((x, y, z))
                    bnc.append(b)
    return np.array(pos), np.array(bnc)


def image_source_rir(spec, geometry):
    """Shoebox impulse responses at every capsule of an open array.

    Each image contributes ``beta**bounces / (4 pi d)`` at delay ``d/c*fs``
    through an 81-tap windowed-sinc fractional delay.
    """
    if geometry.enclosure is not Enclosure.OPEN:
        raise EnclosureUnsupportedError("image-source simulation assumes an open array")
    L = np.asarray(spec.dimensions, dtype=float)
    centre = np.asarray(spec.array_center, dtype=float)
    mics = centre + geometry.positions
    src = np.asarray(spec.source, dtype=float)
    for name, pts in (("source", src[None, :]), ("array", mics)):
        if np.any(pts <= 0) or np.any(pts >= L):
            raise GeometryError(f"{name} lies outside the room")
    if np.linalg.norm(src - centre) <= geometry.radius:
        raise GeometryError("source lies inside the array sphere")
    images, bounces = image_sources(spec)
    gain = spec.wall_reflection_coeff ** bounces
    keep = gain > 0
    images, gain = images[keep], gain[keep]
    T = spec.length
    out = np.zeros((geometry.n_capsules, T))
    for q, mic in enumerate(mics):
        d = np.linalg.norm(images - mic, axis=1)
        amp = gain / (4 * np.pi * d)
        for dist, a in zip(d, amp):
            start, h = fractional_delay_kernel(dist / spec.c * spec.fs)
            lo, hi = max(start, 0), min(start + h.size, T)
            if lo < hi:
                out[q, lo:hi] += a * h[lo - start:hi - start]
    return TimeSignalSet(spec.fs, out, geometry)


# --------------------------------------------------------------------------
# noise
# --------------------------------------------------------------------------

def add_noise(data, snr_db, seed=0):
    """Add white Gaussian noise at a per-channel SNR in dB.

    ``snr_db=None`` or ``inf`` returns ``data`` unchanged. Channel ``q``
    draws from a generator seeded with ``seed ^ q``.
    """
    if snr_db is None or math.isinf(snr_db):
        return data
    if isinstance(data, TimeSignalSet):
        x = data.channels
    else:
        x = data.pressures
    noisy = np.empty_like(x)
    for q in range(x.shape[0]):
        rng = np.random.default_rng(seed ^ q)
        power = np.mean(np.abs(x[q]) ** 2)
        sigma2 = power / 10 ** (snr_db / 10)
        if np.iscomplexobj(x):
            n = (rng.standard_normal(x.shape[1]) + 1j * rng.standard_normal(x.shape[1]))
            noisy[q] = x[q] + math.sqrt(sigma2 / 2) * n
        else:
            noisy[q] = x[q] + math.sqrt(sigma2) * rng.standard_normal(x.shape[1])
    if isinstance(data, TimeSignalSet):
        return TimeSignalSet(data.fs, noisy, data.geometry)
    return data.replace(pressures=noisy)

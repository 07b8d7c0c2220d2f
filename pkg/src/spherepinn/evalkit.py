"""Error metrics, Helmholtz residual probes and time/frequency transforms."""

import logging
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import ShapeMismatchError
from .sma_core import ArrayGeometry, ComplexPressureField, SpectrumInfo, reference_geometry

log = logging.getLogger(__name__)

#: NMSE values are clamped here so perfect reconstructions stay finite.
NMSE_FLOOR_DB = -300.0


@dataclass(frozen=True, eq=False)
class TimeSignalSet:
    """Real multichannel signals ``channels[q, t]`` sampled at ``fs`` Hz.

    ``geometry`` optionally ties channels to capsule directions.
    """

    fs: float
    channels: np.ndarray
    geometry: ArrayGeometry = None

    def __post_init__(self):
        x = np.asarray(self.channels, dtype=float)
        if x.ndim == 1:
            x = x[None, :]
        if x.ndim != 2:
            raise ShapeMismatchError("channels must be a (Q, T) matrix")
        if not self.fs > 0:
            raise ValueError("fs must be positive")
        if not np.all(np.isfinite(x)):
            raise ValueError("signals contain non-finite samples")
        if self.geometry is not None and self.geometry.n_capsules != x.shape[0]:
            raise ShapeMismatchError("geometry capsule count differs from channel count")
        object.__setattr__(self, "channels", x)
        object.__setattr__(self, "fs", float(self.fs))

    @property
    def n_channels(self):
        return self.channels.shape[0]

    @property
    def n_samples(self):
        return self.channels.shape[1]


@dataclass(frozen=True)
class NmseReport:
    overall_db: float
    per_channel_db: tuple
    per_frequency_db: tuple = None


def _to_db(ratio):
    ratio = np.asarray(ratio, dtype=float)
    with np.errstate(divide="ignore"):
        db = 10.0 * np.log10(ratio)
    return np.maximum(db, NMSE_FLOOR_DB)


def _nmse_rows(est, ref):
    # est/ref: (S, ...) ; rows are channels, norms over the remaining axes
    axes = tuple(range(1, est.ndim))
    num = np.sum(np.abs(est - ref) ** 2, axis=axes)
    den = np.sum(np.abs(ref) ** 2, axis=axes)
    keep = den > 0
    if not np.any(keep):
        raise ValueError("reference is identically zero")
    if not np.all(keep):
        log.warning("excluding %d all-zero reference channel(s) from NMSE",
                    int(np.sum(~keep)))
    ratios = np.full(num.shape, np.nan)
    ratios[keep] = num[keep] / den[keep]
    return ratios, keep


def nmse_time(estimate, reference):
    """Normalised mean squared error in dB between time-domain signal sets.

    ``10 log10( 1/S sum_s ||p_hat_s - p_s||^2 / ||p_s||^2 )``, with the
    mean taken inside the logarithm and the result clamped at -300 dB.
    """
    if estimate.channels.shape != reference.channels.shape:
        raise ShapeMismatchError(
            f"estimate {estimate.channels.shape} vs reference {reference.channels.shape}")
    if estimate.fs != reference.fs:
        raise ShapeMismatchError("sample rates differ")
    ratios, keep = _nmse_rows(estimate.channels, reference.channels)
    overall = float(_to_db(np.mean(ratios[keep])))
    per_ch = tuple(float(v) if k else float("nan") for v, k in zip(_to_db(np.nan_to_num(ratios)), keep))
    return NmseReport(overall, per_ch)


def nmse_freq(estimate, reference):
    """NMSE between complex capsule fields.

    ``overall_db`` and ``per_channel_db`` use each channel's norm over all
    bins; ``per_frequency_db`` applies the same mean-of-ratios formula
    over channels separately at each bin.
    """
    e, r = estimate.pressures, reference.pressures
    if e.shape != r.shape:
        raise ShapeMismatchError(f"estimate {e.shape} vs reference {r.shape}")
    ratios, keep = _nmse_rows(e, r)
    overall = float(_to_db(np.mean(ratios[keep])))
    per_ch = tuple(float(v) if k else float("nan") for v, k in zip(_to_db(np.nan_to_num(ratios)), keep))
    num = np.abs(e - r) ** 2
    den = np.abs(r) ** 2
    per_bin = []
    for j in range(r.shape[1]):
        ok = den[:, j] > 0
        per_bin.append(float(_to_db(np.mean(num[ok, j] / den[ok, j]))) if np.any(ok)
                       else float("nan"))
    return NmseReport(overall, per_ch, tuple(per_bin))


# --------------------------------------------------------------------------
# Helmholtz residual
# --------------------------------------------------------------------------

def fd_laplacian(field_fn, points, step):
    """7-point central finite-difference Laplacian of ``field_fn`` at points."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    center = np.asarray(field_fn(points))
    lap = -6.0 * center
    for axis in range(3):
        offset = np.zeros(3)
        offset[axis] = step
        lap = lap + np.asarray(field_fn(points + offset)) + np.asarray(field_fn(points - offset))
    return center, lap / step ** 2


def helmholtz_residual(field_fn, k, probes, step=1e-3, laplacian_fn=None):
    """Normalised Helmholtz residual ``rms|lap p + k^2 p| / rms|k^2 p|``.

    Parameters
    ----------
    field_fn : callable
        Maps ``(P, 3)`` Cartesian points to ``(P,)`` complex pressures.
    k : float
        Wavenumber in rad/m.
    probes : (P, 3) array_like
    step : float
        Finite-difference step in metres (ignored with ``laplacian_fn``).
    laplacian_fn : callable, optional
        Exact Laplacian of the field; replaces the finite-difference stencil.
    """
    probes = np.atleast_2d(np.asarray(probes, dtype=float))
    if laplacian_fn is None:
        if not step > 0:
            raise ValueError("step must be positive")
        p, lap = fd_laplacian(field_fn, probes, step)
    else:
        p = np.asarray(field_fn(probes))
        lap = np.asarray(laplacian_fn(probes))
    k2p = k * k * p
    num = math.sqrt(np.mean(np.abs(lap + k2p) ** 2))
    den = math.sqrt(np.mean(np.abs(k2p) ** 2))
    return num / den


# --------------------------------------------------------------------------
# time <-> frequency
# --------------------------------------------------------------------------

def time_to_freq(signals, band, c=343.0, geometry=None):
    """DFT every channel and keep the bins inside ``band = (f_min, f_max)`` Hz.

    The returned field records ``fs``, the signal length and the kept bin
    indices so :func:`freq_to_time` can invert it.
    """
    f_min, f_max = band
    fs = signals.fs
    if f_max > fs / 2 or f_min < 0 or f_min > f_max:
        raise ValueError(f"band ({f_min}, {f_max}) Hz out of range for fs={fs} (band exceeds Nyquist)")
    geometry = geometry or signals.geometry or reference_geometry()
    if geometry.n_capsules != signals.n_channels:
        raise ShapeMismatchError("geometry capsule count differs from channel count")
    T = signals.n_samples
    spec = np.fft.rfft(signals.channels, axis=1)
    freqs = np.arange(T // 2 + 1) * fs / T
    # slack so band edges sitting exactly on a bin keep it
    tol = 1e-9 * fs
    bins = np.flatnonzero((freqs >= f_min - tol) & (freqs <= f_max + tol))
    if bins.size == 0:
        raise ValueError("no DFT bin falls inside the band")
    k = 2 * np.pi * freqs[bins] / c
    return ComplexPressureField(geometry, k, spec[:, bins], SpectrumInfo(fs, T, bins))


def freq_to_time(field, fs=None, length=None):
    """Inverse of :func:`time_to_freq`; bins outside the field are zero.

    ``fs`` and ``length`` default to the field's spectrum info and must
    agree with it when given.
    """
    info = field.spectrum
    if info is None:
        raise ValueError("field carries no spectrum info (fs, length, bins)")
    fs = info.fs if fs is None else fs
    length = info.n_samples if length is None else length
    if fs != info.fs or length != info.n_samples:
        raise ShapeMismatchError("fs/length disagree with the field's spectrum info")
    spec = np.zeros((field.geometry.n_capsules, length // 2 + 1), dtype=complex)
    spec[:, info.bins] = field.pressures
    x = np.fft.irfft(spec, n=length, axis=1)
    return TimeSignalSet(fs, x, field.geometry)


def bin_frequencies(field, c=343.0):
    """Frequencies in Hz of a field's wavenumbers."""
    return field.wavenumbers * c / (2 * np.pi)

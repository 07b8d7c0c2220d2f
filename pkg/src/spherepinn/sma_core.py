"""Spherical microphone array geometry and spherical-harmonic processing.

Holds the array/field containers, SH encoding of capsule pressures, the
interior SH expansion, order bookkeeping, maximin capsule-subset selection
and the order-limited SH interpolation used as the reference upsampler.
"""

import itertools
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .exceptions import BesselNullError, GeometryError, OrderTooHighError, ShapeMismatchError
from .specfun import Enclosure, radial_terms, sh_matrix, sph_bessel_j

FOUR_PI = 4.0 * math.pi
BESSEL_NULL_TOL = 1e-12


@dataclass(frozen=True)
class Medium:
    """Propagation medium; ``c`` is the speed of sound in m/s."""

    c: float = 343.0

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError("speed of sound must be positive")


@dataclass(frozen=True)
class SphericalCoord:
    r: float
    theta: float
    phi: float

    def __post_init__(self):
        if self.r < 0:
            raise ValueError("radius must be non-negative")
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError("inclination must lie in [0, pi]")
        object.__setattr__(self, "phi", float(self.phi) % (2 * math.pi))

    def to_cartesian(self):
        return self.r * unit_vectors(self.theta, self.phi)[0]


def unit_vectors(theta, phi):
    """Cartesian unit vectors, shape ``(P, 3)``, for inclination/azimuth pairs."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    st = np.sin(theta)
    return np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta)], axis=-1)


def directions_from_cartesian(xyz):
    """Inverse of :func:`unit_vectors`; returns ``(r, theta, phi)`` arrays."""
    xyz = np.atleast_2d(np.asarray(xyz, dtype=float))
    r = np.linalg.norm(xyz, axis=1)
    safe = np.where(r > 0, r, 1.0)
    theta = np.arccos(np.clip(xyz[:, 2] / safe, -1.0, 1.0))
    phi = np.mod(np.arctan2(xyz[:, 1], xyz[:, 0]), 2 * np.pi)
    return r, theta, phi


@dataclass(frozen=True, eq=False)
class ArrayGeometry:
    """Capsule layout on a sphere.

    Parameters
    ----------
    radius : float
        Sphere radius in metres.
    theta, phi : (Q,) array_like
        Capsule inclinations and azimuths in radians.
    enclosure : Enclosure or str
        ``'open'`` or ``'rigid'``.
    weights : (Q,) array_like, optional
        Quadrature weights in steradians summing to 4*pi. Defaults to the
        uniform ``4*pi/Q``.
    """

    radius: float
    theta: np.ndarray
    phi: np.ndarray
    enclosure: Enclosure = Enclosure.RIGID
    weights: np.ndarray = None

    def __post_init__(self):
        theta = np.atleast_1d(np.asarray(self.theta, dtype=float)).copy()
        phi = np.mod(np.atleast_1d(np.asarray(self.phi, dtype=float)), 2 * np.pi)
        if theta.shape != phi.shape or theta.ndim != 1:
            raise GeometryError("theta and phi must be 1-D arrays of equal length")
        if theta.size < 1:
            raise GeometryError("geometry needs at least one capsule")
        if not self.radius > 0:
            raise GeometryError("radius must be positive")
        if np.any((theta < 0) | (theta > np.pi)) or not np.all(np.isfinite(theta + phi)):
            raise GeometryError("capsule inclination outside [0, pi]")
        q = theta.size
        if self.weights is None:
            weights = np.full(q, FOUR_PI / q)
        else:
            weights = np.atleast_1d(np.asarray(self.weights, dtype=float)).copy()
            if weights.shape != (q,):
                raise GeometryError("one weight per capsule required")
        if abs(weights.sum() - FOUR_PI) > 1e-9:
            raise GeometryError(f"weights sum to {weights.sum()!r}, expected 4*pi")
        if q > 1:
            ang = _angle_matrix(unit_vectors(theta, phi))
            np.fill_diagonal(ang, np.inf)
            if ang.min() < 1e-9:
                raise GeometryError("two capsules coincide")
        for arr in (theta, phi, weights):
            arr.setflags(write=False)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "enclosure", Enclosure.parse(self.enclosure))
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def n_capsules(self):
        return self.theta.size

    @property
    def directions(self):
        """Unit vectors of the capsules, shape ``(Q, 3)``."""
        return unit_vectors(self.theta, self.phi)

    @property
    def positions(self):
        """Capsule positions relative to the array centre in metres."""
        return self.radius * self.directions

    def take(self, indices):
        """Sub-geometry with weights renormalised to 4*pi."""
        idx = np.asarray(indices, dtype=int)
        w = self.weights[idx]
        return ArrayGeometry(self.radius, self.theta[idx], self.phi[idx],
                             self.enclosure, w * (FOUR_PI / w.sum()))

    def with_enclosure(self, enclosure):
        return ArrayGeometry(self.radius, self.theta, self.phi, enclosure, self.weights)

    def __eq__(self, other):
        if not isinstance(other, ArrayGeometry):
            return NotImplemented
        return (self.radius == other.radius and self.enclosure is other.enclosure
                and np.array_equal(self.theta, other.theta)
                and np.array_equal(self.phi, other.phi)
                and np.array_equal(self.weights, other.weights))


@dataclass(frozen=True, eq=False)
class SpectrumInfo:
    """Bookkeeping that lets a frequency-domain field be inverted to time."""

    fs: float
    n_samples: int
    bins: np.ndarray


@dataclass(frozen=True, eq=False)
class ComplexPressureField:
    """Complex capsule pressures ``(Q, K)`` over K wavenumbers (rad/m)."""

    geometry: ArrayGeometry
    wavenumbers: np.ndarray
    pressures: np.ndarray
    spectrum: SpectrumInfo = None

    def __post_init__(self):
        k = np.atleast_1d(np.asarray(self.wavenumbers, dtype=float))
        p = np.asarray(self.pressures, dtype=complex)
        if p.ndim == 1:
            p = p[:, None]
        if p.shape != (self.geometry.n_capsules, k.size):
            raise ShapeMismatchError(
                f"pressures {p.shape} do not match Q={self.geometry.n_capsules}, K={k.size}")
        if k.size > 1 and np.any(np.diff(k) <= 0):
            raise ValueError("wavenumbers must be strictly increasing")
        if not (np.all(np.isfinite(k)) and np.all(np.isfinite(p))):
            raise ValueError("field contains non-finite values")
        object.__setattr__(self, "wavenumbers", k)
        object.__setattr__(self, "pressures", p)

    @property
    def n_bins(self):
        return self.wavenumbers.size

    def replace(self, **changes):
        kw = dict(geometry=self.geometry, wavenumbers=self.wavenumbers,
                  pressures=self.pressures, spectrum=self.spectrum)
        kw.update(changes)
        return ComplexPressureField(**kw)


@dataclass(frozen=True, eq=False)
class ShCoefficients:
    """Truncated SH coefficients ``C_nm`` at one wavenumber.

    ``coeffs[n**2 + n + m]`` holds ``C_nm``. ``enclosure`` records which
    radial term was divided out during encoding.
    """

    order: int
    k: float
    coeffs: np.ndarray
    enclosure: Enclosure = Enclosure.OPEN

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex).ravel()
        if c.size != (self.order + 1) ** 2:
            raise ShapeMismatchError("coefficient count must be (order+1)**2")
        if not np.all(np.isfinite(c)):
            raise ValueError("non-finite SH coefficients")
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "enclosure", Enclosure.parse(self.enclosure))


# --------------------------------------------------------------------------
# order logic
# --------------------------------------------------------------------------

def max_order(q_count):
    """Highest SH order resolvable from ``q_count`` points, ``floor(sqrt(Q)) - 1``."""
    if q_count < 1:
        raise ValueError("q_count must be >= 1")
    return math.isqrt(int(q_count)) - 1


def aliasing_free_order(k, r):
    """Smallest order N with ``N >= k*r``."""
    if k < 0 or not r > 0:
        raise ValueError("need k >= 0 and r > 0")
    # guard against k*r landing a few ulps above an integer
    return int(math.ceil(k * r - 1e-12))


# --------------------------------------------------------------------------
# encoding / expansion
# --------------------------------------------------------------------------

def _encode_weights(geometry, weighting):
    if weighting == "quadrature":
        return geometry.weights
    if weighting == "uniform":
        return np.ones(geometry.n_capsules)
    raise ValueError(f"unknown weighting {weighting!r}")


def sh_encode(field, bin, order=None, weighting="quadrature"):
    """Encode one frequency bin of a capsule field into SH coefficients.

    ``C_nm = 1/b_n(kR) * sum_q w_q p(r_q, k) conj(Y_nm(r_q))``.

    Parameters
    ----------
    field : ComplexPressureField
    bin : int
        Frequency index.
    order : int, optional
        Truncation order; defaults to :func:`max_order` of the capsule count.
    weighting : {'quadrature', 'uniform'}
        ``'uniform'`` uses ``w_q = 1`` (the unweighted sum).

    Raises
    ------
    OrderTooHighError
        If ``(order+1)**2`` exceeds the capsule count.
    BesselNullError
        If ``|b_n(kR)| < 1e-12`` for some ``n <= order``.
    """
    geom = field.geometry
    q = geom.n_capsules
    if order is None:
        order = max_order(q)
    if (order + 1) ** 2 > q:
        raise OrderTooHighError(f"order {order} needs {(order + 1) ** 2} capsules, have {q}")
    k = float(field.wavenumbers[bin])
    b = radial_terms(order, k * geom.radius, geom.enclosure)
    if np.any(np.abs(b) < BESSEL_NULL_TOL):
        bad = int(np.flatnonzero(np.abs(b) < BESSEL_NULL_TOL)[0])
        raise BesselNullError(f"b_{bad}(kR={k * geom.radius:.6g}) vanishes")
    Y = sh_matrix(order, geom.theta, geom.phi)
    w = _encode_weights(geom, weighting)
    proj = Y.conj().T @ (w * field.pressures[:, bin])
    n_of = np.repeat(np.arange(order + 1), 2 * np.arange(order + 1) + 1)
    return ShCoefficients(order, k, proj / b[n_of], geom.enclosure)


def sh_expand(coeffs, r, theta, phi, radial="free"):
    """Evaluate the SH expansion at points ``(r, theta, phi)``.

    ``radial='free'`` uses ``j_n(k r)``; ``radial='match'`` uses the
    radial term of the coefficients' enclosure, ``b_n(k r)``, which is the
    consistent choice on the surface of a rigid sphere.

    Returns a complex scalar for scalar input, otherwise an array.
    """
    scalar = np.ndim(r) == 0 and np.ndim(theta) == 0 and np.ndim(phi) == 0
    r, theta, phi = np.broadcast_arrays(np.atleast_1d(r), np.atleast_1d(theta),
                                        np.atleast_1d(phi))
    if np.any(r <= 0):
        raise ValueError("expansion radius must be positive")
    N = coeffs.order
    Y = sh_matrix(N, theta.ravel(), phi.ravel())
    kr = coeffs.k * r.ravel()
    if radial == "free":
        rad = np.stack([np.asarray(sph_bessel_j(n, kr), dtype=complex) for n in range(N + 1)])
    elif radial == "match":
        rad = radial_terms(N, kr, coeffs.enclosure)
    else:
        raise ValueError(f"unknown radial mode {radial!r}")
    n_of = np.repeat(np.arange(N + 1), 2 * np.arange(N + 1) + 1)
    val = np.sum(Y * rad[n_of].T * coeffs.coeffs, axis=1).reshape(r.shape)
    return complex(val[0]) if scalar else val


def interpolation_matrix(geometry, theta, phi, order=None, solver="quadrature"):
    """Linear map from capsule pressures to pressures at target directions.

    For the quadrature solver this is
    ``T[s, q] = sum_nm Y_nm(s) w_q conj(Y_nm(q))``; encoding with ``1/b_n`` and
    re-expanding with ``b_n`` on the same sphere cancel, so no radial term
    appears. ``solver='lstsq'`` replaces the weighted adjoint by the
    pseudo-inverse of the capsule SH matrix.
    """
    q = geometry.n_capsules
    if order is None:
        order = max_order(q)
    elif (order + 1) ** 2 > q:
        raise OrderTooHighError(f"order {order} needs {(order + 1) ** 2} capsules, have {q}")
    Yq = sh_matrix(order, geometry.theta, geometry.phi)
    Ys = sh_matrix(order, theta, phi)
    if solver == "quadrature":
        return Ys @ (Yq.conj().T * geometry.weights)
    if solver == "lstsq":
        return Ys @ np.linalg.pinv(Yq)
    raise ValueError(f"unknown solver {solver!r}")


def baseline_upsample(field, theta, phi, order=None, solver="quadrature"):
    """Order-limited SH interpolation of a capsule field to new directions.

    Parameters
    ----------
    field : ComplexPressureField
        Observed capsules.
    theta, phi : (S,) array_like
        Target directions on the same sphere.
    order : int, optional
        Defaults to ``max_order(Q)``.
    solver : {'quadrature', 'lstsq'}

    Returns
    -------
    ComplexPressureField
        Estimates at the targets for every bin; uniform weights.
    """
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    T = interpolation_matrix(field.geometry, theta, phi, order, solver)
    g = field.geometry
    target_geom = ArrayGeometry(g.radius, theta, phi, g.enclosure)
    return ComplexPressureField(target_geom, field.wavenumbers, T @ field.pressures,
                                field.spectrum)


# --------------------------------------------------------------------------
# subset selection
# --------------------------------------------------------------------------

def _angle_matrix(u):
    return np.arccos(np.clip(u @ u.T, -1.0, 1.0))


def _quantize(a):
    # ties within 1e-9 rad resolve to the lowest index
    return np.round(a, 9)


def subset_select(geometry, q):
    """Pick ``q`` capsules that maximise the minimum pairwise angle.

    Exhaustive for ``q <= 4``; otherwise greedy farthest-point growth from
    the best pair. Ties go to the lexicographically smallest indices.

    Returns
    -------
    (ArrayGeometry, ndarray)
        Sub-geometry (weights renormalised to 4*pi) and sorted indices.
    """
    Q = geometry.n_capsules
    if not 1 <= q <= Q:
        raise ValueError(f"subset size {q} outside [1, {Q}]")
    if q == Q:
        idx = np.arange(Q)
        return geometry.take(idx), idx
    ang = _quantize(_angle_matrix(geometry.directions))
    if q == 1:
        idx = np.array([0])
    elif q <= 4:
        combos = np.array(list(itertools.combinations(range(Q), q)))
        pairs = list(itertools.combinations(range(q), 2))
        score = np.min(np.stack([ang[combos[:, a], combos[:, b]] for a, b in pairs]), axis=0)
        idx = combos[int(np.argmax(score))]
    else:
        iu, ju = np.triu_indices(Q, 1)
        best = int(np.argmax(ang[iu, ju]))
        chosen = [int(iu[best]), int(ju[best])]
        mind = np.minimum(ang[chosen[0]], ang[chosen[1]])
        while len(chosen) < q:
            cand = mind.copy()
            cand[chosen] = -np.inf
            nxt = int(np.argmax(cand))
            chosen.append(nxt)
            mind = np.minimum(mind, ang[nxt])
        idx = np.array(chosen)
    idx = np.sort(idx)
    return geometry.take(idx), idx


def min_pairwise_angle(geometry):
    """Smallest great-circle angle between any two capsules (radians)."""
    if geometry.n_capsules < 2:
        return math.pi
    ang = _angle_matrix(geometry.directions)
    np.fill_diagonal(ang, np.inf)
    return float(ang.min())


# --------------------------------------------------------------------------
# reference layout and geometry files
# --------------------------------------------------------------------------

def _pentakis_directions():
    g = (1 + math.sqrt(5)) / 2
    ico = []
    for a in (-1.0, 1.0):
        for b in (-g, g):
            ico += [(0.0, a, b), (a, b, 0.0), (b, 0.0, a)]
    ico = np.array(ico)
    ico /= np.linalg.norm(ico, axis=1, keepdims=True)
    # dual dodecahedron: normalised centroids of the 20 icosahedron faces
    dots = ico @ ico.T
    faces = [c for c in itertools.combinations(range(12), 3)
             if all(0.4 < dots[i, j] < 0.99 for i, j in itertools.combinations(c, 2))]
    dod = np.array([ico[list(c)].sum(axis=0) for c in faces])
    dod /= np.linalg.norm(dod, axis=1, keepdims=True)
    return np.vstack([ico, dod])


def _design_weights(theta, phi, degree):
    # weights integrating every SH up to `degree` exactly
    Y = sh_matrix(degree, theta, phi)
    A = np.vstack([Y.T.real, Y.T.imag])
    rhs = np.zeros(A.shape[0])
    rhs[0] = math.sqrt(FOUR_PI)
    w = np.linalg.lstsq(A, rhs, rcond=None)[0]
    return w * (FOUR_PI / w.sum())


def reference_geometry(enclosure=Enclosure.RIGID, radius=0.042):
    """32-capsule near-uniform layout (pentakis dodecahedron vertices).

    The 12 icosahedron and 20 dual-dodecahedron directions carry two
    distinct weights that integrate spherical harmonics through degree 9
    exactly, so order-4 encoding is an exact projection.
    """
    _, theta, phi = directions_from_cartesian(_pentakis_directions())
    w = _design_weights(theta, phi, 9)
    return ArrayGeometry(radius, theta, phi, enclosure, w)


def fibonacci_directions(count):
    """Near-uniform spiral directions ``(theta, phi)`` on the unit sphere."""
    i = np.arange(count) + 0.5
    theta = np.arccos(1.0 - 2.0 * i / count)
    phi = np.mod(math.pi * (1.0 + math.sqrt(5.0)) * i, 2 * math.pi)
    return theta, phi


def read_geometry(path):
    """Parse a geometry file.

    Format: a header line ``radius_m enclosure`` followed by one line per
    capsule, ``theta_rad phi_rad weight_sr``. Blank lines and ``#``
    comments are ignored.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise GeometryError(f"cannot read geometry file {path}: {exc}") from exc
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise GeometryError(f"{path}: empty geometry file")
    head = lines[0].split()
    if len(head) != 2:
        raise GeometryError(f"{path}: header must be 'radius_m enclosure'")
    try:
        radius = float(head[0])
        enclosure = Enclosure.parse(head[1])
    except ValueError as exc:
        raise GeometryError(f"{path}: bad header: {exc}") from exc
    rows = []
    for lineno, ln in enumerate(lines[1:], start=2):
        parts = ln.split()
        if len(parts) != 3:
            raise GeometryError(f"{path}: capsule line {lineno} needs 3 fields")
        try:
            rows.append([float(v) for v in parts])
        except ValueError as exc:
            raise GeometryError(f"{path}: capsule line {lineno}: {exc}") from exc
    if not rows:
        raise GeometryError(f"{path}: no capsules")
    arr = np.array(rows)
    return ArrayGeometry(radius, arr[:, 0], arr[:, 1], enclosure, arr[:, 2])


def write_geometry(geometry, path):
    lines = [f"{geometry.radius!r} {geometry.enclosure.value}"]
    for t, p, w in zip(geometry.theta, geometry.phi, geometry.weights):
        lines.append(f"{float(t)!r} {float(p)!r} {float(w)!r}")
    Path(path).write_text("\n".join(lines) + "\n")

"""Field and signal files.

Field file
    UTF-8 JSON document::

        {"format": "spherepinn-field", "version": 1,
         "geometry": {"radius": .., "enclosure": .., "theta": [..], "phi": [..], "weights": [..]},
         "wavenumbers": [..],
         "spectrum": {"fs": .., "n_samples": .., "bins": [..]} or null,
         "real": [[..], ..], "imag": [[..], ..]}

    ``real``/``imag`` are row-major ``(Q, K)`` matrices. Floats are
    written with ``repr`` precision, so a read/write cycle is lossless.

Signal files
    A JSON sidecar ``name.json`` holding ``fs``, ``channels``, ``length``,
    the data file name and an optional geometry block, next to the raw
    samples ``name.f64``: little-endian float64, channel-major.
"""

import json
from pathlib import Path

import numpy as np

from .evalkit import TimeSignalSet
from .exceptions import FileFormatError
from .sma_core import ArrayGeometry, ComplexPressureField, SpectrumInfo

FIELD_FORMAT = "spherepinn-field"
SIGNAL_FORMAT = "spherepinn-signals"
VERSION = 1


def geometry_to_dict(geometry):
    return {
        "radius": geometry.radius,
        "enclosure": geometry.enclosure.value,
        "theta": geometry.theta.tolist(),
        "phi": geometry.phi.tolist(),
        "weights": geometry.weights.tolist(),
    }


def geometry_from_dict(d):
    return ArrayGeometry(d["radius"], d["theta"], d["phi"], d["enclosure"], d["weights"])


def _dump(doc, path):
    Path(path).write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")


def _load(path, fmt):
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise FileFormatError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{path}: not a JSON document: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("format") != fmt:
        raise FileFormatError(f"{path}: expected a {fmt} document")
    if doc.get("version") != VERSION:
        raise FileFormatError(f"{path}: unsupported version {doc.get('version')!r}")
    return doc


def write_field(field, path):
    """Write a :class:`ComplexPressureField` as a field file."""
    spec = field.spectrum
    doc = {
        "format": FIELD_FORMAT,
        "version": VERSION,
        "geometry": geometry_to_dict(field.geometry),
        "wavenumbers": field.wavenumbers.tolist(),
        "spectrum": None if spec is None else {
            "fs": spec.fs, "n_samples": int(spec.n_samples), "bins": [int(b) for b in spec.bins]},
        "real": field.pressures.real.tolist(),
        "imag": field.pressures.imag.tolist(),
    }
    _dump(doc, path)


def read_field(path):
    """Read a field file written by :func:`write_field`."""
    doc = _load(path, FIELD_FORMAT)
    try:
        geom = geometry_from_dict(doc["geometry"])
        spec = doc["spectrum"]
        if spec is not None:
            spec = SpectrumInfo(float(spec["fs"]), int(spec["n_samples"]), np.asarray(spec["bins"], dtype=int))
        p = np.asarray(doc["real"], dtype=float) + 1j * np.asarray(doc["imag"], dtype=float)
        return ComplexPressureField(geom, doc["wavenumbers"], p, spec)
    except (KeyError, TypeError) as exc:
        raise FileFormatError(f"{path}: malformed field file: {exc!r}") from exc


def _data_path(sidecar):
    return Path(sidecar).with_suffix(".f64")


def write_signals(signals, path):
    """Write raw samples plus sidecar; ``path`` names the sidecar."""
    path = Path(path)
    data = _data_path(path)
    doc = {
        "format": SIGNAL_FORMAT,
        "version": VERSION,
        "fs": signals.fs,
        "channels": signals.n_channels,
        "length": signals.n_samples,
        "dtype": "<f8",
        "data": data.name,
        "geometry": None if signals.geometry is None else geometry_to_dict(signals.geometry),
    }
    data.write_bytes(np.ascontiguousarray(signals.channels, dtype="<f8").tobytes())
    _dump(doc, path)


def read_signals(path):
    """Read a :class:`TimeSignalSet` from its sidecar path."""
    path = Path(path)
    doc = _load(path, SIGNAL_FORMAT)
    try:
        q, t = int(doc["channels"]), int(doc["length"])
        data = path.parent / doc["data"]
        geom = doc.get("geometry")
        geom = None if geom is None else geometry_from_dict(geom)
        fs = float(doc["fs"])
    except (KeyError, TypeError, ValueError) as exc:
        raise FileFormatError(f"{path}: malformed sidecar: {exc!r}") from exc
    if doc.get("dtype", "<f8") != "<f8":
        raise FileFormatError(f"{path}: only little-endian float64 samples are supported")
    try:
        raw = data.read_bytes()
    except OSError as exc:
        raise FileFormatError(f"cannot read sample file {data}: {exc}") from exc
    if len(raw) != 8 * q * t:
        raise FileFormatError(f"{data}: expected {8 * q * t} bytes, found {len(raw)}")
    x = np.frombuffer(raw, dtype="<f8").reshape(q, t).astype(float)
    return TimeSignalSet(fs, x, geom)

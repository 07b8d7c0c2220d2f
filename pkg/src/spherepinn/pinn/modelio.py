"""Binary model files.

Layout (all integers little-endian)::

    offset  size  content
    0       8     magic b"SPHPINN\\0"
    8       4     uint32 format version (1)
    12      4     uint32 header length H in bytes
    16      H     UTF-8 JSON header
    16+H    8*P   float64 little-endian parameters

The header records ``radius``, ``coord_scale``, ``pressure_scale``,
``wavenumbers``, the training ``config`` and, per network (``real`` then
``imag``), a list of layers ``{"out", "in", "omega0", "rowdy_width"}``
(``omega0`` is null for the linear read-out). Parameters follow in the
same order: for each network and layer, the weights row-major, the biases
and, for activated layers, Rowdy ``n`` then ``alpha``. ``n_params``
in the header must equal P.
"""

import json
import struct
from pathlib import Path

import numpy as np

from ..exceptions import FileFormatError
from .activation import RowdyParams
from .network import Layer, MlpParams, PinnModel

MAGIC = b"SPHPINN\0"
VERSION = 1


def _layer_specs(mlp):
    out = []
    for layer in mlp.layers:
        act = layer.activation
        out.append({
            "out": int(layer.weights.shape[0]),
            "in": int(layer.weights.shape[1]),
            "omega0": None if act is None else float(act.omega0),
            "rowdy_width": 0 if act is None else int(act.width),
        })
    return out


def model_to_bytes(model):
    params = np.concatenate([np.ravel(a) for a in model.arrays()]).astype("<f8")
    header = {
        "radius": model.radius,
        "coord_scale": model.coord_scale,
        "pressure_scale": model.pressure_scale,
        "wavenumbers": model.wavenumbers.tolist(),
        "config": model.config,
        "networks": {"real": _layer_specs(model.real_net), "imag": _layer_specs(model.imag_net)},
        "n_params": int(params.size),
    }
    head = json.dumps(header, sort_keys=True).encode("utf-8")
    return MAGIC + struct.pack("<II", VERSION, len(head)) + head + params.tobytes()


def save_model(model, path):
    """Write ``model`` to ``path`` in the versioned binary format."""
    Path(path).write_bytes(model_to_bytes(model))


def _take(flat, pos, count):
    if pos + count > flat.size:
        raise FileFormatError("parameter block shorter than the layer layout")
    return flat[pos:pos + count].copy(), pos + count


def _build(specs, flat, pos):
    layers = []
    for s in specs:
        w, pos = _take(flat, pos, s["out"] * s["in"])
        b, pos = _take(flat, pos, s["out"])
        act = None
        if s["omega0"] is not None:
            n, pos = _take(flat, pos, s["rowdy_width"])
            a, pos = _take(flat, pos, s["rowdy_width"])
            act = RowdyParams(s["omega0"], n, a)
        layers.append(Layer(w.reshape(s["out"], s["in"]), b, act))
    return MlpParams(layers), pos


def model_from_bytes(blob):
    if len(blob) < 16 or blob[:8] != MAGIC:
        raise FileFormatError("not a model file (bad magic)")
    version, hlen = struct.unpack("<II", blob[8:16])
    if version != VERSION:
        raise FileFormatError(f"unsupported model file version {version}")
    try:
        header = json.loads(blob[16:16 + hlen].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FileFormatError(f"corrupt model header: {exc}") from exc
    body = blob[16 + hlen:]
    if len(body) % 8:
        raise FileFormatError("parameter block is not a whole number of float64 values")
    flat = np.frombuffer(body, dtype="<f8").astype(float)
    try:
        if flat.size != header["n_params"]:
            raise FileFormatError(f"expected {header['n_params']} parameters, found {flat.size}")
        real, pos = _build(header["networks"]["real"], flat, 0)
        imag, pos = _build(header["networks"]["imag"], flat, pos)
        if pos != flat.size:
            raise FileFormatError("trailing parameters after the layer layout")
        return PinnModel(real, imag, header["wavenumbers"], header["radius"], header["coord_scale"],
                         header["pressure_scale"], header.get("config") or {})
    except (KeyError, TypeError) as exc:
        raise FileFormatError(f"malformed model header: {exc!r}") from exc


def load_model(path):
    """Read a model written by :func:`save_model`."""
    try:
        blob = Path(path).read_bytes()
    except OSError as exc:
        raise FileFormatError(f"cannot read model file {path}: {exc}") from exc
    return model_from_bytes(blob)

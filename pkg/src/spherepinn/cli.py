"""Command-line experiment driver.

::

    spherepinn [--config PATH] [--seed N] [--out DIR] [--jobs N] COMMAND ...

Commands: ``synth``, ``run``, ``eval``, ``subset``, ``train``,
``predict``. Exit codes: 0 ok, 2 configuration, 3 synthesis, 4 data
mismatch, 5 training abort. ``SPHEREPINN_LOG`` (error, info, debug) sets
the log level.
"""

import argparse
import csv
import dataclasses
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import fileio
from .evalkit import TimeSignalSet, freq_to_time, nmse_freq, nmse_time, time_to_freq
from .exceptions import FileFormatError, NonFiniteLossError, ShapeMismatchError, SpherePinnError
from .pinn import (ObservationSet, TrainConfig, load_model, model_to_bytes, predict_geometry, save_model,
                   train)
from .sma_core import baseline_upsample, read_geometry, reference_geometry, subset_select
from .specfun import Enclosure
from .synth import (PlaneWaveSpec, PointSourceSpec, ShoeboxSpec, add_noise, image_source_rir,
                    plane_wave_field, point_source_field)

log = logging.getLogger("spherepinn")

EXIT_OK, EXIT_CONFIG, EXIT_SYNTH, EXIT_DATA, EXIT_TRAIN = 0, 2, 3, 4, 5
REPORT_VERSION = 1
LOG_LEVELS = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}

# method name -> (training overrides, label of the matching ablation row)
METHODS = {
    "baseline": (None, "SH baseline"),
    "pinn": ({}, "Proposed"),
    "pinn_no_pde": ({"lambda_pde": 0.0}, "Rowdy, no PDE"),
    "pinn_plain_siren": ({"rowdy_W": 0, "lambda_pde": 0.0}, "SIREN"),
    "pinn_siren_pde": ({"rowdy_W": 0}, "SIREN + PDE"),
}
DEFAULT_METHODS = ("baseline", "pinn", "pinn_no_pde", "pinn_plain_siren")

DEFAULT_SCENE = {
    "type": "shoebox",
    "dimensions": [10.3, 5.8, 3.1],
    "source": [3.0, 2.0, 1.5],
    "array_center": [4.5, 3.1, 1.4],
    "reflection_order": 2,
    "wall_reflection_coeff": 0.8,
    "fs": 16000.0,
    "length": 1024,
}


class CliError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


# --------------------------------------------------------------------------
# configuration
# --------------------------------------------------------------------------

@dataclass
class ExperimentConfig:
    geometry: str = None
    enclosure: str = "open"
    scene: dict = field(default_factory=lambda: dict(DEFAULT_SCENE))
    band: tuple = (100.0, 8000.0)
    c: float = 343.0
    subset_sizes: tuple = (4, 9, 16, 25)
    methods: tuple = DEFAULT_METHODS
    train: dict = field(default_factory=dict)
    seed: int = 0
    snr_db: float = None
    waveform_channel: int = None
    baseline_solver: str = "lstsq"
    out: str = "results"

    @classmethod
    def from_dict(cls, data):
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise CliError(EXIT_CONFIG, f"unknown config keys: {sorted(unknown)}")
        cfg = cls(**data)
        cfg.scene = {**DEFAULT_SCENE, **cfg.scene} if cfg.scene.get("type", "shoebox") == "shoebox" \
            else dict(cfg.scene)
        return cfg

    def train_config(self, **overrides):
        try:
            base = TrainConfig.from_dict({**self.train, "seed": self.seed})
            return base.replace(**overrides)
        except (TypeError, ValueError) as exc:
            raise CliError(EXIT_CONFIG, f"bad training options: {exc}") from exc

    def to_dict(self):
        d = dataclasses.asdict(self)
        d["band"] = list(self.band)
        d["subset_sizes"] = list(self.subset_sizes)
        d["methods"] = list(self.methods)
        del d["out"]  # where results go is not part of the experiment
        return d


def load_config(args):
    data = {}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except OSError as exc:
            raise CliError(EXIT_CONFIG, f"cannot read config {args.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise CliError(EXIT_CONFIG, f"config {args.config} is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise CliError(EXIT_CONFIG, "config must be a JSON object")
    cfg = ExperimentConfig.from_dict(data)
    if args.seed is not None:
        cfg.seed = args.seed
    if args.out is not None:
        cfg.out = args.out
    return cfg


def _complex(v):
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ValueError("complex amplitude must be a number or [re, im]")
        return complex(float(v[0]), float(v[1]))
    return complex(v)


def scene_fs_length(scene):
    return float(scene.get("fs", 16000.0)), int(scene.get("length", 1024))


def build_scene(scene, c=343.0):
    kind = scene.get("type")
    keys = set(scene) - {"type"}
    try:
        if kind == "shoebox":
            fields = {"c": c, **{k: v for k, v in scene.items() if k != "type"}}
            return ShoeboxSpec(**{k: (tuple(v) if isinstance(v, list) else v) for k, v in fields.items()})
        if kind == "plane_wave":
            extra = keys - {"theta", "phi", "amplitude", "fs", "length"}
            if extra:
                raise ValueError(f"unknown plane_wave keys {sorted(extra)}")
            return PlaneWaveSpec(float(scene["theta"]), float(scene["phi"]),
                                 _complex(scene.get("amplitude", 1.0)))
        if kind == "point_sources":
            extra = keys - {"sources", "fs", "length"}
            if extra:
                raise ValueError(f"unknown point_sources keys {sorted(extra)}")
            return [PointSourceSpec(tuple(float(x) for x in s["position"]), _complex(s.get("amplitude", 1.0)))
                    for s in scene["sources"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError(EXIT_CONFIG, f"bad scene description: {exc!r}") from exc
    raise CliError(EXIT_CONFIG, f"unknown scene type {kind!r} (shoebox, plane_wave, point_sources)")


def resolve(cfg):
    """Validate everything that can be checked before any file is written."""
    if cfg.geometry:
        try:
            geom = read_geometry(cfg.geometry)
        except SpherePinnError as exc:
            raise CliError(EXIT_CONFIG, str(exc)) from exc
    else:
        try:
            geom = reference_geometry(Enclosure.parse(cfg.enclosure))
        except ValueError as exc:
            raise CliError(EXIT_CONFIG, str(exc)) from exc
    scene = build_scene(cfg.scene, cfg.c)
    fs, length = scene_fs_length(cfg.scene)
    try:
        f_min, f_max = (float(b) for b in cfg.band)
    except (TypeError, ValueError) as exc:
        raise CliError(EXIT_CONFIG, f"band must be [f_min, f_max]: {exc}") from exc
    if f_max > fs / 2:
        raise CliError(EXIT_CONFIG, f"band ({f_min:g}, {f_max:g}) Hz: band exceeds Nyquist ({fs / 2:g} Hz)")
    if not 0 <= f_min <= f_max:
        raise CliError(EXIT_CONFIG, f"band ({f_min:g}, {f_max:g}) Hz is not an ordered non-negative range")
    sizes = [int(q) for q in cfg.subset_sizes]
    if any(not 1 <= q <= geom.n_capsules for q in sizes):
        raise CliError(EXIT_CONFIG, f"subset sizes must lie in [1, {geom.n_capsules}]")
    unknown = [m for m in cfg.methods if m not in METHODS]
    if unknown:
        raise CliError(EXIT_CONFIG, f"unknown methods {unknown}; choose from {sorted(METHODS)}")
    for m in cfg.methods:
        if METHODS[m][0] is not None:
            cfg.train_config(**METHODS[m][0])
    if cfg.baseline_solver not in ("quadrature", "lstsq"):
        raise CliError(EXIT_CONFIG, "baseline_solver must be 'quadrature' or 'lstsq'")
    if cfg.waveform_channel is not None and not 0 <= cfg.waveform_channel < geom.n_capsules:
        raise CliError(EXIT_CONFIG, "waveform_channel outside the capsule range")
    return geom, scene, (f_min, f_max), sizes


# --------------------------------------------------------------------------
# synthesis
# --------------------------------------------------------------------------

def synthesize(cfg, geom, scene, band):
    """Reference capsule field (in-band) and the matching time signals."""
    fs, length = scene_fs_length(cfg.scene)
    try:
        if isinstance(scene, ShoeboxSpec):
            signals = image_source_rir(scene, geom)
        else:
            empty = TimeSignalSet(fs, np.zeros((geom.n_capsules, length)), geom)
            grid = time_to_freq(empty, band, cfg.c, geom)
            if isinstance(scene, PlaneWaveSpec):
                cols = [plane_wave_field(scene, geom, k) for k in grid.wavenumbers]
            else:
                cols = [point_source_field(scene, geom, k) for k in grid.wavenumbers]
            signals = freq_to_time(grid.replace(pressures=np.stack(cols, axis=1)))
        signals = add_noise(signals, cfg.snr_db, cfg.seed)
        return time_to_freq(signals, band, cfg.c, geom), signals
    except (SpherePinnError, ValueError) as exc:
        raise CliError(EXIT_SYNTH, f"synthesis failed: {exc}") from exc


# --------------------------------------------------------------------------
# report writing
# --------------------------------------------------------------------------

def _csv(path, kind, header, rows, notes=()):
    """CSV with a versioned ``#`` preamble; ``rows`` are already formatted."""
    with open(path, "w", newline="") as fh:
        fh.write(f"# format: spherepinn-{kind}\n# version: {REPORT_VERSION}\n")
        for note in notes:
            fh.write(f"# note: {note}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _f(x, digits=17):
    return format(float(x), f".{digits}g")


def _db(x):
    return format(float(x), ".4f")


# --------------------------------------------------------------------------
# one subset size
# --------------------------------------------------------------------------

def _waveform_channel(cfg, geom, sizes):
    if cfg.waveform_channel is not None:
        return cfg.waveform_channel
    seen = set()
    for q in sizes:
        if q < geom.n_capsules:
            seen.update(int(i) for i in subset_select(geom, q)[1])
    unseen = [i for i in range(geom.n_capsules) if i not in seen]
    return unseen[0] if unseen else 0


def run_subset(q, ref, cfg, channel):
    """Run every method for one subset size; returns plain picklable results."""
    geom = ref.geometry
    sub, idx = subset_select(geom, q)
    obs_field = ref.replace(geometry=sub, pressures=ref.pressures[idx])
    ref_t = freq_to_time(ref)
    out = {"q": q, "indices": [int(i) for i in idx], "methods": {}}
    for name in cfg.methods:
        overrides, _ = METHODS[name]
        trace = model_blob = None
        if overrides is None:
            est = baseline_upsample(obs_field, geom.theta, geom.phi, solver=cfg.baseline_solver)
            est = est.replace(geometry=geom)
        else:
            tcfg = cfg.train_config(**overrides)
            log.info("Q=%d %s: training %d iterations", q, name, tcfg.iterations)
            model, trace = train(ObservationSet.from_field(obs_field), tcfg)
            model.config = {**tcfg.to_dict(), "enclosure": geom.enclosure.value}
            est = predict_geometry(model, geom, ref.spectrum)
            model_blob = model_to_bytes(model)
        est_t = freq_to_time(est)
        report = nmse_time(est_t, ref_t)
        out["methods"][name] = {
            "nmse_db": report.overall_db,
            "per_channel_db": list(report.per_channel_db),
            "trace": trace,
            "model": model_blob,
            "estimate": est,
            "waveform": est_t.channels[channel].copy(),
        }
        log.info("Q=%d %s: NMSE %.2f dB", q, name, report.overall_db)
    return out


def _write_reports(out, cfg, sizes, results, ref_t, channel):
    methods = list(cfg.methods)
    done = {r["q"]: r for r in results}
    qs = [q for q in sizes if q in done]
    notes = [f"baseline is order-limited spherical-harmonic interpolation ({cfg.baseline_solver} fit); "
             "it stands in for SARITA",
             "nmse_db = 10 log10(mean over channels of ||est - ref||^2 / ||ref||^2), time domain, in-band"]
    rows = []
    for m in methods:
        rows.append([m, METHODS[m][1]] + [_db(done[q]["methods"][m]["nmse_db"]) for q in qs])
    _csv(out / "nmse_table.csv", "nmse-table", ["method", "row_label"] + [f"q{q}" for q in qs], rows, notes)

    rows = []
    for q in qs:
        for m in methods:
            for ch, v in enumerate(done[q]["methods"][m]["per_channel_db"]):
                rows.append([m, q, ch, _db(v)])
    _csv(out / "nmse_channels.csv", "nmse-channels", ["method", "q", "channel", "nmse_db"], rows)

    rows = []
    for q in qs:
        for m in methods:
            trace = done[q]["methods"][m]["trace"]
            if trace is None:
                continue
            for it, (tot, dat, pde) in enumerate(trace):
                rows.append([m, q, it, _f(tot), _f(dat), _f(pde)])
    _csv(out / "loss_traces.csv", "loss-traces", ["method", "q", "iteration", "total", "data", "pde"], rows)

    cols = [f"{m}_q{q}" for q in qs for m in methods]
    series = [done[q]["methods"][m]["waveform"] for q in qs for m in methods]
    t = np.arange(ref_t.n_samples) / ref_t.fs
    rows = [[_f(t[i]), _f(ref_t.channels[channel, i])] + [_f(s[i]) for s in series]
            for i in range(ref_t.n_samples)]
    _csv(out / "waveforms.csv", "waveforms", ["time_s", "reference"] + cols, rows,
         [f"capsule {channel}"])

    rows = [[q, " ".join(str(i) for i in done[q]["indices"])] for q in qs]
    _csv(out / "subsets.csv", "subsets", ["q", "indices"], rows)


def _subset_job(args):
    q, ref, cfg, channel = args
    try:
        return run_subset(q, ref, cfg, channel), None
    except NonFiniteLossError as exc:
        return None, (q, str(exc))


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def cmd_synth(cfg):
    geom, scene, band, _ = resolve(cfg)
    ref, signals = synthesize(cfg, geom, scene, band)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    fileio.write_field(ref, out / "reference_field.json")
    fileio.write_signals(signals, out / "reference_signals.json")
    print(f"wrote {geom.n_capsules} channels, {ref.n_bins} bins to {out}")
    return EXIT_OK


def cmd_run(cfg, jobs=1):
    geom, scene, band, sizes = resolve(cfg)
    ref, _ = synthesize(cfg, geom, scene, band)
    out = Path(cfg.out)
    (out / "models").mkdir(parents=True, exist_ok=True)
    (out / "estimates").mkdir(exist_ok=True)
    (out / "run_config.json").write_text(json.dumps(cfg.to_dict(), indent=1, sort_keys=True) + "\n")
    fileio.write_field(ref, out / "reference_field.json")
    channel = _waveform_channel(cfg, geom, sizes)
    tasks = [(q, ref, cfg, channel) for q in sizes]
    results, failures = [], []

    def collect(outcome):
        # artifacts of each subset size are flushed as soon as it finishes
        res, err = outcome
        if err is not None:
            failures.append(err)
            return
        results.append(res)
        for m, r in res["methods"].items():
            if r["model"] is not None:
                (out / "models" / f"{m}_q{res['q']}.bin").write_bytes(r["model"])
            fileio.write_field(r["estimate"], out / "estimates" / f"{m}_q{res['q']}.json")

    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for outcome in pool.map(_subset_job, tasks):
                collect(outcome)
    else:
        for t in tasks:
            collect(_subset_job(t))
            if failures:
                break
    failure = failures[0] if failures else None
    _write_reports(out, cfg, sizes, results, freq_to_time(ref), channel)
    if failure is not None:
        raise CliError(EXIT_TRAIN, f"training aborted for Q={failure[0]}: {failure[1]}")
    with open(out / "nmse_table.csv") as fh:
        sys.stdout.write("".join(ln for ln in fh if not ln.startswith("#")))
    return EXIT_OK


def _load_any(path):
    """Field or signal file, told apart by the document's format tag."""
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(EXIT_DATA, f"cannot read {path}: {exc}") from exc
    kind = doc.get("format") if isinstance(doc, dict) else None
    try:
        if kind == fileio.FIELD_FORMAT:
            return fileio.read_field(path)
        if kind == fileio.SIGNAL_FORMAT:
            return fileio.read_signals(path)
    except (FileFormatError, SpherePinnError, ValueError) as exc:
        raise CliError(EXIT_DATA, str(exc)) from exc
    raise CliError(EXIT_DATA, f"{path}: neither a field nor a signal file")


def _as_signals(x, other):
    """Time signals for ``x``; raw signals compared with a field are cut to its band."""
    if not isinstance(x, TimeSignalSet):
        return freq_to_time(x)
    spec = getattr(other, "spectrum", None)
    if spec is None or spec.bins.size == 0:
        return x
    step = spec.fs / spec.n_samples
    grid = time_to_freq(x, (spec.bins[0] * step, spec.bins[-1] * step), geometry=other.geometry)
    return freq_to_time(grid)


def cmd_eval(cfg, estimate, reference):
    est, ref = _load_any(estimate), _load_any(reference)
    out = Path(cfg.out)
    per_freq = None
    try:
        if isinstance(est, TimeSignalSet) or isinstance(ref, TimeSignalSet):
            est, ref = _as_signals(est, ref), _as_signals(ref, est)
            report = nmse_time(est, ref)
        elif est.spectrum is not None and ref.spectrum is not None:
            report = nmse_time(freq_to_time(est), freq_to_time(ref))
            per_freq = nmse_freq(est, ref)
        else:
            report = per_freq = nmse_freq(est, ref)
    except (ShapeMismatchError, ValueError) as exc:
        raise CliError(EXIT_DATA, f"cannot compare files: {exc}") from exc
    out.mkdir(parents=True, exist_ok=True)
    _csv(out / "eval_channels.csv", "eval-channels", ["channel", "nmse_db"],
         [[ch, _db(v)] for ch, v in enumerate(report.per_channel_db)], [f"overall_db {_db(report.overall_db)}"])
    if per_freq is not None:
        _csv(out / "eval_frequencies.csv", "eval-frequencies", ["bin", "wavenumber", "nmse_db"],
             [[j, _f(k), _db(v)] for j, (k, v) in enumerate(zip(ref.wavenumbers, per_freq.per_frequency_db))])
    print(f"NMSE {report.overall_db:.2f} dB")
    return EXIT_OK


def _read_field(path):
    try:
        return fileio.read_field(path)
    except (FileFormatError, SpherePinnError, ValueError) as exc:
        raise CliError(EXIT_DATA, str(exc)) from exc


def cmd_subset(cfg, field_path, q):
    ref = _read_field(field_path)
    try:
        sub, idx = subset_select(ref.geometry, q)
    except ValueError as exc:
        raise CliError(EXIT_CONFIG, str(exc)) from exc
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    fileio.write_field(ref.replace(geometry=sub, pressures=ref.pressures[idx]), out / f"subset_q{q}.json")
    _csv(out / f"subset_q{q}.csv", "subsets", ["q", "indices"], [[q, " ".join(str(i) for i in idx)]])
    print(" ".join(str(i) for i in idx))
    return EXIT_OK


def cmd_train(cfg, field_path):
    obs_field = _read_field(field_path)
    tcfg = cfg.train_config()
    try:
        model, trace = train(ObservationSet.from_field(obs_field), tcfg)
    except NonFiniteLossError as exc:
        raise CliError(EXIT_TRAIN, str(exc)) from exc
    model.config = {**tcfg.to_dict(), "enclosure": obs_field.geometry.enclosure.value}
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    save_model(model, out / "model.bin")
    _csv(out / "loss_trace.csv", "loss-traces", ["iteration", "total", "data", "pde"],
         [[i, _f(a), _f(b), _f(c)] for i, (a, b, c) in enumerate(trace)])
    print(f"final loss {trace[-1, 0]:.6e}" if len(trace) else "no iterations run")
    return EXIT_OK


def cmd_predict(cfg, model_path, like=None):
    try:
        model = load_model(model_path)
    except FileFormatError as exc:
        raise CliError(EXIT_DATA, str(exc)) from exc
    spectrum = None
    if like is not None:
        target = _read_field(like)
        geom, spectrum = target.geometry, target.spectrum
        if not np.array_equal(target.wavenumbers, model.wavenumbers):
            raise CliError(EXIT_DATA, "model frequencies differ from the reference field")
    elif cfg.geometry:
        try:
            geom = read_geometry(cfg.geometry)
        except SpherePinnError as exc:
            raise CliError(EXIT_CONFIG, str(exc)) from exc
    else:
        geom = reference_geometry(model.config.get("enclosure", cfg.enclosure), model.radius)
    if not np.isclose(geom.radius, model.radius):
        raise CliError(EXIT_DATA, "target geometry radius differs from the model's")
    est = predict_geometry(model, geom, spectrum)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    fileio.write_field(est, out / "prediction.json")
    print(f"predicted {geom.n_capsules} capsules x {model.wavenumbers.size} bins")
    return EXIT_OK


# --------------------------------------------------------------------------
# entry point
# --------------------------------------------------------------------------

def _global_flags(parser, suppress):
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--config", metavar="PATH", default=default, help="experiment config (JSON)")
    parser.add_argument("--seed", type=int, metavar="INT", default=default, help="override the config seed")
    parser.add_argument("--out", metavar="DIR", default=default, help="output directory")
    parser.add_argument("--jobs", type=int, metavar="N", default=argparse.SUPPRESS if suppress else 1,
                        help="parallel subset jobs for 'run'")


def build_parser():
    parser = argparse.ArgumentParser(prog="spherepinn", description=__doc__.split("\n\n")[0])
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)
    sub.add_parser("synth", parents=[common], help="synthesize reference field and signal files")
    sub.add_parser("run", parents=[common], help="full experiment: subsets x methods -> NMSE table")
    p = sub.add_parser("eval", parents=[common], help="NMSE of an estimate against a reference")
    p.add_argument("estimate")
    p.add_argument("reference")
    p = sub.add_parser("subset", parents=[common], help="extract a maximin capsule subset of a field")
    p.add_argument("field")
    p.add_argument("--q", type=int, required=True)
    p = sub.add_parser("train", parents=[common], help="train a model on a field file")
    p.add_argument("field")
    p = sub.add_parser("predict", parents=[common], help="evaluate a model at capsule directions")
    p.add_argument("model")
    p.add_argument("--like", metavar="FIELD", help="predict at this field's capsules and bins")
    return parser


def _setup_logging():
    name = os.environ.get("SPHEREPINN_LOG", "error").strip().lower()
    if name not in LOG_LEVELS:
        raise CliError(EXIT_CONFIG, f"SPHEREPINN_LOG must be one of {sorted(LOG_LEVELS)}, got {name!r}")
    if not log.handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
        log.addHandler(handler)
    log.setLevel(LOG_LEVELS[name])


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        _setup_logging()
        if args.jobs < 1:
            raise CliError(EXIT_CONFIG, "--jobs must be >= 1")
        cfg = load_config(args)
        cmd = args.command
        if cmd == "synth":
            return cmd_synth(cfg)
        if cmd == "run":
            return cmd_run(cfg, args.jobs)
        if cmd == "eval":
            return cmd_eval(cfg, args.estimate, args.reference)
        if cmd == "subset":
            return cmd_subset(cfg, args.field, args.q)
        if cmd == "train":
            return cmd_train(cfg, args.field)
        return cmd_predict(cfg, args.model, args.like)
    except CliError as exc:
        print(f"spherepinn: error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())

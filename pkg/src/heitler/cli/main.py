"""``heitler`` command-line front end.

Usage::

    heitler <command> --config scenario.yaml [--seed N] [--out DIR] [--format csv|json]

Commands
--------
spectrum  Fabry-Perot scan of the scattered light (counts/s vs detuning in MHz).
g1        Michelson fringe visibility vs delay (ns).
g2        Intensity correlation, ideal and convolved with the detector response.
stream    Monte Carlo photon timestamps, split onto two detectors.
hist      Coincidence histogram from two stream files.
fit       Least-squares fit of a model to a data file; writes a JSON report.
sbr       Signal, background and SBR vs power.
repro     Full set of figure traces for the default scenario plus summary.json.

Exit status
-----------
0  success
2  configuration or validation error (bad key, missing file, unphysical value,
   an undriven emitter asked for a normalized correlation)
3  numerical failure (grid too coarse, integration or fit did not converge)
4  file system error
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np
from scipy import linalg

from .. import __version__
from ..bloch import bloch_generator
from ..closed_form import coherent_fraction, g2_closed
from ..exceptions import ConfigError, HeitlerError, IntegrationError, NoEmissionError, ResolutionError
from ..fitting import FitProblem, FreeParameter, fit, fit_lorentzian, fit_mollow_triplet
from ..fitting.problem import MODEL_PARAMETERS
from ..instrument import (
    InstrumentResponse,
    fp_scan,
    irf_convolve_correlation,
    laser_visibility,
    michelson_visibility,
    sbr_curves,
)
from ..params import coherence_linewidth_convert
from ..stochastic import (
    apply_detector,
    g2_histogram,
    hbt_split,
    read_stream,
    simulate_stream,
    spawn_seeds,
    write_stream,
)
from .config import FIT_KEYS, MHZ, NS, ScenarioConfig, load_config

log = logging.getLogger("heitler.cli")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

COMMANDS = {
    "spectrum": "Fabry-Perot scan of the scattered light",
    "g1": "fringe visibility versus interferometer delay",
    "g2": "intensity correlation, ideal and instrument-convolved",
    "stream": "Monte Carlo photon timestamps on two detectors",
    "hist": "coincidence histogram from two stream files",
    "fit": "least-squares fit of a model to a data file",
    "sbr": "signal, background and SBR versus power",
    "repro": "figure traces for the default scenario plus summary.json",
}

# x-axis conversion of fit data files to SI
FIT_X_FACTOR = {"fp_spectrum": MHZ, "g2_curve": NS, "visibility_curve": NS, "sbr_curve": 1.0}

# figure scenarios, drive in units of gamma
SPECTRUM_DRIVES = {"fig2a": (1.5, 800.0), "fig2b": (0.6, 400.0), "fig2c": (0.22, 200.0)}
CORRELATION_DRIVES = {"fig2d": 1.5, "fig2e": 0.6, "fig2f": 0.22}
VISIBILITY_DRIVES = (0.22, 0.17)


class FitFailed(HeitlerError):
    pass


# ---------------------------------------------------------------- output


def _fmt(v):
    return format(float(v), ".9g")


def _atomic_write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_table(path: Path, columns: dict, fmt: str) -> Path:
    """CSV (header row, 9 significant digits) or JSON column table."""
    names = list(columns)
    data = [np.asarray(columns[n], dtype=float) for n in names]
    if fmt == "json":
        path = path.with_suffix(".json")
        doc = {"columns": {n: [float(_fmt(v)) for v in col] for n, col in zip(names, data)}}
        _atomic_write(path, json.dumps(doc, indent=1) + "\n")
    else:
        path = path.with_suffix(".csv")
        lines = [",".join(names)]
        lines += [",".join(_fmt(v) for v in row) for row in zip(*data)]
        _atomic_write(path, "\n".join(lines) + "\n")
    return path


def write_json(path: Path, doc: dict) -> Path:
    _atomic_write(path, json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return path


def read_table(path: Path):
    """Column table written by :func:`write_table` (CSV or JSON)."""
    if path.suffix == ".json":
        doc = json.loads(path.read_text())
        return {k: np.asarray(v, dtype=float) for k, v in doc["columns"].items()}
    with path.open() as fh:
        header = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] != len(header):
        raise ConfigError(f"{path}: header has {len(header)} columns, rows have {data.shape[1]}")
    return {name: data[:, i] for i, name in enumerate(header)}


def _write_stream_atomic(stream, path: Path):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    os.close(fd)
    try:
        write_stream(stream, tmp)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


# ---------------------------------------------------------------- helpers


def _power_ratio(cfg: ScenarioConfig, params):
    if cfg.power_ratio is not None:
        return cfg.power_ratio
    return params.saturation


def _seed(cfg: ScenarioConfig, override):
    if override is not None:
        return override
    seed = cfg.sections.get("stochastic", {}).get("seed")
    if seed is None:
        raise ConfigError(f"{cfg.path}: give stochastic.seed or --seed")
    return seed


def _linear_grid(half_span, points, what):
    if points < 3 or half_span <= 0:
        raise ConfigError(f"{what}: need a positive span and at least 3 points")
    return np.linspace(-half_span, half_span, points)


def _delay_grid(max_delay, points, what):
    if points < 3 or max_delay <= 0:
        raise ConfigError(f"{what}: need a positive max delay and at least 3 points")
    return np.linspace(0.0, max_delay, points)


# ---------------------------------------------------------------- commands


def cmd_spectrum(cfg, args):
    params = cfg.require_emitter()
    sec = cfg.section("spectrum")
    grid = _linear_grid(0.5 * sec["span_mhz"] * MHZ, sec["points"], "spectrum")
    scan = fp_scan(
        params,
        cfg.instrument_value("laser_linewidth_mhz", MHZ),
        cfg.instrument_value("cavity_fwhm_mhz", MHZ),
        grid,
        cfg.background,
        sec.get("power_ratio", _power_ratio(cfg, params)),
    )
    cols = {"detuning_mhz": grid / MHZ, "counts": scan.counts}
    cols.update(scan.components)
    return [write_table(args.out / "spectrum", cols, args.format)]


def cmd_g1(cfg, args):
    params = cfg.require_emitter()
    sec = cfg.section("g1")
    tau = _delay_grid(sec["max_delay_ns"] * NS, sec["points"], "g1")
    laser_tau = cfg.instrument_value("laser_tau_ns", NS)
    setup = cfg.instrument_value("setup_visibility")
    vis = michelson_visibility(params, laser_tau, cfg.instrument_value("coherent_tau_ns", NS), setup, tau)
    cols = {
        "delay_ns": tau / NS,
        "visibility": vis.values,
        "laser_visibility": laser_visibility(laser_tau, setup, tau),
    }
    return [write_table(args.out / "g1", cols, args.format)]


def _g2_traces(params, irf, max_delay, points):
    tau = _delay_grid(max_delay, points, "g2")
    ideal = g2_closed(params, tau)
    view = irf_convolve_correlation(ideal, irf or InstrumentResponse.delta())
    return {"delay_ns": view.delays / NS, "g2": view.raw, "g2_instrument": view.values}


def cmd_g2(cfg, args):
    params = cfg.require_emitter()
    sec = cfg.section("g2")
    cols = _g2_traces(params, cfg.irf, sec["max_delay_ns"] * NS, sec["points"])
    return [write_table(args.out / "g2", cols, args.format)]


def cmd_stream(cfg, args):
    params = cfg.require_emitter()
    sec = cfg.section("stochastic")
    if ("duration_ns" in sec) == ("photons" in sec):
        raise ConfigError(f"{cfg.path}: stochastic needs exactly one of duration_ns or photons")
    if params.rabi == 0:
        raise NoEmissionError("the emitter is not driven (zero Rabi frequency); no photons to simulate")
    seed = _seed(cfg, args.seed)
    s_sim, s_split, s_a, s_b = spawn_seeds(seed, 4)
    if "photons" in sec:
        if sec["photons"] < 1:
            raise ConfigError(f"{cfg.path}: stochastic.photons must be positive")
        stream = simulate_stream(params, math.inf, s_sim, max_photons=sec["photons"])
    else:
        stream = simulate_stream(params, sec["duration_ns"] * NS, s_sim)
    a, b = hbt_split(stream, s_split)
    if cfg.detector is not None:
        a = apply_detector(a, cfg.detector, s_a)
        b = apply_detector(b, cfg.detector, s_b)
    out = args.out
    return [
        _write_stream_atomic(stream, out / "stream_emitter.txt"),
        _write_stream_atomic(a, out / "stream_a.txt"),
        _write_stream_atomic(b, out / "stream_b.txt"),
    ]


def cmd_hist(cfg, args):
    sec = cfg.section("hist")
    paths = []
    for key, default in (("stream_a", "stream_a.txt"), ("stream_b", "stream_b.txt")):
        p = cfg.resolve(sec[key]) if key in sec else args.out / default
        if not p.is_file():
            raise ConfigError(f"{cfg.path}: hist.{key} file {p} does not exist")
        paths.append(p)
    a, b = (read_stream(p) for p in paths)
    h = g2_histogram(a, b, sec["bin_width_ns"] * NS, sec["max_delay_ns"] * NS)
    cols = {
        "delay_ns": h.centers / NS,
        "counts": h.counts,
        "normalized": h.normalized,
        "expected_uncorrelated": h.expected,
    }
    return [write_table(args.out / "hist", cols, args.format)]


def _fit_fixed(cfg, model):
    """Fixed values available from the emitter and instrument sections."""
    out = {}
    if cfg.emitter is not None:
        out.update(t1=cfg.emitter.t1, t2=cfg.emitter.t2, rabi=cfg.emitter.rabi)
    inst = cfg.instrument
    if "laser_linewidth_mhz" in inst:
        out["laser_linewidth"] = inst["laser_linewidth_mhz"] * MHZ
    if "cavity_fwhm_mhz" in inst:
        out["cavity_fwhm"] = inst["cavity_fwhm_mhz"] * MHZ
    if "laser_tau_ns" in inst:
        out["laser_tau"] = inst["laser_tau_ns"] * NS
    if "coherent_tau_ns" in inst:
        out["coherent_tau"] = inst["coherent_tau_ns"] * NS
    if model == "visibility_curve" and "setup_visibility" in inst:
        out["scale"] = inst["setup_visibility"]
    if model == "sbr_curve" and cfg.background is not None:
        out.update(
            scale=cfg.background.collection_efficiency,
            leakage_per_power=cfg.background.leakage_per_power,
            dark_rate=cfg.background.dark_rate,
        )
    if model == "fp_spectrum":
        out.update(center=0.0, offset=0.0)
    if model == "g2_curve":
        out["offset"] = 0.0
    return out


def build_fit_problem(cfg: ScenarioConfig, data_override=None) -> FitProblem:
    sec = cfg.section("fit")
    model = sec["model"]
    if model not in MODEL_PARAMETERS:
        raise ConfigError(f"{cfg.path}: fit.model must be one of {', '.join(MODEL_PARAMETERS)}")
    path = Path(data_override) if data_override else cfg.resolve(sec["data"])
    if not path.is_file():
        raise ConfigError(f"{cfg.path}: fit data file {path} does not exist")
    table = read_table(path)
    names = list(table)
    xcol = sec.get("x_column", names[0])
    ycol = sec.get("y_column", names[1] if len(names) > 1 else "")
    for col in (xcol, ycol, sec.get("sigma_column")):
        if col is not None and col not in table:
            raise ConfigError(f"{path}: no column '{col}' (have {', '.join(names)})")
    x = table[xcol] * FIT_X_FACTOR[model]
    sigma = table[sec["sigma_column"]] if "sigma_column" in sec else None

    wanted = set(MODEL_PARAMETERS[model])
    fixed = {k: v for k, v in _fit_fixed(cfg, model).items() if k in wanted}
    for key, value in sec.get("fixed", {}).items():
        name, factor = FIT_KEYS[key]
        fixed[name] = value * factor
    free = {}
    for key, spec in sec["free"].items():
        name, factor = FIT_KEYS[key]
        if not isinstance(spec, dict):
            spec = {"init": spec}
        free[name] = FreeParameter(
            spec["init"] * factor,
            spec.get("lower", -math.inf) * factor,
            spec.get("upper", math.inf) * factor,
        )
        fixed.pop(name, None)
    missing = wanted - set(fixed) - set(free)
    if missing:
        raise ConfigError(f"{cfg.path}: fit model {model} has no value for {sorted(missing)}")
    irf = cfg.irf if model == "g2_curve" else None
    return FitProblem(model, x, table[ycol], fixed, free, sigma=sigma, irf=irf)


def cmd_fit(cfg, args):
    problem = build_fit_problem(cfg, args.data)
    bootstrap = cfg.section("fit").get("bootstrap", 0)
    seed = args.seed if args.seed is not None else cfg.sections.get("stochastic", {}).get("seed")
    if bootstrap and seed is None:
        raise ConfigError(f"{cfg.path}: bootstrap needs stochastic.seed or --seed")
    result = fit(problem, bootstrap=bootstrap, seed=seed)
    doc = result.to_dict()
    lab = {}
    for key, (name, factor) in FIT_KEYS.items():
        if name in result.estimates:
            lab[key] = result.estimates[name] / factor
            lab[key + "_stderr"] = result.stderr[name] / factor
    doc["estimates_lab_units"] = lab
    path = write_json(args.out / "fit_report.json", doc)
    if not result.converged:
        raise FitFailed(f"fit did not converge: {result.message} (report written to {path})")
    return [path]


def cmd_sbr(cfg, args):
    params = cfg.require_emitter()
    if cfg.background is None:
        raise ConfigError(f"{cfg.path}: sbr needs a 'background' section")
    sec = cfg.section("sbr")
    if not 0 < sec["power_min"] < sec["power_max"] or sec["points"] < 2:
        raise ConfigError(f"{cfg.path}: sbr needs 0 < power_min < power_max and >= 2 points")
    p = np.geomspace(sec["power_min"], sec["power_max"], sec["points"])
    curves = sbr_curves(p, params.replace(rabi=0.0, detuning=0.0), cfg.background)
    cols = {
        "power_ratio": p,
        "sbr": curves.sbr,
        "signal": curves.signal,
        "on_resonance": curves.on_resonance,
        "off_resonance": curves.off_resonance,
        "leakage": curves.leakage,
        "dark": curves.dark,
    }
    return [write_table(args.out / "sbr", cols, args.format)]


# ---------------------------------------------------------------- repro


def _oracle_splitting(params):
    """Sideband offset (Hz) from the imaginary part of the Bloch generator's eigenvalues."""
    m, _ = bloch_generator(params)
    return float(np.max(np.abs(np.linalg.eigvals(m).imag)) / (2.0 * np.pi))


def _decay_times(tau, values, modes=3):
    """Time constants of a sum of real exponentials sampled on a uniform grid (matrix pencil)."""
    dt = tau[1] - tau[0]
    n = values.size
    rows = n // 2
    hankel = linalg.hankel(values[: n - rows], values[n - rows - 1 :])
    u, sv, vh = np.linalg.svd(hankel[:, :-1], full_matrices=False)
    pencil = np.diag(1.0 / sv[:modes]) @ u[:, :modes].T @ hankel[:, 1:] @ vh[:modes].T
    rates = -np.log(np.linalg.eigvals(pencil).astype(complex)).real / dt
    return np.sort(1.0 / rates)[::-1]


def cmd_repro(cfg, args):
    base = cfg.require_emitter()
    if base.detuning != 0:
        raise ConfigError(f"{cfg.path}: repro reproduces resonant excitation; set detuning_mhz to 0")
    if cfg.irf is None:
        raise ConfigError(f"{cfg.path}: repro needs instrument.hbt_irf")
    if cfg.background is None:
        raise ConfigError(f"{cfg.path}: repro needs a 'background' section")
    laser_lw = cfg.instrument_value("laser_linewidth_mhz", MHZ)
    cavity = cfg.instrument_value("cavity_fwhm_mhz", MHZ)
    laser_tau = cfg.instrument_value("laser_tau_ns", NS)
    coherent_tau = cfg.instrument_value("coherent_tau_ns", NS)
    setup = cfg.instrument_value("setup_visibility")
    out = args.out
    files = []
    summary = {
        "t1_ns": base.t1 / NS,
        "t2_ns": base.t2 / NS,
        "natural_linewidth_mhz": coherence_linewidth_convert(base.t1, "tau_to_fwhm") / MHZ,
        "coherent_linewidth_mhz": coherence_linewidth_convert(coherent_tau, "tau_to_fwhm") / MHZ,
        "laser_linewidth_mhz": laser_lw / MHZ,
        "cavity_fwhm_mhz": cavity / MHZ,
    }

    p_grid = np.geomspace(1e-3, 1e2, 101)
    curves = sbr_curves(p_grid, base.replace(rabi=0.0), cfg.background)
    files.append(
        write_table(
            out / "fig1d_sbr",
            {
                "power_ratio": p_grid,
                "on_resonance": curves.on_resonance,
                "off_resonance": curves.off_resonance,
                "leakage": curves.leakage,
                "dark": curves.dark,
                "sbr": curves.sbr,
            },
            args.format,
        )
    )
    at_sat = sbr_curves([1.0], base.replace(rabi=0.0), cfg.background)
    below = p_grid[curves.leakage < curves.dark]
    summary["fig1d"] = {
        "signal_at_saturation": float(at_sat.signal[0]),
        "sbr_at_saturation": float(at_sat.sbr[0]),
        "leakage_below_dark_up_to_power_ratio": float(below.max()) if below.size else 0.0,
        "calibration": cfg.background_calibration,
    }

    fractions = {}
    for name, (drive, half_span) in SPECTRUM_DRIVES.items():
        params = base.replace(rabi=drive / base.t1)
        grid = np.linspace(-half_span, half_span, 4 * int(half_span) + 1) * MHZ
        scan = fp_scan(params, laser_lw, cavity, grid, cfg.background, params.saturation)
        cols = {"detuning_mhz": grid / MHZ, "counts": scan.counts}
        cols.update(scan.components)
        files.append(write_table(out / f"{name}_spectrum", cols, args.format))
        fractions[f"{drive:g}"] = 1.0 - coherent_fraction(params)
        emitted = scan.components["coherent"] + scan.components["incoherent"]
        entry = {"rabi_over_gamma": drive, "saturation_parameter": params.saturation}
        if name == "fig2a":
            oracle = _oracle_splitting(params)
            trip = fit_mollow_triplet(grid, emitted, oracle, narrow_fwhm=laser_lw + cavity)
            entry.update(
                sideband_offset_mhz=trip.sideband_offset / MHZ,
                oracle_sideband_offset_mhz=oracle / MHZ,
                sideband_is_local_maximum=_has_side_maximum(grid, emitted),
            )
        if name == "fig2c":
            lor = fit_lorentzian(grid, scan.counts)
            entry.update(fitted_fwhm_mhz=lor.fwhm / MHZ, fitted_center_mhz=lor.center / MHZ)
        summary[name] = entry
    for drive in VISIBILITY_DRIVES:
        fractions.setdefault(f"{drive:g}", 1.0 - coherent_fraction(base.replace(rabi=drive / base.t1)))
    summary["incoherent_fraction"] = fractions

    for name, drive in CORRELATION_DRIVES.items():
        params = base.replace(rabi=drive / base.t1)
        cols = _g2_traces(params, cfg.irf, 12.0 * NS, 1201)
        files.append(write_table(out / f"{name}_g2", cols, args.format))
        summary[name] = {
            "rabi_over_gamma": drive,
            "g2_zero": float(cols["g2"][cols["delay_ns"] == 0][0]),
            "g2_instrument_zero": float(np.min(cols["g2_instrument"])),
        }

    tau = np.linspace(0.0, 150.0, 3001) * NS
    cols = {"delay_ns": tau / NS, "laser": laser_visibility(laser_tau, setup, tau)}
    vis_summary = {}
    for drive in VISIBILITY_DRIVES:
        params = base.replace(rabi=drive / base.t1)
        v = michelson_visibility(params, laser_tau, coherent_tau, setup, tau).values
        cols[f"rabi_{drive:g}"] = v
        tail = tau > 20 * base.t1
        slope, icpt = np.polyfit(tau[tail], np.log(v[tail]), 1)
        # what is left after removing the coherent tail is the incoherent transient
        early = tau <= 15 * base.t1
        excess = v[early] - np.exp(icpt + slope * tau[early])
        times = _decay_times(tau[early], excess)
        vis_summary[f"{drive:g}"] = {
            "slow_tail_coherence_ns": float(-0.5 / slope / NS),
            "slow_tail_amplitude": float(math.exp(icpt)),
            "fast_transient_time_constants_ns": [float(t / NS) for t in times],
            "fast_transient_slowest_over_t1": float(times[0] / base.t1),
        }
    files.append(write_table(out / "fig3a_visibility", cols, args.format))
    summary["fig3a"] = vis_summary
    summary["not_reproduced"] = [
        "measured power-broadened linewidth of the high-power spectrum",
        "highest measured visibility relative to the laser",
    ]
    files.append(write_json(out / "summary.json", summary))
    return files


def _has_side_maximum(grid, density):
    right = density[grid > 0]
    inner = np.diff(right)
    return bool(np.any((inner[:-1] > 0) & (inner[1:] <= 0)))


# ---------------------------------------------------------------- entry


HANDLERS = {
    "spectrum": cmd_spectrum,
    "g1": cmd_g1,
    "g2": cmd_g2,
    "stream": cmd_stream,
    "hist": cmd_hist,
    "fit": cmd_fit,
    "sbr": cmd_sbr,
    "repro": cmd_repro,
}


def _u64(text):
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def build_parser():
    parser = argparse.ArgumentParser(
        prog="heitler",
        description="Resonance fluorescence of a driven two-level emitter: traces, streams and fits.",
        epilog="exit status: 0 ok, 2 configuration error, 3 numerical failure, 4 file system error",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    for name, text in COMMANDS.items():
        p = sub.add_parser(name, help=text, description=text)
        p.add_argument("--config", required=True, type=Path, help="scenario YAML file")
        p.add_argument("--seed", type=_u64, default=None, help="overrides stochastic.seed")
        p.add_argument("--out", type=Path, default=None, help="output directory (overrides output.dir)")
        p.add_argument("--format", choices=("csv", "json"), default=None, help="trace file format")
        p.add_argument("-v", "--verbose", action="store_true")
        if name == "fit":
            p.add_argument("--data", default=None, help="data file, overrides fit.data")
    return parser


def run(command, cfg: ScenarioConfig, out=None, seed=None, fmt=None, data=None):
    """Run one command against a loaded config; returns the written paths."""
    output = cfg.sections.get("output", {})
    args = argparse.Namespace(
        out=Path(out) if out is not None else cfg.resolve(output.get("dir", ".")),
        seed=seed,
        format=fmt or output.get("format", "csv"),
        data=data,
    )
    return HANDLERS[command](cfg, args)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.config)
        paths = run(args.command, cfg, args.out, args.seed, args.format, getattr(args, "data", None))
    except (ResolutionError, IntegrationError, FitFailed) as exc:
        print(f"heitler: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ConfigError, ValueError) as exc:
        print(f"heitler: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"heitler: file error: {exc}", file=sys.stderr)
        return EXIT_IO
    except HeitlerError as exc:
        print(f"heitler: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    for p in paths:
        print(p)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

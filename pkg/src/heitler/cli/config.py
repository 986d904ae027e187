"""Scenario configuration: a strict YAML schema in laboratory units.

Times are given in ns and frequencies in MHz; the loader converts to SI.
Every mapping is checked against its schema and unknown keys are
reported with their line and column.

Example::

    emitter:
      t1_ns: 0.76
      t2_ns: 1.52
      rabi_gamma: 0.22        # or power_ratio: P/P_sat
    instrument:
      cavity_fwhm_mhz: 29
      laser_linewidth_mhz: 3
      hbt_irf: {kind: gaussian, fwhm_ns: 0.4}
    output:
      dir: out
      format: csv
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from ..exceptions import ConfigError
from ..instrument import BackgroundModel, InstrumentResponse
from ..params import TwoLevelParams, rabi_from_power
from ..stochastic import DetectorModel

NS = 1e-9
MHZ = 1e6

# key -> (type, required); "num" accepts ints and floats
SCHEMA = {
    "emitter": {
        "t1_ns": ("num", True),
        "t2_ns": ("num", False),
        "pure_dephasing_per_ns": ("num", False),
        "rabi_gamma": ("num", False),
        "power_ratio": ("num", False),
        "t2_sat_ns": ("num", False),
        "detuning_mhz": ("num", False),
    },
    "instrument": {
        "cavity_fwhm_mhz": ("num", False),
        "laser_linewidth_mhz": ("num", False),
        "hbt_irf": ("map", False),
        "setup_visibility": ("num", False),
        "coherent_tau_ns": ("num", False),
        "laser_tau_ns": ("num", False),
    },
    "hbt_irf": {
        "kind": ("str", True),
        "fwhm_ns": ("num", False),
        "path": ("str", False),
    },
    "background": {
        "collection_efficiency": ("num", False),
        "leakage_per_power": ("num", False),
        "dark_rate": ("num", False),
        "signal_at_sat": ("num", False),
        "sbr_at_sat": ("num", False),
        "crossover_power": ("num", False),
    },
    "stochastic": {
        "duration_ns": ("num", False),
        "photons": ("int", False),
        "seed": ("int", False),
        "detector": ("map", False),
    },
    "detector": {
        "efficiency": ("num", False),
        "dark_rate": ("num", False),
        "jitter_fwhm_ns": ("num", False),
        "dead_time_ns": ("num", False),
    },
    "spectrum": {
        "span_mhz": ("num", True),
        "points": ("int", True),
        "power_ratio": ("num", False),
    },
    "g1": {
        "max_delay_ns": ("num", True),
        "points": ("int", True),
    },
    "g2": {
        "max_delay_ns": ("num", True),
        "points": ("int", True),
    },
    "hist": {
        "stream_a": ("str", False),
        "stream_b": ("str", False),
        "bin_width_ns": ("num", True),
        "max_delay_ns": ("num", True),
    },
    "sbr": {
        "power_min": ("num", True),
        "power_max": ("num", True),
        "points": ("int", True),
    },
    "fit": {
        "model": ("str", True),
        "data": ("str", True),
        "x_column": ("str", False),
        "y_column": ("str", False),
        "sigma_column": ("str", False),
        "free": ("map", True),
        "fixed": ("map", False),
        "bootstrap": ("int", False),
    },
    "output": {
        "dir": ("str", False),
        "format": ("str", False),
    },
}

TOP_LEVEL = ("emitter", "instrument", "background", "stochastic", "spectrum", "g1", "g2",
             "hist", "sbr", "fit", "output")

# fit parameter: config key -> (internal name, factor to SI)
FIT_KEYS = {
    "t2_ns": ("t2", NS),
    "scale": ("scale", 1.0),
    "offset": ("offset", 1.0),
    "center_mhz": ("center", MHZ),
    "coherent_tau_ns": ("coherent_tau", NS),
    "leakage_per_power": ("leakage_per_power", 1.0),
    "dark_rate": ("dark_rate", 1.0),
}
FREE_KEYS = {"init", "lower", "upper"}


def _where(node):
    mark = node.start_mark
    return f"{mark.name}:{mark.line + 1}:{mark.column + 1}"


def _scalar(node, kind, key):
    if not isinstance(node, yaml.ScalarNode):
        raise ConfigError(f"{_where(node)}: '{key}' must be a scalar")
    value = yaml.safe_load(yaml.serialize(node))
    if kind == "num":
        if isinstance(value, str):
            # YAML 1.1 reads exponent forms without a dot (1.25e6) as strings
            try:
                value = float(value)
            except ValueError:
                pass
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
            raise ConfigError(f"{_where(node)}: '{key}' must be a finite number, got {value!r}")
        return float(value)
    if kind == "int":
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{_where(node)}: '{key}' must be an integer, got {value!r}")
        return value
    if not isinstance(value, str):
        raise ConfigError(f"{_where(node)}: '{key}' must be a string, got {value!r}")
    return value


def _mapping(node, section):
    if not isinstance(node, yaml.MappingNode):
        raise ConfigError(f"{_where(node)}: section '{section}' must be a mapping")
    schema = SCHEMA[section]
    out = {}
    for key_node, value_node in node.value:
        key = key_node.value
        if key not in schema:
            allowed = ", ".join(sorted(schema))
            raise ConfigError(f"{_where(key_node)}: unknown key '{key}' in '{section}' (allowed: {allowed})")
        if key in out:
            raise ConfigError(f"{_where(key_node)}: duplicate key '{key}'")
        kind, _ = schema[key]
        if kind == "map":
            if key in SCHEMA:
                out[key] = _mapping(value_node, key)
            else:
                out[key] = _free_form(value_node, key)
        else:
            out[key] = _scalar(value_node, kind, key)
    for key, (_, required) in schema.items():
        if required and key not in out:
            raise ConfigError(f"{_where(node)}: section '{section}' is missing required key '{key}'")
    return out


def _free_form(node, section):
    """``fit.free`` / ``fit.fixed``: parameter names mapping to numbers or bound maps."""
    if not isinstance(node, yaml.MappingNode):
        raise ConfigError(f"{_where(node)}: '{section}' must be a mapping")
    out = {}
    for key_node, value_node in node.value:
        key = key_node.value
        if key not in FIT_KEYS:
            raise ConfigError(
                f"{_where(key_node)}: unknown fit parameter '{key}' (allowed: {', '.join(sorted(FIT_KEYS))})"
            )
        if isinstance(value_node, yaml.MappingNode):
            spec = {}
            for k, v in value_node.value:
                if k.value not in FREE_KEYS:
                    raise ConfigError(f"{_where(k)}: unknown bound key '{k.value}' (allowed: init, lower, upper)")
                spec[k.value] = _scalar(v, "num", k.value)
            if "init" not in spec:
                raise ConfigError(f"{_where(value_node)}: '{key}' needs an 'init' value")
            out[key] = spec
        else:
            out[key] = _scalar(value_node, "num", key)
    return out


@dataclass
class ScenarioConfig:
    """Parsed configuration in SI units, plus the raw sections for subcommands."""

    path: Path
    emitter: TwoLevelParams | None = None
    power_ratio: float | None = None
    instrument: dict = field(default_factory=dict)
    irf: InstrumentResponse | None = None
    background: BackgroundModel | None = None
    background_calibration: dict | None = None
    detector: DetectorModel | None = None
    sections: dict = field(default_factory=dict)

    def section(self, name):
        if name not in self.sections:
            raise ConfigError(f"{self.path}: this command needs a '{name}' section")
        return self.sections[name]

    def require_emitter(self):
        if self.emitter is None:
            raise ConfigError(f"{self.path}: this command needs an 'emitter' section")
        return self.emitter

    def instrument_value(self, key, factor=1.0):
        if key not in self.instrument:
            raise ConfigError(f"{self.path}: instrument.{key} is required for this command")
        return self.instrument[key] * factor

    def resolve(self, relative):
        p = Path(relative)
        return p if p.is_absolute() else (self.path.parent / p)


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        root = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: YAML syntax error: {exc}") from exc
    if root is None:
        raise ConfigError(f"{path}: empty configuration")
    _rename_marks(root, str(path))
    if not isinstance(root, yaml.MappingNode):
        raise ConfigError(f"{_where(root)}: top level must be a mapping")
    sections = {}
    for key_node, value_node in root.value:
        if key_node.value not in TOP_LEVEL:
            raise ConfigError(
                f"{_where(key_node)}: unknown section '{key_node.value}' (allowed: {', '.join(TOP_LEVEL)})"
            )
        if key_node.value in sections:
            raise ConfigError(f"{_where(key_node)}: duplicate section '{key_node.value}'")
        sections[key_node.value] = (_mapping(value_node, key_node.value), value_node)
    cfg = ScenarioConfig(path=path, sections={k: v[0] for k, v in sections.items()})
    if "emitter" in sections:
        cfg.emitter, cfg.power_ratio = _emitter(*sections["emitter"])
    if "instrument" in sections:
        cfg.instrument = sections["instrument"][0]
        cfg.irf = _irf(cfg, sections["instrument"])
        vis = cfg.instrument.get("setup_visibility")
        if vis is not None and not 0 < vis <= 1:
            raise ConfigError(f"{_where(sections['instrument'][1])}: setup_visibility must lie in (0, 1]")
    if "background" in sections:
        cfg.background, cfg.background_calibration = _background(cfg, *sections["background"])
    if "stochastic" in sections:
        det = sections["stochastic"][0].get("detector")
        if det is not None:
            try:
                cfg.detector = DetectorModel(
                    efficiency=det.get("efficiency", 1.0),
                    dark_rate=det.get("dark_rate", 0.0),
                    jitter_fwhm=det.get("jitter_fwhm_ns", 0.0) * NS,
                    dead_time=det.get("dead_time_ns", 0.0) * NS,
                )
            except ValueError as exc:
                raise ConfigError(f"{_where(sections['stochastic'][1])}: {exc}") from exc
    out = cfg.sections.get("output", {})
    if out.get("format", "csv") not in ("csv", "json"):
        raise ConfigError(f"{_where(sections['output'][1])}: output.format must be 'csv' or 'json'")
    return cfg


def _rename_marks(node, name):
    node.start_mark.name = name
    if isinstance(node, yaml.MappingNode):
        for k, v in node.value:
            _rename_marks(k, name)
            _rename_marks(v, name)
    elif isinstance(node, yaml.SequenceNode):
        for v in node.value:
            _rename_marks(v, name)


def _emitter(values, node):
    where = _where(node)
    if ("t2_ns" in values) == ("pure_dephasing_per_ns" in values):
        raise ConfigError(f"{where}: give exactly one of t2_ns or pure_dephasing_per_ns")
    if ("rabi_gamma" in values) == ("power_ratio" in values):
        raise ConfigError(f"{where}: give exactly one of rabi_gamma or power_ratio")
    t1 = values["t1_ns"] * NS
    if t1 <= 0:
        raise ConfigError(f"{where}: t1_ns must be positive")
    if "t2_ns" in values:
        t2 = values["t2_ns"] * NS
    else:
        gd = values["pure_dephasing_per_ns"] / NS
        if gd < 0:
            raise ConfigError(f"{where}: pure_dephasing_per_ns must be >= 0")
        t2 = 1.0 / (0.5 / t1 + gd)
    power_ratio = values.get("power_ratio")
    try:
        if power_ratio is not None:
            t2_sat = values.get("t2_sat_ns", t2 / NS) * NS
            rabi = rabi_from_power(power_ratio, t1, t2_sat)
        else:
            if "t2_sat_ns" in values:
                raise ConfigError(f"{where}: t2_sat_ns only applies together with power_ratio")
            rabi = values["rabi_gamma"] / t1
        detuning = 2.0 * math.pi * values.get("detuning_mhz", 0.0) * MHZ
        return TwoLevelParams(t1=t1, t2=t2, rabi=rabi, detuning=detuning), power_ratio
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def _irf(cfg, section):
    values, node = section
    spec = values.get("hbt_irf")
    if spec is None:
        return None
    where = _where(node)
    kind = spec["kind"]
    try:
        if kind == "delta":
            return InstrumentResponse.delta()
        if kind == "gaussian":
            if "fwhm_ns" not in spec:
                raise ConfigError(f"{where}: gaussian hbt_irf needs fwhm_ns")
            return InstrumentResponse.gaussian(spec["fwhm_ns"] * NS)
        if kind == "tabulated":
            if "path" not in spec:
                raise ConfigError(f"{where}: tabulated hbt_irf needs a path")
            path = cfg.resolve(spec["path"])
            if not path.is_file():
                raise ConfigError(f"{where}: IRF file {path} does not exist")
            return InstrumentResponse.from_file(path)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from exc
    raise ConfigError(f"{where}: hbt_irf.kind must be delta, gaussian or tabulated, got {kind!r}")


def _background(cfg, values, node):
    where = _where(node)
    direct = {"collection_efficiency", "leakage_per_power", "dark_rate"} & set(values)
    calib = {"signal_at_sat", "sbr_at_sat", "crossover_power"} & set(values)
    if direct and calib:
        raise ConfigError(f"{where}: give either explicit background rates or a saturation calibration")
    try:
        if calib:
            from ..instrument import calibrate_background

            if calib != {"signal_at_sat", "sbr_at_sat", "crossover_power"}:
                raise ConfigError(f"{where}: calibration needs signal_at_sat, sbr_at_sat and crossover_power")
            em = cfg.require_emitter()
            model, report = calibrate_background(
                em.replace(rabi=0.0, detuning=0.0),
                values["signal_at_sat"],
                values["sbr_at_sat"],
                values["crossover_power"],
            )
            return model, report
        missing = {"collection_efficiency", "leakage_per_power", "dark_rate"} - direct
        if missing:
            raise ConfigError(f"{where}: background is missing {sorted(missing)}")
        return BackgroundModel(values["leakage_per_power"], values["dark_rate"], values["collection_efficiency"]), None
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"{where}: {exc}") from exc

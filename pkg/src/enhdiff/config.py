"""Run configuration: an INI document with a fixed key schema.

Sections and keys (``section.key``); unknown keys are rejected::

    [run]         seed
    [flow]        kind (zero|constant-shear|power-shear|holder-shear|circular),
                  n, s, alpha, c, q
    [diffusivity] kappa, gamma
    [initial_data] kind (sine-x|tent-shear|annulus-circular)
    [solver]      backend (grid|monte-carlo), nx, ny, nr, ntheta, dt, horizon,
                  n_samples, steps_per_scale, horizon_factor
    [experiment]  kappa_values, threshold, log_correction (auto|on|off),
                  synthetic_slope, synthetic_log_q
    [output]      directory, formats (csv,svg,binary)
    [interface]   file
"""
from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field as dc_field
from pathlib import Path

from .errors import ConfigError
from .flows import Circular, ConstantShear, HolderShear, PowerShear, VelocityField, Zero


def _parse_bool(_s: str):
    raise ConfigError("no boolean keys in the schema")


def _parse_float_list(s: str):
    try:
        return tuple(float(tok) for tok in s.replace(",", " ").split())
    except ValueError as exc:
        raise ConfigError(f"bad float list {s!r}") from exc


def _parse_str_list(s: str):
    return tuple(tok.strip() for tok in s.split(",") if tok.strip())


_SCHEMA = {
    "run": {"seed": int},
    "flow": {"kind": str, "n": int, "s": float, "alpha": float, "c": float, "q": float},
    "diffusivity": {"kappa": float, "gamma": float},
    "initial_data": {"kind": str},
    "solver": {
        "backend": str,
        "nx": int,
        "ny": int,
        "nr": int,
        "ntheta": int,
        "dt": float,
        "horizon": float,
        "n_samples": int,
        "steps_per_scale": int,
        "horizon_factor": float,
    },
    "experiment": {
        "kappa_values": _parse_float_list,
        "threshold": float,
        "log_correction": str,
        "synthetic_slope": float,
        "synthetic_log_q": float,
    },
    "output": {"directory": str, "formats": _parse_str_list},
    "interface": {"file": str},
}

_FLOW_KINDS = ("zero", "constant-shear", "power-shear", "holder-shear", "circular")
_DATA_KINDS = ("sine-x", "tent-shear", "annulus-circular")


@dataclass
class RunConfig:
    """Typed view of a parsed configuration document."""

    values: dict = dc_field(default_factory=dict)
    path: str = "<memory>"

    def get(self, section: str, key: str, default=None):
        return self.values.get(section, {}).get(key, default)

    def require(self, section: str, key: str):
        val = self.get(section, key)
        if val is None:
            raise ConfigError(f"missing required key {section}.{key}")
        return val


def load_config(path) -> RunConfig:
    parser = configparser.ConfigParser(interpolation=None)
    read = parser.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path}")
    values: dict = {}
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}] in {path}")
        values[section] = {}
        for key, raw in parser.items(section):
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown key {section}.{key} in {path}")
            caster = _SCHEMA[section][key]
            try:
                values[section][key] = caster(raw)
            except ConfigError:
                raise
            except ValueError as exc:
                raise ConfigError(f"bad value for {section}.{key}: {raw!r}") from exc
    cfg = RunConfig(values=values, path=str(path))
    _validate_ranges(cfg)
    return cfg


def _validate_ranges(cfg: RunConfig) -> None:
    kappa = cfg.get("diffusivity", "kappa")
    if kappa is not None and not 0.0 < kappa < 1.0:
        raise ConfigError(f"diffusivity.kappa must lie in (0, 1), got {kappa}")
    gamma = cfg.get("diffusivity", "gamma")
    if gamma is not None and not 0.0 <= gamma <= 1.0:
        raise ConfigError(f"diffusivity.gamma must lie in [0, 1], got {gamma}")
    kind = cfg.get("flow", "kind")
    if kind is not None and kind not in _FLOW_KINDS:
        raise ConfigError(f"flow.kind must be one of {_FLOW_KINDS}, got {kind!r}")
    data_kind = cfg.get("initial_data", "kind")
    if data_kind is not None and data_kind not in _DATA_KINDS:
        raise ConfigError(f"initial_data.kind must be one of {_DATA_KINDS}, got {data_kind!r}")
    backend = cfg.get("solver", "backend")
    if backend is not None and backend not in ("grid", "monte-carlo"):
        raise ConfigError(f"solver.backend must be grid or monte-carlo, got {backend!r}")
    threshold = cfg.get("experiment", "threshold")
    if threshold is not None and not 0.0 < threshold < 1.0:
        raise ConfigError(f"experiment.threshold must lie in (0, 1), got {threshold}")
    logc = cfg.get("experiment", "log_correction")
    if logc is not None and logc not in ("auto", "on", "off"):
        raise ConfigError(f"experiment.log_correction must be auto/on/off, got {logc!r}")
    for key in ("kappa_values",):
        vals = cfg.get("experiment", key)
        if vals is not None and any(not 0.0 < v < 1.0 for v in vals):
            raise ConfigError(f"experiment.{key} entries must lie in (0, 1)")
    ds = cfg.get("solver", "dt")
    if ds is not None and ds <= 0.0:
        raise ConfigError(f"solver.dt must be positive, got {ds}")
    formats = cfg.get("output", "formats")
    if formats is not None:
        bad = set(formats) - {"csv", "svg", "binary"}
        if bad:
            raise ConfigError(f"output.formats entries must be csv/svg/binary, got {sorted(bad)}")


def build_flow(cfg: RunConfig) -> VelocityField:
    kind = cfg.require("flow", "kind")
    if kind == "zero":
        return Zero()
    if kind == "constant-shear":
        return ConstantShear(s=cfg.get("flow", "s", 1.0))
    if kind == "power-shear":
        return PowerShear(n=cfg.require("flow", "n"))
    if kind == "holder-shear":
        return HolderShear(alpha=cfg.require("flow", "alpha"), c=cfg.get("flow", "c", 1.0))
    if kind == "circular":
        return Circular(q=cfg.require("flow", "q"))
    raise ConfigError(f"flow.kind {kind!r} not recognized")


def output_dir(cfg: RunConfig, override=None) -> Path:
    directory = override or cfg.get("output", "directory", "out")
    path = Path(directory)
    path.mkdir(parents=True, exist_ok=True)
    return path


def default_threshold() -> float:
    return 1.0 / math.e

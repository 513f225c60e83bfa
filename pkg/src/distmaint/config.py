"""YAML study configuration and run manifests.

Quantities may carry units (``"6 months"``, ``"50 km"``); bare numbers are
canonical hours, km, km/h and $.  Every error names the dotted key path.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field, fields
from importlib import resources
from pathlib import Path
from typing import Any, Optional

import yaml

from .expkit import InvalidConfig, ScenarioConfig
from .units import UnitError, parse_quantity


class ConfigError(ValueError):
    pass


# key path -> (ScenarioConfig field, kind, required)
SCHEMA: dict[str, tuple[str, str, bool]] = {
    "sites.n": ("n_sites", "int", True),
    "sites.radius": ("radius_km", "length", True),
    "sites.mttr": ("mttr_h", "duration", True),
    "sites.cr": ("cr", "money", True),
    "sites.cp": ("cp_values", "rate_list", True),
    "sites.weibull.eta": ("eta_h", "duration", True),
    "sites.weibull.beta": ("betas", "float_list", True),
    "horizon.sweep": ("horizons_h", "duration_list", True),
    "horizon.study": ("study_horizon_h", "duration", False),
    "vehicle.q": ("capacities", "int_list", True),
    "vehicle.cd": ("cd", "cost_per_km", False),
    "vehicle.ct": ("ct", "rate", False),
    "vehicle.speed": ("speed_kmh", "speed", False),
    "design.depot_methods": ("depot_methods", "str_list", False),
    "design.capacity_mode": ("capacity_mode", "str", False),
    "design.study_cp": ("study_cp", "rate", False),
    "experiment.replications": ("replications", "int", False),
    "experiment.seed": ("seed", "int", False),
    "experiment.workers": ("workers", "int", False),
    "experiment.extension_added": ("extension_added", "int", False),
    "experiment.extension_step": ("extension_step", "int", False),
    "omcr.rel_tol": ("rel_tol", "float", False),
    "omcr.max_iter": ("max_iter", "int", False),
    "omcr.window_fraction": ("window_fraction", "float", False),
}

_UNIT = {"duration": "h", "length": "km", "speed": "km/h", "money": "$", "rate": "$/h",
         "cost_per_km": "$/km"}


def _convert(path: str, kind: str, value: Any):
    base = kind[:-5] if kind.endswith("_list") else kind
    if kind.endswith("_list"):
        items = value if isinstance(value, list) else [value]
        if not items:
            raise ConfigError(f"{path}: empty list")
        return tuple(_convert(f"{path}[{i}]", base, v) for i, v in enumerate(items))
    try:
        if base == "int":
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError(f"{path}: expected an integer, got {value!r}")
            return value
        if base == "float":
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(f"{path}: expected a number, got {value!r}")
            return float(value)
        if base == "str":
            if not isinstance(value, str):
                raise ConfigError(f"{path}: expected a string, got {value!r}")
            return value
        return parse_quantity(value, base)
    except UnitError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _flatten(doc: Any, prefix: str = "") -> dict[str, Any]:
    if not isinstance(doc, dict):
        raise ConfigError(f"{prefix or '<root>'}: expected a mapping")
    out = {}
    for k, v in doc.items():
        path = f"{prefix}.{k}" if prefix else str(k)
        if isinstance(v, dict):
            out.update(_flatten(v, path))
        else:
            out[path] = v
    return out


def config_from_mapping(doc: Any) -> ScenarioConfig:
    flat = _flatten(doc if doc is not None else {})
    unknown = sorted(k for k in flat if k not in SCHEMA)
    if unknown:
        raise ConfigError(f"{unknown[0]}: unknown key")
    missing = [k for k, (_, _, req) in SCHEMA.items() if req and k not in flat]
    if missing:
        raise ConfigError(f"{missing[0]}: missing required key")
    kwargs = {}
    for path, value in flat.items():
        name, kind, _ = SCHEMA[path]
        kwargs[name] = _convert(path, kind, value)
    try:
        return ScenarioConfig(**kwargs)
    except InvalidConfig as exc:
        paths = {name: path for path, (name, _, _) in SCHEMA.items()}
        name, msg = exc.problems[0]
        raise ConfigError(f"{paths.get(name, name)}: {msg}") from exc


def parse_config(path) -> ScenarioConfig:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"{p}: cannot read ({exc.strerror})") from exc
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{p}: malformed YAML ({exc})") from exc
    return config_from_mapping(doc)


def default_config() -> ScenarioConfig:
    text = resources.files("distmaint").joinpath("data/defaults.yaml").read_text()
    return config_from_mapping(yaml.safe_load(text))


def config_to_mapping(config: ScenarioConfig) -> dict:
    """Nested document with explicit canonical units."""
    values = asdict(config)
    doc: dict = {}
    for path, (name, kind, _) in SCHEMA.items():
        v = values[name]
        base = kind[:-5] if kind.endswith("_list") else kind
        def enc(x, base=base):
            return f"{x!r} {_UNIT[base]}" if base in _UNIT else x
        v = [enc(x) for x in v] if kind.endswith("_list") else enc(v)
        node = doc
        *parents, leaf = path.split(".")
        for k in parents:
            node = node.setdefault(k, {})
        node[leaf] = v
    return doc


def serialize_config(config: ScenarioConfig) -> str:
    return yaml.safe_dump(config_to_mapping(config), sort_keys=False)


def config_digest(config: ScenarioConfig, command: str = "", extra: Optional[dict] = None) -> str:
    """sha256 over sorted-key JSON of the canonicalised configuration."""
    canonical = config_from_mapping(config_to_mapping(config))
    payload = {"command": command, "config": asdict(canonical), "extra": extra or {}}
    text = json.dumps(payload, sort_keys=True, separators=(",", ":"), default=list)
    return hashlib.sha256(text.encode()).hexdigest()


@dataclass
class RunManifest:
    command: str
    config_digest: str
    seed: int
    tool_version: str
    outputs: list[str] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps({f.name: getattr(self, f.name) for f in fields(self)}, indent=2, sort_keys=True) + "\n"

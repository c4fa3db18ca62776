"""JSON stack configurations: schema, loading and canonical hashing."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import jsonschema

from .core import Layer, UnitCell, quarter_wave_cell
from .emission import DipoleSpec, SpectralGrid
from .errors import ConfigError, DomainError

ROUTE_CHOICES = ("phase", "closed", "qw", "all")

_POSITIVE = {"type": "number", "exclusiveMinimum": 0}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "finitepbg stack configuration",
    "type": "object",
    "additionalProperties": False,
    "required": ["cell", "periods"],
    "properties": {
        "description": {"type": "string"},
        "cell": {
            "type": "object",
            "required": ["type"],
            "properties": {"type": {"enum": ["quarter_wave", "layers"]}},
            "allOf": [
                {
                    "if": {"properties": {"type": {"const": "quarter_wave"}}},
                    "then": {
                        "additionalProperties": False,
                        "required": ["n1", "n2"],
                        "properties": {
                            "type": {},
                            "n1": _POSITIVE,
                            "n2": _POSITIVE,
                            "omega0": _POSITIVE,
                        },
                    },
                },
                {
                    "if": {"properties": {"type": {"const": "layers"}}},
                    "then": {
                        "additionalProperties": False,
                        "required": ["layers"],
                        "properties": {
                            "type": {},
                            "layers": {
                                "type": "array",
                                "minItems": 1,
                                "items": {
                                    "type": "object",
                                    "additionalProperties": False,
                                    "required": ["index", "thickness"],
                                    "properties": {"index": _POSITIVE, "thickness": _POSITIVE},
                                },
                            },
                            "ambient_index": _POSITIVE,
                            "omega0": _POSITIVE,
                        },
                    },
                },
            ],
        },
        "periods": {"type": "integer", "minimum": 1, "maximum": 10000},
        "grid": {
            "type": "object",
            "additionalProperties": False,
            "required": ["omega_min", "omega_max", "points"],
            "properties": {
                "omega_min": _POSITIVE,
                "omega_max": _POSITIVE,
                "points": {"type": "integer", "minimum": 1},
            },
        },
        "cell_index": {"type": "integer", "minimum": 1},
        "routes": {
            "type": "array",
            "minItems": 1,
            "items": {"enum": ["phase", "closed", "qw"]},
        },
        "field_points": {"type": "integer", "minimum": 2},
        "dipoles": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["cell"],
                "properties": {
                    "cell": {"type": "integer", "minimum": 1},
                    "layer": {"type": "integer", "minimum": 0},
                    "fraction": {"type": "number", "minimum": 0, "maximum": 1},
                    "offset": {"type": "number", "minimum": 0},
                },
                "not": {"required": ["offset", "layer"]},
            },
        },
    },
}

DEFAULT_GRID = {"omega_min": 1 / 512, "omega_max": 1.0, "points": 512}


@dataclass(frozen=True)
class StackConfig:
    """Validated configuration.  ``raw`` keeps the parsed JSON for hashing."""

    cell: UnitCell
    periods: int
    grid: SpectralGrid
    cell_index: int
    routes: tuple[str, ...]
    dipoles: tuple[DipoleSpec, ...]
    field_points: int
    raw: dict = field(repr=False, compare=False)

    @property
    def digest(self) -> str:
        return config_digest(self.raw)

    @property
    def is_quarter_wave(self) -> bool:
        return self.raw["cell"]["type"] == "quarter_wave"


def config_digest(raw: dict) -> str:
    """sha256 of the canonical (sorted, compact) JSON form."""
    text = json.dumps(raw, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


def _path(error: jsonschema.ValidationError) -> str:
    return "/".join(str(p) for p in error.absolute_path) or "<root>"


def _build_cell(spec: dict) -> UnitCell:
    k0 = spec.get("omega0", 1.0)
    if spec["type"] == "quarter_wave":
        return quarter_wave_cell(spec["n1"], spec["n2"], k0)
    layers = tuple(Layer(item["index"], item["thickness"]) for item in spec["layers"])
    return UnitCell(layers, spec.get("ambient_index", 1.0), k0)


def parse_config(raw: dict) -> StackConfig:
    """Validate ``raw`` against :data:`SCHEMA` and the cross-field rules."""
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(raw), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        raise ConfigError(f"config error at {_path(e)}: {e.message}")
    try:
        cell = _build_cell(raw["cell"])
        N = raw["periods"]
        g = raw.get("grid", DEFAULT_GRID)
        grid = SpectralGrid(g["omega_min"], g["omega_max"], g["points"])
        cell_index = raw.get("cell_index", (N + 1) // 2)
        if cell_index > N:
            raise ConfigError(f"config error at cell_index: {cell_index} exceeds periods={N}")
        dipoles = []
        for i, d in enumerate(raw.get("dipoles", [])):
            if d["cell"] > N:
                raise ConfigError(f"config error at dipoles/{i}/cell: {d['cell']} exceeds periods={N}")
            if "offset" in d:
                dip = DipoleSpec.at_offset(cell, d["cell"], d["offset"])
            else:
                dip = DipoleSpec(d["cell"], d.get("layer", 0), d.get("fraction", 0.5))
            dip.check(cell, N)
            dipoles.append(dip)
        if not dipoles:
            dipoles = [DipoleSpec(cell_index, j, 0.5) for j in range(len(cell.layers))]
    except DomainError as exc:
        raise ConfigError(f"config error: {exc}") from exc
    return StackConfig(
        cell=cell,
        periods=N,
        grid=grid,
        cell_index=cell_index,
        routes=tuple(raw.get("routes", ["phase"])),
        dipoles=tuple(dipoles),
        field_points=raw.get("field_points", 65),
        raw=raw,
    )


def load_config(path) -> StackConfig:
    """Read and validate a JSON configuration file."""
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return parse_config(raw)


def bundled_raw(name: str) -> dict:
    res = resources.files("finitepbg") / "configs" / f"{name}.json"
    if not res.is_file():
        raise ConfigError(f"no bundled config named {name!r}")
    return json.loads(res.read_text())


def bundled_config(name: str) -> StackConfig:
    """Load one of the packaged configurations, e.g. ``"fig4"``."""
    return parse_config(bundled_raw(name))


def bundled_names() -> list[str]:
    base = resources.files("finitepbg") / "configs"
    return sorted(p.name[:-5] for p in base.iterdir() if p.name.endswith(".json"))

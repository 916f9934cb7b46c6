"""Run configuration: JSON sections, dot-path overrides, validation and defaults."""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Sequence

from .fracops import ORDER_MAX, ORDER_MIN, FractionalParams

__all__ = [
    "ANALYSES",
    "ConfigError",
    "RunConfig",
    "parse_config",
    "apply_overrides",
    "DEFAULTS",
]

ANALYSES = ("beam-static", "beam-modal", "plate-static", "plate-modal", "dispersion", "lattice-check", "sweep")


class ConfigError(ValueError):
    """Schema or range violation in a run configuration."""


DEFAULTS: dict[str, Any] = {
    "analysis": None,
    "geometry": {"beam": {"L": 1.0, "b": 0.1, "h": 0.05}, "plate": {"L": 1.0, "B": 1.0, "h": 0.1}},
    "material": {"E": 30e9, "nu": 0.3, "rho": 2700.0, "Ks": 5.0 / 6.0},
    "fractional": {"alpha1": 1.0, "alpha2": 1.0, "l_f": 0.0, "l_star": 0.0},
    "load": {"beam": {"Fz": 1e6}, "plate": {"Fz": 1e7}},
    "bc": {"beam": "CC", "plate": "SSSS"},
    "mesh": {"n_elem": 50, "nx": 20, "ny": 20, "quad_full": 3, "quad_shear": 2},
    "sweep": {"structure": "beam", "mode": "static", "alpha1": None, "alpha2": None, "l_f": None, "l_star": None},
    "output": {"path": None, "format": "csv", "timing": True, "n_modes": 1},
    "dispersion": {
        "E": 1.0, "rho": 1.0, "rho_prime": 0.0, "alpha1": 0.75, "alpha2": 0.9, "l_star": 0.1,
        "inertia_gradient": False, "kmin": 1e-2, "kmax": 1e2, "n": 100,
    },
    "lattice": {
        "n": 41, "l_star": 0.025, "E": 30e9, "A": 5e-3, "alpha1": 0.75, "alpha2": 1.75,
        "horizon_particles": 8, "halvings": 4, "amplitude": 1e-3, "wavenumber": 2.0,
    },
}

_SECTIONS = ("geometry", "material", "fractional", "load", "bc", "mesh", "sweep", "output", "dispersion", "lattice")
_GEOMETRY_KEYS = {"L", "b", "h", "B"}
_BEAM_LOADS = {"Fx", "Fz", "Mtheta", "pressure"}
_PLATE_LOADS = {"Fx", "Fy", "Fz", "Mtheta_x", "Mtheta_y"}


@dataclass(frozen=True)
class RunConfig:
    analysis: str
    structure: str | None
    geometry: dict
    material: dict
    fractional: FractionalParams
    load: dict
    bc: str | None
    mesh: dict
    sweep: dict
    output: dict
    dispersion: dict
    lattice: dict
    raw: dict = field(repr=False, compare=False, default_factory=dict)

    def echo(self) -> dict:
        """JSON-safe copy of the validated configuration."""
        return json.loads(json.dumps(self.raw))


def _structure_of(analysis: str, sweep: Mapping) -> str | None:
    if analysis.startswith("beam"):
        return "beam"
    if analysis.startswith("plate"):
        return "plate"
    if analysis == "sweep":
        return sweep.get("structure")
    return None


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_overrides(raw: dict, overrides: Sequence[str]) -> dict:
    """Apply ``dot.path=value`` assignments; values are parsed as JSON when possible."""
    out = copy.deepcopy(raw)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form dot.path=value")
        path, value = item.split("=", 1)
        keys = [k for k in path.strip().split(".") if k]
        if not keys:
            raise ConfigError(f"override {item!r} has an empty key")
        node = out
        for k in keys[:-1]:
            nxt = node.setdefault(k, {})
            if not isinstance(nxt, dict):
                raise ConfigError(f"override {path!r}: {k!r} is not a section")
            node = nxt
        node[keys[-1]] = _parse_value(value)
    return out


def _merge_section(name: str, user: Any, default: Mapping) -> dict:
    if user is None:
        return dict(default)
    if not isinstance(user, Mapping):
        raise ConfigError(f"section {name!r} must be an object")
    unknown = set(user) - set(default)
    if unknown:
        raise ConfigError(f"unknown key {name}.{sorted(unknown)[0]}")
    merged = dict(default)
    merged.update(user)
    return merged


def _number(section: str, key: str, value, positive=False, nonneg=False) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{section}.{key} must be a number, got {value!r}")
    v = float(value)
    if positive and not v > 0:
        raise ConfigError(f"{section}.{key} must be positive, got {v}")
    if nonneg and not v >= 0:
        raise ConfigError(f"{section}.{key} must be non-negative, got {v}")
    return v


def _order(section: str, key: str, value) -> float:
    v = _number(section, key, value)
    if not ORDER_MIN <= v <= ORDER_MAX:
        raise ConfigError(
            f"{section}.{key}={v} is outside [{ORDER_MIN}, {ORDER_MAX}]; fractional orders "
            "must lie in [0.5, 1] for the medium to stay causal and stable"
        )
    return v


def _grid(key: str, value, fallback: float) -> list[float]:
    if value is None:
        return [fallback]
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return [float(value)]
    if not isinstance(value, list) or not value:
        raise ConfigError(f"sweep.{key} must be a number or a non-empty list")
    return [_number("sweep", key, v) for v in value]


def parse_config(source: str | Path | Mapping | None = None, overrides: Sequence[str] = (), analysis: str | None = None) -> RunConfig:
    """Load, merge with defaults and validate a run configuration.

    ``source`` is a path to a JSON file, an already-parsed mapping or
    ``None`` (defaults only).  ``analysis`` (the CLI subcommand) takes
    precedence over an ``analysis`` key in the file.
    """
    if source is None:
        raw: dict = {}
    elif isinstance(source, Mapping):
        raw = copy.deepcopy(dict(source))
    else:
        path = Path(source)
        try:
            raw = json.loads(path.read_text())
        except FileNotFoundError:
            raise ConfigError(f"config file {path} does not exist") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError("config root must be an object")
    raw = apply_overrides(raw, overrides)
    unknown = set(raw) - set(_SECTIONS) - {"analysis"}
    if unknown:
        raise ConfigError(f"unknown key {sorted(unknown)[0]}")

    name = analysis or raw.get("analysis")
    if name not in ANALYSES:
        raise ConfigError(f"analysis must be one of {ANALYSES}, got {name!r}")
    sweep = _merge_section("sweep", raw.get("sweep"), DEFAULTS["sweep"])
    structure = _structure_of(name, sweep)
    if name == "sweep":
        if structure not in ("beam", "plate"):
            raise ConfigError(f"sweep.structure must be 'beam' or 'plate', got {structure!r}")
        if sweep["mode"] not in ("static", "modal"):
            raise ConfigError(f"sweep.mode must be 'static' or 'modal', got {sweep['mode']!r}")

    kind = structure or "beam"
    geometry = _merge_section("geometry", raw.get("geometry"), DEFAULTS["geometry"][kind])
    if set(geometry) - _GEOMETRY_KEYS:
        raise ConfigError(f"unknown key geometry.{sorted(set(geometry) - _GEOMETRY_KEYS)[0]}")
    for k, v in geometry.items():
        geometry[k] = _number("geometry", k, v, positive=True)

    material = _merge_section("material", raw.get("material"), DEFAULTS["material"])
    for k in ("E", "rho"):
        material[k] = _number("material", k, material[k], positive=True)
    material["nu"] = _number("material", "nu", material["nu"])
    if not -1.0 < material["nu"] < 0.5:
        raise ConfigError(f"material.nu must lie in (-1, 0.5), got {material['nu']}")
    material["Ks"] = _number("material", "Ks", material["Ks"], positive=True)
    if material["Ks"] > 1:
        raise ConfigError(f"material.Ks must lie in (0, 1], got {material['Ks']}")

    frac = _merge_section("fractional", raw.get("fractional"), DEFAULTS["fractional"])
    a1 = _order("fractional", "alpha1", frac["alpha1"])
    a2 = _order("fractional", "alpha2", frac["alpha2"])
    l_f = _number("fractional", "l_f", frac["l_f"], nonneg=True)
    l_star = _number("fractional", "l_star", frac["l_star"], nonneg=True)
    extent = max(geometry.get("L", 0.0), geometry.get("B", 0.0)) if structure == "plate" else geometry.get("L", 0.0)
    if structure is not None and l_f > extent:
        raise ConfigError(f"fractional.l_f={l_f} exceeds the domain extent {extent}")
    params = FractionalParams(a1, a2, l_f, l_star)

    load_defaults = DEFAULTS["load"][kind]
    allowed = _BEAM_LOADS if kind == "beam" else _PLATE_LOADS
    user_load = raw.get("load")
    if user_load is not None and not isinstance(user_load, Mapping):
        raise ConfigError("section 'load' must be an object")
    load = dict(user_load) if user_load is not None else dict(load_defaults)
    for k, v in load.items():
        if k not in allowed:
            raise ConfigError(f"unknown key load.{k}")
        load[k] = _number("load", k, v)
    if "pressure" in load:
        # surface pressure on the top face of the beam -> line load
        load["Fz"] = load.get("Fz", 0.0) + load.pop("pressure") * geometry["b"]

    bc = raw.get("bc", DEFAULTS["bc"][kind]) if structure else None
    if structure == "beam" and bc not in ("CC", "SS"):
        raise ConfigError(f"bc must be 'CC' or 'SS' for a beam, got {bc!r}")
    if structure == "plate" and bc not in ("CCCC", "SSSS"):
        raise ConfigError(f"bc must be 'CCCC' or 'SSSS' for a plate, got {bc!r}")

    mesh = _merge_section("mesh", raw.get("mesh"), DEFAULTS["mesh"])
    for k, v in mesh.items():
        if isinstance(v, bool) or not isinstance(v, int) or v < 1:
            raise ConfigError(f"mesh.{k} must be a positive integer, got {v!r}")
    if mesh["n_elem"] < 2:
        raise ConfigError("mesh.n_elem must be at least 2")

    if name == "sweep":
        sweep["alpha1"] = [_order("sweep", "alpha1", v) for v in _grid("alpha1", sweep["alpha1"], a1)]
        sweep["alpha2"] = [_order("sweep", "alpha2", v) for v in _grid("alpha2", sweep["alpha2"], a2)]
        sweep["l_f"] = _grid("l_f", sweep["l_f"], l_f)
        sweep["l_star"] = _grid("l_star", sweep["l_star"], l_star)
        for v in sweep["l_f"]:
            if not 0 <= v <= extent:
                raise ConfigError(f"sweep.l_f={v} must lie in [0, {extent}]")
        for v in sweep["l_star"]:
            if v < 0:
                raise ConfigError(f"sweep.l_star={v} must be non-negative")

    output = _merge_section("output", raw.get("output"), DEFAULTS["output"])
    if output["format"] not in ("csv", "json"):
        raise ConfigError(f"output.format must be 'csv' or 'json', got {output['format']!r}")
    if not isinstance(output["timing"], bool):
        raise ConfigError("output.timing must be true or false")
    if isinstance(output["n_modes"], bool) or not isinstance(output["n_modes"], int) or output["n_modes"] < 1:
        raise ConfigError("output.n_modes must be a positive integer")

    disp = _merge_section("dispersion", raw.get("dispersion"), DEFAULTS["dispersion"])
    if name == "dispersion":
        for k in ("E", "rho", "kmin", "kmax"):
            disp[k] = _number("dispersion", k, disp[k], positive=True)
        for k in ("rho_prime", "l_star"):
            disp[k] = _number("dispersion", k, disp[k], nonneg=True)
        disp["alpha1"] = _order("dispersion", "alpha1", disp["alpha1"])
        disp["alpha2"] = _order("dispersion", "alpha2", disp["alpha2"])
        if not disp["kmin"] < disp["kmax"]:
            raise ConfigError("dispersion.kmin must be below dispersion.kmax")
        if isinstance(disp["n"], bool) or not isinstance(disp["n"], int) or disp["n"] < 2:
            raise ConfigError("dispersion.n must be an integer of at least 2")

    lat = _merge_section("lattice", raw.get("lattice"), DEFAULTS["lattice"])
    if name == "lattice-check":
        for k in ("l_star", "E", "A", "wavenumber"):
            lat[k] = _number("lattice", k, lat[k], positive=True)
        lat["amplitude"] = _number("lattice", "amplitude", lat["amplitude"])
        if not 0 < lat["alpha1"] <= 1:
            raise ConfigError(f"lattice.alpha1 must lie in (0, 1], got {lat['alpha1']}")
        if not 1 < lat["alpha2"] <= 2:
            raise ConfigError(f"lattice.alpha2 must lie in (1, 2], got {lat['alpha2']}")
        for k in ("n", "horizon_particles", "halvings"):
            if isinstance(lat[k], bool) or not isinstance(lat[k], int) or lat[k] < 1:
                raise ConfigError(f"lattice.{k} must be a positive integer")

    cfg_echo = {
        "analysis": name,
        "geometry": geometry,
        "material": material,
        "fractional": params.as_dict(),
        "load": load,
        "bc": bc,
        "mesh": mesh,
        "sweep": sweep,
        "output": output,
        "dispersion": disp,
        "lattice": lat,
    }
    return RunConfig(name, structure, geometry, material, params, load, bc, mesh, sweep, output, disp, lat, cfg_echo)

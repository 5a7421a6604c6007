"""Run configuration: a JSON document with dotted-path overrides."""
from __future__ import annotations

import copy
import json
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional

from .friction import DampingKind, Intrinsic, Radiative
from .quadrature import QuadratureConfig
from .response import MODELS, ResponseModel, make_model
from .units import ANGSTROM, AVERAGED, AtomParams, MetalParams, derived_scales, ev_to_angular

__all__ = [
    "ConfigError",
    "DEFAULT_CONFIG",
    "ScanSpec",
    "ProbeSpec",
    "RunConfig",
    "load_config",
    "apply_override",
    "build_config",
    "parse_length",
]


class ConfigError(ValueError):
    """Malformed or inconsistent configuration (CLI exit code 2)."""


DEFAULT_CONFIG: dict = {
    "metal": {"omega_p_ev": 9.0, "gamma_ev": 0.030, "v_f_over_c": 1.0 / 137.0},
    "quadrature": {"rel_tol": 1e-9, "abs_tol": 1e-300, "max_subdivisions": 2000},
    "scan": {
        "z_min": "3 lambda_tf",
        "z_max": "30 ell",
        "points": 60,
        "model": "scib",
        "damping": "radiative",
        "gamma_int_ev": None,
        "normalize": True,
        "include_shift": False,
        "v_x": None,
        "atom": None,
        "workers": 1,
    },
    "probe": {"omega_ev": 0.0, "p": "1 /lambda_tf", "z": "10 lambda_tf", "model": "scib"},
    "output": {"path": None, "format": "csv"},
}

_UNITS = {"m": 1.0, "nm": 1e-9, "angstrom": ANGSTROM, "a": ANGSTROM}
_LENGTH_RE = re.compile(r"^\s*([-+0-9.eE]+)\s*(/?)\s*([A-Za-z_]*)\s*$")


def parse_length(value, metal: MetalParams, field: str, inverse: bool = False) -> float:
    """Parse a number (SI) or a string such as ``"3 lambda_tf"``, ``"2 nm"``, ``"0.5 /ell"``.

    With ``inverse`` the result is a wavevector: ``"1 /lambda_tf"`` means
    ``1/lambda_TF`` and a bare number is taken in 1/m.
    """
    if isinstance(value, bool):
        raise ConfigError(f"{field}: expected a length, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if not isinstance(value, str):
        raise ConfigError(f"{field}: expected a number or string, got {value!r}")
    m = _LENGTH_RE.match(value)
    if not m:
        raise ConfigError(f"{field}: cannot parse {value!r}")
    number, slash, unit = m.groups()
    try:
        x = float(number)
    except ValueError:
        raise ConfigError(f"{field}: bad number in {value!r}") from None
    sc = derived_scales(metal)
    scales = dict(_UNITS, lambda_tf=sc.lambda_tf, ell=sc.ell)
    unit = unit.lower() or "m"
    if unit not in scales:
        raise ConfigError(f"{field}: unknown unit {unit!r}")
    length = scales[unit]
    if inverse or slash:
        if not slash and unit != "m":
            raise ConfigError(f"{field}: wavevectors are written as '<x> /<length>'")
        return x / length if slash else x
    return x * length


@dataclass(frozen=True)
class ScanSpec:
    z_min: float
    z_max: float
    points: int
    model: ResponseModel
    damping: DampingKind
    normalize: bool
    include_shift: bool
    v_x: Optional[float]
    atom: Optional[AtomParams]
    workers: int


@dataclass(frozen=True)
class ProbeSpec:
    omega: float
    p: float
    z: float
    model: ResponseModel


@dataclass(frozen=True)
class RunConfig:
    metal: MetalParams
    quadrature: QuadratureConfig
    scan: Optional[ScanSpec]
    probe: Optional[ProbeSpec]
    output_path: Optional[str]
    output_format: str
    raw: dict


def _merge(base: dict, update: dict, prefix: str = "") -> dict:
    out = copy.deepcopy(base)
    for key, val in update.items():
        path = f"{prefix}{key}"
        if key not in out:
            raise ConfigError(f"unknown config field {path!r}")
        if isinstance(out[key], dict) and isinstance(val, dict):
            out[key] = _merge(out[key], val, path + ".")
        else:
            out[key] = val
    return out


def load_config(path: Optional[str]) -> dict:
    """Read a JSON config file merged over the defaults."""
    if path is None:
        return copy.deepcopy(DEFAULT_CONFIG)
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return _merge(DEFAULT_CONFIG, doc)


def apply_override(doc: dict, assignment: str) -> dict:
    """Apply ``key.sub=value``; the value is parsed as JSON, else kept as a string."""
    if "=" not in assignment:
        raise ConfigError(f"--set expects key=value, got {assignment!r}")
    key, _, text = assignment.partition("=")
    parts = key.strip().split(".")
    try:
        value: Any = json.loads(text)
    except json.JSONDecodeError:
        value = text
    node = doc
    for i, part in enumerate(parts[:-1]):
        if part == "atom" and node.get(part) is None:
            node[part] = {}
        if not isinstance(node.get(part), dict):
            raise ConfigError(f"unknown config field {'.'.join(parts[:i + 1])!r}")
        node = node[part]
    leaf = parts[-1]
    inside_atom = len(parts) >= 2 and parts[-2] == "atom"
    if leaf not in node and not inside_atom:
        raise ConfigError(f"unknown config field {key.strip()!r}")
    node[leaf] = value
    return doc


def _number(section: dict, key: str, where: str) -> float:
    val = section.get(key)
    if isinstance(val, bool) or not isinstance(val, (int, float)) or not math.isfinite(val):
        raise ConfigError(f"{where}.{key}: expected a finite number, got {val!r}")
    return float(val)


def _build_metal(sec: dict) -> MetalParams:
    try:
        return MetalParams.from_ev(_number(sec, "omega_p_ev", "metal"), _number(sec, "gamma_ev", "metal"),
                                   _number(sec, "v_f_over_c", "metal"))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"metal: {exc}") from None


def _build_atom(sec) -> Optional[AtomParams]:
    if sec is None:
        return None
    if not isinstance(sec, dict):
        raise ConfigError("scan.atom: expected an object")
    orientation = sec.get("orientation", AVERAGED)
    if orientation != AVERAGED:
        if not (isinstance(orientation, list) and len(orientation) == 3):
            raise ConfigError("scan.atom.orientation: 'averaged' or a 3-vector")
    try:
        return AtomParams.from_angstrom3(_number(sec, "alpha0_a3", "scan.atom"),
                                         _number(sec, "omega_a_ev", "scan.atom"),
                                         orientation if orientation == AVERAGED else tuple(orientation))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"scan.atom: {exc}") from None


def _build_model(name, metal, where) -> ResponseModel:
    if name not in MODELS:
        raise ConfigError(f"{where}: unknown model {name!r} (choose from {sorted(MODELS)})")
    return make_model(name, metal)


ALL_SECTIONS = ("scan", "probe")


def build_config(doc: dict, sections=ALL_SECTIONS) -> RunConfig:
    """Validate a merged config document and build the typed configuration.

    ``metal``, ``quadrature`` and ``output`` are always checked; ``scan`` and
    ``probe`` only when listed in ``sections`` (unused sections may then
    hold values that are invalid for the given metal, e.g. lengths in units
    of an infinite mean free path).
    """
    for section in ("metal", "quadrature", "scan", "probe", "output"):
        if not isinstance(doc.get(section), dict):
            raise ConfigError(f"{section}: expected an object")
    metal = _build_metal(doc["metal"])
    q = doc["quadrature"]
    maxsub = q.get("max_subdivisions")
    if isinstance(maxsub, bool) or not isinstance(maxsub, int):
        raise ConfigError(f"quadrature.max_subdivisions: expected an integer, got {maxsub!r}")
    try:
        quad = QuadratureConfig(_number(q, "rel_tol", "quadrature"), _number(q, "abs_tol", "quadrature"), maxsub)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"quadrature: {exc}") from None

    scan = _build_scan(doc["scan"], metal) if "scan" in sections else None
    probe = _build_probe(doc["probe"], metal) if "probe" in sections else None
    out = doc["output"]
    if out["format"] not in ("csv", "json"):
        raise ConfigError(f"output.format: 'csv' or 'json', got {out['format']!r}")
    return RunConfig(metal, quad, scan, probe, out["path"], out["format"], doc)


def _build_scan(s: dict, metal: MetalParams) -> ScanSpec:
    z_min = parse_length(s["z_min"], metal, "scan.z_min")
    z_max = parse_length(s["z_max"], metal, "scan.z_max")
    if not (math.isfinite(z_min) and math.isfinite(z_max)):
        raise ConfigError("scan: z range is infinite (ell = inf when gamma_ev = 0)")
    if not 0 < z_min < z_max:
        raise ConfigError(f"scan: need 0 < z_min < z_max, got {z_min!r}, {z_max!r}")
    points = s["points"]
    if isinstance(points, bool) or not isinstance(points, int) or points < 2:
        raise ConfigError(f"scan.points: expected an integer >= 2, got {points!r}")
    workers = s["workers"]
    if isinstance(workers, bool) or not isinstance(workers, int) or workers < 1:
        raise ConfigError(f"scan.workers: expected a positive integer, got {workers!r}")
    if s["damping"] == "radiative":
        damping: DampingKind = Radiative()
    elif s["damping"] == "intrinsic":
        g = s.get("gamma_int_ev")
        if g is None:
            raise ConfigError("scan.gamma_int_ev is required for intrinsic damping")
        damping = Intrinsic(float(ev_to_angular(_number(s, "gamma_int_ev", "scan"))))
    else:
        raise ConfigError(f"scan.damping: 'radiative' or 'intrinsic', got {s['damping']!r}")
    for flag in ("normalize", "include_shift"):
        if not isinstance(s[flag], bool):
            raise ConfigError(f"scan.{flag}: expected true/false")
    atom = _build_atom(s["atom"])
    v_x = None if s["v_x"] is None else _number(s, "v_x", "scan")
    if not s["normalize"]:
        if atom is None:
            raise ConfigError("scan.atom is required when scan.normalize is false")
        if v_x is None or v_x <= 0:
            raise ConfigError("scan.v_x (m/s, > 0) is required when scan.normalize is false")
    return ScanSpec(z_min, z_max, points, _build_model(s["model"], metal, "scan.model"), damping,
                    s["normalize"], s["include_shift"], v_x, atom, workers)


def _build_probe(p: dict, metal: MetalParams) -> ProbeSpec:
    probe = ProbeSpec(float(ev_to_angular(_number(p, "omega_ev", "probe"))),
                      parse_length(p["p"], metal, "probe.p", inverse=True),
                      parse_length(p["z"], metal, "probe.z"),
                      _build_model(p["model"], metal, "probe.model"))
    if not probe.p > 0 or not probe.z > 0:
        raise ConfigError("probe: p and z must be positive")
    return probe

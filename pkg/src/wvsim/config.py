"""Experiment configuration: JSON schema, per-N defaults, and named presets.

An empty document parses to the full default single-particle configuration.
Defaults that depend on the particle number (grid size, time step, record
stride, orbital centers) are resolved after ``n_particles`` is read.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

from .errors import SchemaViolationError

MODES = ("identical", "distinguishable-separable")

#: per-N defaults: orbital centers, grid points, dt, record stride
DEFAULT_CENTERS = {1: (0.0,), 2: (-4.0, 0.0), 3: (-4.0, 0.0, 4.0)}
DEFAULT_POINTS = {1: 1024, 2: 1024, 3: 128}
DEFAULT_DT = {1: 2.5e-3, 2: 5.0e-3, 3: 5.0e-3}
DEFAULT_STRIDE = {1: 200, 2: 100, 3: 100}

DEFAULT_BOOST = 20.0
DEFAULT_WIDTH = 1.0


@dataclass(frozen=True)
class OrbitalConfig:
    center: float
    boost: float = DEFAULT_BOOST
    width: float = DEFAULT_WIDTH


@dataclass(frozen=True)
class ExperimentConfig:
    n_particles: int = 1
    points_per_axis: int = 1024
    half_width: float = 30.0
    omega: float = 1.0
    alpha: float = 0.5
    gamma_d: float = 5.0
    sigma_d: float = 1.0
    seed: int = 1
    orbitals: tuple[OrbitalConfig, ...] = (OrbitalConfig(0.0),)
    dt: float = 2.5e-3
    t_final: float = 150.0
    record_stride: int = 200
    weakvalue_eval_points: tuple[float, ...] = (0.0,)
    mode: str = "identical"
    snapshot_times: tuple[float, ...] = (0.0, 150.0)
    outputs: str = "runs/out"


_SCALAR_FIELDS = {
    "n_particles": int,
    "points_per_axis": int,
    "half_width": float,
    "omega": float,
    "alpha": float,
    "gamma_d": float,
    "sigma_d": float,
    "seed": int,
    "dt": float,
    "t_final": float,
    "record_stride": int,
    "mode": str,
    "outputs": str,
}
_LIST_FIELDS = ("orbitals", "weakvalue_eval_points", "snapshot_times")
_KNOWN_FIELDS = set(_SCALAR_FIELDS) | set(_LIST_FIELDS)


def _coerce_number(field_path: str, value, kind):
    if kind is int:
        if not isinstance(value, int) or isinstance(value, bool):
            raise SchemaViolationError(field_path, f"expected integer, got {value!r}")
        return value
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise SchemaViolationError(field_path, f"expected number, got {value!r}")
        return float(value)
    if not isinstance(value, str):
        raise SchemaViolationError(field_path, f"expected string, got {value!r}")
    return value


def _parse_orbital(field_path: str, entry) -> OrbitalConfig:
    if not isinstance(entry, dict):
        raise SchemaViolationError(field_path, "orbital must be an object")
    unknown = set(entry) - {"center", "boost", "width"}
    if unknown:
        raise SchemaViolationError(
            f"{field_path}.{sorted(unknown)[0]}", "unknown field"
        )
    if "center" not in entry:
        raise SchemaViolationError(f"{field_path}.center", "required")
    return OrbitalConfig(
        center=_coerce_number(f"{field_path}.center", entry["center"], float),
        boost=_coerce_number(f"{field_path}.boost", entry.get("boost", DEFAULT_BOOST), float),
        width=_coerce_number(f"{field_path}.width", entry.get("width", DEFAULT_WIDTH), float),
    )


def parse_config(document: str) -> ExperimentConfig:
    """Parse and validate a JSON configuration document.

    Unknown keys are rejected with their field path; missing keys take the
    per-N defaults.
    """
    try:
        raw = json.loads(document) if document.strip() else {}
    except json.JSONDecodeError as exc:
        raise SchemaViolationError("<document>", f"invalid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise SchemaViolationError("<document>", "top level must be an object")
    for key in raw:
        if key not in _KNOWN_FIELDS:
            raise SchemaViolationError(key, "unknown field")

    n = raw.get("n_particles", 1)
    n = _coerce_number("n_particles", n, int)
    if not 1 <= n <= 3:
        raise SchemaViolationError("n_particles", f"must be in 1..3, got {n}")

    values: dict = {"n_particles": n}
    for name, kind in _SCALAR_FIELDS.items():
        if name == "n_particles":
            continue
        if name in raw:
            values[name] = _coerce_number(name, raw[name], kind)
    values.setdefault("points_per_axis", DEFAULT_POINTS[n])
    values.setdefault("dt", DEFAULT_DT[n])
    values.setdefault("record_stride", DEFAULT_STRIDE[n])

    if "orbitals" in raw:
        entries = raw["orbitals"]
        if not isinstance(entries, list):
            raise SchemaViolationError("orbitals", "expected a list")
        orbitals = tuple(
            _parse_orbital(f"orbitals[{i}]", e) for i, e in enumerate(entries)
        )
    else:
        orbitals = tuple(OrbitalConfig(c) for c in DEFAULT_CENTERS[n])
    if len(orbitals) != n:
        raise SchemaViolationError(
            "orbitals", f"orbital count {len(orbitals)} != n_particles {n}"
        )
    values["orbitals"] = orbitals

    for name in ("weakvalue_eval_points", "snapshot_times"):
        if name in raw:
            entries = raw[name]
            if not isinstance(entries, list):
                raise SchemaViolationError(name, "expected a list of numbers")
            values[name] = tuple(
                _coerce_number(f"{name}[{i}]", e, float) for i, e in enumerate(entries)
            )
    values.setdefault("weakvalue_eval_points", tuple(o.center for o in orbitals))
    t_final = values.get("t_final", 150.0)
    values.setdefault("snapshot_times", (0.0, t_final))

    config = ExperimentConfig(**values)
    _validate_physics(config)
    return config


def _validate_physics(config: ExperimentConfig) -> None:
    checks = [
        ("points_per_axis", config.points_per_axis >= 16, "must be >= 16"),
        ("half_width", config.half_width > 0, "must be positive"),
        ("omega", config.omega > 0, "must be positive"),
        ("alpha", config.alpha > 0, "must be positive"),
        ("gamma_d", config.gamma_d >= 0, "must be >= 0"),
        ("sigma_d", config.sigma_d > 0, "must be positive"),
        ("dt", config.dt > 0, "must be positive"),
        ("t_final", config.t_final > 0, "must be positive"),
        ("record_stride", config.record_stride >= 1, "must be >= 1"),
        ("mode", config.mode in MODES, f"must be one of {MODES}"),
    ]
    for name, ok, msg in checks:
        if not ok:
            raise SchemaViolationError(name, msg)
    for i, orb in enumerate(config.orbitals):
        if orb.width <= 0:
            raise SchemaViolationError(f"orbitals[{i}].width", "must be positive")


def serialize_config(config: ExperimentConfig) -> str:
    """Canonical JSON text; parse(serialize(c)) == c."""
    doc = asdict(config)
    doc["orbitals"] = [asdict(o) for o in config.orbitals]
    for name in ("weakvalue_eval_points", "snapshot_times"):
        doc[name] = list(doc[name])
    return json.dumps(doc, indent=2)


def preset(name: str) -> ExperimentConfig:
    """Named default experiments for the four standard scenarios."""
    documents = {
        "paper-n1": {"n_particles": 1, "outputs": "runs/paper-n1"},
        "paper-n2": {"n_particles": 2, "outputs": "runs/paper-n2"},
        "paper-n3": {"n_particles": 3, "outputs": "runs/paper-n3"},
        "paper-n2-distinguishable": {
            "n_particles": 2,
            "mode": "distinguishable-separable",
            "outputs": "runs/paper-n2-distinguishable",
        },
    }
    if name not in documents:
        raise KeyError(
            f"unknown preset {name!r}; available: {', '.join(sorted(documents))}"
        )
    return parse_config(json.dumps(documents[name]))


PRESET_NAMES = ("paper-n1", "paper-n2", "paper-n3", "paper-n2-distinguishable")

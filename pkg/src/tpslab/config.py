"""Scenario configuration: JSON parsing with strict validation.

Configs are UTF-8 JSON objects with a mandatory ``"version": 1``.  Unknown
keys are fatal everywhere -- there is no silent typo tolerance.  File paths
inside a config resolve relative to the config file's directory; the output
directory resolves relative to the working directory.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dynamics import Hamiltonian, TimeGrid
from .linalg import maximally_mixed
from .projections import (
    ProjectionSpec,
    TypeIIIProjection,
    TypeIIProjection,
    TypeIProjection,
    computational_type_iii,
)
from .structures import (
    FactorLayout,
    Structure,
    read_matrix_file,
    read_structure_file,
    structure_from_grouping,
)

SCENARIOS = ("teleport-check", "lemma1-sweep", "lemma2-sweep", "qcr-demo", "dynamics-trace")

_MAX_SEED = (1 << 64) - 1

# Keys admitted per scenario, beyond the common required set.
_COMMON_KEYS = {"version", "scenario", "base_seed", "output_dir", "trials"}
_SCENARIO_KEYS = {
    "teleport-check": {"input_qubit", "layout"},
    "lemma1-sweep": {"layout", "structure_a", "projection_a"},
    "lemma2-sweep": {"layout", "structure_a", "projection_a"},
    "qcr-demo": {"layout", "structure_a"},
    "dynamics-trace": {
        "layout",
        "structure_a",
        "structure_b",
        "projection_a",
        "projection_b",
        "hamiltonian",
        "initial_state",
        "time_grid",
    },
}
_REQUIRED_KEYS = {
    "teleport-check": set(),
    "lemma1-sweep": {"layout", "trials"},
    "lemma2-sweep": {"layout", "trials"},
    "qcr-demo": {"layout", "trials"},
    "dynamics-trace": {"layout", "structure_a", "structure_b", "hamiltonian", "initial_state", "time_grid"},
}

_MAXIMALLY_MIXED = "maximally_mixed"


class ConfigError(ValueError):
    """A scenario config violated its schema or referenced bad data."""


@dataclass
class ScenarioConfig:
    """A validated, fully materialized scenario description."""

    scenario: str
    base_seed: int
    trials: int
    output_dir: Path
    echo: dict
    layout: FactorLayout | None = None
    structure_a: Structure | None = None
    structure_b: Structure | None = None
    projection_a: ProjectionSpec | None = None
    projection_b: ProjectionSpec | None = None
    hamiltonian: Hamiltonian | None = None
    initial_state: dict | None = None
    time_grid: TimeGrid | None = None
    input_qubit: np.ndarray | None = None


def _require_int(obj, name: str, minimum: int | None = None, maximum: int | None = None) -> int:
    if isinstance(obj, bool) or not isinstance(obj, int):
        raise ConfigError(f"{name}: must be an integer, got {obj!r}")
    if minimum is not None and obj < minimum:
        raise ConfigError(f"{name}: must be >= {minimum}, got {obj}")
    if maximum is not None and obj > maximum:
        raise ConfigError(f"{name}: must be <= {maximum}, got {obj}")
    return obj


def _require_number(obj, name: str) -> float:
    if isinstance(obj, bool) or not isinstance(obj, (int, float)):
        raise ConfigError(f"{name}: must be a number, got {obj!r}")
    return float(obj)


def _require_object(obj, name: str, allowed: set[str]) -> dict:
    if not isinstance(obj, dict):
        raise ConfigError(f"{name}: must be a JSON object, got {type(obj).__name__}")
    for key in obj:
        if key not in allowed:
            raise ConfigError(f"{name}: unknown config key: {key!r}")
    return obj


def _parse_layout(obj, name: str) -> FactorLayout:
    if not isinstance(obj, list) or not obj:
        raise ConfigError(f"{name}: must be a nonempty list of factor dims")
    dims = tuple(_require_int(d, f"{name} entry", minimum=2) for d in obj)
    if len(dims) < 2:
        raise ConfigError(f"{name}: at least two factors are needed to define a split")
    return FactorLayout(dims)


def _parse_structure(obj, name: str, layout: FactorLayout, base_dir: Path) -> Structure:
    obj = _require_object(obj, name, {"grouping", "unitary_file"})
    if ("grouping" in obj) == ("unitary_file" in obj):
        raise ConfigError(f"{name}: give exactly one of 'grouping' or 'unitary_file'")
    if "grouping" in obj:
        indices = obj["grouping"]
        if not isinstance(indices, list) or not indices:
            raise ConfigError(f"{name}.grouping: must be a nonempty list of factor positions")
        indices = [_require_int(i, f"{name}.grouping entry", minimum=0) for i in indices]
        try:
            return structure_from_grouping(layout, indices)
        except ValueError as exc:
            raise ConfigError(f"{name}: {exc}") from exc
    path = base_dir / str(obj["unitary_file"])
    if not path.is_file():
        raise ConfigError(f"{name}.unitary_file: no such file: {path}")
    try:
        s = read_structure_file(path)
    except ValueError as exc:
        raise ConfigError(f"{name}: {exc}") from exc
    if s.total_dim != layout.total_dim:
        raise ConfigError(
            f"{name}: unitary dim {s.total_dim} does not match layout dim {layout.total_dim}"
        )
    return s


def _read_square_matrix(spec, name: str, base_dir: Path) -> np.ndarray:
    spec = _require_object(spec, name, {"file"})
    if "file" not in spec:
        raise ConfigError(f"{name}: expected {{'file': path}}")
    path = base_dir / str(spec["file"])
    if not path.is_file():
        raise ConfigError(f"{name}.file: no such file: {path}")
    try:
        m, _ = read_matrix_file(path)
    except ValueError as exc:
        raise ConfigError(f"{name}: {exc}") from exc
    return m


def _parse_projection(obj, name: str, s: Structure, base_dir: Path) -> ProjectionSpec:
    obj = _require_object(obj, name, {"kind", "rho_ref", "bins", "projectors", "projector_files"})
    kind = obj.get("kind")
    try:
        if kind == "type_i":
            ref = obj.get("rho_ref", _MAXIMALLY_MIXED)
            if ref == _MAXIMALLY_MIXED:
                return TypeIProjection(maximally_mixed(s.dim_e))
            m = _read_square_matrix(ref, f"{name}.rho_ref", base_dir)
            if m.shape[0] != s.dim_e:
                raise ConfigError(
                    f"{name}.rho_ref: dim {m.shape[0]} does not match environment dim {s.dim_e}"
                )
            return TypeIProjection(m)
        if kind == "type_ii":
            bins_obj = obj.get("bins")
            if not isinstance(bins_obj, list) or not bins_obj:
                raise ConfigError(f"{name}.bins: must be a nonempty list")
            bins = []
            for i, entry in enumerate(bins_obj):
                entry = _require_object(entry, f"{name}.bins[{i}]", {"projector_file", "rho_file"})
                p = _read_square_matrix(
                    {"file": entry.get("projector_file")}, f"{name}.bins[{i}].projector_file", base_dir
                )
                r = _read_square_matrix(
                    {"file": entry.get("rho_file")}, f"{name}.bins[{i}].rho_file", base_dir
                )
                bins.append((p, r))
            spec = TypeIIProjection(tuple(bins))
            if spec.dim_s != s.dim_s or spec.dim_e != s.dim_e:
                raise ConfigError(f"{name}: bin dims do not match the structure's split")
            return spec
        if kind == "type_iii":
            if obj.get("projectors") == "computational":
                return computational_type_iii(s.dim_e)
            files = obj.get("projector_files")
            if not isinstance(files, list) or not files:
                raise ConfigError(
                    f"{name}: give 'projectors': 'computational' or a 'projector_files' list"
                )
            projs = tuple(
                _read_square_matrix({"file": f}, f"{name}.projector_files[{i}]", base_dir)
                for i, f in enumerate(files)
            )
            spec = TypeIIIProjection(projs)
            if spec.dim_e != s.dim_e:
                raise ConfigError(
                    f"{name}: projector dim {spec.dim_e} does not match environment dim {s.dim_e}"
                )
            return spec
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"{name}: {exc}") from exc
    raise ConfigError(f"{name}.kind: must be one of type_i, type_ii, type_iii, got {kind!r}")


def _parse_hamiltonian(obj, name: str, total_dim: int, base_dir: Path) -> Hamiltonian:
    obj = _require_object(obj, name, {"gue_seed", "file"})
    if ("gue_seed" in obj) == ("file" in obj):
        raise ConfigError(f"{name}: give exactly one of 'gue_seed' or 'file'")
    if "gue_seed" in obj:
        seed = _require_int(obj["gue_seed"], f"{name}.gue_seed", minimum=0, maximum=_MAX_SEED)
        from .dynamics import random_hamiltonian

        return random_hamiltonian(total_dim, seed)
    m = _read_square_matrix({"file": obj["file"]}, f"{name}.file", base_dir)
    if m.shape[0] != total_dim:
        raise ConfigError(f"{name}: dim {m.shape[0]} does not match layout dim {total_dim}")
    try:
        return Hamiltonian(m)
    except ValueError as exc:
        raise ConfigError(f"{name}: {exc}") from exc


def _parse_time_grid(obj, name: str) -> TimeGrid:
    obj = _require_object(obj, name, {"t0", "t1", "steps"})
    for key in ("t0", "t1", "steps"):
        if key not in obj:
            raise ConfigError(f"{name}.{key}: missing")
    steps = _require_int(obj["steps"], f"{name}.steps", minimum=1)
    try:
        return TimeGrid(_require_number(obj["t0"], f"{name}.t0"), _require_number(obj["t1"], f"{name}.t1"), steps)
    except ValueError as exc:
        raise ConfigError(f"{name}: {exc}") from exc


def _parse_qubit(obj, name: str) -> np.ndarray:
    if not isinstance(obj, list) or len(obj) != 2:
        raise ConfigError(f"{name}: must be [[re, im], [re, im]]")
    amps = []
    for i, pair in enumerate(obj):
        if not isinstance(pair, list) or len(pair) != 2:
            raise ConfigError(f"{name}[{i}]: must be an [re, im] pair")
        amps.append(complex(_require_number(pair[0], f"{name}[{i}][0]"), _require_number(pair[1], f"{name}[{i}][1]")))
    vec = np.asarray(amps, dtype=np.complex128)
    norm2 = float(np.vdot(vec, vec).real)
    if abs(norm2 - 1.0) > 1e-9:
        raise ConfigError(f"{name}: not normalized (||u||^2 = {norm2:.12g})")
    return vec


def _parse_initial_state(obj, name: str, layout: FactorLayout) -> dict:
    obj = _require_object(obj, name, {"kind", "seed", "rank", "input_qubit"})
    kind = obj.get("kind")
    total = layout.total_dim
    if kind == "teleport":
        if layout.dims != (2, 2, 2):
            raise ConfigError(f"{name}: kind 'teleport' needs layout [2, 2, 2]")
        out = {"kind": "teleport"}
        if "input_qubit" in obj:
            out["input_qubit"] = _parse_qubit(obj["input_qubit"], f"{name}.input_qubit")
        for key in ("seed", "rank"):
            if key in obj:
                raise ConfigError(f"{name}.{key}: not allowed for kind 'teleport'")
        return out
    if kind == "random_pure":
        if "seed" not in obj:
            raise ConfigError(f"{name}.seed: required for kind 'random_pure'")
        if "rank" in obj or "input_qubit" in obj:
            raise ConfigError(f"{name}: only 'seed' is allowed for kind 'random_pure'")
        return {"kind": "random_pure", "seed": _require_int(obj["seed"], f"{name}.seed", minimum=0, maximum=_MAX_SEED)}
    if kind == "random_density":
        if "seed" not in obj or "rank" not in obj:
            raise ConfigError(f"{name}: kind 'random_density' needs 'seed' and 'rank'")
        if "input_qubit" in obj:
            raise ConfigError(f"{name}.input_qubit: not allowed for kind 'random_density'")
        return {
            "kind": "random_density",
            "seed": _require_int(obj["seed"], f"{name}.seed", minimum=0, maximum=_MAX_SEED),
            "rank": _require_int(obj["rank"], f"{name}.rank", minimum=1, maximum=total),
        }
    if kind == "maximally_mixed":
        for key in ("seed", "rank", "input_qubit"):
            if key in obj:
                raise ConfigError(f"{name}.{key}: not allowed for kind 'maximally_mixed'")
        return {"kind": "maximally_mixed"}
    raise ConfigError(
        f"{name}.kind: must be one of teleport, random_pure, random_density,"
        f" maximally_mixed, got {kind!r}"
    )


def _echo_initial_state(state: dict) -> dict:
    out = {"kind": state["kind"]}
    if "input_qubit" in state:
        u = state["input_qubit"]
        out["input_qubit"] = [[float(a.real), float(a.imag)] for a in u]
    for key in ("seed", "rank"):
        if key in state:
            out[key] = state[key]
    return out


def load_config(
    path,
    seed_override: int | None = None,
    trials_override: int | None = None,
    output_dir_override=None,
) -> ScenarioConfig:
    """Read, validate and materialize a scenario config file.

    Overrides replace ``base_seed`` / ``trials`` / ``output_dir`` before
    validation, matching the CLI flags.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: config must be a JSON object")

    if seed_override is not None:
        raw["base_seed"] = seed_override
    if trials_override is not None:
        raw["trials"] = trials_override
    if output_dir_override is not None:
        raw["output_dir"] = str(output_dir_override)

    if "version" not in raw:
        raise ConfigError("version: missing (expected 1)")
    if raw["version"] != 1:
        raise ConfigError(f"version: expected 1, got {raw['version']!r}")
    scenario = raw.get("scenario")
    if scenario not in SCENARIOS:
        raise ConfigError(f"scenario: must be one of {', '.join(SCENARIOS)}, got {scenario!r}")

    allowed = _COMMON_KEYS | _SCENARIO_KEYS[scenario]
    for key in raw:
        if key not in allowed:
            raise ConfigError(f"unknown config key: {key!r}")
    for key in ("base_seed", "output_dir"):
        if key not in raw:
            raise ConfigError(f"missing required config key: {key}")
    for key in _REQUIRED_KEYS[scenario]:
        if key not in raw:
            raise ConfigError(f"missing required config key: {key}")

    base_seed = _require_int(raw["base_seed"], "base_seed", minimum=0, maximum=_MAX_SEED)
    if not isinstance(raw["output_dir"], str) or not raw["output_dir"]:
        raise ConfigError("output_dir: must be a nonempty string")
    output_dir = Path(raw["output_dir"])
    trials = _require_int(raw.get("trials", 1), "trials", minimum=1)
    base_dir = path.parent

    echo: dict = {"version": 1, "scenario": scenario, "base_seed": base_seed, "trials": trials}
    cfg = ScenarioConfig(
        scenario=scenario,
        base_seed=base_seed,
        trials=trials,
        output_dir=output_dir,
        echo=echo,
    )

    if scenario == "teleport-check":
        if "layout" in raw:
            layout = _parse_layout(raw["layout"], "layout")
            if layout.dims != (2, 2, 2):
                raise ConfigError("layout: teleport-check is defined on [2, 2, 2]")
        cfg.layout = FactorLayout((2, 2, 2))
        echo["layout"] = [2, 2, 2]
        if "input_qubit" in raw:
            cfg.input_qubit = _parse_qubit(raw["input_qubit"], "input_qubit")
            echo["input_qubit"] = [[float(a.real), float(a.imag)] for a in cfg.input_qubit]
    else:
        layout = _parse_layout(raw["layout"], "layout")
        cfg.layout = layout
        echo["layout"] = list(layout.dims)
        structure_a_raw = raw.get("structure_a", {"grouping": [0]})
        cfg.structure_a = _parse_structure(structure_a_raw, "structure_a", layout, base_dir)
        echo["structure_a"] = structure_a_raw

    if scenario in ("lemma1-sweep", "lemma2-sweep"):
        proj_raw = raw.get("projection_a", {"kind": "type_i", "rho_ref": _MAXIMALLY_MIXED})
        proj_obj = _require_object(proj_raw, "projection_a", {"kind", "rho_ref"})
        if proj_obj.get("kind") != "type_i" or proj_obj.get("rho_ref", _MAXIMALLY_MIXED) != _MAXIMALLY_MIXED:
            raise ConfigError(
                "projection_a: sweeps require {'kind': 'type_i', 'rho_ref': 'maximally_mixed'}"
                " (per-trial random alternate splits need a dimension-generic reference)"
            )
        cfg.projection_a = TypeIProjection(maximally_mixed(cfg.structure_a.dim_e))
        echo["projection_a"] = {"kind": "type_i", "rho_ref": _MAXIMALLY_MIXED}

    if scenario == "dynamics-trace":
        if trials != 1:
            raise ConfigError("trials: dynamics-trace runs a single trajectory (trials must be 1)")
        cfg.structure_b = _parse_structure(raw["structure_b"], "structure_b", cfg.layout, base_dir)
        echo["structure_b"] = raw["structure_b"]
        proj_a_raw = raw.get("projection_a", {"kind": "type_i", "rho_ref": _MAXIMALLY_MIXED})
        proj_b_raw = raw.get("projection_b", {"kind": "type_i", "rho_ref": _MAXIMALLY_MIXED})
        cfg.projection_a = _parse_projection(proj_a_raw, "projection_a", cfg.structure_a, base_dir)
        cfg.projection_b = _parse_projection(proj_b_raw, "projection_b", cfg.structure_b, base_dir)
        for name, spec in (("projection_a", cfg.projection_a), ("projection_b", cfg.projection_b)):
            if not isinstance(spec, TypeIProjection):
                raise ConfigError(
                    f"{name}: dynamics-trace requires kind 'type_i' (the commutator column"
                    " is defined for that family only)"
                )
        echo["projection_a"] = proj_a_raw
        echo["projection_b"] = proj_b_raw
        cfg.hamiltonian = _parse_hamiltonian(raw["hamiltonian"], "hamiltonian", cfg.layout.total_dim, base_dir)
        echo["hamiltonian"] = raw["hamiltonian"]
        cfg.initial_state = _parse_initial_state(raw["initial_state"], "initial_state", cfg.layout)
        echo["initial_state"] = _echo_initial_state(cfg.initial_state)
        cfg.time_grid = _parse_time_grid(raw["time_grid"], "time_grid")
        echo["time_grid"] = {"t0": cfg.time_grid.t0, "t1": cfg.time_grid.t1, "steps": cfg.time_grid.steps}

    echo["output_dir"] = str(raw["output_dir"])
    return cfg

"""Scenario runner: executes named experiments and writes reports.

A report is a ``summary.json`` (config echo plus aggregate statistics) and a
``series.csv`` (per-trial or per-time rows).  Every float serializes with 17
significant digits so values round-trip exactly; identical config and seed
give byte-identical CSV on one platform.  Files are written to a temp path
and atomically renamed.
"""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import ScenarioConfig
from .dynamics import GENERATOR_NAME, RandomStream, mix_seed, trajectory
from .linalg import InvariantViolation, kron, maximally_mixed, purity, trace_norm
from .projections import TypeIProjection, project, relevance_defect
from .relativity import (
    bell_pair,
    commutator_defect,
    cross_relevance_matrix,
    mutual_information,
    teleport_state,
)
from .structures import FactorLayout, from_structure_basis, reduced_state, structure_from_grouping, structure_from_unitary

DEFECT_THRESHOLD = 1e-6


@dataclass(frozen=True)
class ReportPaths:
    summary: Path
    series: Path


def fmt_float(x) -> str:
    """17 significant digits: enough for exact float64 round-trips."""
    return format(float(x), ".17g")


def _dump(obj, indent: int) -> str:
    pad = "  " * indent
    child = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = ",\n".join(
            f"{child}{json.dumps(str(k))}: {_dump(v, indent + 1)}" for k, v in obj.items()
        )
        return "{\n" + items + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not len(obj):
            return "[]"
        items = ",\n".join(f"{child}{_dump(v, indent + 1)}" for v in obj)
        return "[\n" + items + "\n" + pad + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if obj is None:
        return "null"
    raise TypeError(f"cannot serialize {type(obj).__name__} into a report")


def dump_json(obj) -> str:
    """Serialize a report object; floats carry 17 significant digits."""
    return _dump(obj, 0)


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + f".tmp{os.getpid()}")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def write_report(output_dir: Path, summary: dict, header: list[str], rows: list[list]) -> ReportPaths:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([c if isinstance(c, str) else fmt_float(c) if isinstance(c, (float, np.floating)) else str(int(c)) for c in row])
    paths = ReportPaths(summary=output_dir / "summary.json", series=output_dir / "series.csv")
    _atomic_write(paths.series, buf.getvalue())
    _atomic_write(paths.summary, dump_json(summary) + "\n")
    return paths


def run_scenario(cfg: ScenarioConfig) -> ReportPaths:
    """Execute a validated config and write its report files."""
    runner = {
        "teleport-check": _teleport_check,
        "lemma1-sweep": _lemma1_sweep,
        "lemma2-sweep": _lemma2_sweep,
        "qcr-demo": _qcr_demo,
        "dynamics-trace": _dynamics_trace,
    }[cfg.scenario]
    results, header, rows = runner(cfg)
    summary = {
        "scenario": cfg.scenario,
        "generator": GENERATOR_NAME,
        "base_seed": cfg.base_seed,
        "config": cfg.echo,
        "results": results,
    }
    return write_report(cfg.output_dir, summary, header, rows)


def _descending(values: np.ndarray) -> list[float]:
    return [float(v) for v in sorted(values, reverse=True)]


def _teleport_check(cfg: ScenarioConfig):
    layout = FactorLayout((2, 2, 2))
    s_a = structure_from_grouping(layout, (0,), label="1|(2,3)")
    s_b = structure_from_grouping(layout, (0, 1), label="(1,2)|3")
    phi = bell_pair()
    spec_a = TypeIProjection(np.outer(phi, phi.conj()))
    spec_b = TypeIProjection(maximally_mixed(2))

    header = [
        "trial",
        "purity_P_rho",
        "relevance_defect",
        "lemma2_defect",
        "rho12_ev1",
        "rho12_ev2",
        "rho12_ev3",
        "rho12_ev4",
        "rho1_ev1",
        "rho1_ev2",
    ]
    rows = []
    for trial in range(cfg.trials):
        if trial == 0 and cfg.input_qubit is not None:
            u = cfg.input_qubit
        elif trial == 0:
            u = np.array([1.0, 0.0], dtype=np.complex128)
        else:
            u = RandomStream(mix_seed(cfg.base_seed, trial)).haar_pure(2)
        psi = teleport_state(u)
        rho = np.outer(psi, psi.conj())
        p_rho = project(rho, s_a, spec_a)
        pur = purity(p_rho)
        fixed_point_defect = trace_norm(p_rho - rho)
        if fixed_point_defect > 1e-10:
            raise InvariantViolation(
                f"teleport-check: projection onto the entangled-pair reference should leave"
                f" the state invariant (defect {fixed_point_defect:.3e})"
            )
        rel = relevance_defect(rho, s_a, spec_a)
        defect2 = commutator_defect(rho, s_a, spec_a, s_b, spec_b)
        if defect2 <= DEFECT_THRESHOLD:
            raise InvariantViolation(
                f"teleport-check: commutator defect {defect2:.3e} unexpectedly small"
            )
        ev12 = _descending(np.linalg.eigvalsh(reduced_state(rho, s_b, "S")))
        ev1 = _descending(np.linalg.eigvalsh(reduced_state(rho, s_a, "S")))
        rows.append([trial, pur, rel, defect2, *ev12, *ev1])

    results = {
        "purity_P_rho": rows[0][1],
        "purity_P_rho_min": min(r[1] for r in rows),
        "relevance_defect_max": max(r[2] for r in rows),
        "lemma2_defect": rows[0][3],
        "lemma2_defect_min": min(r[3] for r in rows),
        "rho12_eigenvalues": rows[0][4:8],
        "rho1_eigenvalues": rows[0][8:10],
    }
    return results, header, rows


def _draw_state(stream: RandomStream, total: int, trial: int) -> tuple[str, np.ndarray]:
    # Even trials: Haar pure; odd trials: rank-2 Ginibre mixed.
    if trial % 2 == 0:
        v = stream.haar_pure(total)
        return "pure", np.outer(v, v.conj())
    return "mixed", stream.ginibre_density(total, min(2, total))


def _lemma1_sweep(cfg: ScenarioConfig):
    s_a = cfg.structure_a
    spec_a = cfg.projection_a
    total = s_a.total_dim
    header = [
        "trial",
        "state_kind",
        "defect_a_to_b",
        "defect_b_to_a",
        "defect_same_structure",
        "trace_residual_max",
    ]
    rows = []
    for trial in range(cfg.trials):
        stream = RandomStream(mix_seed(cfg.base_seed, trial))
        kind, rho = _draw_state(stream, total, trial)
        s_b = structure_from_unitary(stream.haar_unitary(total), s_a.dim_s, s_a.dim_e, label=f"haar-{trial}")
        spec_b = TypeIProjection(maximally_mixed(s_b.dim_e))
        rep_ab = cross_relevance_matrix(rho, s_a, spec_a, s_b)
        rep_ba = cross_relevance_matrix(rho, s_b, spec_b, s_a)
        rep_aa = cross_relevance_matrix(rho, s_a, spec_a, s_a)
        rows.append(
            [
                trial,
                kind,
                rep_ab.trace_norm_defect,
                rep_ba.trace_norm_defect,
                rep_aa.trace_norm_defect,
                max(rep_ab.trace_residual, rep_ba.trace_residual, rep_aa.trace_residual),
            ]
        )
    d_ab = [r[2] for r in rows]
    results = {
        "trials": cfg.trials,
        "threshold": DEFECT_THRESHOLD,
        "state_policy": "alternating Haar pure / Ginibre rank-2",
        "fraction_above_threshold": sum(d > DEFECT_THRESHOLD for d in d_ab) / cfg.trials,
        "fraction_above_threshold_b_to_a": sum(r[3] > DEFECT_THRESHOLD for r in rows) / cfg.trials,
        "defect_a_to_b_mean": float(np.mean(d_ab)),
        "defect_a_to_b_min": min(d_ab),
        "defect_a_to_b_max": max(d_ab),
        "same_structure_defect_max": max(r[4] for r in rows),
        "trace_residual_max": max(r[5] for r in rows),
    }
    return results, header, rows


def _lemma2_sweep(cfg: ScenarioConfig):
    s_a = cfg.structure_a
    spec_a = cfg.projection_a
    total = s_a.total_dim
    header = ["trial", "state_kind", "commutator_defect", "same_spec_defect"]
    rows = []
    for trial in range(cfg.trials):
        stream = RandomStream(mix_seed(cfg.base_seed, trial))
        kind, rho = _draw_state(stream, total, trial)
        s_b = structure_from_unitary(stream.haar_unitary(total), s_a.dim_s, s_a.dim_e, label=f"haar-{trial}")
        spec_b = TypeIProjection(maximally_mixed(s_b.dim_e))
        defect = commutator_defect(rho, s_a, spec_a, s_b, spec_b)
        control = commutator_defect(rho, s_a, spec_a, s_a, spec_a)
        rows.append([trial, kind, defect, control])
    defects = [r[2] for r in rows]
    results = {
        "trials": cfg.trials,
        "threshold": DEFECT_THRESHOLD,
        "state_policy": "alternating Haar pure / Ginibre rank-2",
        "fraction_above_threshold": sum(d > DEFECT_THRESHOLD for d in defects) / cfg.trials,
        "commutator_defect_mean": float(np.mean(defects)),
        "commutator_defect_min": min(defects),
        "commutator_defect_max": max(defects),
        "same_spec_defect_max": max(r[3] for r in rows),
    }
    return results, header, rows


def _qcr_demo(cfg: ScenarioConfig):
    s_a = cfg.structure_a
    total = s_a.total_dim
    header = ["trial", "mi_own_structure", "mi_alternate_structure"]
    rows = []
    for trial in range(cfg.trials):
        stream = RandomStream(mix_seed(cfg.base_seed, trial))
        rho_s = stream.ginibre_density(s_a.dim_s, s_a.dim_s)
        rho_e = stream.ginibre_density(s_a.dim_e, s_a.dim_e)
        rho = from_structure_basis(kron(rho_s, rho_e), s_a)
        s_b = structure_from_unitary(stream.haar_unitary(total), s_a.dim_s, s_a.dim_e, label=f"haar-{trial}")
        rows.append([trial, mutual_information(rho, s_a), mutual_information(rho, s_b)])
    alt = [r[2] for r in rows]
    results = {
        "trials": cfg.trials,
        "threshold": DEFECT_THRESHOLD,
        "fraction_above_threshold": sum(v > DEFECT_THRESHOLD for v in alt) / cfg.trials,
        "mi_own_structure_max": max(r[1] for r in rows),
        "mi_alternate_mean": float(np.mean(alt)),
        "mi_alternate_min": min(alt),
        "mi_alternate_max": max(alt),
    }
    return results, header, rows


def _materialize_initial_state(cfg: ScenarioConfig) -> np.ndarray:
    total = cfg.layout.total_dim
    state = cfg.initial_state
    if state["kind"] == "teleport":
        u = state.get("input_qubit")
        if u is None:
            u = np.array([1.0, 0.0], dtype=np.complex128)
        psi = teleport_state(u)
        return np.outer(psi, psi.conj())
    if state["kind"] == "random_pure":
        v = RandomStream(state["seed"]).haar_pure(total)
        return np.outer(v, v.conj())
    if state["kind"] == "random_density":
        return RandomStream(state["seed"]).ginibre_density(total, state["rank"])
    return maximally_mixed(total)


def _dynamics_trace(cfg: ScenarioConfig):
    rho0 = _materialize_initial_state(cfg)
    record = trajectory(
        rho0,
        cfg.hamiltonian,
        cfg.time_grid,
        cfg.structure_a,
        cfg.projection_a,
        cfg.structure_b,
        cfg.projection_b,
    )
    header = [
        "t",
        "lemma1_AtoB_tracenorm",
        "lemma1_BtoA_tracenorm",
        "lemma1_trace_residual_max",
        "lemma2_tracenorm",
        "mi_A",
        "mi_B",
        "purity_S",
        "purity_Sprime",
    ]
    rows = [
        [
            p.t,
            p.lemma1_a_to_b,
            p.lemma1_b_to_a,
            p.lemma1_trace_residual_max,
            p.lemma2_defect,
            p.mi_a,
            p.mi_b,
            p.purity_s,
            p.purity_sprime,
        ]
        for p in record.points
    ]
    d_ab = [p.lemma1_a_to_b for p in record.points]
    results = {
        "points": len(record),
        "threshold": DEFECT_THRESHOLD,
        "fraction_lemma1_above_threshold": sum(d > DEFECT_THRESHOLD for d in d_ab) / len(record),
        "lemma1_a_to_b_max": max(d_ab),
        "lemma1_a_to_b_min": min(d_ab),
        "trace_residual_max": max(p.lemma1_trace_residual_max for p in record.points),
        "lemma2_max": max(p.lemma2_defect for p in record.points),
        "final_purity_S": record.points[-1].purity_s,
        "final_purity_Sprime": record.points[-1].purity_sprime,
    }
    return results, header, rows

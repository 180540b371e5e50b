"""JSON model files and CSV run records.

Model schema::

    {"n": int, "h": [float], "J": [[i, j, w]], "offset": float,
     "roles": [{"kind": ..., "var": ..., "clause": ..., "negated": ..., "bit": ...}],
     "formulation": str, "cnf": {"num_vars": int, "clauses": [[int]], "name": str}}

``roles``, ``formulation`` and ``cnf`` are present for encoded instances only.
"""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .cnf import CnfInstance
from .formulations import Formulation, FormulationModel, SpinRole
from .ising import IsingModel

RUN_COLUMNS = (
    "instance",
    "formulation",
    "decomposer",
    "subsolver",
    "S",
    "scale",
    "lfros",
    "repeat",
    "iterations_to_allsat",
    "all_sat",
    "final_energy",
    "mean_energy_rate",
    "seed",
    "path",
    "clamp_count",
)


def _num(x: float):
    return int(x) if float(x).is_integer() else float(x)


def model_to_json(model: IsingModel) -> dict:
    return {
        "n": model.n,
        "h": [_num(v) for v in model.h],
        "J": [[int(i), int(j), _num(w)] for (i, j), w in zip(model.edges, model.weights)],
        "offset": _num(model.offset),
    }


def model_from_json(d: dict) -> IsingModel:
    h = np.asarray(d["h"], dtype=float)
    if len(h) != d.get("n", len(h)):
        raise ValueError("'n' does not match length of 'h'")
    J = d.get("J", [])
    edges = np.array([[int(i), int(j)] for i, j, _ in J], dtype=np.intp).reshape(-1, 2)
    weights = np.array([float(w) for _, _, w in J])
    return IsingModel(h, edges, weights, float(d.get("offset", 0.0)))


def formulation_to_json(fm: FormulationModel) -> dict:
    d = model_to_json(fm.ising)
    d["roles"] = [r.to_dict() for r in fm.roles]
    d["formulation"] = fm.formulation.value
    d["cnf"] = {
        "num_vars": fm.source.num_vars,
        "clauses": [list(c) for c in fm.source.clauses],
        "name": fm.source.name,
    }
    return d


def formulation_from_json(d: dict) -> FormulationModel:
    cnf = d["cnf"]
    source = CnfInstance(cnf["num_vars"], tuple(tuple(c) for c in cnf["clauses"]), cnf.get("name", ""))
    roles = tuple(SpinRole.from_dict(r) for r in d["roles"])
    return FormulationModel(model_from_json(d), roles, Formulation.parse(d["formulation"]), source)


def save_json(obj: dict, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=1) + "\n")


def load_json(path) -> dict:
    return json.loads(Path(path).read_text())


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return ""
    return str(int(x)) if x.is_integer() else f"{x:.10g}"


def run_rows(metrics) -> list[dict]:
    """One CSV row per repeat of a :class:`~isat.hybrid.RunMetrics`."""
    cfg = metrics.config
    chip = cfg.path == "chip"
    rows = []
    for r in metrics.records:
        rows.append({
            "instance": metrics.instance,
            "formulation": cfg.formulation.value,
            "decomposer": cfg.decomposer.value,
            "subsolver": cfg.subsolver.kind,
            "S": cfg.capacity,
            "scale": cfg.chip.scale if chip else None,
            "lfros": cfg.chip.lfro_count if chip else None,
            "repeat": r.repeat,
            "iterations_to_allsat": r.iterations,
            "all_sat": r.all_sat,
            "final_energy": r.final_energy,
            "mean_energy_rate": r.mean_energy_rate if chip else None,
            "seed": cfg.seed,
            "path": cfg.path,
            "clamp_count": r.total_clamp_count if chip else None,
        })
    return rows


def write_run_csv(rows, fh, header: bool = True) -> None:
    w = csv.writer(fh, lineterminator="\n")
    if header:
        w.writerow(RUN_COLUMNS)
    for row in rows:
        w.writerow([_fmt(row[c]) for c in RUN_COLUMNS])

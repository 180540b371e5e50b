"""Command-line interface: ``isat formulate | solve | bench``.

Exit codes: 0 success, 1 some bench cells failed, 2 bad input (unreadable
file, DIMACS error, invalid flag combination).
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import itertools
import logging
import os
import sys
from pathlib import Path

import numpy as np

from .chip import ChipConfig
from .cnf import CnfInstance, DimacsError, load_dimacs
from .decomposers import DecomposerKind
from .formulations import Formulation, encode
from .hybrid import HybridConfig, run_hybrid
from .io import RUN_COLUMNS, formulation_to_json, run_rows, save_json, write_run_csv
from .subsolvers import SubsolverConfig

log = logging.getLogger("isat")

FORMULATIONS = [f.value for f in Formulation]
DECOMPOSERS = [d.value for d in DecomposerKind]
AGGREGATE_COLUMNS = (
    "instance", "formulation", "decomposer", "subsolver", "S", "scale", "lfros",
    "repeats", "all_sat_rate", "mean_iterations", "mean_final_energy",
    "mean_energy_rate", "seed", "path",
)


class UsageError(Exception):
    """Bad input; maps to exit code 2."""


def _seed(value) -> int:
    if value is not None:
        return value
    env = os.environ.get("ISAT_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"ISAT_SEED must be an integer, got {env!r}") from None


def _load(path) -> CnfInstance:
    try:
        return load_dimacs(path)
    except FileNotFoundError:
        raise UsageError(f"no such file: {path}") from None
    except (OSError, DimacsError) as exc:
        raise UsageError(f"{path}: {exc}") from None


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--subsolver", choices=["tabu", "brute", "anneal"], default="tabu")
    p.add_argument("--path", choices=["software", "chip"], default="software")
    p.add_argument("--capacity", type=int, default=None,
                   help="sub-problem size S (default 45, or the chip capacity on the chip path)")
    p.add_argument("--repeats", type=int, default=100)
    p.add_argument("--iterations", type=int, default=500)
    p.add_argument("--seed", type=int, default=None, help="master seed (falls back to $ISAT_SEED, then 0)")
    p.add_argument("--jmax", type=int, default=14)
    p.add_argument("--removal", choices=["rigorous", "heuristic", "none"], default="rigorous")
    p.add_argument("--removal-n", type=float, default=5.0)
    p.add_argument("--readout-flips", type=float, default=0.02)
    p.add_argument("--coupling-noise", type=float, default=2.0)
    p.add_argument("--tabu-tenure", type=int, default=10)
    p.add_argument("--tabu-steps", type=int, default=None, help="total Tabu moves per sub-problem")
    p.add_argument("--no-incumbent-clamp", dest="incumbent_clamp", action="store_false",
                   help="accept every sub-solution, even when it raises the energy")


def _config(args, formulation, decomposer, scale, lfros, seed) -> HybridConfig:
    try:
        sub = SubsolverConfig(
            kind=args.subsolver,
            tabu_tenure=args.tabu_tenure,
            tabu_steps=args.tabu_steps,
            incumbent_clamp=args.incumbent_clamp,
        )
        chip = ChipConfig(
            lfro_count=lfros,
            j_max=args.jmax,
            scale=scale,
            removal=args.removal,
            removal_n=args.removal_n,
            readout_flip_prob=args.readout_flips,
            coupling_noise=args.coupling_noise,
        )
        capacity = args.capacity
        if capacity is None:
            capacity = min(45, chip.capacity) if args.path == "chip" else 45
        return HybridConfig(
            formulation=formulation,
            decomposer=decomposer,
            path=args.path,
            capacity=capacity,
            iteration_limit=args.iterations,
            repeats=args.repeats,
            seed=seed,
            subsolver=sub,
            chip=chip,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_formulate(args) -> int:
    inst = _load(args.input)
    fm = encode(inst, args.formulation)
    try:
        save_json(formulation_to_json(fm), args.output)
    except OSError as exc:
        raise UsageError(f"cannot write {args.output}: {exc}") from None
    print(f"{inst.name}: {fm.formulation.value} spins={fm.n} couplings={len(fm.ising.weights)}")
    return 0


def _summary(metrics) -> str:
    return (f"{metrics.instance} {metrics.config.formulation.value}+{metrics.config.decomposer.value}: "
            f"all_sat_rate={metrics.all_sat_rate:.4f} mean_iterations={metrics.mean_iterations:.2f}")


def cmd_solve(args) -> int:
    inst = _load(args.input)
    cfg = _config(args, args.formulation, args.decomposer, args.scale, args.lfros, _seed(args.seed))
    cfg = cfg.with_(n_jobs=args.jobs)
    metrics = run_hybrid(inst, cfg)
    rows = run_rows(metrics)
    if args.output:
        with open(args.output, "w", newline="") as fh:
            write_run_csv(rows, fh)
        print(_summary(metrics))
    else:
        write_run_csv(rows, sys.stdout)
        print(_summary(metrics), file=sys.stderr)
    return 0


def _cell_key(inst: str, cfg: HybridConfig) -> str:
    parts = [inst, cfg.formulation.value, cfg.decomposer.value, cfg.path]
    if cfg.path == "chip":
        parts += [f"k{cfg.chip.scale:g}", f"g{cfg.chip.lfro_count}"]
    # the digest keeps stale checkpoints from being reused under other settings
    parts.append(hashlib.sha1(repr(cfg.with_(n_jobs=1)).encode()).hexdigest()[:10])
    return "__".join(parts)


def _run_cell(inst, cfg: HybridConfig) -> str:
    buf = io.StringIO()
    write_run_csv(run_rows(run_hybrid(inst, cfg)), buf, header=False)
    return buf.getvalue()


def _aggregate(rows: list[dict]) -> list[list]:
    groups: dict[tuple, list[dict]] = {}
    for r in rows:
        key = tuple(r[c] for c in ("instance", "formulation", "decomposer", "subsolver", "S", "scale", "lfros", "seed", "path"))
        groups.setdefault(key, []).append(r)
    out = []
    for key, rs in groups.items():
        inst, form, dec, sub, S, scale, lfros, seed, path = key
        rates = [float(r["mean_energy_rate"]) for r in rs if r["mean_energy_rate"] != ""]
        out.append([
            inst, form, dec, sub, S, scale, lfros, len(rs),
            f"{np.mean([r['all_sat'] == 'true' for r in rs]):.10g}",
            f"{np.mean([int(r['iterations_to_allsat']) for r in rs]):.10g}",
            f"{np.mean([float(r['final_energy']) for r in rs]):.10g}",
            f"{np.mean(rates):.10g}" if rates else "",
            seed, path,
        ])
    return out


def cmd_bench(args) -> int:
    directory = Path(args.instances)
    if not directory.is_dir():
        raise UsageError(f"not a directory: {directory}")
    files = sorted(directory.glob("*.cnf"))
    if not files:
        raise UsageError(f"no .cnf files in {directory}")
    if not (args.formulations and args.decomposers and args.scales and args.lfros):
        raise UsageError("every grid axis needs at least one value")
    instances = [_load(f) for f in files]
    seed = _seed(args.seed)
    scales, lfros = args.scales, args.lfros
    if args.path == "software":
        # chip parameters do not affect the software path
        scales, lfros = scales[:1], lfros[:1]
    cells = []
    for inst, form, dec, k, g in itertools.product(instances, args.formulations, args.decomposers, scales, lfros):
        cfg = _config(args, form, dec, k, g, seed)
        cells.append((inst, cfg, _cell_key(inst.name, cfg)))

    out = Path(args.output)
    ckpt = Path(str(out) + ".cells")
    ckpt.mkdir(parents=True, exist_ok=True)
    todo = [c for c in cells if not (ckpt / f"{c[2]}.csv").exists()]
    if len(todo) < len(cells):
        log.info("resuming: %d of %d cells already complete", len(cells) - len(todo), len(cells))

    def run(cell):
        inst, cfg, key = cell
        try:
            return key, _run_cell(inst, cfg), None
        except Exception as exc:  # recorded per cell, the sweep continues
            return key, None, f"{type(exc).__name__}: {exc}"

    if args.jobs == 1:
        results = map(run, todo)
    else:
        from joblib import Parallel, delayed

        results = Parallel(n_jobs=args.jobs, return_as="generator")(delayed(run)(c) for c in todo)
    failed = 0
    for key, text, err in results:
        if err is None:
            tmp = ckpt / f"{key}.csv.tmp"
            tmp.write_text(text)
            tmp.replace(ckpt / f"{key}.csv")
            (ckpt / f"{key}.err").unlink(missing_ok=True)
        else:
            failed += 1
            (ckpt / f"{key}.err").write_text(err + "\n")
            log.error("cell %s failed: %s", key, err)

    rows: list[dict] = []
    with open(out, "w", newline="") as fh:
        fh.write(",".join(RUN_COLUMNS) + "\n")
        for _, _, key in cells:
            part = ckpt / f"{key}.csv"
            if part.exists():
                text = part.read_text()
                fh.write(text)
                rows += [dict(zip(RUN_COLUMNS, r)) for r in csv.reader(io.StringIO(text))]
    agg_path = Path(args.aggregate) if args.aggregate else out.with_name(out.stem + "_aggregate.csv")
    with open(agg_path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(AGGREGATE_COLUMNS)
        w.writerows(_aggregate(rows))
    done = len(cells) - failed
    print(f"cells completed: {done}/{len(cells)}; rows: {len(rows)}; data: {out}; aggregate: {agg_path}")
    return 0 if failed == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="isat", description="Decomposition-based 3SAT solving on Ising models")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS,
                        help="log progress to stderr")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("formulate", parents=[common], help="encode a DIMACS file as an Ising model (JSON)")
    p.add_argument("input")
    p.add_argument("--formulation", choices=FORMULATIONS, default="chancellor")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_formulate)

    p = subs.add_parser("solve", parents=[common], help="run the hybrid solver on one DIMACS file")
    p.add_argument("input")
    p.add_argument("--formulation", choices=FORMULATIONS, default="chancellor")
    p.add_argument("--decomposer", choices=DECOMPOSERS, default="bfs")
    p.add_argument("--scale", type=float, default=12.0)
    p.add_argument("--lfros", type=int, default=4)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("-o", "--output", help="CSV path (default: stdout, summary on stderr)")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_solve)

    p = subs.add_parser("bench", parents=[common], help="grid sweep over a directory of DIMACS files")
    p.add_argument("instances", help="directory of .cnf files")
    p.add_argument("--formulations", nargs="+", choices=FORMULATIONS, default=["chancellor"])
    p.add_argument("--decomposers", nargs="+", choices=DECOMPOSERS, default=["bfs"])
    p.add_argument("--scales", nargs="+", type=float, default=[12.0])
    p.add_argument("--lfros", nargs="+", type=int, default=[4])
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("-o", "--output", required=True, help="data CSV; checkpoints go to <output>.cells/")
    p.add_argument("--aggregate", help="aggregate CSV path (default: <output stem>_aggregate.csv)")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"isat: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""The decompose / solve / merge loop and its metrics.

One *repeat* starts from a uniform random spin state and runs up to
``iteration_limit`` iterations. Each iteration selects a sub-problem,
solves it (Tabu search in software, or the emulated chip), writes the
sub-solution back into the global state and checks whether the decoded
assignment satisfies every clause. A repeat's random stream is seeded
from ``(seed, repeat_index)`` so repeats are independent of one another
and of execution order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .chip import ChipConfig, chip_solve, preprocess
from .cnf import CnfInstance
from .decomposers import DecomposerKind, extract_subproblem, make_decomposer
from .formulations import Formulation, FormulationModel, encode
from .ising import ising_energy
from .subsolvers import SubsolverConfig, solve

PATHS = ("software", "chip")


@dataclass(frozen=True)
class HybridConfig:
    formulation: Formulation = Formulation.CHANCELLOR
    decomposer: DecomposerKind = DecomposerKind.BFS
    path: str = "software"
    capacity: int = 45
    iteration_limit: int = 500
    repeats: int = 100
    seed: int = 0
    subsolver: SubsolverConfig = field(default_factory=SubsolverConfig)
    chip: ChipConfig = field(default_factory=ChipConfig)
    energy_impact_magnitude: bool = False
    sub_start: str = "random"
    n_jobs: int = 1

    def __post_init__(self):
        object.__setattr__(self, "formulation", Formulation.parse(self.formulation))
        object.__setattr__(self, "decomposer", DecomposerKind.parse(self.decomposer))
        if self.path not in PATHS:
            raise ValueError(f"path must be one of {PATHS}")
        if self.capacity < 1:
            raise ValueError("capacity must be >= 1")
        if self.path == "chip" and self.capacity > self.chip.capacity:
            raise ValueError(
                f"capacity {self.capacity} exceeds chip capacity {self.chip.capacity} "
                f"({self.chip.total_spins} spins - {self.chip.lfro_count} LFROs)"
            )
        if self.sub_start not in ("random", "current"):
            raise ValueError("sub_start must be 'random' or 'current'")
        if self.iteration_limit < 1 or self.repeats < 1:
            raise ValueError("iteration_limit and repeats must be >= 1")

    def with_(self, **kw) -> "HybridConfig":
        return replace(self, **kw)


@dataclass
class GlobalState:
    state: np.ndarray
    assignment: np.ndarray
    energy: float
    satisfied: int


@dataclass(frozen=True)
class IterationRecord:
    size: int
    energy_before: float
    energy_after: float
    energy_rate: float = math.nan
    clamp_count: int = 0
    accepted: bool = True


@dataclass
class RepeatRecord:
    repeat: int
    seed: tuple[int, int]
    iterations: int
    all_sat: bool
    energies: list[float]
    satisfied: int
    assignment: np.ndarray
    energy_rates: list[float] = field(default_factory=list)
    clamp_counts: list[int] = field(default_factory=list)

    @property
    def final_energy(self) -> float:
        return self.energies[-1]

    @property
    def mean_energy_rate(self) -> float:
        vals = [r for r in self.energy_rates if not math.isnan(r)]
        return float(np.mean(vals)) if vals else math.nan

    @property
    def total_clamp_count(self) -> int:
        return int(sum(self.clamp_counts))


@dataclass
class RunMetrics:
    config: HybridConfig
    instance: str
    records: list[RepeatRecord]

    @property
    def all_sat_rate(self) -> float:
        return sum(r.all_sat for r in self.records) / len(self.records)

    @property
    def mean_iterations(self) -> float:
        return float(np.mean([r.iterations for r in self.records]))

    @property
    def energy_rates(self) -> list[float]:
        return [x for r in self.records for x in r.energy_rates if not math.isnan(x)]

    def best_record(self) -> RepeatRecord:
        return max(self.records, key=lambda r: (r.satisfied, -r.final_energy, -r.repeat))


def energy_rate(solution_energy: float, ground_energy: float) -> float:
    """Percentage of the ground-state energy reached, clipped to [0, 100].

    Both energies should exclude constant offsets. Returns NaN when the
    ratio is undefined: a zero ground energy with a nonzero solution, or a
    positive ground energy with a negative solution.
    """
    if ground_energy == 0:
        return 100.0 if solution_energy == 0 else math.nan
    if ground_energy > 0 and solution_energy < 0:
        return math.nan
    return float(min(100.0, max(0.0, 100.0 * solution_energy / ground_energy)))


def _global_state(fmodel: FormulationModel, s: np.ndarray) -> GlobalState:
    a = fmodel.decode_assignment(s)
    sat = int(fmodel.source.satisfied_mask(a).sum())
    return GlobalState(s, a, ising_energy(fmodel.ising, s), sat)


def run_iteration(fmodel: FormulationModel, gstate: GlobalState, cfg: HybridConfig, rng, decomposer=None):
    """One decompose / solve / merge step.

    Returns ``(new_global_state, IterationRecord)``.
    """
    decomposer = decomposer or make_decomposer(cfg.decomposer)
    sel = decomposer(fmodel, gstate.state, cfg.capacity, rng)
    sub = extract_subproblem(fmodel.ising, gstate.state, sel)
    current = gstate.state[sel]
    e_current = ising_energy(sub.model, current)
    rate = math.nan
    clamps = 0
    if cfg.path == "chip":
        qm = preprocess(sub, cfg.chip)
        sol = chip_solve(qm, cfg.chip, rng)
        clamps = qm.clamp_count
        ref = solve(sub.model, current, cfg.subsolver, rng)
        off = sub.model.offset
        rate = energy_rate(sol.energy - off, min(ref.energy, sol.energy) - off)
    else:
        start = current
        if cfg.sub_start == "random":
            start = rng.choice(np.array([-1.0, 1.0]), size=len(sel))
        sol = solve(sub.model, start, cfg.subsolver.with_(incumbent_clamp=False), rng)
    accepted = True
    if cfg.subsolver.incumbent_clamp and sol.energy > e_current:
        accepted = False
    if accepted:
        new = sub.embed(sol.state)
        gs = _global_state(fmodel, new)
    else:
        gs = gstate
    rec = IterationRecord(len(sel), gstate.energy, gs.energy, rate, clamps, accepted)
    return gs, rec


def repeat_seed(seed: int, repeat: int) -> tuple[int, int]:
    return (int(seed), int(repeat))


def run_repeat(fmodel: FormulationModel, cfg: HybridConfig, repeat: int = 0) -> RepeatRecord:
    seed = repeat_seed(cfg.seed, repeat)
    rng = np.random.default_rng(list(seed))
    decomposer = make_decomposer(
        cfg.decomposer,
        **({"magnitude": cfg.energy_impact_magnitude} if cfg.decomposer is DecomposerKind.ENERGY_IMPACT else {}),
    )
    s0 = rng.choice(np.array([-1.0, 1.0]), size=fmodel.n)
    gs = _global_state(fmodel, s0)
    m = fmodel.source.num_clauses
    energies = [gs.energy]
    rates: list[float] = []
    clamps: list[int] = []
    iterations = cfg.iteration_limit
    all_sat = False
    for it in range(1, cfg.iteration_limit + 1):
        gs, rec = run_iteration(fmodel, gs, cfg, rng, decomposer)
        energies.append(gs.energy)
        if cfg.path == "chip":
            rates.append(rec.energy_rate)
            clamps.append(rec.clamp_count)
        if gs.satisfied == m:
            iterations, all_sat = it, True
            break
    return RepeatRecord(repeat, seed, iterations, all_sat, energies, gs.satisfied, gs.assignment, rates, clamps)


def run_hybrid(instance: CnfInstance | FormulationModel, cfg: HybridConfig) -> RunMetrics:
    fmodel = instance if isinstance(instance, FormulationModel) else encode(instance, cfg.formulation)
    if cfg.n_jobs == 1:
        records = [run_repeat(fmodel, cfg, r) for r in range(cfg.repeats)]
    else:
        from joblib import Parallel, delayed

        records = Parallel(n_jobs=cfg.n_jobs)(
            delayed(run_repeat)(fmodel, cfg, r) for r in range(cfg.repeats)
        )
    return RunMetrics(cfg, fmodel.source.name, list(records))

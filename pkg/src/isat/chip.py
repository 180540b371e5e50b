"""Constraint model and emulator for the all-to-all ring-oscillator Ising chip.

The chip programs integer couplings in ``[-j_max, j_max]`` between data
spins and realises local fields through ``g`` local-field oscillators
(LFROs) locked to the reference phase. Preprocessing maps a real-valued
sub-Hamiltonian onto that envelope:

1. remove spins whose field forces their value (lossless in ``rigorous``
   mode),
2. scale by ``k`` and round half away from zero,
3. clamp couplings to ``j_max`` and fields to :func:`h_range`.

:func:`chip_solve` stands in for the analog settle: it perturbs the
programmed weights with device mismatch noise, runs a software subsolver
on the result and reads each spin out by majority vote over noisy
samples. Energies are always reported on the original sub-Hamiltonian.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .decomposers import SubProblem
from .ising import IsingModel, ising_energy
from .subsolvers import Solution, SubsolverConfig, solve

REMOVAL_MODES = ("rigorous", "heuristic", "none")


class CapacityError(ValueError):
    pass


@dataclass(frozen=True)
class ChipConfig:
    total_spins: int = 49
    lfro_count: int = 4
    j_max: int = 14
    scale: float = 12.0
    removal: str = "rigorous"
    removal_n: float = 5.0
    readout_samples: int = 8
    readout_flip_prob: float = 0.02
    coupling_noise: float = 2.0
    h_range_model: str = "linear"
    emu_solver: SubsolverConfig = field(default_factory=SubsolverConfig)

    def __post_init__(self):
        if self.j_max <= 0:
            raise ValueError("j_max must be positive")
        if self.lfro_count < 1:
            raise ValueError("lfro_count must be >= 1")
        if self.total_spins - self.lfro_count < 1:
            raise ValueError("no data spins left after reserving LFROs")
        if not 0 <= self.readout_flip_prob < 0.5:
            raise ValueError("readout_flip_prob must lie in [0, 0.5)")
        if self.scale <= 0:
            raise ValueError("scale must be positive")
        if self.removal not in REMOVAL_MODES:
            raise ValueError(f"removal must be one of {REMOVAL_MODES}")
        if self.readout_samples < 1:
            raise ValueError("readout_samples must be >= 1")
        if self.coupling_noise < 0:
            raise ValueError("coupling_noise must be >= 0")
        if self.h_range_model not in ("linear", "quadratic"):
            raise ValueError("h_range_model must be 'linear' or 'quadratic'")

    @property
    def capacity(self) -> int:
        return self.total_spins - self.lfro_count

    @property
    def h_max(self) -> int:
        return h_range(self.lfro_count, self.h_range_model)


@dataclass(frozen=True, eq=False)
class QuantizedModel:
    """A hardware-ready sub-Hamiltonian plus the bookkeeping to undo removal.

    ``kept`` indexes the spins of ``source`` that survive removal, in the
    order they appear in ``model``; ``removed`` lists ``(spin, value)``
    pairs in ``source`` indexing.
    """

    model: IsingModel
    h_max: int
    j_max: int
    clamp_count: int
    removed: tuple[tuple[int, int], ...]
    kept: np.ndarray
    source: IsingModel
    zeroed_count: int = 0
    scale: float = 1.0

    def inflate(self, sigma) -> np.ndarray:
        """Full ``source``-sized state from a state on the kept spins."""
        out = np.empty(self.source.n)
        out[self.kept] = sigma
        for i, v in self.removed:
            out[i] = v
        return out

    def to_json(self) -> dict:
        from .io import model_to_json

        d = model_to_json(self.model)
        d.update(
            clamp_count=self.clamp_count,
            removed=[[int(i), int(v)] for i, v in self.removed],
            kept=[int(i) for i in self.kept],
            h_max=self.h_max,
            j_max=self.j_max,
            scale=self.scale,
            zeroed_count=self.zeroed_count,
        )
        return d


def h_range(g: int, model: str = "linear") -> int:
    """Local-field magnitude reachable with ``g`` LFROs.

    Linear: ``14 g`` (``2 g`` sites of +-7 towards a ``g``-member locked
    group). Quadratic: ``14 g**2`` (merged block times merged block).
    """
    if g < 1:
        raise ValueError("need at least one LFRO")
    if model == "linear":
        return 14 * g
    if model == "quadratic":
        return 14 * g * g
    raise ValueError(f"unknown range model {model!r}")


def remove_forced_spins(model: IsingModel, mode: str = "rigorous", n_factor: float = 5.0):
    """Fix and drop spins whose local field dominates their couplings.

    ``rigorous`` removes spin ``i`` when ``|h_i| > sum_j |J_ij|``, which
    pins it at ``-sign(h_i)`` in every ground state. ``heuristic`` uses
    ``|h_i| > n_factor * max_j |J_ij|``. Couplings to a removed spin fold
    into its neighbours' fields; its field term folds into the offset.
    Repeats until no spin qualifies.

    Returns ``(reduced_model, removals, kept)``.
    """
    if mode not in REMOVAL_MODES:
        raise ValueError(f"unknown removal mode {mode!r}")
    n = model.n
    Jt = model.coupling_matrix
    absJ = np.abs(Jt)
    h = model.h.copy()
    offset = model.offset
    active = np.ones(n, dtype=bool)
    removals: list[tuple[int, int]] = []
    changed = mode != "none"
    while changed:
        changed = False
        for i in range(n):
            if not active[i]:
                continue
            row = absJ[i, active]
            if mode == "rigorous":
                bound = row.sum()
            else:
                bound = n_factor * (row.max() if row.size else 0.0)
            if abs(h[i]) > bound:
                v = -1 if h[i] > 0 else 1
                active[i] = False
                h[active] += Jt[active, i] * v
                offset += h[i] * v
                removals.append((i, v))
                changed = True
    kept = np.flatnonzero(active)
    reduced = IsingModel.from_dense(h[kept], Jt[np.ix_(kept, kept)], offset)
    return reduced, removals, kept


def _round_half_away(x):
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def scale_and_round(model: IsingModel, k: float) -> IsingModel:
    """Multiply weights by ``k`` and round half away from zero.

    The offset is scaled but not rounded. Weights with ``|k w| < 0.5``
    vanish; :func:`zeroed_by_scaling` counts them.
    """
    if k <= 0:
        raise ValueError("scale must be positive")
    return IsingModel(
        _round_half_away(k * model.h),
        model.edges,
        _round_half_away(k * model.weights),
        k * model.offset,
    )


def zeroed_by_scaling(model: IsingModel, k: float) -> int:
    w = np.concatenate([model.h, model.weights])
    return int(np.count_nonzero((w != 0) & (_round_half_away(k * w) == 0)))


def truncate_clamp(model: IsingModel, j_max: int, h_max: int) -> QuantizedModel:
    if not model.is_integer():
        raise ValueError("truncate_clamp expects an integer model")
    h = np.clip(model.h, -h_max, h_max)
    w = np.clip(model.weights, -j_max, j_max)
    count = int(np.count_nonzero(h != model.h) + np.count_nonzero(w != model.weights))
    clamped = IsingModel(h, model.edges, w, model.offset)
    return QuantizedModel(clamped, h_max, j_max, count, (), np.arange(model.n), model)


def preprocess(sub, cfg: ChipConfig) -> QuantizedModel:
    """Removal, scaling and clamping for one sub-Hamiltonian."""
    source = sub.model if isinstance(sub, SubProblem) else sub
    if source.n > cfg.capacity:
        raise CapacityError(
            f"sub-problem has {source.n} spins; chip capacity is {cfg.capacity}"
        )
    reduced, removals, kept = remove_forced_spins(source, cfg.removal, cfg.removal_n)
    scaled = scale_and_round(reduced, cfg.scale)
    zeroed = zeroed_by_scaling(reduced, cfg.scale)
    q = truncate_clamp(scaled, cfg.j_max, cfg.h_max)
    return QuantizedModel(
        q.model, q.h_max, q.j_max, q.clamp_count, tuple(removals), kept, source, zeroed, cfg.scale
    )


def majority_readout(state, samples: int, flip_prob: float, rng) -> np.ndarray:
    """Sample each spin ``samples`` times with independent bit flips, then vote.

    Ties read as +1.
    """
    state = np.asarray(state, dtype=float)
    if flip_prob == 0 or state.size == 0:
        return state.copy()
    flips = rng.random((state.size, samples)) < flip_prob
    reads = np.where(flips, -state[:, None], state[:, None])
    votes = reads.sum(axis=1)
    return np.where(votes >= 0, 1.0, -1.0)


def _with_mismatch(model: IsingModel, sigma: float, rng) -> IsingModel:
    if sigma == 0:
        return model
    h = model.h + rng.normal(0.0, sigma, model.n)
    w = model.weights + rng.normal(0.0, sigma, model.weights.size)
    return IsingModel(h, model.edges, w, model.offset)


def chip_solve(qm: QuantizedModel, cfg: ChipConfig, rng) -> Solution:
    """Emulated chip run; returns a state and energy on ``qm.source``."""
    rng = np.random.default_rng(rng)
    n = qm.model.n
    start = rng.choice(np.array([-1.0, 1.0]), size=n)
    programmed = _with_mismatch(qm.model, cfg.coupling_noise, rng)
    settled = solve(programmed, start, cfg.emu_solver, rng).state
    read = majority_readout(settled, cfg.readout_samples, cfg.readout_flip_prob, rng)
    full = qm.inflate(read)
    return Solution(full, ising_energy(qm.source, full), 0)

"""Ising subsolvers: exhaustive search, Tabu search and simulated annealing.

All solvers work on the dense symmetric coupling matrix of an
:class:`~isat.ising.IsingModel`. The inner loops are compiled with numba;
the Python wrappers re-evaluate the returned state with
:func:`~isat.ising.ising_energy` so ``Solution.energy`` is exact.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numba
import numpy as np

from .ising import IsingModel, check_spins, ising_energy

BRUTE_FORCE_MAX_SPINS = 28
_EPS = 1e-9


@dataclass(frozen=True)
class SubsolverConfig:
    """Settings shared by the subsolvers.

    ``tabu_steps=None`` means ``tabu_steps_per_spin * n`` single-spin moves.
    """

    kind: str = "tabu"
    tabu_tenure: int = 10
    tabu_steps: int | None = None
    tabu_steps_per_spin: int = 100
    anneal_t0: float = 5.0
    anneal_t1: float = 0.05
    anneal_sweeps: int = 1000
    incumbent_clamp: bool = True

    def __post_init__(self):
        if self.kind not in ("tabu", "brute", "anneal"):
            raise ValueError(f"unknown subsolver {self.kind!r}")
        if self.tabu_tenure < 1:
            raise ValueError("tabu_tenure must be >= 1")
        if self.tabu_steps is not None and self.tabu_steps < 1:
            raise ValueError("tabu_steps must be >= 1")
        if self.tabu_steps_per_spin < 1:
            raise ValueError("tabu_steps_per_spin must be >= 1")
        if self.anneal_sweeps < 0 or not 0 < self.anneal_t1 <= self.anneal_t0:
            raise ValueError("invalid annealing schedule")

    def with_(self, **kw) -> "SubsolverConfig":
        return replace(self, **kw)


@dataclass(frozen=True)
class Solution:
    state: np.ndarray
    energy: float
    evals: int = 0


@numba.njit(cache=True)
def _brute_force_kernel(h, Jt):
    n = h.shape[0]
    s = -np.ones(n)
    lf = h.copy()
    for i in range(n):
        for j in range(n):
            lf[i] += Jt[i, j] * s[j]
    e = 0.0
    for i in range(n):
        e += s[i] * (h[i] + 0.5 * (lf[i] - h[i]))
    best_e = e
    best_code = 0
    code = 0
    for t in range(1, 1 << n):
        b = 0
        while not (t >> b) & 1:
            b += 1
        i = n - 1 - b
        d = -2.0 * s[i] * lf[i]
        s[i] = -s[i]
        e += d
        code ^= 1 << b
        for j in range(n):
            lf[j] += 2.0 * s[i] * Jt[j, i]
        tol = _EPS * max(1.0, abs(best_e))
        if e < best_e - tol:
            best_e = e
            best_code = code
        elif e <= best_e + tol and code < best_code:
            best_code = code
    out = np.empty(n)
    for i in range(n):
        out[i] = 1.0 if (best_code >> (n - 1 - i)) & 1 else -1.0
    return out


@numba.njit(cache=True)
def _tabu_kernel(h, Jt, s0, steps, tenure):
    n = h.shape[0]
    s = s0.copy()
    lf = h.copy()
    for i in range(n):
        for j in range(n):
            lf[i] += Jt[i, j] * s[j]
    e = 0.0
    for i in range(n):
        e += s[i] * (h[i] + 0.5 * (lf[i] - h[i]))
    best_e = e
    best_s = s.copy()
    tabu_until = np.zeros(n, dtype=np.int64)
    evals = 0
    for step in range(steps):
        pick = -1
        pick_d = np.inf
        for i in range(n):
            d = -2.0 * s[i] * lf[i]
            if tabu_until[i] > step and not e + d < best_e - _EPS:
                continue
            if d < pick_d:
                pick_d = d
                pick = i
        evals += n
        if pick < 0:
            break
        s[pick] = -s[pick]
        e += pick_d
        for j in range(n):
            lf[j] += 2.0 * s[pick] * Jt[j, pick]
        tabu_until[pick] = step + 1 + tenure
        if e < best_e - _EPS:
            best_e = e
            best_s[:] = s
    return best_s, evals


@numba.njit(cache=True)
def _anneal_kernel(h, Jt, s0, temps, uniforms):
    n = h.shape[0]
    s = s0.copy()
    lf = h.copy()
    for i in range(n):
        for j in range(n):
            lf[i] += Jt[i, j] * s[j]
    e = 0.0
    for i in range(n):
        e += s[i] * (h[i] + 0.5 * (lf[i] - h[i]))
    best_e = e
    best_s = s.copy()
    for k in range(temps.shape[0]):
        t = temps[k]
        for i in range(n):
            d = -2.0 * s[i] * lf[i]
            if d <= 0.0 or uniforms[k, i] < np.exp(-d / t):
                s[i] = -s[i]
                e += d
                for j in range(n):
                    lf[j] += 2.0 * s[i] * Jt[j, i]
                if e < best_e - _EPS:
                    best_e = e
                    best_s[:] = s
    return best_s


def _finish(model: IsingModel, state, start, cfg: SubsolverConfig, evals: int) -> Solution:
    state = np.asarray(state, dtype=float)
    energy = ising_energy(model, state)
    if cfg.incumbent_clamp and start is not None:
        e0 = ising_energy(model, start)
        if e0 < energy:
            state, energy = np.asarray(start, dtype=float).copy(), e0
    return Solution(state, energy, evals)


def brute_force(model: IsingModel) -> Solution:
    """Exhaustive minimum; ties go to the lexicographically smallest state."""
    if model.n > BRUTE_FORCE_MAX_SPINS:
        raise ValueError(
            f"brute force limited to {BRUTE_FORCE_MAX_SPINS} spins, model has {model.n}"
        )
    if model.n == 0:
        return Solution(np.zeros(0), model.offset, 1)
    state = _brute_force_kernel(model.h, np.ascontiguousarray(model.coupling_matrix))
    return Solution(state, ising_energy(model, state), 2**model.n)


def tabu_search(model: IsingModel, start, cfg: SubsolverConfig | None = None, rng=None) -> Solution:
    """Single-flip Tabu search with best-improvement moves and aspiration.

    Each step flips the admissible spin whose flip lowers the energy most
    (lowest index on ties), then forbids flipping it back for ``tenure``
    steps. A tabu spin is admissible when flipping it beats the best energy
    seen so far. The tenure is capped at ``n - 1`` so a move always exists.
    """
    cfg = cfg or SubsolverConfig()
    start = check_spins(start, model.n)
    if model.n == 0:
        return Solution(start, model.offset, 0)
    steps = cfg.tabu_steps or cfg.tabu_steps_per_spin * model.n
    tenure = min(cfg.tabu_tenure, model.n - 1)
    state, evals = _tabu_kernel(
        model.h, np.ascontiguousarray(model.coupling_matrix), start, steps, tenure
    )
    return _finish(model, state, start, cfg, int(evals))


def anneal(model: IsingModel, start, cfg: SubsolverConfig | None = None, rng=None) -> Solution:
    """Metropolis sweeps under geometric cooling from ``anneal_t0`` to ``anneal_t1``."""
    cfg = cfg or SubsolverConfig(kind="anneal")
    start = check_spins(start, model.n)
    rng = np.random.default_rng(rng)
    if model.n == 0 or cfg.anneal_sweeps == 0:
        return Solution(start.copy(), ising_energy(model, start), 0)
    temps = np.geomspace(cfg.anneal_t0, cfg.anneal_t1, cfg.anneal_sweeps)
    uniforms = rng.random((cfg.anneal_sweeps, model.n))
    state = _anneal_kernel(
        model.h, np.ascontiguousarray(model.coupling_matrix), start, temps, uniforms
    )
    return _finish(model, state, start, cfg, cfg.anneal_sweeps * model.n)


def solve(model: IsingModel, start, cfg: SubsolverConfig | None = None, rng=None) -> Solution:
    cfg = cfg or SubsolverConfig()
    if cfg.kind == "brute":
        sol = brute_force(model)
        return _finish(model, sol.state, start, cfg, sol.evals)
    if cfg.kind == "anneal":
        return anneal(model, start, cfg, rng)
    return tabu_search(model, start, cfg, rng)

"""Capacity-bounded spin selection and sub-Hamiltonian extraction.

A decomposer picks at most ``S`` spins of the global model each
iteration. :func:`extract_subproblem` then freezes every other spin at its
current value and folds it into the fields and offset of the selected
spins, so that for any sub-state ``sigma``

    sub.model.energy(sigma) == global.energy(state with sigma written on selected)
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .formulations import FormulationModel, clause_spins
from .ising import IsingModel, check_spins, flip_deltas, neighbor_lists


class DecomposerKind(str, Enum):
    ENERGY_IMPACT = "energy-impact"
    RANDOM = "random"
    PSEUDORANDOM = "pseudorandom"
    BFS = "bfs"
    SAT_CLAUSE = "sat"

    @classmethod
    def parse(cls, value) -> "DecomposerKind":
        if isinstance(value, cls):
            return value
        key = str(value).lower().replace("_", "-")
        return cls({"energy": "energy-impact", "sat-clause": "sat"}.get(key, key))


@dataclass(frozen=True, eq=False)
class SubProblem:
    selected: np.ndarray
    model: IsingModel
    frozen_context: np.ndarray

    def embed(self, sigma) -> np.ndarray:
        """The global state with ``sigma`` written onto the selected spins."""
        out = self.frozen_context.copy()
        out[self.selected] = sigma
        return out


def _ising(model) -> IsingModel:
    return model.ising if isinstance(model, FormulationModel) else model


def extract_subproblem(model, state, selected) -> SubProblem:
    model = _ising(model)
    s = check_spins(state, model.n)
    sel = np.asarray(selected, dtype=np.intp).reshape(-1)
    if len(sel) and (sel.min() < 0 or sel.max() >= model.n):
        raise IndexError("selected spin index out of range")
    if len(np.unique(sel)) != len(sel):
        raise ValueError("selected spins must be unique")
    Jt = model.coupling_matrix
    frozen = np.ones(model.n, dtype=bool)
    frozen[sel] = False
    s_fr = np.where(frozen, s, 0.0)
    h_sub = model.h[sel] + Jt[sel] @ s_fr
    offset = model.offset + model.h @ s_fr + 0.5 * s_fr @ Jt @ s_fr
    sub = IsingModel.from_dense(h_sub, Jt[np.ix_(sel, sel)], offset)
    return SubProblem(sel, sub, s.copy())


class Decomposer:
    """Base class; subclasses implement :meth:`select`.

    Instances may hold per-run state (the pseudorandom cursor), so use one
    instance per repeat.
    """

    kind: DecomposerKind

    def select(self, model, state, capacity: int, rng) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, model, state, capacity, rng):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        return self.select(model, state, capacity, rng)


class EnergyImpactDecomposer(Decomposer):
    """Spins with the largest flip energy ``E(-s_i) - E(s_i)`` first.

    ``magnitude=True`` ranks by ``|flip energy|`` instead.
    """

    kind = DecomposerKind.ENERGY_IMPACT

    def __init__(self, magnitude: bool = False):
        self.magnitude = magnitude

    def select(self, model, state, capacity, rng):
        ising = _ising(model)
        impact = flip_deltas(ising, state)
        if self.magnitude:
            impact = np.abs(impact)
        # stable sort on -impact keeps lower indices first among ties
        order = np.argsort(-impact, kind="stable")
        return np.sort(order[:capacity])


class RandomDecomposer(Decomposer):
    kind = DecomposerKind.RANDOM

    def select(self, model, state, capacity, rng):
        n = _ising(model).n
        return np.sort(rng.choice(n, size=min(capacity, n), replace=False))


class PseudorandomDecomposer(Decomposer):
    """Walks a shuffled spin order in windows of ``capacity``.

    The final window of a pass may be short; the order is reshuffled once
    every spin has been visited.
    """

    kind = DecomposerKind.PSEUDORANDOM

    def __init__(self):
        self._order = None
        self._cursor = 0

    def select(self, model, state, capacity, rng):
        n = _ising(model).n
        if self._order is None or len(self._order) != n or self._cursor >= n:
            self._order = rng.permutation(n)
            self._cursor = 0
        window = self._order[self._cursor:self._cursor + capacity]
        self._cursor += len(window)
        return np.sort(window)


class BFSDecomposer(Decomposer):
    """Breadth-first cluster around a random source vertex.

    Neighbours of each expanded vertex are enqueued in random order. When
    a component runs out before the capacity is reached the search
    restarts from a random unvisited vertex.
    """

    kind = DecomposerKind.BFS

    def __init__(self):
        self._neighbors = None
        self._model = None

    def _adjacency(self, ising):
        if self._model is not ising:
            self._neighbors = neighbor_lists(ising)
            self._model = ising
        return self._neighbors

    def select(self, model, state, capacity, rng, source: int | None = None):
        ising = _ising(model)
        n = ising.n
        nbrs = self._adjacency(ising)
        capacity = min(capacity, n)
        visited = np.zeros(n, dtype=bool)
        picked: list[int] = []
        while len(picked) < capacity:
            if source is None:
                source = int(rng.choice(np.flatnonzero(~visited)))
            queue = deque([source])
            visited[source] = True
            source = None
            while queue and len(picked) < capacity:
                v = queue.popleft()
                picked.append(v)
                for u in rng.permutation(nbrs[v]):
                    if not visited[u]:
                        visited[u] = True
                        queue.append(int(u))
        return np.sort(np.array(picked, dtype=np.intp))


class SatClauseDecomposer(Decomposer):
    """Unions the spins of randomly drawn clauses until the next would overflow."""

    kind = DecomposerKind.SAT_CLAUSE

    def select(self, model, state, capacity, rng):
        if not isinstance(model, FormulationModel):
            raise TypeError("the SAT decomposer needs a FormulationModel with spin roles")
        m = model.source.num_clauses
        picked: list[int] = []
        seen: set[int] = set()
        for k in rng.permutation(m):
            group = clause_spins(model, int(k))
            new = [i for i in group if i not in seen]
            if len(seen) + len(new) > capacity:
                if not picked:
                    picked = group[:capacity]
                break
            picked += new
            seen.update(new)
            if len(seen) == capacity:
                break
        return np.sort(np.array(picked, dtype=np.intp))


DECOMPOSERS = {
    DecomposerKind.ENERGY_IMPACT: EnergyImpactDecomposer,
    DecomposerKind.RANDOM: RandomDecomposer,
    DecomposerKind.PSEUDORANDOM: PseudorandomDecomposer,
    DecomposerKind.BFS: BFSDecomposer,
    DecomposerKind.SAT_CLAUSE: SatClauseDecomposer,
}


def make_decomposer(kind, **kwargs) -> Decomposer:
    return DECOMPOSERS[DecomposerKind.parse(kind)](**kwargs)


def select_energy_impact(model, state, S, rng=None, magnitude=False):
    return EnergyImpactDecomposer(magnitude)(model, state, S, rng)


def select_random(model, state, S, rng):
    return RandomDecomposer()(model, state, S, rng)


def select_bfs(model, state, S, rng, source=None):
    d = BFSDecomposer()
    if S < 1:
        raise ValueError("capacity must be >= 1")
    return d.select(model, state, S, rng, source=source)


def select_sat_clause(fmodel, state, S, rng):
    return SatClauseDecomposer()(fmodel, state, S, rng)

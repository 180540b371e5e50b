"""QUBO and Ising models, the transform between them, and energy evaluation.

Energies follow

    F(x) = sum_i Q_ii x_i + sum_{i != j} Q_ij x_i x_j + offset        (QUBO)
    F(s) = sum_i h_i s_i + sum_{i < j} J_ij s_i s_j + offset          (Ising)

Couplings are stored strictly upper triangular. Every consumer that needs
the symmetric coupling matrix reads :attr:`IsingModel.coupling_matrix`,
which holds ``J_ij`` in both ``(i, j)`` and ``(j, i)`` with a zero diagonal.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping

import numpy as np


@dataclass(frozen=True)
class QuboModel:
    n: int
    Q: Mapping[tuple[int, int], float]
    offset: float = 0.0

    def __post_init__(self):
        clean = {}
        for (i, j), w in self.Q.items():
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise IndexError(f"QUBO index ({i}, {j}) outside [0, {self.n})")
            if w != 0:
                clean[(int(i), int(j))] = clean.get((int(i), int(j)), 0.0) + float(w)
        object.__setattr__(self, "Q", {k: w for k, w in clean.items() if w != 0})

    def energy(self, x) -> float:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise ValueError(f"state has shape {x.shape}, expected ({self.n},)")
        return float(sum(w * x[i] * x[j] for (i, j), w in self.Q.items()) + self.offset)

    def scaled(self, k: float) -> "QuboModel":
        return QuboModel(self.n, {ij: k * w for ij, w in self.Q.items()}, k * self.offset)


@dataclass(frozen=True, eq=False)
class IsingModel:
    """Ising Hamiltonian with local fields, sparse couplings and an offset.

    ``edges`` is an ``(k, 2)`` integer array with ``i < j`` on every row
    and ``weights`` the matching coupling values. Construction sums
    duplicate pairs, folds ``(j, i)`` onto ``(i, j)`` and drops zeros.
    """

    h: np.ndarray
    edges: np.ndarray = field(default_factory=lambda: np.zeros((0, 2), dtype=np.intp))
    weights: np.ndarray = field(default_factory=lambda: np.zeros(0))
    offset: float = 0.0

    def __post_init__(self):
        h = np.array(self.h, dtype=float).reshape(-1)
        n = h.shape[0]
        edges = np.asarray(self.edges, dtype=np.intp).reshape(-1, 2)
        weights = np.asarray(self.weights, dtype=float).reshape(-1)
        if len(edges) != len(weights):
            raise ValueError("edges and weights differ in length")
        if not np.isfinite(self.offset):
            raise ValueError("offset must be finite")
        if len(edges):
            if edges.min() < 0 or edges.max() >= n:
                raise IndexError("coupling index out of range")
            if np.any(edges[:, 0] == edges[:, 1]):
                raise ValueError("self-couplings are not allowed; use h")
            lo = edges.min(axis=1)
            hi = edges.max(axis=1)
            key, inv = np.unique(lo * n + hi, return_inverse=True)
            summed = np.zeros(len(key))
            np.add.at(summed, inv, weights)
            keep = summed != 0
            key, summed = key[keep], summed[keep]
            edges = np.stack([key // n, key % n], axis=1).astype(np.intp)
            weights = summed
        h.setflags(write=False)
        edges.setflags(write=False)
        weights = np.array(weights, dtype=float)
        weights.setflags(write=False)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "offset", float(self.offset))

    @classmethod
    def from_dict(cls, h, J: Mapping[tuple[int, int], float] | None = None, offset=0.0):
        J = J or {}
        edges = np.array(list(J.keys()), dtype=np.intp).reshape(-1, 2)
        return cls(h, edges, np.array(list(J.values()), dtype=float), offset)

    @classmethod
    def from_dense(cls, h, J, offset=0.0):
        """Build from a symmetric coupling matrix (upper triangle is read)."""
        J = np.asarray(J, dtype=float)
        iu, ju = np.triu_indices(J.shape[0], k=1)
        w = J[iu, ju]
        nz = w != 0
        model = cls(h, np.stack([iu[nz], ju[nz]], axis=1), w[nz], offset)
        sym = np.triu(J, 1)
        sym = sym + sym.T
        sym.setflags(write=False)
        model.__dict__["coupling_matrix"] = sym
        return model

    @property
    def n(self) -> int:
        return self.h.shape[0]

    @property
    def couplings(self) -> dict[tuple[int, int], float]:
        return {(int(i), int(j)): float(w) for (i, j), w in zip(self.edges, self.weights)}

    @cached_property
    def coupling_matrix(self) -> np.ndarray:
        Jt = np.zeros((self.n, self.n))
        if len(self.edges):
            Jt[self.edges[:, 0], self.edges[:, 1]] = self.weights
            Jt[self.edges[:, 1], self.edges[:, 0]] = self.weights
        Jt.setflags(write=False)
        return Jt

    def local_fields(self, s) -> np.ndarray:
        s = check_spins(s, self.n)
        return self.h + self.coupling_matrix @ s

    def energy(self, s) -> float:
        return ising_energy(self, s)

    def replace(self, h=None, offset=None) -> "IsingModel":
        model = IsingModel(
            self.h if h is None else h,
            self.edges,
            self.weights,
            self.offset if offset is None else offset,
        )
        if "coupling_matrix" in self.__dict__:
            model.__dict__["coupling_matrix"] = self.coupling_matrix
        return model

    def is_integer(self) -> bool:
        return bool(
            np.all(self.h == np.round(self.h)) and np.all(self.weights == np.round(self.weights))
        )

    def __eq__(self, other):
        if not isinstance(other, IsingModel):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.h, other.h)
            and np.array_equal(self.edges, other.edges)
            and np.array_equal(self.weights, other.weights)
            and self.offset == other.offset
        )

    def __repr__(self):
        return f"IsingModel(n={self.n}, couplings={len(self.weights)}, offset={self.offset:g})"


def check_spins(s, n: int) -> np.ndarray:
    s = np.asarray(s)
    if s.shape != (n,):
        raise ValueError(f"spin state has shape {s.shape}, expected ({n},)")
    if not np.all(np.abs(s) == 1):
        raise ValueError("spin values must be -1 or +1")
    return s.astype(float)


def qubo_to_ising(q: QuboModel) -> IsingModel:
    """Map a QUBO onto the equivalent Ising model via ``x = (s + 1) / 2``.

    ``h_i = Q_ii/2 + sum_j (Q_ij + Q_ji)/4`` and ``J_ij = (Q_ij + Q_ji)/4``;
    the constant terms land in ``offset`` so energies agree exactly.
    """
    h = np.zeros(q.n)
    offset = q.offset
    pairs: dict[tuple[int, int], float] = {}
    for (i, j), w in q.Q.items():
        if i == j:
            h[i] += w / 2
            offset += w / 2
        else:
            key = (i, j) if i < j else (j, i)
            pairs[key] = pairs.get(key, 0.0) + w / 4
            h[i] += w / 4
            h[j] += w / 4
            offset += w / 4
    return IsingModel.from_dict(h, pairs, offset)


def ising_energy(model: IsingModel, s) -> float:
    s = check_spins(s, model.n)
    e = model.h @ s + model.offset
    if len(model.weights):
        e += model.weights @ (s[model.edges[:, 0]] * s[model.edges[:, 1]])
    return float(e)


def flip_energy(model: IsingModel, s, i: int) -> float:
    """``E(s_i = +1) - E(s_i = -1)``, i.e. ``2 (h_i + sum_j J_ij s_j)``."""
    s = check_spins(s, model.n)
    if not 0 <= i < model.n:
        raise IndexError(f"spin {i} out of range [0, {model.n})")
    return float(2 * (model.h[i] + model.coupling_matrix[i] @ s))


def flip_energies(model: IsingModel, s) -> np.ndarray:
    return 2 * model.local_fields(s)


def flip_deltas(model: IsingModel, s) -> np.ndarray:
    """Energy change ``E(s with s_i -> -s_i) - E(s)`` for every spin."""
    s = check_spins(s, model.n)
    return -2 * s * (model.h + model.coupling_matrix @ s)


def adjacency(model: IsingModel) -> list[dict[int, float]]:
    """Undirected neighbour map per spin, weighted by ``J_ij + J_ji``."""
    adj: list[dict[int, float]] = [{} for _ in range(model.n)]
    for (i, j), w in zip(model.edges, model.weights):
        adj[int(i)][int(j)] = float(w)
        adj[int(j)][int(i)] = float(w)
    return adj


def neighbor_lists(model: IsingModel) -> list[np.ndarray]:
    Jt = model.coupling_matrix
    return [np.flatnonzero(Jt[i]) for i in range(model.n)]

"""Reference implementations used only by the tests.

Each oracle is written against the raw data (clause lists, h/J arrays)
rather than the package's own helpers, so agreement is a genuine
cross-check.
"""
from __future__ import annotations

import itertools

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp
from scipy.sparse import lil_matrix


def all_assignments(n: int) -> np.ndarray:
    """(2**n, n) boolean matrix, row k is the binary expansion of k (MSB first)."""
    k = np.arange(2**n, dtype=np.int64)[:, None]
    return ((k >> np.arange(n - 1, -1, -1)) & 1).astype(bool)


def satisfied_counts(clauses, n: int, chunk: int = 1 << 16):
    """Yield satisfied-clause counts for every assignment, in chunks."""
    for start in range(0, 2**n, chunk):
        k = np.arange(start, min(start + chunk, 2**n), dtype=np.int64)[:, None]
        a = ((k >> np.arange(n - 1, -1, -1)) & 1).astype(bool)
        total = np.zeros(len(k), dtype=np.int32)
        for clause in clauses:
            sat = np.zeros(len(k), dtype=bool)
            for lit in clause:
                col = a[:, abs(lit) - 1]
                sat |= ~col if lit < 0 else col
            total += sat
        yield total


def max_sat(clauses, n: int) -> int:
    return int(max(c.max() for c in satisfied_counts(clauses, n)))


def is_satisfiable(clauses, n: int) -> bool:
    m = len(clauses)
    return any((c == m).any() for c in satisfied_counts(clauses, n))


def satisfiable_instances(count: int, n: int, m: int, first_seed: int = 0):
    """The first ``count`` satisfiable random 3SAT instances by seed."""
    from isat import random_3sat

    out, seed = [], first_seed
    while len(out) < count:
        inst = random_3sat(n, m, seed=seed, name=f"rand-{n}-{m}-{seed:03d}")
        if is_satisfiable(inst.clauses, n):
            out.append(inst)
        seed += 1
    return out


def ising_energy_plain(h, couplings: dict, offset: float, s) -> float:
    e = offset + sum(hi * si for hi, si in zip(h, s))
    for (i, j), w in couplings.items():
        e += w * s[i] * s[j]
    return float(e)


def ising_brute_force(h, couplings: dict, offset: float = 0.0):
    """Ground energy and all ground states by plain enumeration (n <= 16)."""
    n = len(h)
    best, states = np.inf, []
    for s in itertools.product((-1, 1), repeat=n):
        e = ising_energy_plain(h, couplings, offset, s)
        if e < best - 1e-9:
            best, states = e, [s]
        elif abs(e - best) <= 1e-9:
            states.append(s)
    return best, states


def ising_ground_milp(h, couplings: dict, offset: float = 0.0):
    """Exact ground state via the standard product linearisation.

    With ``s = 2x - 1`` every ``s_i s_j`` becomes ``4 y_ij - 2 x_i - 2 x_j + 1``
    where ``y_ij = x_i x_j`` is enforced by ``y <= x_i``, ``y <= x_j`` and
    ``y >= x_i + x_j - 1``. Returns ``(energy, spins)``.
    """
    n = len(h)
    pairs = [(i, j, w) for (i, j), w in couplings.items() if w != 0]
    nv = n + len(pairs)
    c = np.zeros(nv)
    const = float(offset)
    for i, hi in enumerate(h):
        c[i] += 2 * hi
        const -= hi
    for k, (i, j, w) in enumerate(pairs):
        c[n + k] += 4 * w
        c[i] -= 2 * w
        c[j] -= 2 * w
        const += w
    A = lil_matrix((3 * len(pairs), nv))
    lo = np.full(3 * len(pairs), -np.inf)
    hi_ = np.zeros(3 * len(pairs))
    for k, (i, j, _) in enumerate(pairs):
        y = n + k
        A[3 * k, y], A[3 * k, i] = 1, -1
        A[3 * k + 1, y], A[3 * k + 1, j] = 1, -1
        A[3 * k + 2, y], A[3 * k + 2, i], A[3 * k + 2, j] = -1, 1, 1
        hi_[3 * k + 2] = 1
    integrality = np.r_[np.ones(n), np.zeros(len(pairs))]
    cons = [LinearConstraint(A.tocsr(), lo, hi_)] if pairs else []
    res = milp(c, constraints=cons, integrality=integrality, bounds=Bounds(0, 1),
               options={"mip_rel_gap": 0.0})
    if not res.success:
        raise RuntimeError(res.message)
    x = np.round(res.x[:n])
    s = 2 * x - 1
    return ising_energy_plain(h, couplings, offset, s), s


def all_spin_states(n: int) -> np.ndarray:
    return 2.0 * all_assignments(n) - 1.0


def ising_energies(h, couplings: dict, offset: float, states) -> np.ndarray:
    """Energies of many states at once, written from the plain sum."""
    S = np.asarray(states, dtype=float)
    e = np.full(len(S), float(offset)) + S @ np.asarray(h, dtype=float)
    for (i, j), w in couplings.items():
        e += w * S[:, i] * S[:, j]
    return e

"""Per-clause QUBO stencils for the n+m clause-update formulation.

A stencil is a quadratic polynomial over the three clause variables
``a, b, c`` (stored with the negated literals last) and one clause
ancilla ``w``. Adding a stencil to a Hamiltonian must raise the minimum
over ``w`` by exactly 0 when the clause is satisfied and by exactly 1
when it is not. There is one stencil per negation count 0..3.

:func:`fit_stencil` searches small integer coefficients for a valid
stencil with the fewest couplings; :data:`STENCILS` holds its output and
:func:`verify_stencil` re-checks every entry at import time.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

# term order shared by every stencil
LINEAR = ("a", "b", "c", "w")
QUADRATIC = (("a", "b"), ("a", "c"), ("b", "c"), ("a", "w"), ("b", "w"), ("c", "w"))


class StencilError(RuntimeError):
    pass


@dataclass(frozen=True)
class Stencil:
    negated: int
    linear: tuple[int, int, int, int]
    quadratic: tuple[int, int, int, int, int, int]
    constant: int

    @property
    def uses_ancilla(self) -> bool:
        return bool(self.linear[3] or any(self.quadratic[3:]))

    def value(self, a, b, c, w):
        x = dict(a=a, b=b, c=c, w=w)
        v = self.constant + sum(k * x[t] for k, t in zip(self.linear, LINEAR))
        v += sum(k * x[p] * x[q] for k, (p, q) in zip(self.quadratic, QUADRATIC))
        return v


def _local_states():
    # rows: (a, b, c, w) in lexicographic order, w fastest
    return np.array(list(itertools.product((0, 1), repeat=4)), dtype=np.int64)


def _penalty_target(negated: int) -> np.ndarray:
    """1 where the clause is unsatisfied, per (a, b, c) state."""
    abc = np.array(list(itertools.product((0, 1), repeat=3)), dtype=np.int64)
    neg = np.arange(3) >= 3 - negated
    lit = np.where(neg, 1 - abc, abc)
    return (lit.sum(axis=1) == 0).astype(np.int64)


def verify_stencil(st: Stencil) -> None:
    """Check the 0/1 increment property over all eight clause states."""
    target = _penalty_target(st.negated)
    states = _local_states()
    vals = np.array([st.value(*row) for row in states]).reshape(8, 2).min(axis=1)
    if not np.array_equal(vals, target):
        raise StencilError(
            f"stencil for {st.negated} negated literal(s) violates the increment "
            f"property: got {vals.tolist()}, expected {target.tolist()}"
        )


def fit_stencil(negated: int, coef_range: int = 2) -> Stencil:
    """Brute-force the sparsest integer stencil for a negation pattern.

    Ranks candidates by number of nonzero quadratic terms, then by the sum
    of absolute coefficients, then lexicographically.
    """
    states = _local_states().astype(np.int64)
    target = _penalty_target(negated)
    r = np.arange(-coef_range, coef_range + 1)
    quad_feats = np.stack([states[:, LINEAR.index(p)] * states[:, LINEAR.index(q)] for p, q in QUADRATIC], 1)
    lin_combos = np.array(list(itertools.product(r, repeat=4)))
    lin_vals = lin_combos @ states.T  # (L, 16)
    best = None
    for quad in itertools.product(r, repeat=6):
        quad = np.array(quad)
        nnz = int(np.count_nonzero(quad))
        if best is not None and nnz > best[0][0]:
            continue
        vals = lin_vals + quad_feats @ quad  # (L, 16)
        mins = vals.reshape(len(lin_combos), 8, 2).min(axis=2) - target
        ok = np.all(mins == mins[:, :1], axis=1)
        for idx in np.flatnonzero(ok):
            lin = lin_combos[idx]
            const = -int(mins[idx, 0])
            key = (nnz, int(np.abs(quad).sum() + np.abs(lin).sum() + abs(const)))
            cand = (key, tuple(int(v) for v in lin), tuple(int(v) for v in quad), const)
            if best is None or cand < best:
                best = cand
    if best is None:
        raise StencilError(f"no stencil found within coefficient range {coef_range}")
    _, lin, quad, const = best
    st = Stencil(negated, lin, quad, const)
    verify_stencil(st)
    return st


# output of fit_stencil(k, coef_range=2) for k = 0..3
STENCILS: dict[int, Stencil] = {
    0: Stencil(0, (-1, 0, 0, 0), (0, 0, 1, 1, -1, -1), 1),
    1: Stencil(1, (0, 0, 1, 1), (0, -1, 0, 1, -1, -1), 0),
    2: Stencil(2, (0, 0, 1, 0), (0, -1, 0, 1, 1, -1), 0),
    3: Stencil(3, (0, 0, 0, 1), (0, 0, 1, 1, -1, -1), 0),
}


def self_test() -> None:
    for k in range(4):
        st = STENCILS[k]
        if st.negated != k:
            raise StencilError(f"stencil table entry {k} is for pattern {st.negated}")
        verify_stencil(st)


self_test()

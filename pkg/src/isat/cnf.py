"""DIMACS CNF ingestion, random 3SAT generation and clause evaluation.

Literals are stored DIMACS-style as signed integers: ``3`` is ``x3`` and
``-3`` is ``NOT x3``. Variables are 1-based, clauses are 0-based.
"""
from __future__ import annotations

import logging
from pathlib import Path
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, NamedTuple

import numpy as np

logger = logging.getLogger(__name__)


class DimacsError(ValueError):
    """Raised for malformed or unsupported DIMACS input."""


class Literal(NamedTuple):
    var: int
    negated: bool

    @classmethod
    def from_int(cls, lit: int) -> "Literal":
        return cls(abs(lit), lit < 0)

    def __int__(self) -> int:
        return -self.var if self.negated else self.var


@dataclass(frozen=True)
class CnfInstance:
    """A Max-3SAT instance.

    Parameters
    ----------
    num_vars : int
        Number of Boolean variables ``n``.
    clauses : tuple of tuple of int
        Clauses of one to three signed literals each.
    name : str
        Free-form label, usually the source file stem.
    declared_clauses : int or None
        Clause count from the ``p cnf`` line, if parsed from a file.
    """

    num_vars: int
    clauses: tuple[tuple[int, ...], ...]
    name: str = ""
    declared_clauses: int | None = None
    tautologies: frozenset[int] = field(init=False)

    def __post_init__(self):
        clauses = tuple(_normalize_clause(c) for c in self.clauses)
        if not clauses:
            raise DimacsError("instance must contain at least one clause")
        for lits in clauses:
            for lit in lits:
                if abs(lit) > self.num_vars:
                    raise DimacsError(
                        f"literal {lit} exceeds variable count {self.num_vars}"
                    )
        object.__setattr__(self, "clauses", clauses)
        taut = frozenset(
            k for k, lits in enumerate(clauses) if any(-lit in lits for lit in lits)
        )
        object.__setattr__(self, "tautologies", taut)

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    @property
    def clause_count_mismatch(self) -> bool:
        return self.declared_clauses is not None and self.declared_clauses != len(
            self.clauses
        )

    def literals(self, k: int) -> list[Literal]:
        return [Literal.from_int(lit) for lit in self.clauses[k]]

    def clause_vars(self, k: int) -> list[int]:
        return [abs(lit) for lit in self.clauses[k]]

    @cached_property
    def _literal_table(self):
        # (m, 3) arrays: 0-based variable, negation flag, presence mask
        m = len(self.clauses)
        var = np.zeros((m, 3), dtype=np.intp)
        neg = np.zeros((m, 3), dtype=bool)
        mask = np.zeros((m, 3), dtype=bool)
        for k, lits in enumerate(self.clauses):
            for p, lit in enumerate(lits):
                var[k, p] = abs(lit) - 1
                neg[k, p] = lit < 0
                mask[k, p] = True
        return var, neg, mask

    def satisfied_mask(self, assignment) -> np.ndarray:
        a = _check_assignment(assignment, self.num_vars)
        var, neg, mask = self._literal_table
        return np.any(mask & (a[var] != neg), axis=1)

    def to_dimacs(self) -> str:
        lines = [f"p cnf {self.num_vars} {len(self.clauses)}"]
        lines += [" ".join(str(lit) for lit in c) + " 0" for c in self.clauses]
        return "\n".join(lines) + "\n"

    def with_clauses(self, clauses: Iterable[Iterable[int]]) -> "CnfInstance":
        return CnfInstance(self.num_vars, tuple(tuple(c) for c in clauses), self.name)


def _normalize_clause(lits) -> tuple[int, ...]:
    out: list[int] = []
    for lit in lits:
        lit = int(lit)
        if lit == 0:
            raise DimacsError("literal 0 inside clause body")
        if lit not in out:
            out.append(lit)
    if not 1 <= len(out) <= 3:
        raise DimacsError(f"clause {tuple(lits)} has {len(out)} literals; expected 1-3")
    return tuple(out)


def _check_assignment(assignment, n: int) -> np.ndarray:
    a = np.asarray(assignment, dtype=bool)
    if a.shape != (n,):
        raise ValueError(f"assignment has shape {a.shape}, expected ({n},)")
    return a


def parse_dimacs(text: str, name: str = "") -> CnfInstance:
    """Parse DIMACS CNF text.

    Comment lines start with ``c``; a line starting with ``%`` ends the
    clause section (SATLIB files carry a ``%`` / ``0`` trailer). A clause
    count differing from the ``p`` line is tolerated and exposed through
    :attr:`CnfInstance.clause_count_mismatch`.
    """
    num_vars = declared = None
    clauses: list[list[int]] = []
    current: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("%"):
            break
        if line.startswith("p"):
            parts = line.split()
            if num_vars is not None:
                raise DimacsError(f"line {lineno}: duplicate problem line")
            if len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError(f"line {lineno}: malformed problem line {line!r}")
            try:
                num_vars, declared = int(parts[2]), int(parts[3])
            except ValueError:
                raise DimacsError(f"line {lineno}: malformed problem line {line!r}") from None
            if num_vars < 1 or declared < 0:
                raise DimacsError(f"line {lineno}: malformed problem line {line!r}")
            continue
        if num_vars is None:
            raise DimacsError(f"line {lineno}: clause before problem line")
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise DimacsError(f"line {lineno}: bad token {tok!r}") from None
            if lit == 0:
                if not current:
                    raise DimacsError(f"line {lineno}: empty clause")
                clauses.append(current)
                current = []
                continue
            if abs(lit) > num_vars:
                raise DimacsError(
                    f"line {lineno}: variable {abs(lit)} exceeds declared {num_vars}"
                )
            current.append(lit)
            if len(set(current)) > 3:
                raise DimacsError(f"line {lineno}: clause longer than 3 literals")
    if num_vars is None:
        raise DimacsError("missing problem line")
    if current:
        raise DimacsError("last clause is not terminated by 0")
    inst = CnfInstance(num_vars, tuple(tuple(c) for c in clauses), name, declared)
    if inst.clause_count_mismatch:
        logger.warning(
            "%s: declared %d clauses, found %d", name or "<cnf>", declared, len(clauses)
        )
    return inst


def load_dimacs(path) -> CnfInstance:
    path = Path(path)
    return parse_dimacs(path.read_text(), name=path.stem)


def count_satisfied(instance: CnfInstance, assignment) -> int:
    """Number of clauses with at least one true literal."""
    return int(instance.satisfied_mask(assignment).sum())


def random_3sat(n: int, m: int, seed=None, name: str = "") -> CnfInstance:
    """Uniform random 3SAT: three distinct variables per clause, fair polarities."""
    if n < 3:
        raise ValueError(f"random_3sat needs n >= 3, got {n}")
    rng = np.random.default_rng(seed)
    clauses = []
    for _ in range(m):
        vs = rng.choice(n, size=3, replace=False) + 1
        signs = np.where(rng.integers(0, 2, size=3) == 1, -1, 1)
        clauses.append(tuple(int(v) for v in vs * signs))
    return CnfInstance(n, tuple(clauses), name or f"rand-{n}-{m}-{seed}")


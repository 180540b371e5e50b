"""Max-3SAT to QUBO/Ising encoders and the matching decoders.

Five encodings are provided (spin counts for a 3-uniform instance with
``n`` variables and ``m`` clauses):

========================  ===========  =====================================
``Formulation``           spins        spin layout
========================  ===========  =====================================
``MIS``                   3m           one spin per literal occurrence
``ILP``                   n + 2m       variables, then 2 slack bits / clause
``CHANCELLOR``            n + m        variables, then 1 ancilla / clause
``NUSSLEIN_2NM``          2n + m       (positive, negative) dual pairs, then
                                       1 ancilla / clause
``NUSSLEIN_NM``           <= n + m     variables, then 1 ancilla per
                                       3-literal clause
========================  ===========  =====================================

Every encoder builds an integer QUBO, multiplies it by 4 and converts it
to Ising form, so the resulting ``h``, ``J`` and offset are integers.
Tautological clauses are skipped; they constrain nothing.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property

import numpy as np

from .cnf import CnfInstance
from .ising import IsingModel, QuboModel, check_spins, qubo_to_ising
from .stencils import LINEAR, QUADRATIC, STENCILS

QUBO_SCALE = 4


class Formulation(str, Enum):
    MIS = "mis"
    ILP = "ilp"
    CHANCELLOR = "chancellor"
    NUSSLEIN_2NM = "nusslein-2nm"
    NUSSLEIN_NM = "nusslein-nm"

    @classmethod
    def parse(cls, value) -> "Formulation":
        if isinstance(value, cls):
            return value
        key = str(value).lower().replace("_", "-")
        aliases = {"nusslein2nm": "nusslein-2nm", "nussleinnm": "nusslein-nm"}
        return cls(aliases.get(key, key))


# role kinds
VARIABLE = "variable"
LITERAL = "literal"
SLACK = "slack"
ANCILLA = "ancilla"
DUAL = "dual"


@dataclass(frozen=True)
class SpinRole:
    """What a spin stands for. ``var`` is 1-based, ``clause`` 0-based."""

    kind: str
    var: int | None = None
    clause: int | None = None
    negated: bool | None = None
    bit: int | None = None

    def to_dict(self) -> dict:
        d = {"kind": self.kind}
        for key in ("var", "clause", "negated", "bit"):
            val = getattr(self, key)
            if val is not None:
                d[key] = val
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SpinRole":
        return cls(d["kind"], d.get("var"), d.get("clause"), d.get("negated"), d.get("bit"))


@dataclass
class DecodeReport:
    assignment: np.ndarray
    contradictions: list[int] = field(default_factory=list)
    dont_cares: list[int] = field(default_factory=list)


@dataclass(frozen=True, eq=False)
class FormulationModel:
    """An encoded instance: Ising model plus one role per spin."""

    ising: IsingModel
    roles: tuple[SpinRole, ...]
    formulation: Formulation
    source: CnfInstance
    qubo: QuboModel | None = None

    def __post_init__(self):
        if len(self.roles) != self.ising.n:
            raise ValueError("one role per spin required")

    @property
    def n(self) -> int:
        return self.ising.n

    @cached_property
    def _spins_by_var(self) -> dict[int, list[int]]:
        out = defaultdict(list)
        for i, r in enumerate(self.roles):
            if r.var is not None:
                out[r.var].append(i)
        return out

    @cached_property
    def _spins_by_clause(self) -> dict[int, list[int]]:
        out = defaultdict(list)
        for i, r in enumerate(self.roles):
            if r.clause is not None:
                out[r.clause].append(i)
        return out

    @cached_property
    def _decode_table(self):
        n = self.source.num_vars
        if self.formulation is Formulation.MIS:
            lit = [(i, r.var - 1, bool(r.negated)) for i, r in enumerate(self.roles)]
            idx = np.array([t[0] for t in lit], dtype=np.intp)
            var = np.array([t[1] for t in lit], dtype=np.intp)
            neg = np.array([t[2] for t in lit], dtype=bool)
            return idx, var, neg
        if self.formulation is Formulation.NUSSLEIN_2NM:
            pos = np.zeros(n, dtype=np.intp)
            negs = np.zeros(n, dtype=np.intp)
            for i, r in enumerate(self.roles):
                if r.kind == DUAL:
                    (negs if r.negated else pos)[r.var - 1] = i
            return pos, negs
        spins = np.zeros(n, dtype=np.intp)
        for i, r in enumerate(self.roles):
            if r.kind == VARIABLE:
                spins[r.var - 1] = i
        return (spins,)

    def decode(self, s) -> DecodeReport:
        return decode(self, s)

    def decode_assignment(self, s) -> np.ndarray:
        """Assignment only; skips the contradiction bookkeeping."""
        s = np.asarray(s)
        table = self._decode_table
        if self.formulation is Formulation.MIS:
            idx, var, neg = table
            on = s[idx] > 0
            n = self.source.num_vars
            t = np.bincount(var[on & ~neg], minlength=n)
            f = np.bincount(var[on & neg], minlength=n)
            return t > f
        if self.formulation is Formulation.NUSSLEIN_2NM:
            pos, neg = table
            return (s[pos] > 0) & (s[neg] < 0)
        return s[table[0]] > 0

    def clause_spins(self, k: int) -> list[int]:
        return clause_spins(self, k)


class _QuboBuilder:
    def __init__(self):
        self.Q: dict[tuple[int, int], float] = defaultdict(float)
        self.const = 0.0
        self.roles: list[SpinRole] = []

    def spin(self, role: SpinRole) -> int:
        self.roles.append(role)
        return len(self.roles) - 1

    def add_product(self, a: dict, b: dict, scale: float = 1.0):
        """Add ``scale * a * b`` for affine forms ``{var: coef, None: const}``."""
        for i, ci in a.items():
            for j, cj in b.items():
                w = scale * ci * cj
                if i is None and j is None:
                    self.const += w
                elif i is None or j is None or i == j:
                    k = j if i is None else i
                    self.Q[(k, k)] += w
                else:
                    self.Q[(min(i, j), max(i, j))] += w

    def add_linear(self, a: dict, scale: float = 1.0):
        self.add_product(a, {None: 1.0}, scale)

    def build(self, formulation, instance) -> FormulationModel:
        qubo = QuboModel(len(self.roles), dict(self.Q), self.const)
        ising = qubo_to_ising(qubo.scaled(QUBO_SCALE))
        return FormulationModel(ising, tuple(self.roles), formulation, instance, qubo)


def _lit(spin: int, negated: bool) -> dict:
    return {None: 1.0, spin: -1.0} if negated else {spin: 1.0}


def _add(*forms: dict) -> dict:
    out: dict = defaultdict(float)
    for f in forms:
        for k, v in f.items():
            out[k] += v
    return dict(out)


def _active_clauses(instance: CnfInstance):
    for k, lits in enumerate(instance.clauses):
        if k not in instance.tautologies:
            yield k, lits


def _variable_spins(b: _QuboBuilder, n: int) -> list[int]:
    return [b.spin(SpinRole(VARIABLE, var=v)) for v in range(1, n + 1)]


def encode_mis(instance: CnfInstance) -> FormulationModel:
    b = _QuboBuilder()
    occ = []
    for k, lits in _active_clauses(instance):
        spins = [b.spin(SpinRole(LITERAL, var=abs(l), clause=k, negated=l < 0)) for l in lits]
        for i, si in enumerate(spins):
            b.add_linear({si: 1.0}, -1.0)
            for sj in spins[i + 1:]:
                b.add_product({si: 1.0}, {sj: 1.0}, 2.0)
        occ += [(s, l) for s, l in zip(spins, lits)]
    by_lit = defaultdict(list)
    for s, l in occ:
        by_lit[l].append(s)
    for lit, spins in by_lit.items():
        if lit > 0:
            for si in spins:
                for sj in by_lit.get(-lit, ()):
                    b.add_product({si: 1.0}, {sj: 1.0}, 2.0)
    return b.build(Formulation.MIS, instance)


def encode_ilp(instance: CnfInstance) -> FormulationModel:
    b = _QuboBuilder()
    xs = _variable_spins(b, instance.num_vars)
    for k, lits in _active_clauses(instance):
        expr = _add(*(_lit(xs[abs(l) - 1], l < 0) for l in lits), {None: -1.0})
        # slack range 0..len-1 in binary
        nbits = {1: 0, 2: 1, 3: 2}[len(lits)]
        for bit in reversed(range(nbits)):
            s = b.spin(SpinRole(SLACK, clause=k, bit=bit))
            expr = _add(expr, {s: -float(2**bit)})
        b.add_product(expr, expr)
    return b.build(Formulation.ILP, instance)


def encode_chancellor(instance: CnfInstance) -> FormulationModel:
    """Per clause ``-(w + 1) sum(l) + 2 w + sum_{j<k} l_j l_k + 1``.

    The trailing ``+1`` turns the clause contribution into 0 (satisfied)
    or 1 (unsatisfied); it only moves the offset.
    """
    b = _QuboBuilder()
    xs = _variable_spins(b, instance.num_vars)
    for k, lits in _active_clauses(instance):
        w = b.spin(SpinRole(ANCILLA, clause=k))
        ls = [_lit(xs[abs(l) - 1], l < 0) for l in lits]
        b.add_product(_add({w: 1.0}, {None: 1.0}), _add(*ls), -1.0)
        b.add_linear({w: 1.0}, 2.0)
        for i in range(len(ls)):
            for j in range(i + 1, len(ls)):
                b.add_product(ls[i], ls[j])
        b.const += 1.0
    return b.build(Formulation.CHANCELLOR, instance)


def encode_nusslein_2nm(instance: CnfInstance) -> FormulationModel:
    b = _QuboBuilder()
    n = instance.num_vars
    m = instance.num_clauses - len(instance.tautologies)
    pos, neg = [], []
    for v in range(1, n + 1):
        pos.append(b.spin(SpinRole(DUAL, var=v, negated=False)))
        neg.append(b.spin(SpinRole(DUAL, var=v, negated=True)))
    for p, q in zip(pos, neg):
        b.add_product({p: 1.0}, {q: 1.0}, m + 1.0)
    for k, lits in _active_clauses(instance):
        w = b.spin(SpinRole(ANCILLA, clause=k))
        ds = [(neg if l < 0 else pos)[abs(l) - 1] for l in lits]
        b.add_linear({w: 1.0}, 2.0)
        for i, d in enumerate(ds):
            b.add_linear({d: 1.0}, -1.0)
            b.add_product({d: 1.0}, {w: 1.0}, -1.0)
            for e in ds[i + 1:]:
                b.add_product({d: 1.0}, {e: 1.0})
    return b.build(Formulation.NUSSLEIN_2NM, instance)


def encode_nusslein_nm(instance: CnfInstance) -> FormulationModel:
    """Clause-by-clause stencil update; each clause adds 0 or 1 at the minimum."""
    b = _QuboBuilder()
    xs = _variable_spins(b, instance.num_vars)
    for k, lits in _active_clauses(instance):
        if len(lits) < 3:
            # (1 - l1)(1 - l2) or (1 - l1): already quadratic, no ancilla
            terms = [_complement(_lit(xs[abs(l) - 1], l < 0)) for l in lits]
            if len(terms) == 1:
                b.add_linear(terms[0])
            else:
                b.add_product(terms[0], terms[1])
            continue
        ordered = sorted(lits, key=lambda l: l < 0)
        st = STENCILS[sum(l < 0 for l in lits)]
        w = b.spin(SpinRole(ANCILLA, clause=k)) if st.uses_ancilla else None
        slot = {name: xs[abs(l) - 1] for name, l in zip("abc", ordered)}
        slot["w"] = w
        b.const += st.constant
        for coef, name in zip(st.linear, LINEAR):
            if coef:
                b.add_linear({slot[name]: 1.0}, coef)
        for coef, (p, q) in zip(st.quadratic, QUADRATIC):
            if coef:
                b.add_product({slot[p]: 1.0}, {slot[q]: 1.0}, coef)
    return b.build(Formulation.NUSSLEIN_NM, instance)


def _complement(form: dict) -> dict:
    out = {k: -v for k, v in form.items()}
    out[None] = 1.0 + out.get(None, 0.0)
    return out


ENCODERS = {
    Formulation.MIS: encode_mis,
    Formulation.ILP: encode_ilp,
    Formulation.CHANCELLOR: encode_chancellor,
    Formulation.NUSSLEIN_2NM: encode_nusslein_2nm,
    Formulation.NUSSLEIN_NM: encode_nusslein_nm,
}


def encode(instance: CnfInstance, formulation) -> FormulationModel:
    return ENCODERS[Formulation.parse(formulation)](instance)


def decode(model: FormulationModel, s) -> DecodeReport:
    """Map a spin state back to a Boolean assignment.

    MIS takes a per-variable majority over literal spins that are on;
    variables with votes on both sides are listed as contradictions and
    ties resolve to False. The dual encoding reads ``(1, 0)`` as True,
    ``(0, 1)`` as False, ``(0, 0)`` as don't-care and ``(1, 1)`` as a
    contradiction (resolved to False). Other encodings read the variable
    spin directly. Don't-cares always resolve to False.
    """
    s = check_spins(s, model.n)
    n = model.source.num_vars
    contradictions: list[int] = []
    dont_cares: list[int] = []
    if model.formulation is Formulation.MIS:
        idx, var, neg = model._decode_table
        on = s[idx] > 0
        t = np.bincount(var[on & ~neg], minlength=n)
        f = np.bincount(var[on & neg], minlength=n)
        assignment = t > f
        contradictions = [v + 1 for v in np.flatnonzero((t > 0) & (f > 0))]
        dont_cares = [v + 1 for v in np.flatnonzero((t == 0) & (f == 0))]
    elif model.formulation is Formulation.NUSSLEIN_2NM:
        pos, negs = model._decode_table
        p, q = s[pos] > 0, s[negs] > 0
        assignment = p & ~q
        contradictions = [v + 1 for v in np.flatnonzero(p & q)]
        dont_cares = [v + 1 for v in np.flatnonzero(~p & ~q)]
    else:
        assignment = s[model._decode_table[0]] > 0
    return DecodeReport(assignment, contradictions, dont_cares)


_KIND_ORDER = {VARIABLE: 0, DUAL: 0, LITERAL: 1, SLACK: 2, ANCILLA: 2}


def clause_spins(model: FormulationModel, k: int) -> list[int]:
    """Spins tied to clause ``k`` or to any of its variables.

    Variable-level spins come first so that truncation keeps them.
    """
    if not 0 <= k < model.source.num_clauses:
        raise IndexError(f"clause {k} out of range [0, {model.source.num_clauses})")
    spins = set(model._spins_by_clause.get(k, ()))
    for v in model.source.clause_vars(k):
        spins.update(model._spins_by_var.get(v, ()))
    return sorted(spins, key=lambda i: (_KIND_ORDER[model.roles[i].kind], i))

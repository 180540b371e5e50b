import logging

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from isat.cnf import CnfInstance, DimacsError, Literal, count_satisfied, load_dimacs, parse_dimacs, random_3sat


def test_parse_basic():
    inst = parse_dimacs("p cnf 3 2\n1 -2 3 0\n-1 2 0\n")
    assert inst.num_vars == 3
    assert inst.clauses == ((1, -2, 3), (-1, 2))
    assert inst.literals(0) == [Literal(1, False), Literal(2, True), Literal(3, False)]


def test_parse_minimal_with_comment():
    inst = parse_dimacs("c comment\np cnf 1 1\n1 0\n")
    assert inst.num_vars == 1 and inst.clauses == ((1,),)


def test_tautology_flagged():
    inst = parse_dimacs("p cnf 2 1\n1 -2 2 0\n")
    assert inst.tautologies == {0}


def test_duplicate_literals_removed():
    inst = parse_dimacs("p cnf 2 1\n1 1 2 0\n")
    assert inst.clauses == ((1, 2),)


def test_clause_spanning_lines_and_satlib_trailer():
    inst = parse_dimacs("c x\np cnf 3 2\n1 -2\n 3 0 -1\n2 0\n%\n0\n")
    assert inst.clauses == ((1, -2, 3), (-1, 2))


def test_count_mismatch_warns(caplog):
    with caplog.at_level(logging.WARNING):
        inst = parse_dimacs("p cnf 2 3\n1 2 0\n")
    assert inst.clause_count_mismatch
    assert "declared 3" in caplog.text


@pytest.mark.parametrize(
    "text",
    [
        "p cnf x 1\n1 0\n",
        "p dnf 2 1\n1 0\n",
        "p cnf 2\n1 0\n",
        "p cnf 2 1\np cnf 2 1\n1 0\n",
        "p cnf 2 1\n0\n",
        "p cnf 2 1\n3 0\n",
        "p cnf 4 1\n1 2 3 4 0\n",
        "p cnf 2 1\n1 2\n",
        "1 2 0\n",
        "c only a comment\n",
        "p cnf 2 1\n1 a 0\n",
    ],
)
def test_parse_errors(text):
    with pytest.raises(DimacsError):
        parse_dimacs(text)


def test_count_satisfied_examples():
    inst = CnfInstance(3, ((1, -2, 3), (-1, 2)))
    assert count_satisfied(inst, [True, True, True]) == 2
    assert count_satisfied(CnfInstance(1, ((1,),)), [False]) == 0
    assert count_satisfied(CnfInstance(3, ((1, 2, 3),)), [False] * 3) == 0


def test_count_satisfied_length_mismatch():
    with pytest.raises(ValueError):
        count_satisfied(CnfInstance(3, ((1, 2, 3),)), [True, False])


def test_random_3sat_contract():
    inst = random_3sat(20, 91, seed=7)
    assert inst.num_vars == 20 and inst.num_clauses == 91
    assert all(len({abs(l) for l in c}) == 3 for c in inst.clauses)
    assert random_3sat(20, 91, seed=7) == inst
    assert {abs(l) for l in random_3sat(3, 1, seed=0).clauses[0]} == {1, 2, 3}


def test_random_3sat_rejects_small_n():
    with pytest.raises(ValueError):
        random_3sat(2, 1, seed=0)


def test_load_dimacs_uses_file_stem(tmp_path):
    p = tmp_path / "uf-x.cnf"
    p.write_text("p cnf 3 1\n1 2 3 0\n")
    assert load_dimacs(p).name == "uf-x"


clause_st = st.lists(
    st.integers(1, 6).flatmap(lambda v: st.sampled_from([v, -v])), min_size=1, max_size=3, unique=True
)


@given(st.lists(clause_st, min_size=1, max_size=12))
def test_round_trip(clauses):
    inst = CnfInstance(6, tuple(tuple(c) for c in clauses))
    again = parse_dimacs(inst.to_dimacs())
    assert again.clauses == inst.clauses and again.num_vars == inst.num_vars


@given(st.lists(clause_st, min_size=2, max_size=12), st.lists(st.booleans(), min_size=6, max_size=6), st.data())
def test_unsat_count_monotone_under_deletion(clauses, a, data):
    inst = CnfInstance(6, tuple(tuple(c) for c in clauses))
    k = data.draw(st.integers(0, len(clauses) - 1))
    smaller = inst.with_clauses(c for i, c in enumerate(inst.clauses) if i != k)
    unsat = inst.num_clauses - count_satisfied(inst, a)
    assert smaller.num_clauses - count_satisfied(smaller, a) <= unsat


@given(st.integers(3, 30), st.integers(1, 60), st.integers(0, 2**32 - 1))
def test_random_3sat_distinct_vars(n, m, seed):
    inst = random_3sat(n, m, seed=seed)
    assert all(len({abs(l) for l in c}) == 3 and len(c) == 3 for c in inst.clauses)


def test_satisfied_mask_matches_literal_evaluation():
    inst = random_3sat(10, 40, seed=1)
    rng = np.random.default_rng(0)
    a = rng.random(10) < 0.5
    expected = [any(a[abs(l) - 1] != (l < 0) for l in c) for c in inst.clauses]
    assert inst.satisfied_mask(a).tolist() == expected

import math

import numpy as np
import pytest

from isat.chip import ChipConfig
from isat.cnf import CnfInstance, random_3sat
from isat.formulations import encode
from isat.hybrid import (
    GlobalState,
    HybridConfig,
    energy_rate,
    run_hybrid,
    run_iteration,
    run_repeat,
)
from isat.ising import ising_energy
from isat.subsolvers import SubsolverConfig, brute_force

from oracles import is_satisfiable


def small_cfg(**kw):
    base = dict(iteration_limit=30, repeats=3, seed=0, capacity=45)
    base.update(kw)
    return HybridConfig(**base)


def test_full_capacity_brute_force_solves_in_one_iteration():
    inst = random_3sat(5, 10, seed=3)
    fm = encode(inst, "chancellor")
    assert fm.n <= 20
    cfg = small_cfg(capacity=fm.n, subsolver=SubsolverConfig(kind="brute"))
    assert is_satisfiable(inst.clauses, 5)
    m = run_hybrid(inst, cfg)
    assert all(r.all_sat and r.iterations == 1 for r in m.records)


def test_single_clause_solved_at_first_iteration():
    inst = CnfInstance(3, ((1, 2, 3),))
    for form in ("chancellor", "mis", "ilp", "nusslein_2nm", "nusslein_nm"):
        m = run_hybrid(inst, small_cfg(formulation=form, repeats=5))
        assert all(r.iterations == 1 and r.all_sat for r in m.records)


def test_contradiction_never_all_sat():
    inst = CnfInstance(1, ((1,), (-1,)))
    m = run_hybrid(inst, small_cfg(iteration_limit=10))
    assert m.all_sat_rate == 0.0
    assert all(r.iterations == 10 and r.satisfied == 1 for r in m.records)


def test_restriction_solution_leaves_state_unchanged():
    # when the subsolver returns exactly the current restriction the state is untouched
    inst = random_3sat(6, 14, seed=2)
    fm = encode(inst, "chancellor")
    rng = np.random.default_rng(0)
    cfg = small_cfg(capacity=fm.n, sub_start="current",
                    subsolver=SubsolverConfig(kind="brute"))
    s_opt = brute_force(fm.ising).state
    gs = GlobalState(s_opt, fm.decode_assignment(s_opt), ising_energy(fm.ising, s_opt), 0)
    new, rec = run_iteration(fm, gs, cfg, rng)
    assert np.array_equal(new.state, s_opt)
    assert rec.energy_after == rec.energy_before


@pytest.mark.parametrize("dec", ["bfs", "random", "energy_impact", "pseudorandom", "sat_clause"])
def test_clamped_descent_is_monotone(dec):
    inst = random_3sat(20, 91, seed=5)
    rec = run_repeat(encode(inst, "chancellor"), small_cfg(decomposer=dec, capacity=20, iteration_limit=40))
    e = np.array(rec.energies)
    assert np.all(np.diff(e) <= 1e-9)


def test_chip_path_monotone_and_records_rates():
    inst = random_3sat(20, 91, seed=5)
    cfg = small_cfg(path="chip", capacity=30, iteration_limit=15, repeats=2)
    m = run_hybrid(inst, cfg)
    for r in m.records:
        assert np.all(np.diff(r.energies) <= 1e-9)
        assert len(r.energy_rates) == r.iterations == len(r.clamp_counts)
        rates = [x for x in r.energy_rates if not math.isnan(x)]
        assert all(0 <= x <= 100 for x in rates)


def test_determinism_and_repeat_independence():
    inst = random_3sat(20, 91, seed=3)
    a = run_hybrid(inst, small_cfg(repeats=4, iteration_limit=20))
    b = run_hybrid(inst, small_cfg(repeats=4, iteration_limit=20))
    assert [r.energies for r in a.records] == [r.energies for r in b.records]
    # repeat 2 alone matches repeat 2 of the batch
    solo = run_repeat(encode(inst, "chancellor"), small_cfg(repeats=4, iteration_limit=20), 2)
    assert solo.energies == a.records[2].energies


def test_parallel_matches_serial():
    inst = random_3sat(12, 50, seed=1)
    a = run_hybrid(inst, small_cfg(repeats=4, iteration_limit=10))
    b = run_hybrid(inst, small_cfg(repeats=4, iteration_limit=10, n_jobs=2))
    assert [r.energies for r in a.records] == [r.energies for r in b.records]


def test_all_sat_consistency():
    inst = random_3sat(20, 91, seed=3)
    m = run_hybrid(inst, small_cfg(repeats=6, iteration_limit=60, subsolver=SubsolverConfig(incumbent_clamp=False)))
    for r in m.records:
        sat = int(inst.satisfied_mask(r.assignment).sum())
        assert sat == r.satisfied
        assert r.all_sat == (sat == inst.num_clauses)
        if not r.all_sat:
            assert r.iterations == 60
    assert m.all_sat_rate == sum(r.all_sat for r in m.records) / 6


def test_energy_rate_examples():
    assert energy_rate(-40, -40) == 100.0
    assert energy_rate(-20, -40) == 50.0
    assert energy_rate(0, 0) == 100.0
    assert energy_rate(10, -40) == 0.0
    assert math.isnan(energy_rate(-3, 0))
    assert math.isnan(energy_rate(-3, 5))


def test_config_validation():
    with pytest.raises(ValueError):
        HybridConfig(path="quantum")
    with pytest.raises(ValueError):
        HybridConfig(capacity=0)
    with pytest.raises(ValueError):
        HybridConfig(path="chip", capacity=46, chip=ChipConfig(lfro_count=4))
    with pytest.raises(ValueError):
        HybridConfig(repeats=0)
    with pytest.raises(ValueError):
        HybridConfig(sub_start="warm")
    assert HybridConfig(formulation="mis").with_(repeats=2).repeats == 2

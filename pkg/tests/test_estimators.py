import numpy as np
import pytest
from sklearn.base import clone

from isat.chip import QuantizedModel
from isat.cnf import random_3sat
from isat.decomposers import extract_subproblem
from isat.estimators import ChipPreprocessor, HybridSatSolver, NotFittedError, SatEncoder
from isat.formulations import FormulationModel, encode


def test_encoder_matches_encode():
    inst = random_3sat(6, 12, seed=0)
    fm = SatEncoder("ilp").fit().transform(inst)
    assert isinstance(fm, FormulationModel) and fm.ising == encode(inst, "ilp").ising
    out = SatEncoder().fit_transform([inst, inst])
    assert isinstance(out, list) and len(out) == 2


def test_encoder_accepts_dimacs_text():
    inst = random_3sat(5, 8, seed=1)
    assert SatEncoder().transform(inst.to_dimacs()).n == 13


def test_encoder_rejects_unknown_formulation():
    with pytest.raises(ValueError):
        SatEncoder("nope").fit()


def test_chip_preprocessor():
    fm = encode(random_3sat(20, 91, seed=3), "chancellor")
    sub = extract_subproblem(fm.ising, np.ones(fm.n), np.arange(30))
    q = ChipPreprocessor(scale=2, lfros=4).fit_transform(sub)
    assert isinstance(q, QuantizedModel)
    assert len(ChipPreprocessor().transform([sub, sub])) == 2


def test_solver_params_and_clone():
    est = HybridSatSolver(repeats=3, decomposer="random")
    c = clone(est)
    assert c.get_params() == est.get_params()
    c.set_params(capacity=20)
    assert c.capacity == 20 and est.capacity == 45


def test_solver_fit_predict_score():
    inst = random_3sat(20, 91, seed=3)
    est = HybridSatSolver(repeats=3, iteration_limit=80, incumbent_clamp=False, seed=1).fit(inst)
    a = est.predict()
    assert a.dtype == bool and a.shape == (20,)
    assert est.score(inst) == pytest.approx(sum(inst.satisfied_mask(a)) / 91)
    assert est.all_sat_rate_ == est.metrics_.all_sat_rate
    assert est.score(inst) >= 0.95


def test_solver_not_fitted():
    with pytest.raises(NotFittedError):
        HybridSatSolver().predict()


def test_solver_rejects_bad_config():
    with pytest.raises(ValueError):
        HybridSatSolver(capacity=0).fit(random_3sat(5, 5, seed=0))
    est = HybridSatSolver(repeats=1, iteration_limit=2).fit(random_3sat(5, 5, seed=0))
    with pytest.raises(ValueError):
        est.predict(random_3sat(6, 5, seed=0))

"""scikit-learn style wrappers around the encoding, chip and hybrid layers.

The estimators hold only constructor parameters until ``fit``; learned
state lives in trailing-underscore attributes, so ``get_params`` /
``set_params`` / ``clone`` behave as usual.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError
from sklearn.utils.validation import check_is_fitted

from ._validation import check_instance, check_instances, check_positive_int
from .chip import ChipConfig, preprocess
from .cnf import count_satisfied
from .decomposers import DecomposerKind, SubProblem
from .formulations import Formulation, encode
from .hybrid import HybridConfig, run_hybrid
from .ising import IsingModel
from .subsolvers import SubsolverConfig


class SatEncoder(TransformerMixin, BaseEstimator):
    """CNF instance(s) -> :class:`~isat.formulations.FormulationModel`.

    Stateless: ``fit`` only validates the formulation name.
    """

    def __init__(self, formulation="chancellor"):
        self.formulation = formulation

    def fit(self, X=None, y=None):
        self.formulation_ = Formulation.parse(self.formulation)
        return self

    def transform(self, X):
        form = Formulation.parse(self.formulation)
        models = [encode(inst, form) for inst in check_instances(X)]
        if isinstance(X, (list, tuple)):
            return models
        return models[0]


class ChipPreprocessor(TransformerMixin, BaseEstimator):
    """Sub-Hamiltonian(s) -> hardware-ready :class:`~isat.chip.QuantizedModel`."""

    def __init__(self, scale=12.0, lfros=4, j_max=14, total_spins=49,
                 removal="rigorous", removal_n=5.0, h_range_model="linear"):
        self.scale = scale
        self.lfros = lfros
        self.j_max = j_max
        self.total_spins = total_spins
        self.removal = removal
        self.removal_n = removal_n
        self.h_range_model = h_range_model

    def _config(self) -> ChipConfig:
        return ChipConfig(
            total_spins=self.total_spins,
            lfro_count=self.lfros,
            j_max=self.j_max,
            scale=self.scale,
            removal=self.removal,
            removal_n=self.removal_n,
            h_range_model=self.h_range_model,
        )

    def fit(self, X=None, y=None):
        self.config_ = self._config()
        return self

    def transform(self, X):
        cfg = self._config()
        if isinstance(X, (SubProblem, IsingModel)):
            return preprocess(X, cfg)
        return [preprocess(x, cfg) for x in X]


class HybridSatSolver(BaseEstimator):
    """Decompose / solve / merge 3SAT solver.

    ``fit(X)`` runs ``repeats`` independent repeats on one instance and
    keeps the best repeat's assignment. ``predict`` returns that
    assignment as a boolean vector; ``score`` is the fraction of clauses
    of ``X`` it satisfies.

    Fitted attributes: ``metrics_`` (:class:`~isat.hybrid.RunMetrics`),
    ``assignment_``, ``all_sat_rate_``, ``mean_iterations_``,
    ``n_vars_``.
    """

    def __init__(self, formulation="chancellor", decomposer="bfs", path="software",
                 capacity=45, iteration_limit=500, repeats=100, seed=0,
                 subsolver="tabu", tabu_tenure=10, tabu_steps=None,
                 incumbent_clamp=True, scale=12.0, lfros=4, j_max=14,
                 removal="rigorous", removal_n=5.0, readout_flip_prob=0.02,
                 coupling_noise=2.0, n_jobs=1):
        self.formulation = formulation
        self.decomposer = decomposer
        self.path = path
        self.capacity = capacity
        self.iteration_limit = iteration_limit
        self.repeats = repeats
        self.seed = seed
        self.subsolver = subsolver
        self.tabu_tenure = tabu_tenure
        self.tabu_steps = tabu_steps
        self.incumbent_clamp = incumbent_clamp
        self.scale = scale
        self.lfros = lfros
        self.j_max = j_max
        self.removal = removal
        self.removal_n = removal_n
        self.readout_flip_prob = readout_flip_prob
        self.coupling_noise = coupling_noise
        self.n_jobs = n_jobs

    def to_config(self) -> HybridConfig:
        sub = SubsolverConfig(
            kind=self.subsolver,
            tabu_tenure=self.tabu_tenure,
            tabu_steps=self.tabu_steps,
            incumbent_clamp=self.incumbent_clamp,
        )
        chip = ChipConfig(
            lfro_count=self.lfros,
            j_max=self.j_max,
            scale=self.scale,
            removal=self.removal,
            removal_n=self.removal_n,
            readout_flip_prob=self.readout_flip_prob,
            coupling_noise=self.coupling_noise,
        )
        return HybridConfig(
            formulation=Formulation.parse(self.formulation),
            decomposer=DecomposerKind.parse(self.decomposer),
            path=self.path,
            capacity=check_positive_int(self.capacity, "capacity"),
            iteration_limit=check_positive_int(self.iteration_limit, "iteration_limit"),
            repeats=check_positive_int(self.repeats, "repeats"),
            seed=int(self.seed),
            subsolver=sub,
            chip=chip,
            n_jobs=self.n_jobs,
        )

    def fit(self, X, y=None):
        inst = check_instance(X)
        self.metrics_ = run_hybrid(inst, self.to_config())
        best = self.metrics_.best_record()
        self.assignment_ = np.asarray(best.assignment, dtype=bool)
        self.all_sat_rate_ = self.metrics_.all_sat_rate
        self.mean_iterations_ = self.metrics_.mean_iterations
        self.n_vars_ = inst.num_vars
        return self

    def predict(self, X=None):
        check_is_fitted(self, "assignment_")
        if X is not None:
            inst = check_instance(X)
            if inst.num_vars != self.n_vars_:
                raise ValueError(
                    f"instance has {inst.num_vars} variables; solver was fitted on {self.n_vars_}"
                )
        return self.assignment_.copy()

    def score(self, X, y=None):
        inst = check_instance(X)
        return count_satisfied(inst, self.predict(inst)) / max(inst.num_clauses, 1)


__all__ = ["SatEncoder", "ChipPreprocessor", "HybridSatSolver", "NotFittedError"]

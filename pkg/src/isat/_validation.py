"""Input coercion shared by the estimator and CLI layers."""
from __future__ import annotations

import os
from pathlib import Path

import numpy as np

from .cnf import CnfInstance, load_dimacs, parse_dimacs
from .ising import check_spins


def check_instance(X) -> CnfInstance:
    """Accept a :class:`CnfInstance`, a path to a DIMACS file, or DIMACS text."""
    if isinstance(X, CnfInstance):
        return X
    if isinstance(X, Path):
        return load_dimacs(X)
    if isinstance(X, str):
        if "\n" not in X and os.path.exists(X):
            return load_dimacs(X)
        return parse_dimacs(X)
    raise TypeError(f"expected a CnfInstance, a DIMACS path or DIMACS text, got {type(X).__name__}")


def check_instances(X) -> list[CnfInstance]:
    if isinstance(X, (CnfInstance, str, Path)):
        return [check_instance(X)]
    return [check_instance(x) for x in X]


def check_rng(seed) -> np.random.Generator:
    """``None``, an int, a seed sequence or a Generator -> Generator."""
    if isinstance(seed, np.random.RandomState):
        raise TypeError("legacy RandomState is not supported; pass a Generator or a seed")
    return np.random.default_rng(seed)


def check_spin_state(s, n: int) -> np.ndarray:
    return check_spins(s, n)


def check_positive_int(value, name: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or int(value) != value or value < minimum:
        raise ValueError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)

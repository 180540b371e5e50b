"""Decomposition-based 3SAT solving on Ising models with a chip emulator."""
from .chip import CapacityError, ChipConfig, QuantizedModel, chip_solve, h_range, preprocess, remove_forced_spins
from .cnf import CnfInstance, DimacsError, count_satisfied, load_dimacs, parse_dimacs, random_3sat
from .decomposers import DecomposerKind, SubProblem, extract_subproblem, make_decomposer
from .estimators import ChipPreprocessor, HybridSatSolver, SatEncoder
from .formulations import DecodeReport, Formulation, FormulationModel, SpinRole, decode, encode
from .hybrid import HybridConfig, RunMetrics, energy_rate, run_hybrid, run_iteration, run_repeat
from .ising import IsingModel, QuboModel, flip_energy, ising_energy, qubo_to_ising
from .subsolvers import Solution, SubsolverConfig, anneal, brute_force, solve, tabu_search

__version__ = "0.1.0"

__all__ = [
    "CapacityError", "ChipConfig", "QuantizedModel", "chip_solve", "h_range", "preprocess",
    "remove_forced_spins", "CnfInstance", "DimacsError", "count_satisfied", "load_dimacs",
    "parse_dimacs", "random_3sat", "DecomposerKind", "SubProblem", "extract_subproblem",
    "make_decomposer", "ChipPreprocessor", "HybridSatSolver", "SatEncoder", "DecodeReport",
    "Formulation", "FormulationModel", "SpinRole", "decode", "encode", "HybridConfig",
    "RunMetrics", "energy_rate", "run_hybrid", "run_iteration", "run_repeat", "IsingModel",
    "QuboModel", "flip_energy", "ising_energy", "qubo_to_ising", "Solution", "SubsolverConfig",
    "anneal", "brute_force", "solve", "tabu_search",
]

"""Atomic matrices, elementary-step generation, decompositions and cycles."""

from .decompose import (CycleReport, DecompositionResult, DecompositionSolution, Preprocessing, cycles,
                        cycles_exist, decompositions, heuristic_decompositions, preprocess)
from .elementary import ReactantComplex, balanced_products, elementary_reactions, reactant_complexes
from .formula import AtomicMatrix, Formula, atomic_matrix, parse_formula, read_formula_file
from .lp import LpResult, lp_feasible

__all__ = ["AtomicMatrix", "CycleReport", "DecompositionResult", "DecompositionSolution", "Formula", "LpResult",
           "Preprocessing", "ReactantComplex", "atomic_matrix", "balanced_products", "cycles", "cycles_exist",
           "decompositions", "elementary_reactions", "heuristic_decompositions", "lp_feasible", "parse_formula",
           "preprocess", "reactant_complexes", "read_formula_file"]

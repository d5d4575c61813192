"""Finite model checking for plural mereology and atomistic composition."""

from .bridge import derive_F_from_P, derive_P_from_F, roundtrip, roundtrip_F, roundtrip_P
from .enumerator import count_models, enumerate_aem_canonical, enumerate_brute, induce_atc
from .evaluator import DefinednessError, atoms_of_plural, derived_sets, evaluate, expand_definitions
from .formula import format_formula, parse_formula
from .model import Assignment, FamilySpec, Structure, load_structure, save_structure, validate
from .search import find_countermodel, run_experiment
from .theories import check_theory, lemma_suite, registry

__all__ = [
    "Assignment", "DefinednessError", "FamilySpec", "Structure",
    "atoms_of_plural", "check_theory", "count_models", "derive_F_from_P", "derive_P_from_F",
    "derived_sets", "enumerate_aem_canonical", "enumerate_brute", "evaluate", "expand_definitions",
    "find_countermodel", "format_formula", "induce_atc", "lemma_suite", "load_structure",
    "parse_formula", "registry", "roundtrip", "roundtrip_F", "roundtrip_P", "run_experiment",
    "save_structure", "validate",
]

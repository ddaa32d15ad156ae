"""Tableau reasoning for the description logics SI and SHIF."""

from .internalise import Terminology, internalise_sat, internalise_subsumes
from .optimiser import OptimiserConfig, ResourceLimitExceeded, SatResult, Statistics, flag_matrix
from .reasoner import ClassificationResult, Reasoner, decide
from .shif_engine import is_satisfiable
from .si_engine import si_is_satisfiable, si_is_satisfiable_bounded
from .syntax import FragmentError, KnowledgeBase, ParseError, RoleBox, load_kb, parse_concept, parse_kb

__version__ = "0.1.0"

__all__ = [
    "ClassificationResult",
    "FragmentError",
    "KnowledgeBase",
    "OptimiserConfig",
    "ParseError",
    "Reasoner",
    "ResourceLimitExceeded",
    "RoleBox",
    "SatResult",
    "Statistics",
    "Terminology",
    "decide",
    "flag_matrix",
    "internalise_sat",
    "internalise_subsumes",
    "is_satisfiable",
    "load_kb",
    "parse_concept",
    "parse_kb",
    "si_is_satisfiable",
    "si_is_satisfiable_bounded",
]

"""Translate untyped set-theoretic proof obligations into SMT-LIB 2."""
from .ast import ProofObligation
from .errors import TranslationError
from .parser import parse_expr, parse_file, parse_obligation
from .preprocess import preprocess
from .smt import emit
from .solver import SolverConfig, Verdict, run_solver

__all__ = [
    "ProofObligation", "TranslationError", "parse_expr", "parse_file",
    "parse_obligation", "preprocess", "emit", "SolverConfig", "Verdict",
    "run_solver", "translate",
]


def translate(text: str, name: str = "obligation", **emit_opts) -> list:
    """SMT-LIB scripts for every obligation in ``text``."""
    return [emit(preprocess(ob), **emit_opts) for ob in parse_file(text, name)]

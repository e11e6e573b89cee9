"""Proof scripts for the mu-calculus and game logic: checking, derived rules, transformations."""
from .checker import Verdict, check_proof, proves
from .script import Builder, Just, Line, ProofScript, format_proof, parse_proof, parse_theory
from .taut import is_taut

__all__ = ["Builder", "Just", "Line", "ProofScript", "Verdict", "check_proof", "format_proof",
           "is_taut", "parse_proof", "parse_theory", "proves"]

"""Propositional tautology oracle by abstraction and truth tables.

Maximal non-propositional subformulas become atoms.  Literals and their
negations share an atom, as do a variable and its bar; a box is the
negation of the diamond over the negated body and a greatest fixpoint the
negation of a least one, so dual modalities share atoms too.  Bound
variables are compared up to renaming.  Truth tables are evaluated on all
assignments at once, encoded as big-integer bit vectors.

The accepted set is the closure under substitution of the valid formulas
built from variables, bars, conjunctions and disjunctions.  If the skeleton
F(A1..An) is valid, phi is F(X1..Xn) with each Xi replaced by Ai, and a
barred Xi becomes bar(Ai), which is exactly the atom's negation here.
Conversely, substituting into a valid skeleton keeps its truth table valid,
since bar agrees with negation on every atom.  The only extra acceptance is
identifying alpha-variants, which the renaming rule already licenses.
"""
from __future__ import annotations

from ..binding import alpha_canon
from ..syntax import And, Box, Dia, Lit, Mu, Not, Nu, Or, Play, PVar, bar, gl_norm

MAX_ATOMS = 24


class TooManyAtoms(ValueError):
    pass


def abstract(phi, logic: str = "mu"):
    """Propositional skeleton as nested tuples plus the ordered atom list."""
    atoms: dict = {}

    def atom(key, positive):
        if key not in atoms:
            atoms[key] = len(atoms)
        return ("atom", atoms[key], positive)

    def walk(f):
        if isinstance(f, Lit):
            return atom(("lit", f.atom), f.positive)
        if isinstance(f, PVar):
            return atom(("pv", f.base, f.tags), not f.barred)
        if isinstance(f, Or):
            return ("or", walk(f.left), walk(f.right))
        if isinstance(f, And):
            return ("and", walk(f.left), walk(f.right))
        if isinstance(f, Not):
            return ("not", walk(f.body))
        if isinstance(f, Dia):
            return atom(("mod", alpha_canon(f)), True)
        if isinstance(f, Box):
            return atom(("mod", alpha_canon(Dia(f.action, bar(f.body)))), False)
        if isinstance(f, Mu):
            return atom(("mod", alpha_canon(f)), True)
        if isinstance(f, Nu):
            return atom(("mod", alpha_canon(Mu(f.var.bar(), bar(f.body)))), False)
        if isinstance(f, Play):
            return atom(("play", f), True)
        raise TypeError(f"is_taut: unexpected {f!r}")

    if logic == "gl":
        phi = gl_norm(phi)
    tree = walk(phi)
    return tree, list(atoms)


def _table(tree, n: int, full: int, patterns: list) -> int:
    kind = tree[0]
    if kind == "atom":
        p = patterns[tree[1]]
        return p if tree[2] else full ^ p
    if kind == "not":
        return full ^ _table(tree[1], n, full, patterns)
    a = _table(tree[1], n, full, patterns)
    b = _table(tree[2], n, full, patterns)
    return a | b if kind == "or" else a & b


def _patterns(n: int) -> tuple:
    size = 1 << n
    full = (1 << size) - 1
    pats = []
    for i in range(n):
        period = 1 << (i + 1)
        block = ((1 << period) - 1) ^ ((1 << (1 << i)) - 1)
        pats.append(full // ((1 << period) - 1) * block)
    return full, pats


def is_taut(phi, logic: str = "mu", max_atoms: int = MAX_ATOMS) -> bool:
    tree, atoms = abstract(phi, logic)
    n = len(atoms)
    if n > max_atoms:
        raise TooManyAtoms(f"{n} atoms exceed the limit of {max_atoms}")
    full, pats = _patterns(n)
    return _table(tree, n, full, pats) == full

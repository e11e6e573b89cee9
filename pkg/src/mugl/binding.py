"""Substitution, capture checks, object-variable renaming, fresh names and alpha-equivalence.

The functions here accept mu-calculus formulas, game-logic formulas and games
alike; the node classes of the two logics only overlap on literals,
variables and disjunction, where the behaviour is the same.
"""
from __future__ import annotations

from typing import Iterable, Optional

from .syntax import (
    Act, And, App, Assign, Atom, Box, Choice, Const, Dia, Dual, Evolve, Havoc, Lit, Mu,
    Named, Not, Nu, Or, Play, PVar, Seq, Star, Test, Var, action_vars, action_writes,
    add_tag, bar, free_pvars, gl_norm, gnot, term_vars,
)


class CaptureError(ValueError):
    """Substitution would capture a free variable."""


class NotAdmissible(ValueError):
    """A term substitution is not defined for the given formula."""


# ---------------------------------------------------------------- fresh names

def fresh_name(avoid: Iterable[str], prefix: str) -> str:
    avoid = set(avoid)
    n = 0
    while f"{prefix}{n}" in avoid:
        n += 1
    return f"{prefix}{n}"


def fresh_pvar(avoid: Iterable[str], prefix: str = "X") -> str:
    return fresh_name(avoid, prefix)


# control variables for the game encoding use this prefix
CONTROL_PREFIX = "l"


def fresh_ovar(avoid: Iterable[str], prefix: str = CONTROL_PREFIX) -> str:
    return fresh_name(avoid, prefix)


# ---------------------------------------------------------------- renaming x <-> y

def _sw(v: str, x: str, y: str) -> str:
    return y if v == x else x if v == y else v


def rename_term(t, x: str, y: str):
    if isinstance(t, Var):
        return Var(_sw(t.name, x, y))
    if isinstance(t, Const):
        return t
    return App(t.fn, tuple(rename_term(a, x, y) for a in t.args))


def rename_action(a, x: str, y: str):
    if isinstance(a, Named):
        return Named(a.name, add_tag(a.tags, x, y))
    if isinstance(a, Assign):
        return Assign(_sw(a.var, x, y), rename_term(a.term, x, y))
    if isinstance(a, Havoc):
        return Havoc(_sw(a.var, x, y))
    if isinstance(a, Evolve):
        c = None if a.constraint is None else rename_ovar(a.constraint, x, y)
        return Evolve(tuple((_sw(v, x, y), rename_term(t, x, y)) for v, t in a.eqs), c)
    raise TypeError(a)


def rename_ovar(phi, x: str, y: str, bound: frozenset = frozenset()):
    """Swap object variables x and y; free propositional variables get the tag (x, y)."""
    if x == y:
        return phi
    if isinstance(phi, Lit):
        return Lit(Atom(phi.atom.pred, tuple(rename_term(t, x, y) for t in phi.atom.args)),
                   phi.positive)
    if isinstance(phi, PVar):
        if phi.base in bound:
            return phi
        return PVar(phi.base, phi.barred, add_tag(phi.tags, x, y))
    if isinstance(phi, (Or, And, Choice, Seq)):
        return type(phi)(rename_ovar(phi.left, x, y, bound), rename_ovar(phi.right, x, y, bound))
    if isinstance(phi, (Dia, Box)):
        return type(phi)(rename_action(phi.action, x, y), rename_ovar(phi.body, x, y, bound))
    if isinstance(phi, (Mu, Nu)):
        return type(phi)(phi.var, rename_ovar(phi.body, x, y, bound | {phi.var.base}))
    if isinstance(phi, Not):
        return Not(rename_ovar(phi.body, x, y, bound))
    if isinstance(phi, Play):
        return Play(rename_ovar(phi.game, x, y, bound), rename_ovar(phi.body, x, y, bound))
    if isinstance(phi, Act):
        return Act(rename_action(phi.action, x, y))
    if isinstance(phi, Test):
        return Test(rename_ovar(phi.formula, x, y, bound))
    if isinstance(phi, (Star, Dual)):
        return type(phi)(rename_ovar(phi.game, x, y, bound))
    if isinstance(phi, (Var, Const, App)):
        return rename_term(phi, x, y)
    raise TypeError(f"rename_ovar: unexpected {phi!r}")


def apply_tags(phi, tags: tuple):
    for x, y in tags:
        phi = rename_ovar(phi, x, y)
    return phi


# ---------------------------------------------------------------- substitution of propositional variables

def _bases(phi) -> set:
    return {v.base for v in free_pvars(phi)}


def free_for(X: PVar, psi, phi) -> bool:
    """True when no occurrence of X (or its bar) in phi sits under a binder of a free variable of psi."""
    danger = _bases(psi)
    return _free_for(X.base, danger, phi, frozenset())


def _free_for(b: str, danger: set, phi, bound: frozenset) -> bool:
    if isinstance(phi, PVar):
        return phi.base != b or not (bound & danger)
    if isinstance(phi, Lit):
        return True
    if isinstance(phi, (Or, And, Choice, Seq)):
        return _free_for(b, danger, phi.left, bound) and _free_for(b, danger, phi.right, bound)
    if isinstance(phi, (Dia, Box, Not)):
        return _free_for(b, danger, phi.body, bound)
    if isinstance(phi, (Mu, Nu)):
        if phi.var.base == b:
            return True
        return _free_for(b, danger, phi.body, bound | {phi.var.base})
    if isinstance(phi, Play):
        return _free_for(b, danger, phi.game, bound) and _free_for(b, danger, phi.body, bound)
    if isinstance(phi, Act):
        return True
    if isinstance(phi, Test):
        return _free_for(b, danger, phi.formula, bound)
    if isinstance(phi, (Star, Dual)):
        return _free_for(b, danger, phi.game, bound)
    raise TypeError(f"free_for: unexpected {phi!r}")


def subst_pvar(phi, X: PVar, psi, logic: str = "mu"):
    """phi[psi/X]: occurrences of X become psi, occurrences of its bar become the negation of psi.

    Tagged occurrences X^{x,y} become psi renamed along the tags.  Raises
    CaptureError when X is not free for psi in phi.
    """
    if X.tagged:
        raise ValueError("cannot substitute for a rename-tagged variable")
    if not free_for(X, psi, phi):
        raise CaptureError(f"{X.base} is not free for the substituted formula")
    neg = bar if logic == "mu" else gnot
    return _subst(phi, X, psi, neg(psi), neg)


def _subst(phi, X: PVar, pos, negf, neg):
    if isinstance(phi, PVar):
        if phi.base != X.base:
            return phi
        r = pos if phi.barred == X.barred else negf
        return apply_tags(r, phi.tags)
    if isinstance(phi, (Lit, Act)):
        return phi
    if isinstance(phi, (Or, And, Choice, Seq)):
        return type(phi)(_subst(phi.left, X, pos, negf, neg), _subst(phi.right, X, pos, negf, neg))
    if isinstance(phi, (Dia, Box)):
        return type(phi)(phi.action, _subst(phi.body, X, pos, negf, neg))
    if isinstance(phi, (Mu, Nu)):
        if phi.var.base == X.base:
            return phi
        return type(phi)(phi.var, _subst(phi.body, X, pos, negf, neg))
    if isinstance(phi, Not):
        inner = _subst(phi.body, X, pos, negf, neg)
        return neg(inner) if isinstance(inner, PVar) else Not(inner)
    if isinstance(phi, Play):
        return Play(_subst(phi.game, X, pos, negf, neg), _subst(phi.body, X, pos, negf, neg))
    if isinstance(phi, Test):
        return Test(_subst(phi.formula, X, pos, negf, neg))
    if isinstance(phi, (Star, Dual)):
        return type(phi)(_subst(phi.game, X, pos, negf, neg))
    raise TypeError(f"subst_pvar: unexpected {phi!r}")


# ---------------------------------------------------------------- alpha-equivalence

def alpha_canon(phi, env: Optional[dict] = None, depth: int = 0):
    """Rename bound variables to depth-indexed names that no user formula can contain."""
    env = env or {}
    if isinstance(phi, PVar):
        if phi.base in env:
            name, bb = env[phi.base]
            return PVar(name, phi.barred != bb, phi.tags)
        return phi
    if isinstance(phi, (Lit, Act)):
        return phi
    if isinstance(phi, (Or, And, Choice, Seq)):
        return type(phi)(alpha_canon(phi.left, env, depth), alpha_canon(phi.right, env, depth))
    if isinstance(phi, (Dia, Box)):
        return type(phi)(phi.action, alpha_canon(phi.body, env, depth))
    if isinstance(phi, (Mu, Nu)):
        name = f"%{depth}"
        inner = dict(env)
        inner[phi.var.base] = (name, phi.var.barred)
        return type(phi)(PVar(name), alpha_canon(phi.body, inner, depth + 1))
    if isinstance(phi, Not):
        return Not(alpha_canon(phi.body, env, depth))
    if isinstance(phi, Play):
        return Play(alpha_canon(phi.game, env, depth), alpha_canon(phi.body, env, depth))
    if isinstance(phi, Test):
        return Test(alpha_canon(phi.formula, env, depth))
    if isinstance(phi, (Star, Dual)):
        return type(phi)(alpha_canon(phi.game, env, depth))
    raise TypeError(f"alpha_canon: unexpected {phi!r}")


def alpha_eq(a, b) -> bool:
    """Equality up to renaming of bound propositional variables."""
    return a == b or alpha_canon(a) == alpha_canon(b)


def same(a, b, logic: str) -> bool:
    """The structural identity proof checking uses for each logic."""
    if logic == "mu":
        return alpha_eq(a, b)
    return gl_norm(a) == gl_norm(b)


def rename_apart(phi, avoid: Iterable[str] = (), prefix: str = "Z"):
    """Give every binder a distinct unbarred name not in ``avoid`` nor free in phi."""
    from .syntax import all_pvars
    used = set(avoid) | all_pvars(phi)
    return _apart(phi, {}, used, prefix)


def _apart(phi, env, used, prefix):
    if isinstance(phi, PVar):
        if phi.base in env:
            name, bb = env[phi.base]
            return PVar(name, phi.barred != bb, phi.tags)
        return phi
    if isinstance(phi, Lit):
        return phi
    if isinstance(phi, (Or, And)):
        return type(phi)(_apart(phi.left, env, used, prefix), _apart(phi.right, env, used, prefix))
    if isinstance(phi, (Dia, Box)):
        return type(phi)(phi.action, _apart(phi.body, env, used, prefix))
    if isinstance(phi, (Mu, Nu)):
        name = fresh_pvar(used, prefix)
        used.add(name)
        inner = dict(env)
        inner[phi.var.base] = (name, phi.var.barred)
        return type(phi)(PVar(name), _apart(phi.body, inner, used, prefix))
    raise TypeError(f"rename_apart expects a mu-calculus formula, got {phi!r}")


def subst_pvar_renaming(phi, X: PVar, psi, logic: str = "mu"):
    """phi[psi/X], first renaming bound variables of phi that would capture."""
    if not free_for(X, psi, phi):
        phi = rename_apart(phi, avoid=_bases(psi) | {X.base})
    return subst_pvar(phi, X, psi, logic)


# ---------------------------------------------------------------- term substitution

def subst_term_in_term(t, x: str, theta):
    if isinstance(t, Var):
        return theta if t.name == x else t
    if isinstance(t, Const):
        return t
    return App(t.fn, tuple(subst_term_in_term(a, x, theta) for a in t.args))


def subst_term(phi, x: str, theta, footprints: Optional[dict] = None):
    """phi[theta/x], defined only when no action in phi touches x or the variables of theta.

    Propositional variables may depend on any object variable, so a formula
    with free propositional variables only admits the trivial substitution.
    Raises NotAdmissible otherwise.
    """
    if theta == Var(x):
        return phi
    if free_pvars(phi):
        raise NotAdmissible("formula has free propositional variables")
    blocked = {x} | term_vars(theta)
    return _tsub(phi, x, theta, blocked, footprints)


def _tsub_action(a, x, theta, blocked, footprints):
    if isinstance(a, Named):
        fp = action_vars(a, footprints)
        if fp is None:
            raise NotAdmissible(f"footprint of action {a.name} is unknown")
        if fp & blocked:
            raise NotAdmissible(f"action {a.name} touches {sorted(fp & blocked)}")
        return a
    w = action_writes(a, footprints)
    if w & blocked:
        raise NotAdmissible(f"action writes {sorted(w & blocked)}")
    if isinstance(a, Assign):
        return Assign(a.var, subst_term_in_term(a.term, x, theta))
    if isinstance(a, Havoc):
        return a
    c = None if a.constraint is None else _tsub(a.constraint, x, theta, blocked, footprints)
    return Evolve(tuple((v, subst_term_in_term(t, x, theta)) for v, t in a.eqs), c)


def _tsub(phi, x, theta, blocked, footprints):
    if isinstance(phi, Lit):
        return Lit(Atom(phi.atom.pred, tuple(subst_term_in_term(t, x, theta) for t in phi.atom.args)),
                   phi.positive)
    if isinstance(phi, PVar):
        return phi
    if isinstance(phi, (Or, And, Choice, Seq)):
        return type(phi)(_tsub(phi.left, x, theta, blocked, footprints),
                         _tsub(phi.right, x, theta, blocked, footprints))
    if isinstance(phi, (Dia, Box)):
        return type(phi)(_tsub_action(phi.action, x, theta, blocked, footprints),
                         _tsub(phi.body, x, theta, blocked, footprints))
    if isinstance(phi, (Mu, Nu)):
        return type(phi)(phi.var, _tsub(phi.body, x, theta, blocked, footprints))
    if isinstance(phi, Not):
        return Not(_tsub(phi.body, x, theta, blocked, footprints))
    if isinstance(phi, Play):
        return Play(_tsub(phi.game, x, theta, blocked, footprints),
                    _tsub(phi.body, x, theta, blocked, footprints))
    if isinstance(phi, Act):
        return Act(_tsub_action(phi.action, x, theta, blocked, footprints))
    if isinstance(phi, Test):
        return Test(_tsub(phi.formula, x, theta, blocked, footprints))
    if isinstance(phi, (Star, Dual)):
        return type(phi)(_tsub(phi.game, x, theta, blocked, footprints))
    raise TypeError(f"subst_term: unexpected {phi!r}")


def unify_term_subst(pattern, target, x: str) -> tuple:
    """Find theta with pattern[theta/x] == target by simultaneous traversal.

    Returns (ok, theta) where theta is None when x does not occur.
    """
    binding = {}

    def walk(p, t) -> bool:
        if isinstance(p, Var) and p.name == x:
            if "t" in binding:
                return binding["t"] == t
            binding["t"] = t
            return True
        if type(p) is not type(t):
            return False
        if isinstance(p, (Var, Const)):
            return p == t
        if isinstance(p, App):
            return p.fn == t.fn and len(p.args) == len(t.args) and all(
                walk(a, b) for a, b in zip(p.args, t.args))
        if isinstance(p, Lit):
            return (p.positive == t.positive and p.atom.pred == t.atom.pred
                    and len(p.atom.args) == len(t.atom.args)
                    and all(walk(a, b) for a, b in zip(p.atom.args, t.atom.args)))
        if isinstance(p, PVar):
            return p == t
        if isinstance(p, (Or, And, Choice, Seq)):
            return walk(p.left, t.left) and walk(p.right, t.right)
        if isinstance(p, (Dia, Box)):
            return walk(p.action, t.action) and walk(p.body, t.body)
        if isinstance(p, (Mu, Nu)):
            return p.var == t.var and walk(p.body, t.body)
        if isinstance(p, Not):
            return walk(p.body, t.body)
        if isinstance(p, Play):
            return walk(p.game, t.game) and walk(p.body, t.body)
        if isinstance(p, Act):
            return walk(p.action, t.action)
        if isinstance(p, Test):
            return walk(p.formula, t.formula)
        if isinstance(p, (Star, Dual)):
            return walk(p.game, t.game)
        if isinstance(p, Named):
            return p == t
        if isinstance(p, Assign):
            return p.var == t.var and walk(p.term, t.term)
        if isinstance(p, Havoc):
            return p == t
        if isinstance(p, Evolve):
            if [v for v, _ in p.eqs] != [v for v, _ in t.eqs]:
                return False
            if not all(walk(a, b) for (_, a), (_, b) in zip(p.eqs, t.eqs)):
                return False
            if (p.constraint is None) != (t.constraint is None):
                return False
            return p.constraint is None or walk(p.constraint, t.constraint)
        return p == t

    ok = walk(pattern, target)
    return ok, binding.get("t")


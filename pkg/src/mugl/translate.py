"""Translations between game logic and the modal mu-calculus, and local reduction.

``sharp`` embeds game logic into the mu-calculus by recursion on the game
rank; ``flat`` goes back by encoding each fixpoint as a repetition game
controlled by fresh 0/1 object variables; ``eliminate_modalities`` and
``gl_eliminate_actions`` remove a class of atomic actions.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

from .binding import fresh_ovar, fresh_pvar, rename_apart, rename_ovar
from .syntax import (
    Act, And, App, Assign, Box, Choice, Const, Dia, Dual, Evolve, GL_FALSE, Havoc, Lit, Mu, Not,
    Nu, Or, Play, PVar, Seq, Star, TRUE, Test, Var, all_pvars, bar, eq, free_pvars, gand, gnot,
    ovars, term_vars,
)


class TranslationError(ValueError):
    pass


# ---------------------------------------------------------------- sharp

def sharp(phi, two_var: bool = False):
    """Game-logic formula to an equivalent mu-calculus formula.

    Fresh binders avoid every variable of the formula being translated, so
    the result depends only on the input subformula.  In two-variable mode
    binders alternate between two names, which suffices because at each
    repetition at most one loop variable is free.
    """
    if two_var:
        taken = all_pvars(phi)
        pool = []
        n = 0
        while len(pool) < 2:
            name = f"X{n}"
            if name not in taken:
                pool.append(name)
            n += 1
        return _sharp(phi, tuple(pool))
    return _sharp(phi, None)


def _fresh(phi, pool):
    if pool is None:
        return fresh_pvar(all_pvars(phi))
    free = {v.base for v in free_pvars(phi)}
    for name in pool:
        if name not in free:
            return name
    raise TranslationError("two-variable mode needs a formula without free variables from its pool")


def _sharp(phi, pool):
    if isinstance(phi, (Lit, PVar)):
        return phi
    if isinstance(phi, Not):
        return bar(_sharp(phi.body, pool))
    if isinstance(phi, Or):
        return Or(_sharp(phi.left, pool), _sharp(phi.right, pool))
    if not isinstance(phi, Play):
        raise TranslationError(f"not a game-logic formula: {phi!r}")
    g, body = phi.game, phi.body
    if isinstance(g, Act):
        return Dia(g.action, _sharp(body, pool))
    if isinstance(g, Test):
        return And(_sharp(g.formula, pool), _sharp(body, pool))
    if isinstance(g, Choice):
        return Or(_sharp(Play(g.left, body), pool), _sharp(Play(g.right, body), pool))
    if isinstance(g, Seq):
        return _sharp(Play(g.left, Play(g.right, body)), pool)
    if isinstance(g, Dual):
        return bar(_sharp(Play(g.game, gnot(body)), pool))
    if isinstance(g, Star):
        X = PVar(_fresh(phi, pool))
        return Mu(X, _sharp(Or(body, Play(g.game, X)), pool))
    raise TranslationError(f"not a game: {g!r}")


def sharp_children(phi) -> list:
    """The formulas the translation recurses on for phi; each has smaller rank."""
    if isinstance(phi, (Lit, PVar)):
        return []
    if isinstance(phi, Not):
        return [phi.body]
    if isinstance(phi, Or):
        return [phi.left, phi.right]
    g, body = phi.game, phi.body
    if isinstance(g, Act):
        return [body]
    if isinstance(g, Test):
        return [g.formula, body]
    if isinstance(g, Choice):
        return [Play(g.left, body), Play(g.right, body)]
    if isinstance(g, Seq):
        return [Play(g.left, Play(g.right, body))]
    if isinstance(g, Dual):
        return [Play(g.game, gnot(body))]
    return [Or(body, Play(g.game, PVar(_fresh(phi, None))))]


# ---------------------------------------------------------------- dictionaries and control encoding

@dataclass(frozen=True)
class Dictionary:
    """Which variables the game encoding treats as fixpoint-controlled (1) or free (0)."""
    ones: frozenset = frozenset()

    def __call__(self, v) -> int:
        base = v.base if isinstance(v, PVar) else v
        return 1 if base in self.ones else 0

    def with_one(self, base: str) -> "Dictionary":
        return Dictionary(self.ones | {base})


def compatible(theta: Dictionary, phi, bound: frozenset = frozenset()) -> bool:
    """Bound variables must map to 0."""
    if isinstance(phi, (Mu, Nu)):
        return theta(phi.var) == 0 and compatible(theta, phi.body)
    if isinstance(phi, (Or, And)):
        return compatible(theta, phi.left) and compatible(theta, phi.right)
    if isinstance(phi, (Dia, Box)):
        return compatible(theta, phi.body)
    return True


@dataclass(frozen=True)
class ControlEncoding:
    """One 0/1 control variable per encoded propositional variable."""
    pvars: tuple
    controls: tuple

    def control(self, base: str) -> str:
        return self.controls[self.pvars.index(base)]

    def set_game(self, base: str):
        """x_1 := 0; ...; x_n := 0; x_i := 1."""
        g = None
        for c in self.controls:
            a = Act(Assign(c, Const("0")))
            g = a if g is None else Seq(g, a)
        last = Act(Assign(self.control(base), Const("1")))
        return last if g is None else Seq(g, last)

    def eq_formula(self, base: str):
        """Conjunction of equalities pinning the control variables to this variable's code."""
        mine = self.control(base)
        out = None
        for c in self.controls:
            lit = eq(Var(c), Const("1" if c == mine else "0"))
            out = lit if out is None else gand(out, lit)
        return out

    def neq_formula(self, base: str):
        return gnot(self.eq_formula(base))

    @classmethod
    def build(cls, pvars: Iterable[str], avoid: Iterable[str]) -> "ControlEncoding":
        used = set(avoid)
        ctl = []
        for _ in pvars:
            c = fresh_ovar(used)
            used.add(c)
            ctl.append(c)
        return cls(tuple(pvars), tuple(ctl))


def _bound_bases(phi) -> list:
    out = []
    if isinstance(phi, (Mu, Nu)):
        out.append(phi.var.base)
        out.extend(_bound_bases(phi.body))
    elif isinstance(phi, (Or, And)):
        out.extend(_bound_bases(phi.left))
        out.extend(_bound_bases(phi.right))
    elif isinstance(phi, (Dia, Box)):
        out.extend(_bound_bases(phi.body))
    return out


def _stuck():
    """(?false)^d: the demon has no move, so the angel wins."""
    return Dual(Test(GL_FALSE))


def flat_game(phi, theta: Dictionary, enc: ControlEncoding):
    """The game whose angel-winning region is the denotation of phi (under condition (*))."""
    if not compatible(theta, phi):
        raise TranslationError("dictionary assigns 1 to a bound variable")
    return _flat(phi, theta, enc)


def _flat(phi, theta: Dictionary, enc: ControlEncoding):
    if isinstance(phi, Lit):
        return Seq(Test(phi), _stuck())
    if isinstance(phi, PVar):
        if theta(phi):
            return enc.set_game(phi.base)
        return Seq(Test(phi), _stuck())
    if isinstance(phi, Or):
        return Choice(_flat(phi.left, theta, enc), _flat(phi.right, theta, enc))
    if isinstance(phi, And):
        return Dual(Choice(Dual(_flat(phi.left, theta, enc)), Dual(_flat(phi.right, theta, enc))))
    if isinstance(phi, Dia):
        return Seq(Act(phi.action), _flat(phi.body, theta, enc))
    if isinstance(phi, Box):
        return Seq(Dual(Act(phi.action)), _flat(phi.body, theta, enc))
    if isinstance(phi, Mu):
        b = phi.var.base
        body = _flat(phi.body, theta.with_one(b), enc)
        loop = Star(Seq(Test(enc.eq_formula(b)), body))
        return Seq(Seq(enc.set_game(b), loop), Test(enc.neq_formula(b)))
    if isinstance(phi, Nu):
        b = phi.var.base
        body = _flat(phi.body, theta.with_one(b), enc)
        loop = Dual(Star(Dual(Seq(Dual(Test(enc.eq_formula(b))), body))))
        return Seq(Seq(enc.set_game(b), loop), Dual(Test(enc.neq_formula(b))))
    raise TranslationError(f"not a mu-calculus formula: {phi!r}")


@dataclass(frozen=True)
class FlatResult:
    formula: object       # the game-logic formula <game> true
    game: object
    encoding: ControlEncoding
    source: object        # the renamed-apart mu-calculus formula


def prepare_flat(phi, theta: Dictionary = Dictionary(), avoid_ovars: Iterable[str] = ()):
    """Rename binders apart and allocate control variables; returns (phi', encoding)."""
    free = {v.base for v in free_pvars(phi)}
    phi2 = rename_apart(phi, avoid=free | set(theta.ones))
    pv = _bound_bases(phi2) + sorted(b for b in free if theta(b))
    enc = ControlEncoding.build(pv, ovars(phi2) | set(avoid_ovars))
    return phi2, enc


def flat(phi, theta: Dictionary = Dictionary(), avoid_ovars: Iterable[str] = ()) -> FlatResult:
    """<phi^theta> true, with binders renamed apart and fresh control variables."""
    phi2, enc = prepare_flat(phi, theta, avoid_ovars)
    g = flat_game(phi2, theta, enc)
    return FlatResult(Play(g, TRUE), g, enc, phi2)


def check_control_independence(A, enc: ControlEncoding):
    """Named transitions must not touch the control variables."""
    for name, (fp, _) in A.transitions.items():
        clash = set(fp) & set(enc.controls)
        if clash:
            raise TranslationError(f"action {name} has control variables {sorted(clash)} in its footprint")


def control_structure(A, enc: ControlEncoding):
    """The structure extended by the control variables; requires 0 and 1 to differ."""
    if A.constants.get("0") is None or A.constants.get("1") is None or A.constants["0"] == A.constants["1"]:
        raise TranslationError("the game encoding needs constants 0 and 1 with distinct values")
    check_control_independence(A, enc)
    return A.extend(enc.controls)


# ---------------------------------------------------------------- local reduction

def assign_to_random(action, body, avoid: Iterable[str] = ()):
    """<x := theta> phi  ~>  <y := *>(y = theta & phi with x and y swapped), y fresh."""
    if not isinstance(action, Assign):
        return None
    taken = set(avoid) | ovars(body) | term_vars(action.term) | {action.var}
    y = fresh_ovar(taken, prefix="y")
    return Dia(Havoc(y), And(eq(Var(y), action.term), rename_ovar(body, action.var, y)))


def random_to_ode(action, body, avoid: Iterable[str] = ()):
    """<x := *> phi  ~>  <x' = 1> phi | <x' = -1> phi."""
    if not isinstance(action, Havoc):
        return None
    up = Evolve(((action.var, Const("1")),))
    down = Evolve(((action.var, App("neg", (Const("1"),))),))
    return Or(Dia(up, body), Dia(down, body))


STRATEGIES = {"assign-to-random": (assign_to_random, (Assign,)),
              "random-to-ode": (random_to_ode, (Havoc,))}


def eliminate_modalities(phi, in_lambda: Callable, elim: Callable, avoid: Iterable[str] = ()):
    """Remove every modality whose action satisfies ``in_lambda``.

    ``elim(action, body, avoid)`` rewrites the diamond over a body that is
    already free of such actions.  Boxes are handled through their
    negation.  ``avoid`` lists object variables fresh names must avoid
    (typically the structure support).
    """
    avoid = set(avoid)
    return _elim(phi, in_lambda, elim, avoid)


def _elim(phi, in_lambda, elim, avoid):
    if isinstance(phi, (Lit, PVar)):
        return phi
    if isinstance(phi, (Or, And)):
        return type(phi)(_elim(phi.left, in_lambda, elim, avoid), _elim(phi.right, in_lambda, elim, avoid))
    if isinstance(phi, (Mu, Nu)):
        return type(phi)(phi.var, _elim(phi.body, in_lambda, elim, avoid))
    if isinstance(phi, (Dia, Box)):
        body = _elim(phi.body, in_lambda, elim, avoid)
        if not in_lambda(phi.action):
            return type(phi)(phi.action, body)
        if isinstance(phi, Dia):
            out = elim(phi.action, body, avoid)
            src = Dia(phi.action, body)
        else:
            out = bar(elim(phi.action, bar(body), avoid))
            src = Box(phi.action, body)
        if out is None:
            raise TranslationError(f"eliminator declined action {phi.action!r}")
        if not {v.base for v in free_pvars(out)} <= {v.base for v in free_pvars(src)}:
            raise TranslationError("eliminator introduced free propositional variables")
        return out
    raise TranslationError(f"not a mu-calculus formula: {phi!r}")


def assign_game(action, avoid: Iterable[str] = ()):
    """x := theta as a Lambda-free game: x := *; ?x = theta, routed through a fresh y if x occurs in theta."""
    if not isinstance(action, Assign):
        return None
    x, t = action.var, action.term
    if x not in term_vars(t):
        return Seq(Act(Havoc(x)), Test(eq(Var(x), t)))
    y = fresh_ovar(set(avoid) | term_vars(t) | {x}, prefix="y")
    return Seq(Seq(Act(Havoc(y)), Test(eq(Var(y), t))), Seq(Act(Havoc(x)), Test(eq(Var(x), Var(y)))))


def gl_eliminate_actions(phi, in_lambda: Callable, game_elim: Callable, avoid: Iterable[str] = ()):
    """Replace each atomic game whose action satisfies ``in_lambda`` by ``game_elim(action, avoid)``."""
    avoid = set(avoid) | ovars(phi)
    return _gl_elim(phi, in_lambda, game_elim, avoid)


def _gl_elim(x, in_lambda, game_elim, avoid):
    if isinstance(x, (Lit, PVar)):
        return x
    if isinstance(x, Not):
        return Not(_gl_elim(x.body, in_lambda, game_elim, avoid))
    if isinstance(x, Or):
        return Or(_gl_elim(x.left, in_lambda, game_elim, avoid), _gl_elim(x.right, in_lambda, game_elim, avoid))
    if isinstance(x, Play):
        return Play(_gl_elim(x.game, in_lambda, game_elim, avoid), _gl_elim(x.body, in_lambda, game_elim, avoid))
    if isinstance(x, Act):
        if not in_lambda(x.action):
            return x
        g = game_elim(x.action, avoid)
        if g is None:
            raise TranslationError(f"game eliminator declined {x.action!r}")
        avoid |= ovars(g)
        return g
    if isinstance(x, Test):
        return Test(_gl_elim(x.formula, in_lambda, game_elim, avoid))
    if isinstance(x, (Choice, Seq)):
        return type(x)(_gl_elim(x.left, in_lambda, game_elim, avoid), _gl_elim(x.right, in_lambda, game_elim, avoid))
    if isinstance(x, (Star, Dual)):
        return type(x)(_gl_elim(x.game, in_lambda, game_elim, avoid))
    raise TranslationError(f"unexpected {x!r}")


def is_lambda_free(phi, in_lambda: Callable) -> bool:
    from .syntax import actions_of
    return not any(in_lambda(a) for a in actions_of(phi))

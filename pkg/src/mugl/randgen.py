"""Random structures, formulas, games and valuations for property checks.

Free propositional variables are drawn from ``P, Q, R`` and binders from
``X, Y, Z, W``, so they never collide with the ``X<n>`` names the
translations generate.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .semantics import FiniteStructure
from .syntax import (
    Act, And, App, Assign, Atom, Box, Choice, Const, Dia, Dual, Havoc, Lit, Mu, Named, Nu, Or, Play,
    PVar, Seq, Star, Test, Var, gnot,
)

FREE_NAMES = ("P", "Q", "R")
BOUND_NAMES = ("X", "Y", "Z", "W")
ACTIONS = ("a", "b")
SUPPORT_NAMES = ("x", "z")


@dataclass(frozen=True)
class GenConfig:
    max_domain: int = 3
    max_support: int = 2
    depth: int = 5
    assignments: bool = True      # include x := t and x := * actions


def random_structure(rng: random.Random, cfg: GenConfig = GenConfig()) -> FiniteStructure:
    """Domain {0..d-1} with d >= 2, unary predicate p, unary function f and two named actions."""
    d = rng.randint(2, cfg.max_domain)
    dom = [str(i) for i in range(d)]
    k = rng.randint(1, cfg.max_support)
    support = list(SUPPORT_NAMES[:k])
    consts = {c: c for c in dom[:2]}
    f = {(e,): rng.choice(dom) for e in dom}
    p = {(e,) for e in dom if rng.random() < 0.5}
    trans = {}
    for a in ACTIONS:
        fp = [v for v in support if rng.random() < 0.7] or [support[0]]
        pairs = []
        for pre in itertools.product(dom, repeat=len(fp)):
            for post in itertools.product(dom, repeat=len(fp)):
                if rng.random() < 0.35:
                    pairs.append((dict(zip(fp, pre)), dict(zip(fp, post))))
        trans[a] = (fp, pairs)
    return FiniteStructure(dom, support, consts, {"f": (1, f)}, {"p": (1, p)}, trans)


def random_valuation(rng: random.Random, A: FiniteStructure, names=FREE_NAMES) -> dict:
    return {n: rng.getrandbits(A.size) for n in names}


def random_term(rng: random.Random, A: FiniteStructure, depth: int = 1):
    r = rng.random()
    if depth > 0 and r < 0.2:
        return App("f", (random_term(rng, A, depth - 1),))
    if r < 0.6:
        return Var(rng.choice(A.support))
    return Const(rng.choice(list(A.constants)))


def random_literal(rng: random.Random, A: FiniteStructure) -> Lit:
    if rng.random() < 0.5:
        atom = Atom("=", (random_term(rng, A), random_term(rng, A)))
    else:
        atom = Atom("p", (random_term(rng, A),))
    return Lit(atom, rng.random() < 0.6)


def random_action(rng: random.Random, A: FiniteStructure, assignments: bool = True):
    r = rng.random()
    if not assignments or r < 0.6:
        return Named(rng.choice(ACTIONS))
    v = rng.choice(A.support)
    if r < 0.85:
        return Assign(v, random_term(rng, A))
    return Havoc(v)


def random_mu(rng: random.Random, A: FiniteStructure, depth: int, bound=(), free=(),
              assignments: bool = True, free_polarity: str = "any"):
    """Well-formed mu-calculus formula.

    ``bound`` lists binder names in scope (used positively only), ``free``
    the free variable names allowed; ``free_polarity`` is "any" or "pos".
    """
    if depth <= 0 or rng.random() < 0.15:
        leaves = ["lit"]
        if bound:
            leaves.append("bound")
        if free:
            leaves.append("free")
        kind = rng.choice(leaves)
        if kind == "lit":
            return random_literal(rng, A)
        if kind == "bound":
            return PVar(rng.choice(bound))
        return PVar(rng.choice(free), free_polarity == "any" and rng.random() < 0.4)
    k = rng.choice(["or", "and", "dia", "box", "mu", "nu"])
    sub = lambda d: random_mu(rng, A, d, bound, free, assignments, free_polarity)
    if k in ("or", "and"):
        return (Or if k == "or" else And)(sub(depth - 1), sub(depth - 1))
    if k in ("dia", "box"):
        return (Dia if k == "dia" else Box)(random_action(rng, A, assignments), sub(depth - 1))
    name = rng.choice(BOUND_NAMES)
    inner = tuple(b for b in bound if b != name) + (name,)
    free2 = tuple(f for f in free if f != name)
    body = random_mu(rng, A, depth - 1, inner, free2, assignments, free_polarity)
    return (Mu if k == "mu" else Nu)(PVar(name), body)


def random_game(rng: random.Random, A: FiniteStructure, depth: int, free=(),
                assignments: bool = True):
    if depth <= 0 or rng.random() < 0.2:
        if rng.random() < 0.2:
            return Test(random_gl(rng, A, 0, free, assignments))
        return Act(random_action(rng, A, assignments))
    k = rng.choice(["choice", "seq", "star", "dual", "test"])
    if k == "test":
        return Test(random_gl(rng, A, depth - 1, free, assignments))
    if k in ("choice", "seq"):
        return (Choice if k == "choice" else Seq)(random_game(rng, A, depth - 1, free, assignments),
                                                  random_game(rng, A, depth - 1, free, assignments))
    return (Star if k == "star" else Dual)(random_game(rng, A, depth - 1, free, assignments))


def random_gl(rng: random.Random, A: FiniteStructure, depth: int, free=(), assignments: bool = True):
    if depth <= 0 or rng.random() < 0.15:
        if free and rng.random() < 0.3:
            return PVar(rng.choice(free), rng.random() < 0.4)
        return random_literal(rng, A)
    k = rng.choice(["not", "or", "play", "play"])
    if k == "not":
        return gnot(random_gl(rng, A, depth - 1, free, assignments))
    if k == "or":
        return Or(random_gl(rng, A, depth - 1, free, assignments),
                  random_gl(rng, A, depth - 1, free, assignments))
    return Play(random_game(rng, A, depth - 1, free, assignments),
                random_gl(rng, A, depth - 1, free, assignments))


def structure_for(rng: random.Random, sig: dict, support, footprints=None, domain_size: int = 3,
                  extra_constants=("0", "1")) -> FiniteStructure:
    """Random interpretation of a signature (as returned by ``signature_of``).

    Numeral constants denote themselves when they fit in the domain; named
    actions move only their declared footprint (the whole support otherwise).
    """
    dom = [str(i) for i in range(domain_size)]
    consts = {}
    for c in sorted(set(sig["constants"]) | set(extra_constants)):
        consts[c] = c if c in dom else rng.choice(dom)
    funcs = {}
    for f, ar in sig["functions"].items():
        funcs[f] = (ar, {args: rng.choice(dom) for args in itertools.product(dom, repeat=ar)})
    preds = {}
    for p, ar in sig["predicates"].items():
        preds[p] = (ar, {args for args in itertools.product(dom, repeat=ar) if rng.random() < 0.5})
    support = list(support) or ["x"]
    trans = {}
    for a in sorted(sig["actions"]):
        fp = [v for v in (footprints or {}).get(a, support) if v in support] or support[:1]
        pairs = []
        for pre in itertools.product(dom, repeat=len(fp)):
            for post in itertools.product(dom, repeat=len(fp)):
                if rng.random() < 0.3:
                    pairs.append((dict(zip(fp, pre)), dict(zip(fp, post))))
        trans[a] = (fp, pairs)
    return FiniteStructure(dom, support, consts, funcs, preds, trans)

"""Derived rules, expanded into primitive proof lines.

Each function appends lines to a Builder (or returns a fresh script) whose
last line is the derived conclusion; nothing here is trusted by the checker.
"""
from __future__ import annotations

from typing import Callable

from ..binding import CaptureError, free_for, subst_pvar
from ..syntax import (
    Box, Choice, Dia, Dual, Mu, Nu, Or, Play, PVar, Seq, Star, bar, free_bases, gand, gnot,
)
from .script import Builder, ProofScript


class DerivationError(ValueError):
    pass


def ancestors(b: Builder, k: int) -> list:
    """Line numbers the derivation of line k depends on, ascending, k included."""
    todo, out = [k], set()
    while todo:
        n = todo.pop()
        if n in out:
            continue
        out.add(n)
        ln = b.lines[n - 1]
        if ln.just.kind != "hyp":
            todo.extend(ln.just.refs)
    return sorted(out)


def subst_lines(b: Builder, k: int, X: PVar, psi) -> int:
    """Re-derive line k with psi substituted for X.

    Only lines where X is free are re-emitted; the others remain valid as
    they are.  Hypotheses are not closed under substitution.
    """
    mapping = {}
    for n in ancestors(b, k):
        ln = b.lines[n - 1]
        if X.base not in free_bases(ln.formula):
            mapping[n] = n
            continue
        if ln.just.kind == "hyp":
            raise DerivationError(f"line {n} is a hypothesis mentioning {X.base}")
        try:
            f = subst_pvar(ln.formula, X, psi, b.calculus)
        except CaptureError as e:
            raise DerivationError(f"line {n}: {e}")
        mapping[n] = b.add(f, ln.just.kind, *(mapping[r] for r in ln.just.refs))
    return mapping[k]


def mono_mu(b: Builder, k: int, X: PVar) -> int:
    """From line k proving psi -> phi derive mu X. psi -> mu X. phi."""
    psi, phi = b.split_imp(b.formula(k))
    m = Mu(X, phi)
    if not (free_for(X, m, phi) and free_for(X, m, psi)):
        raise DerivationError(f"{X.base} is not free for the fixpoint in the premise")
    k1 = subst_lines(b, k, X, m)
    unfold = subst_pvar(phi, X, m)
    k2 = b.add(b.iff(unfold, m), "ax.mu")
    k3 = b.chain([k1, k2], b.implies(subst_pvar(psi, X, m), m))
    return b.add(b.implies(Mu(X, psi), m), "FPmu", k3)


def mono_nu(b: Builder, k: int, X: PVar) -> int:
    """From line k proving psi -> phi derive nu X. psi -> nu X. phi."""
    psi, phi = b.split_imp(b.formula(k))
    k1 = b.chain([k], b.implies(bar(phi), bar(psi)))
    k2 = mono_mu(b, k1, X.bar())
    return b.chain([k2], b.implies(Nu(X, psi), Nu(X, phi)))


def box_mono(b: Builder, k: int, action) -> int:
    """From line k proving psi -> phi derive [a] psi -> [a] phi."""
    psi, phi = b.split_imp(b.formula(k))
    k1 = b.chain([k], b.implies(bar(phi), bar(psi)))
    k2 = b.add(b.implies(Dia(action, bar(phi)), Dia(action, bar(psi))), "Ma", k1)
    return b.chain([k2], b.implies(Box(action, psi), Box(action, phi)))


def mono_mu_script(premise: ProofScript, X: PVar) -> ProofScript:
    b = Builder("mu", premise.footprints)
    mono_mu(b, b.include(premise), X)
    return b.script()


def mono_nu_script(premise: ProofScript, X: PVar) -> ProofScript:
    b = Builder("mu", premise.footprints)
    mono_nu(b, b.include(premise), X)
    return b.script()


def box_mono_script(premise: ProofScript, action) -> ProofScript:
    b = Builder("mu", premise.footprints)
    box_mono(b, b.include(premise), action)
    return b.script()


def dual_choice_axiom(g1, g2, phi, footprints=None) -> ProofScript:
    """<g1 n g2> phi <-> <g1> phi & <g2> phi, with n the dual choice."""
    b = Builder("gl", footprints)
    inner = Choice(Dual(g1), Dual(g2))
    np = gnot(phi)
    l1 = b.add(b.iff(Play(Dual(inner), phi), gnot(Play(inner, np))), "ax.dual")
    l2 = b.add(b.iff(Play(inner, np), Or(Play(Dual(g1), np), Play(Dual(g2), np))), "ax.choice")
    l3 = b.add(b.iff(Play(Dual(g1), np), gnot(Play(g1, phi))), "ax.dual")
    l4 = b.add(b.iff(Play(Dual(g2), np), gnot(Play(g2, phi))), "ax.dual")
    b.chain([l1, l2, l3, l4], b.iff(Play(Dual(inner), phi), gand(Play(g1, phi), Play(g2, phi))))
    return b.script()


def dual_seq_axiom(g1, g2, phi, footprints=None) -> ProofScript:
    """<(g1;g2)^d> phi <-> <g1^d; g2^d> phi."""
    b = Builder("gl", footprints)
    np = gnot(phi)
    d2 = Play(Dual(g2), phi)
    l1 = b.add(b.iff(Play(Dual(Seq(g1, g2)), phi), gnot(Play(Seq(g1, g2), np))), "ax.dual")
    l2 = b.add(b.iff(Play(Seq(g1, g2), np), Play(g1, Play(g2, np))), "ax.comp")
    l3 = b.add(b.iff(Play(Seq(Dual(g1), Dual(g2)), phi), Play(Dual(g1), d2)), "ax.comp")
    l4 = b.add(b.iff(Play(Dual(g1), d2), gnot(Play(g1, gnot(d2)))), "ax.dual")
    l5 = b.add(b.iff(d2, gnot(Play(g2, np))), "ax.dual")
    l6 = b.chain([l5], b.implies(gnot(d2), Play(g2, np)))
    l7 = b.add(b.implies(Play(g1, gnot(d2)), Play(g1, Play(g2, np))), "M", l6)
    l8 = b.chain([l5], b.implies(Play(g2, np), gnot(d2)))
    l9 = b.add(b.implies(Play(g1, Play(g2, np)), Play(g1, gnot(d2))), "M", l8)
    b.chain([l1, l2, l3, l4, l7, l9],
            b.iff(Play(Dual(Seq(g1, g2)), phi), Play(Seq(Dual(g1), Dual(g2)), phi)))
    return b.script()


def choice_swap(g1, g2) -> Callable:
    """Premise provider proving <g1 u g2> psi <-> <g2 u g1> psi for any psi."""
    def provide(psi, footprints=None) -> ProofScript:
        b = Builder("gl", footprints)
        a1, a2 = Play(g1, psi), Play(g2, psi)
        l1 = b.add(b.iff(Play(Choice(g1, g2), psi), Or(a1, a2)), "ax.choice")
        l2 = b.add(b.iff(Play(Choice(g2, g1), psi), Or(a2, a1)), "ax.choice")
        b.chain([l1, l2], b.iff(Play(Choice(g1, g2), psi), Play(Choice(g2, g1), psi)))
        return b.script()
    return provide


def replace_in_loop(g1, g2, rho, provide: Callable, footprints=None) -> ProofScript:
    """<g1*> rho <-> <g2*> rho from proofs of <g1> psi <-> <g2> psi.

    ``provide(psi)`` must return a game-logic script ending in that
    equivalence; it is called for psi = <g2*> rho and psi = <g1*> rho.
    """
    b = Builder("gl", footprints)
    s1, s2 = Play(Star(g1), rho), Play(Star(g2), rho)

    def half(src, dst, gs, gd):
        # <gs*> rho -> <gd*> rho by iteration induction
        k = b.include(provide(dst, footprints))
        u = b.add(b.iff(dst, Or(rho, Play(gd, dst))), "ax.star")
        c = b.chain([k, u], b.implies(Or(rho, Play(gs, dst)), dst))
        return b.add(b.implies(src, dst), "FPstar", c)

    h1 = half(s1, s2, g1, g2)
    h2 = half(s2, s1, g2, g1)
    b.chain([h1, h2], b.iff(s1, s2))
    return b.script()

"""Proof transformations: substitution into proofs and game-logic to mu-calculus."""
from __future__ import annotations

from ..binding import CaptureError, fresh_pvar, subst_pvar
from ..syntax import Act, Choice, Dual, Or, Play, PVar, Seq, Star, Test, all_pvars, free_bases, gnot
from ..translate import sharp
from .checker import check_proof
from .derived import DerivationError, mono_mu
from .script import Builder, Line, ProofScript


class TransformError(ValueError):
    pass


def subst_proof(script: ProofScript, X: PVar, psi) -> ProofScript:
    """Substitute psi for X in every line, keeping numbering and justifications.

    Every axiom instance and rule application stays an instance of the same
    schema, provided X is free for psi in each line.
    """
    out = []
    for ln in script.lines:
        if X.base not in free_bases(ln.formula):
            out.append(ln)
            continue
        if ln.just.kind == "hyp":
            raise TransformError(f"line {ln.num}: hypothesis mentions {X.base}")
        try:
            f = subst_pvar(ln.formula, X, psi, script.calculus)
        except CaptureError as e:
            raise TransformError(f"line {ln.num}: {e}")
        out.append(Line(ln.num, f, ln.just))
    return ProofScript(script.calculus, out, dict(script.footprints), dict(script.meta))


_SAME_TOKEN = {"taut": "taut", "eq": "eq", "ax.exI": "ax.exI", "ax.V": "ax.V",
               "ax.assign": "ax.assign", "ax.ctl": "ax.ctl", "ax.test": "taut",
               "ax.choice": "taut", "ax.comp": "taut", "ax.dual": "taut", "ax.star": "ax.mu"}


def translate_proof_sharp(script: ProofScript, theory=None, check: bool = True) -> ProofScript:
    """Turn a game-logic proof into a mu-calculus proof of the translated conclusion.

    Lines keep their translated formulas; each monotonicity step over a
    compound game is expanded by induction on the game.
    """
    if script.calculus != "gl":
        raise TransformError("expected a game-logic proof")
    if check:
        v = check_proof(script, theory)
        if not v.ok:
            raise TransformError(f"source proof rejected at line {v.first_failure.num}: "
                                 f"{v.first_failure.message}")
    b = Builder("mu", script.footprints)
    where = {}
    for ln in script.lines:
        f = sharp(ln.formula)
        j = ln.just
        refs = [where[r] for r in j.refs] if j.kind != "hyp" else list(j.refs)
        if j.kind in _SAME_TOKEN:
            n = b.add(f, _SAME_TOKEN[j.kind])
        elif j.kind in ("mp", "rename", "hyp"):
            n = b.add(f, j.kind, *refs)
        elif j.kind == "FPstar":
            n = b.add(f, "FPmu", *refs)
        elif j.kind == "M":
            game = _gl_split(ln.formula)[0].game
            rho1, rho2 = _gl_split(script.line(j.refs[0]).formula)
            n = mono_sharp(b, refs[0], rho1, rho2, game)
            if b.formula(n) != f:
                n = b.add(f, "rename", n)
        else:
            raise TransformError(f"line {ln.num}: cannot translate {j.kind}")
        where[ln.num] = n
    meta = dict(script.meta)
    if "theory" in meta:
        meta["theory"] = [sharp(h) for h in meta["theory"]]
    return b.script(meta)


def _gl_split(f):
    return gnot(f.left), f.right


def mono_sharp(b: Builder, k: int, rho1, rho2, game) -> int:
    """From line k proving rho1# -> rho2#, derive (<game> rho1)# -> (<game> rho2)#."""
    goal = b.implies(sharp(Play(game, rho1)), sharp(Play(game, rho2)))
    if isinstance(game, Act):
        return b.add(goal, "Ma", k)
    if isinstance(game, Test):
        return b.chain([k], goal)
    if isinstance(game, Choice):
        k1 = mono_sharp(b, k, rho1, rho2, game.left)
        k2 = mono_sharp(b, k, rho1, rho2, game.right)
        return b.chain([k1, k2], goal)
    if isinstance(game, Seq):
        k1 = mono_sharp(b, k, rho1, rho2, game.right)
        return mono_sharp(b, k1, Play(game.right, rho1), Play(game.right, rho2), game.left)
    if isinstance(game, Dual):
        k1 = b.chain([k], b.implies(sharp(gnot(rho2)), sharp(gnot(rho1))))
        k2 = mono_sharp(b, k1, gnot(rho2), gnot(rho1), game.game)
        return b.chain([k2], goal)
    if isinstance(game, Star):
        X = PVar(fresh_pvar(all_pvars(Play(game, rho1)) | all_pvars(Play(game, rho2))))
        step = sharp(Play(game.game, X))
        k1 = b.chain([k], b.implies(Or(sharp(rho1), step), Or(sharp(rho2), step)))
        try:
            k2 = mono_mu(b, k1, X)
        except DerivationError as e:
            raise TransformError(str(e))
        return k2 if b.formula(k2) == goal else b.add(goal, "rename", k2)
    raise TransformError(f"not a game: {game!r}")

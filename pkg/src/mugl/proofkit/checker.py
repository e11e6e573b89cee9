"""Line-by-line checking of Hilbert-style proofs in both calculi."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..binding import (
    CaptureError, NotAdmissible, alpha_eq, free_for, rename_ovar, same, subst_pvar,
    subst_term, unify_term_subst,
)
from ..syntax import (
    Act, And, App, Assign, Atom, Choice, Const, Dia, Dual, Havoc, Lit, Mu, Named, Or, Play,
    PVar, Seq, Star, Test, Var, actions_of, eq, free_pvars, gand, gl_norm, gnot, ovars, subformulas,
    term_vars, well_formed,
)
from .script import AXIOMS_GL, AXIOMS_MU, Line, ProofScript, logic_ops
from .taut import TooManyAtoms, is_taut


@dataclass(frozen=True)
class LineResult:
    num: int
    ok: bool
    message: str = ""


@dataclass
class Verdict:
    ok: bool
    results: list = field(default_factory=list)

    @property
    def first_failure(self) -> Optional[LineResult]:
        for r in self.results:
            if not r.ok:
                return r
        return None

    def report(self) -> str:
        out = []
        for r in self.results:
            out.append(f"{r.num}: {'ok' if r.ok else 'FAIL'}" + (f"  {r.message}" if r.message else ""))
        out.append("proof accepted" if self.ok else f"proof rejected at line {self.first_failure.num}")
        return "\n".join(out)


class Reject(Exception):
    pass


def check_proof(script: ProofScript, theory=None, footprints: Optional[dict] = None) -> Verdict:
    """Check every line; a line is judged assuming the lines it cites.

    The theory defaults to the script's own ``%hyp`` directives.
    """
    if theory is None:
        theory = script.meta.get("theory", ())
    fps = dict(script.footprints)
    fps.update(footprints or {})
    ck = _Checker(script.calculus, list(theory), fps)
    results, seen = [], {}
    for ln in script.lines:
        try:
            if ln.num in seen:
                raise Reject(f"duplicate line number {ln.num}")
            ck.check(ln, seen)
            results.append(LineResult(ln.num, True))
        except Reject as e:
            results.append(LineResult(ln.num, False, str(e)))
        seen[ln.num] = ln
    if not script.lines:
        results.append(LineResult(0, False, "empty proof"))
    return Verdict(all(r.ok for r in results), results)


def proves(script: ProofScript, goal, theory=None, footprints=None) -> bool:
    v = check_proof(script, theory, footprints)
    return v.ok and same(script.conclusion, goal, script.calculus)


class _Checker:
    def __init__(self, logic: str, theory: list, footprints: dict):
        self.logic = logic
        self.theory = theory
        self.fps = footprints
        self.implies, self.iff, self._simp, self._siff = logic_ops(logic)

    # helpers
    def same(self, a, b) -> bool:
        return same(a, b, self.logic)

    def imp(self, f):
        r = self._simp(f)
        if r is None:
            raise Reject("expected an implication")
        return r

    def iff_sides(self, f):
        r = self._siff(f)
        if r is None:
            raise Reject("expected an equivalence")
        return r

    def ref(self, seen: dict, k: int, here: int) -> Line:
        if k >= here:
            raise Reject(f"line {here} cites line {k}, which does not precede it")
        if k not in seen:
            raise Reject(f"line {here} cites missing line {k}")
        return seen[k]

    def no_pvars(self, f, what: str):
        if free_pvars(f):
            raise Reject(f"{what}: formula has free propositional variables")

    def known_footprints(self, f, what: str):
        for a in actions_of(f):
            if isinstance(a, Named):
                if a.name not in self.fps:
                    raise Reject(f"{what}: footprint of action {a.name} is unknown (declare %action)")

    def dia(self, f):
        """(action, body) of a single-action modality in either calculus, else None."""
        if self.logic == "mu":
            return (f.action, f.body) if isinstance(f, Dia) else None
        if isinstance(f, Play) and isinstance(f.game, Act):
            return f.game.action, f.body
        return None

    # dispatch
    def check(self, ln: Line, seen: dict):
        f, j = ln.formula, ln.just
        v = well_formed(f, self.logic)
        if v is not None:
            raise Reject(f"ill-formed: {v}")
        if self.logic == "gl" and any(isinstance(n, PVar) for n in subformulas(f)):
            raise Reject("game-logic proofs may not contain propositional variables")
        allowed = AXIOMS_MU if self.logic == "mu" else AXIOMS_GL
        rules_ok = {"mp", "rename", "hyp"} | ({"Ma", "FPmu"} if self.logic == "mu" else {"M", "FPstar"})
        if j.kind not in allowed and j.kind not in rules_ok:
            raise Reject(f"{j.kind} is not a rule of the {self.logic} calculus")
        getattr(self, "j_" + j.kind.replace(".", "_"))(f, [self.ref(seen, r, ln.num) for r in j.refs]
                                                       if j.kind != "hyp" else list(j.refs))

    # axioms
    def j_taut(self, f, _):
        try:
            if not is_taut(f, self.logic):
                raise Reject("not a propositional tautology")
        except TooManyAtoms as e:
            raise Reject(str(e))

    def j_eq(self, f, _):
        if isinstance(f, Lit) and f.positive and f.atom.pred == "=" and f.atom.args[0] == f.atom.args[1]:
            return
        a, c = self.imp(f)
        if not (isinstance(a, Lit) and a.positive and a.atom.pred == "="):
            raise Reject("equality axiom needs an antecedent s = t")
        s, t = a.atom.args
        pair = self._siff(c) or self._simp(c)
        if pair is None:
            raise Reject("equality axiom needs a consequent chi -> chi' or chi <-> chi'")
        chi, chi2 = pair
        if not (isinstance(chi, Lit) and isinstance(chi2, Lit)):
            raise Reject("equality congruence applies to literals")
        if chi2 not in set(_replace_once(chi, s, t)):
            raise Reject("right literal is not the left one with one occurrence of s replaced by t")

    def j_ax_mu(self, f, _):
        l, r = self.iff_sides(f)
        for m, other in ((l, r), (r, l)):
            if isinstance(m, Mu):
                if not free_for(m.var, m, m.body):
                    continue
                if self.same(subst_pvar(m.body, m.var, m, "mu"), other):
                    return
        raise Reject("not an instance of mu X. phi <-> phi[mu X. phi / X]")

    def j_ax_exI(self, f, _):
        a, c = self.imp(f)
        d = self.dia(c)
        if d is None or not isinstance(d[0], Havoc):
            raise Reject("consequent must be <x := *> phi")
        x, phi = d[0].var, d[1]
        if self.logic == "gl":
            phi, a = gl_norm(phi), gl_norm(a)
        ok, theta = unify_term_subst(phi, a, x)
        if not ok:
            raise Reject("antecedent is not an instance of the body")
        if theta is None:
            if not self.same(a, phi):
                raise Reject("antecedent differs from the body")
            return
        try:
            inst = subst_term(phi, x, theta, self.fps)
        except NotAdmissible as e:
            raise Reject(f"substitution not admissible: {e}")
        if not self.same(inst, a):
            raise Reject("antecedent is not phi[theta/x]")

    def j_ax_V(self, f, _):
        a, c = self.imp(f)
        d = self.dia(a)
        if d is None or not isinstance(d[0], Havoc):
            raise Reject("antecedent must be <x := *> psi")
        x, psi = d[0].var, d[1]
        if not self.same(psi, c):
            raise Reject("consequent differs from the body")
        self.no_pvars(psi, "vacuity")
        self.known_footprints(psi, "vacuity")
        if x in ovars(psi, self.fps):
            raise Reject(f"{x} occurs in the body")

    def j_ax_assign(self, f, _):
        l, r = self.iff_sides(f)
        errs = []
        for lhs, rhs in ((l, r), (r, l)):
            try:
                self._assign(lhs, rhs)
                return
            except Reject as e:
                errs.append(str(e))
        raise Reject(errs[0])

    def _assign(self, lhs, rhs):
        d = self.dia(lhs)
        if d is None or not isinstance(d[0], Assign):
            raise Reject("one side must be <x := theta> phi")
        x, theta, phi = d[0].var, d[0].term, d[1]
        e = self.dia(rhs)
        if e is None or not isinstance(e[0], Havoc):
            raise Reject("other side must be <y := *> (y = theta & phi')")
        y = e[0].var
        self.no_pvars(phi, "assignment")
        self.known_footprints(phi, "assignment")
        if y == x or y in ovars(phi, self.fps) or y in term_vars(theta):
            raise Reject(f"{y} is not fresh")
        body = rename_ovar(phi, x, y)
        cj = And if self.logic == "mu" else gand
        if not self.same(e[1], cj(eq(Var(y), theta), body)):
            raise Reject("body is not y = theta & phi with x renamed to y")

    def j_ax_ctl(self, f, _):
        l, r = self.iff_sides(f)
        for base, ext in ((l, r), (r, l)):
            assigns = []
            g = ext
            while True:
                d = self.dia(g)
                if d is not None and isinstance(d[0], Assign):
                    assigns.append(d[0])
                    g = d[1]
                    continue
                if self.logic == "gl" and isinstance(g, Play) and isinstance(g.game, Seq):
                    g = Play(g.game.left, Play(g.game.right, g.body))
                    continue
                break
            if not assigns or not self.same(g, base):
                continue
            names = [a.var for a in assigns]
            if len(set(names)) != len(names):
                raise Reject("control variables must be distinct")
            if not all(isinstance(a.term, Const) for a in assigns):
                raise Reject("control variables must be set to constants")
            self.no_pvars(base, "control extension")
            self.known_footprints(base, "control extension")
            clash = set(names) & ovars(base, self.fps)
            if clash:
                raise Reject(f"control variables {sorted(clash)} occur in the formula")
            return
        raise Reject("not an instance of phi <-> <c := k> phi")

    def _gl_pair(self, f, build, what):
        l, r = self.iff_sides(f)
        for m, other in ((l, r), (r, l)):
            if isinstance(m, Play):
                exp = build(m.game, m.body)
                if exp is not None and self.same(exp, other):
                    return
        raise Reject(f"not an instance of the {what} axiom")

    def j_ax_test(self, f, _):
        self._gl_pair(f, lambda g, b: gand(g.formula, b) if isinstance(g, Test) else None, "test")

    def j_ax_choice(self, f, _):
        self._gl_pair(f, lambda g, b: Or(Play(g.left, b), Play(g.right, b))
                      if isinstance(g, Choice) else None, "choice")

    def j_ax_comp(self, f, _):
        self._gl_pair(f, lambda g, b: Play(g.left, Play(g.right, b))
                      if isinstance(g, Seq) else None, "composition")

    def j_ax_star(self, f, _):
        self._gl_pair(f, lambda g, b: Or(b, Play(g.game, Play(g, b)))
                      if isinstance(g, Star) else None, "iteration")

    def j_ax_dual(self, f, _):
        self._gl_pair(f, lambda g, b: gnot(Play(g.game, gnot(b)))
                      if isinstance(g, Dual) else None, "dual")

    # rules
    def j_hyp(self, f, refs):
        k = refs[0]
        if not 1 <= k <= len(self.theory):
            raise Reject(f"no hypothesis {k}")
        if not self.same(self.theory[k - 1], f):
            raise Reject(f"formula differs from hypothesis {k}")

    def j_mp(self, f, prem):
        p, q = prem
        for imp_line, ant_line in ((p, q), (q, p)):
            pair = self._simp(imp_line.formula)
            if pair and self.same(pair[1], f) and self.same(pair[0], ant_line.formula):
                return
        raise Reject("modus ponens premises do not match")

    def j_rename(self, f, prem):
        if not alpha_eq(prem[0].formula, f) and not self.same(prem[0].formula, f):
            raise Reject("not a renaming of bound variables of the cited line")

    def j_Ma(self, f, prem):
        a, c = self.imp(f)
        if not (isinstance(a, Dia) and isinstance(c, Dia) and a.action == c.action):
            raise Reject("conclusion must be <a> psi -> <a> phi")
        self._mono(prem[0], a.body, c.body)

    def j_M(self, f, prem):
        a, c = self.imp(f)
        if not (isinstance(a, Play) and isinstance(c, Play) and self.same(Play(a.game, c.body), c)):
            raise Reject("conclusion must be <g> psi -> <g> phi")
        self._mono(prem[0], a.body, c.body)

    def _mono(self, line, psi, phi):
        pair = self._simp(line.formula)
        if not pair or not (self.same(pair[0], psi) and self.same(pair[1], phi)):
            raise Reject("premise is not psi -> phi")

    def j_FPmu(self, f, prem):
        a, phi = self.imp(f)
        if not isinstance(a, Mu):
            raise Reject("conclusion must be mu X. psi -> phi")
        if not free_for(a.var, phi, a.body):
            raise Reject(f"{a.var.base} is not free for phi in psi")
        try:
            inst = subst_pvar(a.body, a.var, phi, "mu")
        except CaptureError as e:
            raise Reject(str(e))
        self._mono(prem[0], inst, phi)

    def j_FPstar(self, f, prem):
        a, phi = self.imp(f)
        if not (isinstance(a, Play) and isinstance(a.game, Star)):
            raise Reject("conclusion must be <g*> psi -> phi")
        self._mono(prem[0], Or(a.body, Play(a.game.game, phi)), phi)


def _term_replacements(t, s, r):
    if t == s:
        yield r
    if isinstance(t, App):
        for i, a in enumerate(t.args):
            for na in _term_replacements(a, s, r):
                yield App(t.fn, t.args[:i] + (na,) + t.args[i + 1:])


def _replace_once(lit: Lit, s, t):
    args = lit.atom.args
    for i, a in enumerate(args):
        for na in _term_replacements(a, s, t):
            yield Lit(Atom(lit.atom.pred, args[:i] + (na,) + args[i + 1:]), lit.positive)

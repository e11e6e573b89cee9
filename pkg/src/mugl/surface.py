"""Concrete ASCII syntax: tokenizer, recursive-descent parsers and canonical printers.

Grammar summary (loosest to tightest)::

    formula  := imp ('<->' imp)?
    imp      := or ('->' imp)?
    or       := and ('|' and)*
    and      := prefix ('&' prefix)*
    prefix   := '!' ... | '<' A '>' prefix | '[' A ']' prefix | mu X. prefix | nu X. prefix | atom
    atom     := '(' formula ')' | true | false | ['~'] X tags | term relop term | p | p(terms)

    game     := seq (('u' | 'n') seq)*
    seq      := post (';' post)*
    post     := prim ('*' | '^d' | '^x')*
    prim     := '(' game ')' | '?' prefix | action
    action   := x ':=' '*' | x ':=' term | name tags | '{' x' '=' term, ... ['&' formula] '}'

Uppercase identifiers are propositional variables; lowercase identifiers are
object variables, predicates, functions and action names; numerals are
constant symbols.  Inside '<...>' a comparison using '>' or '>=' has to be
parenthesized.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass

from .syntax import (
    Act, And, App, Assign, Atom, Box, Choice, Const, DChoice, DStar, Dia, Dual, Evolve, GL_FALSE,
    FALSE, Havoc, INFIX, Lit, Mu, Named, Not, Nu, Or, Play, PVar, Seq, Star, TRUE, Test, Var,
    bar, desugar, gl_implies, gl_iff, gand, mu_iff, mu_implies, well_formed,
)


class ParseError(ValueError):
    def __init__(self, message: str, pos: int = -1, text: str = ""):
        self.pos = pos
        self.text = text
        where = f" at offset {pos}" if pos >= 0 else ""
        super().__init__(f"{message}{where}")


class WellFormednessError(ValueError):
    """Parsed fine, but the formula violates a well-formedness condition."""


# ---------------------------------------------------------------- tokens

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>\d+(?:\.\d+)?)
  | (?P<id>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op><->|->|<=|>=|!=|:=|[<>=|&!~()\[\]{},.;?*^+\-/'])
""", re.VERBOSE)


@dataclass(frozen=True)
class Tok:
    kind: str  # 'num', 'id', 'op', 'eof'
    value: str
    pos: int


def tokenize(text: str) -> list:
    out, i = [], 0
    while i < len(text):
        m = _TOKEN.match(text, i)
        if not m:
            raise ParseError(f"unexpected character {text[i]!r}", i, text)
        kind = m.lastgroup
        if kind != "ws":
            out.append(Tok(kind, m.group(), i))
        i = m.end()
    out.append(Tok("eof", "", len(text)))
    return out


def _is_pvar_name(s: str) -> bool:
    return s[:1].isupper()


KEYWORDS = {"mu", "nu", "true", "false"}
RELOP_TOKENS = {"=", "!=", "<=", "<", ">=", ">"}


class _Fail(Exception):
    """Internal backtracking signal."""


class Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0
        # True while directly inside '<...>' (a bare '>' would close it)
        self.angle = [False]

    # -- token helpers
    @property
    def tok(self) -> Tok:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, value: str) -> bool:
        t = self.tok
        return t.kind in ("op", "id") and t.value == value

    def eat(self, value: str) -> bool:
        if self.at(value):
            self.i += 1
            return True
        return False

    def expect(self, value: str) -> Tok:
        if not self.at(value):
            self.error(f"expected {value!r}, found {self.tok.value or 'end of input'!r}")
        t = self.tok
        self.i += 1
        return t

    def error(self, msg: str):
        raise ParseError(msg, self.tok.pos, self.text)

    def done(self):
        if self.tok.kind != "eof":
            self.error(f"unexpected {self.tok.value!r}")

    def nested(self, inside_angle: bool, fn, *args):
        self.angle.append(inside_angle)
        try:
            return fn(*args)
        finally:
            self.angle.pop()

    # -- terms
    def term(self):
        a = self.mul()
        while self.tok.kind == "op" and self.tok.value in ("+", "-"):
            op = self.tok.value
            self.i += 1
            a = App(op, (a, self.mul()))
        return a

    def _starts_term(self, t: Tok) -> bool:
        return t.kind in ("num", "id") and not (t.kind == "id" and _is_pvar_name(t.value)) \
            or (t.kind == "op" and t.value in ("(", "-"))

    def mul(self):
        a = self.unary()
        while self.tok.kind == "op" and self.tok.value in ("*", "/") and self._starts_term(self.peek()):
            op = self.tok.value
            self.i += 1
            a = App(op, (a, self.unary()))
        return a

    def unary(self):
        if self.eat("-"):
            return App("neg", (self.unary(),))
        return self.term_atom()

    def term_atom(self):
        t = self.tok
        if t.kind == "num":
            self.i += 1
            return Const(t.value)
        if t.kind == "id" and not _is_pvar_name(t.value) and t.value not in KEYWORDS:
            self.i += 1
            if self.at("("):
                self.i += 1
                args = [] if self.at(")") else self.term_list()
                self.expect(")")
                return App(t.value, tuple(args))
            return Var(t.value)
        if self.eat("("):
            e = self.nested(False, self.term)
            self.expect(")")
            return e
        self.error(f"expected a term, found {t.value or 'end of input'!r}")

    def term_list(self):
        out = [self.nested(False, self.term)]
        while self.eat(","):
            out.append(self.nested(False, self.term))
        return out

    # -- literals
    def relop(self):
        t = self.tok
        if t.kind != "op" or t.value not in RELOP_TOKENS:
            return None
        if self.angle[-1] and t.value in (">", ">="):
            return None
        self.i += 1
        return t.value

    def try_literal(self):
        """Parse a literal atom, or restore the position and return None."""
        start = self.i
        try:
            first = self.tok
            try:
                lhs = self.term()
            except ParseError:
                raise _Fail()
            op = self.relop()
            if op is not None:
                rhs = self.term()
                if op == "!=":
                    return Lit(Atom("=", (lhs, rhs)), False)
                return Lit(Atom(op, (lhs, rhs)))
            if first.kind != "id":
                raise _Fail()
            if isinstance(lhs, Var):
                return Lit(Atom(lhs.name, ()))
            if isinstance(lhs, App) and lhs.fn not in INFIX and lhs.fn != "neg" \
                    and self.toks[start + 1].value == "(":
                return Lit(Atom(lhs.fn, lhs.args))
            raise _Fail()
        except (_Fail, ParseError):
            self.i = start
            return None

    # -- propositional variables
    def pvar(self, barred: bool = False) -> PVar:
        t = self.tok
        if t.kind != "id" or not _is_pvar_name(t.value):
            self.error("expected a propositional variable")
        self.i += 1
        return PVar(t.value, barred, self.tags())

    def tags(self) -> tuple:
        tags = []
        while self.at("{") and self.peek().kind == "id" and self.peek(2).value == "," \
                and self.peek(3).kind == "id" and self.peek(4).value == "}":
            tags.append((self.peek().value, self.peek(3).value))
            self.i += 5
        return tuple(tags)

    # -- formulas (logic = 'mu' or 'gl')
    def formula(self, logic: str):
        a = self.imp(logic)
        if self.eat("<->"):
            b = self.imp(logic)
            return mu_iff(a, b) if logic == "mu" else gl_iff(a, b)
        return a

    def imp(self, logic: str):
        a = self.disj(logic)
        if self.eat("->"):
            b = self.imp(logic)
            return mu_implies(a, b) if logic == "mu" else gl_implies(a, b)
        return a

    def disj(self, logic: str):
        a = self.conj(logic)
        while self.eat("|"):
            a = Or(a, self.conj(logic))
        return a

    def conj(self, logic: str):
        a = self.prefix(logic)
        while self.eat("&"):
            b = self.prefix(logic)
            a = And(a, b) if logic == "mu" else gand(a, b)
        return a

    def _binder_ahead(self) -> bool:
        if not (self.tok.kind == "id" and self.tok.value in ("mu", "nu")):
            return False
        k = 1
        if self.peek().value == "~":
            k = 2
        t = self.peek(k)
        return t.kind == "id" and _is_pvar_name(t.value)

    def prefix(self, logic: str):
        t = self.tok
        if self.at("!"):
            self.i += 1
            lit = self.try_literal()
            if lit is not None:
                return lit.negate()
            if self.tok.kind == "id" and _is_pvar_name(self.tok.value):
                return self.pvar(barred=True)
            if self.at("~"):
                self.i += 1
                return self.pvar(barred=False)
            if logic == "mu":
                if not self.at("("):
                    self.error("'!' applies to literals, variables or parenthesized formulas")
                return bar(self.prefix(logic))
            return Not(self.prefix(logic))
        if self.at("<"):
            self.i += 1
            if logic == "mu":
                a = self.nested(True, self.action)
            else:
                a = self.nested(True, self.game)
            self.expect(">")
            body = self.prefix(logic)
            return Dia(a, body) if logic == "mu" else Play(a, body)
        if self.at("["):
            self.i += 1
            if logic == "mu":
                a = self.nested(False, self.action)
            else:
                a = self.nested(False, self.game)
            self.expect("]")
            body = self.prefix(logic)
            return Box(a, body) if logic == "mu" else Play(Dual(a), body)
        if self._binder_ahead():
            if logic != "mu":
                self.error("fixpoint binders are not part of game logic")
            kind = t.value
            self.i += 1
            barred = self.eat("~")
            v = self.pvar(barred)
            if v.tags:
                self.error("a rename-tagged variable cannot be bound")
            self.expect(".")
            body = self.prefix(logic)
            return Mu(v, body) if kind == "mu" else Nu(v, body)
        return self.atom(logic)

    def atom(self, logic: str):
        if self.at("("):
            lit = self.try_literal()
            if lit is not None:
                return lit
            self.i += 1
            f = self.nested(False, self.formula, logic)
            self.expect(")")
            return f
        if self.tok.kind == "id" and self.tok.value in ("true", "false"):
            v = self.tok.value
            self.i += 1
            if v == "true":
                return TRUE
            return FALSE if logic == "mu" else GL_FALSE
        if self.at("~"):
            self.i += 1
            return self.pvar(barred=True)
        if self.tok.kind == "id" and _is_pvar_name(self.tok.value):
            return self.pvar()
        lit = self.try_literal()
        if lit is None:
            self.error(f"expected a formula, found {self.tok.value or 'end of input'!r}")
        return lit

    # -- actions and games
    def action(self):
        t = self.tok
        if self.at("{"):
            return self.ode()
        if t.kind == "id" and not _is_pvar_name(t.value):
            if self.peek().value == ":=":
                self.i += 2
                if self.eat("*"):
                    return Havoc(t.value)
                return Assign(t.value, self.term())
            self.i += 1
            return Named(t.value, self.tags())
        self.error(f"expected an action, found {t.value or 'end of input'!r}")

    def ode(self):
        self.expect("{")
        eqs = []
        while True:
            t = self.tok
            if t.kind != "id":
                self.error("expected an ODE variable")
            self.i += 1
            self.expect("'")
            self.expect("=")
            eqs.append((t.value, self.nested(False, self.term)))
            if not self.eat(","):
                break
        constraint = None
        if self.eat("&"):
            constraint = self.nested(False, self.formula, "mu")
        self.expect("}")
        try:
            return Evolve(tuple(eqs), constraint)
        except ValueError as e:
            self.error(str(e))

    def game(self):
        a = self.game_seq()
        while self.tok.kind == "id" and self.tok.value in ("u", "n"):
            op = self.tok.value
            self.i += 1
            b = self.game_seq()
            a = Choice(a, b) if op == "u" else desugar(DChoice(a, b))
        return a

    def game_seq(self):
        a = self.game_post()
        while self.eat(";"):
            a = Seq(a, self.game_post())
        return a

    def game_post(self):
        a = self.game_prim()
        while True:
            if self.eat("*"):
                a = Star(a)
            elif self.at("^") and self.peek().kind == "id" and self.peek().value in ("d", "x"):
                kind = self.peek().value
                self.i += 2
                a = Dual(a) if kind == "d" else desugar(DStar(a))
            else:
                return a

    def game_prim(self):
        if self.at("("):
            self.i += 1
            g = self.nested(False, self.game)
            self.expect(")")
            return g
        if self.eat("?"):
            return Test(self.prefix("gl"))
        return Act(self.action())


def _run(text: str, fn):
    p = Parser(text)
    out = fn(p)
    p.done()
    return out


def _check(x, logic):
    v = well_formed(x, logic)
    if v is not None:
        raise WellFormednessError(str(v))
    return x


def parse_term(text: str):
    return _run(text, lambda p: p.term())


def parse_mu(text: str, check: bool = True):
    f = _run(text, lambda p: p.formula("mu"))
    return _check(f, "mu") if check else f


def parse_gl(text: str, check: bool = True):
    f = _run(text, lambda p: p.formula("gl"))
    return _check(f, "gl") if check else f


def parse_game(text: str, check: bool = True):
    g = _run(text, lambda p: p.game())
    return _check(g, "game") if check else g


def parse_action(text: str):
    return _run(text, lambda p: p.action())


def parse(text: str, logic: str):
    return {"mu": parse_mu, "gl": parse_gl, "game": parse_game, "term": parse_term}[logic](text)


# ---------------------------------------------------------------- printing

_IFF, _IMP, _OR, _AND, _PRE, _ATOM = range(6)
_CHOICE, _SEQ, _POST, _PRIM = range(4)


def print_term(t, level: int = 0) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Const):
        return t.name
    if t.fn == "neg" and len(t.args) == 1:
        s = "-" + print_term(t.args[0], 3)
        return f"({s})" if level > 3 else s
    if t.fn in INFIX and len(t.args) == 2:
        p = INFIX[t.fn]
        s = f"{print_term(t.args[0], p)} {t.fn} {print_term(t.args[1], p + 1)}"
        return f"({s})" if level > p else s
    return f"{t.fn}({', '.join(print_term(a) for a in t.args)})"


def _tags(tags) -> str:
    return "".join(f"{{{x},{y}}}" for x, y in tags)


def print_lit(l: Lit, angle: bool = False) -> str:
    a = l.atom
    if a.pred == "=":
        op = "=" if l.positive else "!="
        return f"{print_term(a.args[0])} {op} {print_term(a.args[1])}"
    if a.pred in ("<=", "<", ">=", ">"):
        s = f"{print_term(a.args[0])} {a.pred} {print_term(a.args[1])}"
        if l.positive:
            return f"({s})" if angle and a.pred in (">", ">=") else s
        return f"(!{s})" if angle and a.pred in (">", ">=") else f"!{s}"
    core = a.pred if not a.args else f"{a.pred}({', '.join(print_term(t) for t in a.args)})"
    return core if l.positive else f"!{core}"


def print_pvar(v: PVar) -> str:
    return ("~" if v.barred else "") + v.base + _tags(v.tags)


def print_action(a) -> str:
    if isinstance(a, Named):
        return a.name + _tags(a.tags)
    if isinstance(a, Assign):
        return f"{a.var} := {print_term(a.term)}"
    if isinstance(a, Havoc):
        return f"{a.var} := *"
    if isinstance(a, Evolve):
        eqs = ", ".join(f"{x}' = {print_term(t)}" for x, t in a.eqs)
        if a.constraint is not None:
            eqs += " & " + _pf(a.constraint, _IFF, False)
        return "{" + eqs + "}"
    raise TypeError(a)


def _wrap(s: str, own: int, ctx: int) -> str:
    return f"({s})" if own < ctx else s


def _pf(phi, ctx: int, angle: bool) -> str:
    if isinstance(phi, Lit):
        return print_lit(phi, angle)
    if isinstance(phi, PVar):
        return print_pvar(phi)
    if isinstance(phi, Or):
        return _wrap(f"{_pf(phi.left, _OR, angle)} | {_pf(phi.right, _AND, angle)}", _OR, ctx)
    if isinstance(phi, And):
        return _wrap(f"{_pf(phi.left, _AND, angle)} & {_pf(phi.right, _PRE, angle)}", _AND, ctx)
    if isinstance(phi, Dia):
        return _wrap(f"<{print_action(phi.action)}> {_pf(phi.body, _PRE, angle)}", _PRE, ctx)
    if isinstance(phi, Box):
        return _wrap(f"[{print_action(phi.action)}] {_pf(phi.body, _PRE, angle)}", _PRE, ctx)
    if isinstance(phi, (Mu, Nu)):
        kw = "mu" if isinstance(phi, Mu) else "nu"
        return _wrap(f"{kw} {print_pvar(phi.var)}. {_pf(phi.body, _PRE, angle)}", _PRE, ctx)
    if isinstance(phi, Not):
        b = phi.body
        inner = f"({_pf(b, _IFF, False)})" if isinstance(b, (Lit, PVar)) else _pf(b, _PRE, angle)
        return _wrap("!" + inner, _PRE, ctx)
    if isinstance(phi, Play):
        return _wrap(f"<{_pg(phi.game, _CHOICE, True)}> {_pf(phi.body, _PRE, angle)}", _PRE, ctx)
    raise TypeError(f"cannot print {phi!r}")


def _pg(g, ctx: int, angle: bool) -> str:
    if isinstance(g, Act):
        return print_action(g.action)
    if isinstance(g, Test):
        return "?" + _pf(g.formula, _PRE, angle)
    if isinstance(g, Choice):
        return _wrap(f"{_pg(g.left, _CHOICE, angle)} u {_pg(g.right, _SEQ, angle)}", _CHOICE, ctx)
    if isinstance(g, Seq):
        return _wrap(f"{_pg(g.left, _SEQ, angle)}; {_pg(g.right, _POST, angle)}", _SEQ, ctx)
    if isinstance(g, (Star, Dual)):
        inner = _pg(g.game, _POST, angle)
        if isinstance(g.game, Test) or isinstance(g.game, Act) and isinstance(g.game.action, (Assign, Havoc)):
            inner = f"({inner})"
        return _wrap(inner + ("*" if isinstance(g, Star) else "^d"), _POST, ctx)
    raise TypeError(f"cannot print game {g!r}")


def print_mu(phi) -> str:
    return _pf(phi, _IFF, False)


def print_gl(phi) -> str:
    return _pf(phi, _IFF, False)


def print_game(g) -> str:
    return _pg(g, _CHOICE, False)


def show(x) -> str:
    """Print any formula, game, action or term."""
    if isinstance(x, (Var, Const, App)):
        return print_term(x)
    if isinstance(x, (Act, Test, Choice, Seq, Star, Dual)):
        return print_game(x)
    if isinstance(x, (Named, Assign, Havoc, Evolve)):
        return print_action(x)
    return _pf(x, _IFF, False)


# ---------------------------------------------------------------- documents

def _need(obj, key, path, kind, probs):
    if key not in obj:
        probs.append(f"{path}{key}: missing")
        return None
    v = obj[key]
    if not isinstance(v, kind):
        probs.append(f"{path}{key}: expected {kind.__name__}")
        return None
    return v


def structure_from_dict(doc: dict, caps=None):
    """Validate a structure document and build a FiniteStructure."""
    from .semantics import DEFAULT_CAPS, FiniteStructure, StructureError
    probs = []
    if not isinstance(doc, dict):
        raise StructureError(["<root>: expected an object"])
    domain = _need(doc, "domain", "", list, probs) or []
    domain = [str(e) for e in domain]
    support = [str(v) for v in (_need(doc, "support", "", list, probs) or [])]
    constants = {str(k): str(v) for k, v in (doc.get("constants") or {}).items()}
    functions = {}
    for name, spec in (doc.get("functions") or {}).items():
        if not isinstance(spec, dict) or "arity" not in spec or "table" not in spec:
            probs.append(f"functions.{name}: needs 'arity' and 'table'")
            continue
        arity = int(spec["arity"])
        table = {}
        for k, row in enumerate(spec["table"]):
            row = [str(e) for e in row]
            if len(row) != arity + 1:
                probs.append(f"functions.{name}.table[{k}]: expected {arity + 1} entries")
                continue
            key = tuple(row[:-1])
            if key in table and table[key] != row[-1]:
                probs.append(f"functions.{name}.table[{k}]: conflicting value at {list(key)}")
            table[key] = row[-1]
        functions[name] = (arity, table)
    predicates = {}
    for name, rows in (doc.get("predicates") or {}).items():
        if isinstance(rows, dict):
            arity = int(rows.get("arity", 0))
            rows = rows.get("tuples", [])
        else:
            arity = len(rows[0]) if rows else 0
        tuples = [tuple(str(e) for e in r) for r in rows]
        for k, r in enumerate(tuples):
            if len(r) != arity:
                probs.append(f"predicates.{name}[{k}]: arity mismatch")
        predicates[name] = (arity, tuples)
    transitions = {}
    for name, spec in (doc.get("transitions") or {}).items():
        if not isinstance(spec, dict):
            probs.append(f"transitions.{name}: expected an object")
            continue
        fp = [str(v) for v in spec.get("footprint", support)]
        pairs = []
        for k, pair in enumerate(spec.get("pairs", [])):
            if not (isinstance(pair, list) and len(pair) == 2 and all(isinstance(s, dict) for s in pair)):
                probs.append(f"transitions.{name}.pairs[{k}]: expected [state, state]")
                continue
            pairs.append(({str(a): str(b) for a, b in pair[0].items()},
                          {str(a): str(b) for a, b in pair[1].items()}))
        transitions[name] = (fp, pairs)
    if probs:
        raise StructureError(probs)
    return FiniteStructure(domain, support, constants, functions, predicates, transitions,
                           caps or DEFAULT_CAPS)


def parse_structure(text: str, caps=None):
    return structure_from_dict(json.loads(text), caps)


def structure_to_dict(A) -> dict:
    return {
        "domain": list(A.domain),
        "constants": dict(A.constants),
        "functions": {f: {"arity": a, "table": [list(k) + [v] for k, v in sorted(t.items())]}
                      for f, (a, t) in A.functions.items()},
        "predicates": {p: {"arity": a, "tuples": [list(r) for r in sorted(rows)]}
                       for p, (a, rows) in A.predicates.items()},
        "support": list(A.support),
        "transitions": {n: {"footprint": list(fp), "pairs": [[p, q] for p, q in pairs]}
                        for n, (fp, pairs) in A.transitions.items()},
    }


def parse_valuation(text: str, A) -> dict:
    """Valuation document {pvar: [state, ...]} as a map from base names to bitsets."""
    from .semantics import StructureError
    doc = json.loads(text)
    if not isinstance(doc, dict):
        raise StructureError(["<root>: expected an object"])
    probs, out = [], {}
    for name, states in doc.items():
        if not _is_pvar_name(name):
            probs.append(f"{name}: not a propositional variable name")
            continue
        m = 0
        for k, st in enumerate(states):
            if not isinstance(st, dict) or set(st) != set(A.support):
                probs.append(f"{name}[{k}]: state must assign exactly {list(A.support)}")
                continue
            st = {str(a): str(b) for a, b in st.items()}
            if any(v not in A.elem for v in st.values()):
                probs.append(f"{name}[{k}]: element outside the domain")
                continue
            m |= 1 << A.index(st)
        out[name] = m
    if probs:
        raise StructureError(probs)
    return out

"""Proof scripts: lines, justifications, the text format and a numbering builder."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..surface import ParseError, parse_gl, parse_mu, show
from ..syntax import (
    gl_implies, gl_iff, mu_iff, mu_implies, split_iff, split_implies,
)

AXIOMS_MU = {"taut", "eq", "ax.mu", "ax.exI", "ax.V", "ax.assign", "ax.ctl"}
AXIOMS_GL = {"taut", "eq", "ax.exI", "ax.V", "ax.assign", "ax.ctl",
             "ax.test", "ax.choice", "ax.comp", "ax.star", "ax.dual"}
RULE_ARITY = {"mp": 2, "Ma": 1, "M": 1, "FPmu": 1, "FPstar": 1, "rename": 1, "hyp": 1}
TOKENS = AXIOMS_MU | AXIOMS_GL | set(RULE_ARITY)


@dataclass(frozen=True)
class Just:
    kind: str
    refs: tuple = ()

    def __str__(self):
        return " ".join([self.kind] + [str(r) for r in self.refs])


@dataclass(frozen=True)
class Line:
    num: int
    formula: object
    just: Just


@dataclass
class ProofScript:
    calculus: str                      # 'mu' or 'gl'
    lines: list
    footprints: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    @property
    def conclusion(self):
        return self.lines[-1].formula if self.lines else None

    def line(self, num: int) -> Optional[Line]:
        for ln in self.lines:
            if ln.num == num:
                return ln
        return None


def logic_ops(calculus: str):
    """(implies, iff, split_implies, split_iff) for a calculus."""
    if calculus == "mu":
        return mu_implies, mu_iff, (lambda f: split_implies(f, "mu")), (lambda f: split_iff(f, "mu"))
    return gl_implies, gl_iff, (lambda f: split_implies(f, "gl")), (lambda f: split_iff(f, "gl"))


def parse_just(text: str) -> Just:
    parts = text.split()
    if not parts:
        raise ParseError("missing justification")
    kind = parts[0]
    if kind not in TOKENS:
        raise ParseError(f"unknown justification token {kind!r}")
    want = RULE_ARITY.get(kind, 0)
    if len(parts) - 1 != want:
        raise ParseError(f"{kind} expects {want} line reference(s)")
    try:
        refs = tuple(int(p) for p in parts[1:])
    except ValueError:
        raise ParseError(f"line references of {kind} must be integers")
    return Just(kind, refs)


def parse_proof(text: str, calculus: Optional[str] = None) -> ProofScript:
    """Parse the line format ``n. <formula> ; <justification>``.

    Directives: ``%calculus mu|gl``, ``%action name: x, y`` (footprint of a
    named action), ``%hyp <formula>`` (next hypothesis of the ambient theory),
    ``%expect-fail n``.  Lines starting with ``#`` are comments.
    """
    lines, fps, meta = [], {}, {}
    cal = calculus
    for lineno, raw in enumerate(text.splitlines(), 1):
        s = raw.strip()
        if not s or s.startswith("#"):
            continue
        if s.startswith("%"):
            key, _, rest = s[1:].partition(" ")
            rest = rest.strip()
            if key == "calculus":
                if rest not in ("mu", "gl"):
                    raise ParseError(f"line {lineno}: calculus must be mu or gl")
                cal = cal or rest
            elif key == "action":
                name, _, vs = rest.partition(":")
                fps[name.strip()] = tuple(v.strip() for v in vs.split(",") if v.strip())
            elif key == "expect-fail":
                meta["expect_fail"] = int(rest)
            elif key == "hyp":
                cal = cal or "mu"
                try:
                    meta.setdefault("theory", []).append(
                        parse_mu(rest) if cal == "mu" else parse_gl(rest))
                except ParseError as e:
                    raise ParseError(f"line {lineno}: {e}")
            else:
                meta[key] = rest
            continue
        head, dot, body = s.partition(".")
        if not dot or not head.strip().isdigit():
            raise ParseError(f"line {lineno}: expected 'n. <formula> ; <justification>'")
        if ";" not in body:
            raise ParseError(f"line {lineno}: missing '; <justification>'")
        ftext, _, jtext = body.rpartition(";")
        cal = cal or "mu"
        try:
            f = parse_mu(ftext) if cal == "mu" else parse_gl(ftext)
            j = parse_just(jtext)
        except ParseError as e:
            raise ParseError(f"line {lineno}: {e}")
        lines.append(Line(int(head), f, j))
    return ProofScript(cal or "mu", lines, fps, meta)


def format_proof(script: ProofScript) -> str:
    out = [f"%calculus {script.calculus}"]
    for name, fp in sorted(script.footprints.items()):
        out.append(f"%action {name}: {', '.join(fp)}")
    for h in script.meta.get("theory", []):
        out.append(f"%hyp {show(h)}")
    if "expect_fail" in script.meta:
        out.append(f"%expect-fail {script.meta['expect_fail']}")
    for ln in script.lines:
        out.append(f"{ln.num}. {show(ln.formula)} ; {ln.just}")
    return "\n".join(out) + "\n"


def parse_theory(text: str, calculus: str = "mu") -> list:
    """One formula per line, optionally numbered ``k.``; '#' starts a comment."""
    out = []
    for raw in text.splitlines():
        s = raw.strip()
        if not s or s.startswith("#") or s.startswith("%"):
            continue
        head, dot, rest = s.partition(".")
        if dot and head.strip().isdigit():
            s = rest
        out.append(parse_mu(s) if calculus == "mu" else parse_gl(s))
    return out


class Builder:
    """Accumulates proof lines with consecutive numbers."""

    def __init__(self, calculus: str, footprints: Optional[dict] = None):
        self.calculus = calculus
        self.footprints = dict(footprints or {})
        self.lines: list = []
        self.implies, self.iff, self.split_imp, self.split_iff = logic_ops(calculus)

    def add(self, formula, kind: str, *refs: int) -> int:
        n = len(self.lines) + 1
        for r in refs:
            if not 1 <= r < n:
                raise ValueError(f"reference {r} does not point backward from line {n}")
        self.lines.append(Line(n, formula, Just(kind, tuple(refs))))
        return n

    def formula(self, n: int):
        return self.lines[n - 1].formula

    def include(self, script: ProofScript) -> int:
        """Append another script, renumbering; returns the new number of its last line."""
        self.footprints.update(script.footprints)
        mapping = {}
        for ln in script.lines:
            refs = ln.just.refs if ln.just.kind == "hyp" else tuple(mapping[r] for r in ln.just.refs)
            mapping[ln.num] = self.add(ln.formula, ln.just.kind, *refs)
        return mapping[script.lines[-1].num]

    def chain(self, premises, goal) -> int:
        """Derive goal from premise lines by one tautology and modus ponens steps."""
        f = goal
        for p in reversed(premises):
            f = self.implies(self.formula(p), f)
        n = self.add(f, "taut")
        for p in premises:
            n = self.add(self.split_imp(self.formula(n))[1], "mp", n, p)
        return n

    def script(self, meta: Optional[dict] = None) -> ProofScript:
        return ProofScript(self.calculus, list(self.lines), dict(self.footprints), dict(meta or {}))

"""Command-line front end.

Exit status: 0 on success, 1 when a check fails, 2 on usage or parse errors.
Results go to stdout, diagnostics to stderr.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields, replace
from pathlib import Path

import numpy as np

from . import acceptance, corpus, differential as dl
from .binding import CaptureError
from .proofkit import check_proof, format_proof, parse_proof, parse_theory
from .proofkit.derived import (
    DerivationError, box_mono_script, choice_swap, dual_choice_axiom, dual_seq_axiom,
    mono_mu_script, mono_nu_script, replace_in_loop,
)
from .proofkit.taut import TooManyAtoms
from .proofkit.transform import TransformError, subst_proof, translate_proof_sharp
from .semantics import Caps, EvalError, StructureError, evaluate
from .surface import (
    ParseError, WellFormednessError, parse, parse_action, parse_game, parse_mu, parse_structure,
    parse_valuation, show, structure_to_dict,
)
from .syntax import Choice, Evolve, PVar, free_pvars
from .translate import (
    STRATEGIES, TranslationError, control_structure, eliminate_modalities, flat, sharp,
)


class CheckFailed(Exception):
    """A well-formed request whose check came out negative."""


USAGE_ERRORS = (ParseError, WellFormednessError, StructureError, dl.FieldError, TranslationError,
                CaptureError, DerivationError, TransformError, TooManyAtoms, EvalError,
                OSError, json.JSONDecodeError, ValueError, KeyError)


def _text(arg: str) -> str:
    """A literal argument, or the contents of a file when given as @path."""
    return Path(arg[1:]).read_text() if arg.startswith("@") else arg


def _load_config(path):
    caps, num = Caps(), dl.DEFAULT
    if path:
        doc = json.loads(Path(path).read_text())
        caps = replace(caps, **doc.get("caps", {}))
        known = {f.name for f in fields(dl.NumericConfig)}
        num = replace(num, **{k: v for k, v in doc.get("numeric", {}).items() if k in known})
    return caps, num


def _structure(path, caps):
    p = Path(path)
    if not p.exists():
        return corpus.load_structure(path, caps)
    return parse_structure(p.read_text(), caps)


def _state(A, i) -> str:
    return "{" + ", ".join(f"{v}={e}" for v, e in A.state_dict(i).items()) + "}"


# ---------------------------------------------------------------- subcommands

def cmd_parse(a, cfg):
    x = parse_game(_text(a.text)) if a.game else parse(_text(a.text), a.logic)
    print(show(x))
    print("OK")


def cmd_print(a, cfg):
    p = Path(a.file)
    text = p.read_text()
    if p.suffix == ".prf":
        print(format_proof(parse_proof(text)), end="")
    elif p.suffix == ".json":
        print(json.dumps(structure_to_dict(parse_structure(text, cfg[0])), indent=1))
    else:
        for line in text.splitlines():
            if line.strip() and not line.lstrip().startswith("#"):
                print(show(parse(line, a.logic)))


def cmd_eval(a, cfg):
    A = _structure(a.structure, cfg[0])
    phi = parse(_text(a.formula), a.logic)
    val = parse_valuation(Path(a.valuation).read_text(), A) if a.valuation else {}
    d = evaluate(A, val, phi, a.logic)
    for i in range(A.size):
        if d >> i & 1:
            print(_state(A, i))
    print(f"{bin(d).count('1')} of {A.size} states", file=sys.stderr)


def cmd_translate(a, cfg):
    if a.dir == "sharp":
        print(show(sharp(parse(_text(a.input), "gl"), two_var=a.two_var)))
        return
    if a.dir == "flat":
        psi = parse(_text(a.input), "mu")
        if free_pvars(psi):
            raise TranslationError("flat expects a closed formula")
        fr = flat(psi)
        print(show(fr.formula))
        print("controls: " + ", ".join(f"{p}->{c}" for p, c in zip(fr.encoding.pvars, fr.encoding.controls)),
              file=sys.stderr)
        if a.structure:
            A = _structure(a.structure, cfg[0])
            fr = flat(psi, avoid_ovars=A.support)
            big = control_structure(A, fr.encoding)
            _compare(A.cylindrify(evaluate(A, {}, psi, "mu"), big), evaluate(big, {}, fr.formula, "gl"))
        return
    phi = parse(_text(a.input), "gl")
    s = sharp(phi, two_var=a.two_var)
    fr = flat(s)
    print(show(fr.formula))
    if a.structure:
        A = _structure(a.structure, cfg[0])
        fr = flat(s, avoid_ovars=A.support)
        big = control_structure(A, fr.encoding)
        _compare(A.cylindrify(evaluate(A, {}, phi, "gl"), big), evaluate(big, {}, fr.formula, "gl"))


def _compare(want, got):
    if want != got:
        raise CheckFailed("denotations differ on the structure")
    print("denotations agree", file=sys.stderr)


def cmd_reduce(a, cfg):
    elim, kinds = STRATEGIES[a.strategy]
    phi = parse(_text(a.input), "mu")
    avoid = [v.strip() for v in a.avoid.split(",") if v.strip()]
    print(show(eliminate_modalities(phi, lambda act: isinstance(act, kinds), elim, avoid)))


def cmd_prove(a, cfg):
    script = parse_proof(Path(a.file).read_text())
    theory = None
    if a.theory:
        theory = parse_theory(Path(a.theory).read_text(), script.calculus)
    v = check_proof(script, theory)
    print(v.report())
    if not v.ok:
        raise CheckFailed(f"line {v.first_failure.num}: {v.first_failure.message}")


def cmd_derive(a, cfg):
    r, args = a.rule, a.args
    need = {"dchoice": 3, "dseq": 3, "loop-swap": 3, "mmu": 2, "mnu": 2, "boxma": 2,
            "sharp": 1, "subst": 3}[r]
    if len(args) != need:
        raise ValueError(f"{r} takes {need} arguments")
    if r in ("dchoice", "dseq"):
        g1, g2, phi = parse_game(args[0]), parse_game(args[1]), parse(args[2], "gl")
        out = (dual_choice_axiom if r == "dchoice" else dual_seq_axiom)(g1, g2, phi)
    elif r == "loop-swap":
        g, rho = parse_game(args[0]), parse(args[2], "gl")
        g2 = parse_game(args[1])
        if not (isinstance(g, Choice) and g2 == Choice(g.right, g.left)):
            raise ValueError("loop-swap expects a u b and b u a")
        out = replace_in_loop(g, g2, rho, choice_swap(g.left, g.right))
    elif r in ("mmu", "mnu", "boxma"):
        premise = parse_proof(Path(args[0]).read_text())
        if r == "boxma":
            out = box_mono_script(premise, parse_action(args[1]))
        else:
            out = (mono_mu_script if r == "mmu" else mono_nu_script)(premise, PVar(args[1]))
    elif r == "sharp":
        out = translate_proof_sharp(parse_proof(Path(args[0]).read_text()))
    else:
        out = subst_proof(parse_proof(Path(args[0]).read_text()), PVar(args[1]), parse_mu(args[2]))
    print(format_proof(out), end="")
    v = check_proof(out)
    if not v.ok:
        raise CheckFailed(v.report())


def _ode(text: str) -> Evolve:
    act = parse_action(text)
    if not isinstance(act, Evolve):
        raise ValueError("expected an ODE action such as {x' = 1}")
    return act


def cmd_nabla(a, cfg):
    f, names = dl.nabla_instance(_ode(a.ode), parse_mu(_text(a.post)))
    print(show(f))


def cmd_tba(a, cfg):
    print(show(dl.tba_rewrite(parse_mu(_text(a.input)))))


def _point(s: str, dim: int) -> np.ndarray:
    v = np.array([float(t) for t in s.split(",")])
    if len(v) != dim:
        raise dl.FieldError(f"point {s!r} does not have dimension {dim}")
    return v


def cmd_reach(a, cfg):
    num = cfg[1]
    F, radius, _ = dl.load_field(a.field)
    radius = a.radius or radius
    if radius is None:
        raise dl.FieldError("no ball radius: pass --radius or set it in the field file")
    K = dl.Ball(float(radius))
    if a.triples:
        triples = dl.load_triples(a.triples, F.dim)
    else:
        if a.x is None or a.y is None or a.t is None:
            raise ValueError("give --x, --y and --t, or --triples")
        triples = [dl.Triple(_point(a.x, F.dim), _point(a.y, F.dim), a.t, "")]
    failed = 0
    for tr in triples:
        if a.mode == "refute":
            verdict = "refuted" if dl.refute_reach(F, K, tr.x, tr.y, tr.t, num) else "not refuted"
            good = verdict == "refuted" if not tr.expected else \
                (verdict == "refuted") == (tr.expected == "unreachable")
        else:
            cert = dl.rk4_trajectory(F, tr.x, tr.t, a.depth, num)
            close = np.linalg.norm(cert.samples[-1] - tr.y) <= a.tol
            cv = dl.certify_trajectory(F, K, cert, num)
            verdict = "certified" if close and cv.ok else \
                ("endpoint differs" if not close else f"certificate fails at level {cv.level}")
            good = verdict == "certified" if not tr.expected else \
                (verdict == "certified") == (tr.expected == "reachable")
        failed += not good
        label = f" (expected {tr.expected})" if tr.expected else ""
        print(f"{','.join(map(str, tr.x))} -> {','.join(map(str, tr.y))} in {tr.t}: {verdict}{label}")
    if failed:
        raise CheckFailed(f"{failed} triple(s) not confirmed")


def cmd_selftest(a, cfg):
    only = {int(k) for k in a.only.split(",")} if a.only else None
    c = acceptance.AcceptanceConfig(seed=a.seed, count=a.count, enforce_budget=not a.no_budget)
    results = acceptance.run_all(c, only, report=lambda r: print(r.line(), flush=True))
    if not all(r.passed for r in results):
        raise CheckFailed("some criteria failed")


# ---------------------------------------------------------------- argument parsing

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mugl", description="Modal mu-calculus and game logic toolkit.")
    ap.add_argument("--config", help="JSON file with 'caps' and 'numeric' overrides")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("parse", help="parse and print canonically")
    p.add_argument("text", help="formula text, or @file")
    p.add_argument("--logic", choices=["mu", "gl"], default="mu")
    p.add_argument("--game", action="store_true", help="parse a game instead of a formula")
    p.set_defaults(fn=cmd_parse)

    p = sub.add_parser("print", help="canonical form of a proof script, structure or formula file")
    p.add_argument("file")
    p.add_argument("--logic", choices=["mu", "gl"], default="mu")
    p.set_defaults(fn=cmd_print)

    p = sub.add_parser("eval", help="list the states satisfying a formula")
    p.add_argument("--structure", required=True, help="structure JSON (or a bundled name)")
    p.add_argument("--logic", choices=["mu", "gl"], default="mu")
    p.add_argument("--formula", required=True)
    p.add_argument("--valuation", help="JSON valuation of propositional variables")
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("translate", help="sharp, flat or round-trip translation")
    p.add_argument("--dir", choices=["sharp", "flat", "roundtrip"], required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--two-var", action="store_true", help="sharp with two alternating binder names")
    p.add_argument("--structure", help="check the denotations agree on this structure")
    p.set_defaults(fn=cmd_translate)

    p = sub.add_parser("reduce", help="eliminate modalities of one kind")
    p.add_argument("--strategy", choices=sorted(STRATEGIES), required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--avoid", default="", help="comma-separated variables fresh names must avoid")
    p.set_defaults(fn=cmd_reduce)

    p = sub.add_parser("prove", help="check a proof script")
    p.add_argument("file")
    p.add_argument("--theory", help="hypotheses, one formula per line")
    p.set_defaults(fn=cmd_prove)

    p = sub.add_parser("derive", help="expand a derived rule or transform a proof")
    p.add_argument("rule", choices=["dchoice", "dseq", "loop-swap", "mmu", "mnu", "boxma", "sharp", "subst"])
    p.add_argument("args", nargs="*")
    p.set_defaults(fn=cmd_derive)

    p = sub.add_parser("nabla", help="emit the fixpoint axiom instance for an ODE")
    p.add_argument("--ode", required=True, help="e.g. \"{x' = 1}\"")
    p.add_argument("--post", required=True)
    p.set_defaults(fn=cmd_nabla)

    p = sub.add_parser("tba", help="rewrite evolution constraints away")
    p.add_argument("--in", dest="input", required=True)
    p.set_defaults(fn=cmd_tba)

    p = sub.add_parser("reach", help="certify or refute reachability triples for a field")
    p.add_argument("--field", required=True)
    p.add_argument("--mode", choices=["certify", "refute"], default="refute")
    p.add_argument("--radius", type=float)
    p.add_argument("--x")
    p.add_argument("--y")
    p.add_argument("--t", type=float)
    p.add_argument("--triples", help="CSV rows x..., y..., t, expected")
    p.add_argument("--depth", type=int, default=6)
    p.add_argument("--tol", type=float, default=1e-6, help="endpoint tolerance in certify mode")
    p.set_defaults(fn=cmd_reach)

    p = sub.add_parser("selftest", help="run the acceptance criteria")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=500)
    p.add_argument("--only", help="comma-separated criterion numbers")
    p.add_argument("--no-budget", action="store_true", help="do not fail on time budgets")
    p.set_defaults(fn=cmd_selftest)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        a = ap.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 2
    try:
        a.fn(a, _load_config(a.config))
    except CheckFailed as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except USAGE_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""The nine acceptance checks, runnable from tests, scripts and the CLI.

Each check returns a ``CriterionResult``; randomized ones are seeded and
scale with ``AcceptanceConfig.count`` (500 is the full size).
"""
from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import corpus
from .binding import CaptureError, subst_pvar
from .differential import (
    Ball, PolyVec, certify_trajectory, load_field, load_triples, parse_field, refute_reach,
    rk4_trajectory, theta_hat,
)
from .proofkit import check_proof
from .proofkit.transform import TransformError, subst_proof, translate_proof_sharp
from .randgen import (
    FREE_NAMES, GenConfig, random_game, random_gl, random_mu, random_structure, random_valuation,
    structure_for,
)
from .semantics import Caps, eval_game, eval_gl, eval_mu, evaluate
from .surface import parse_mu
from .syntax import Assign, Havoc, PVar, actions_of, bar, free_bases, ovars, signature_of
from .translate import (
    assign_to_random, control_structure, eliminate_modalities, flat, is_lambda_free, sharp,
)


@dataclass(frozen=True)
class AcceptanceConfig:
    seed: int = 0
    count: int = 500
    structures: int = 20
    enforce_budget: bool = True

    def scaled(self, n: int) -> int:
        return max(1, n * self.count // 500)


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0
    budget: float = 0.0
    failures: list = field(default_factory=list)

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag} {self.number}. {self.name}: {self.detail} [{self.seconds:.1f}s / {self.budget:.0f}s]"


def _structures(rng: random.Random, k: int, cfg: GenConfig = GenConfig()) -> list:
    return [random_structure(rng, cfg) for _ in range(k)]


# ---------------------------------------------------------------- 1. negation

def negation(cfg: AcceptanceConfig):
    rng = random.Random(cfg.seed * 1000 + 1)
    structs = _structures(rng, cfg.structures)
    n, bad = cfg.scaled(500), []
    for i in range(n):
        A = structs[i % len(structs)]
        phi = random_mu(rng, A, 5, free=FREE_NAMES)
        val = random_valuation(rng, A)
        if eval_mu(A, val, bar(phi)) != A.full ^ eval_mu(A, val, phi):
            bad.append(phi)
    return not bad, f"{n - len(bad)}/{n} complements exact", bad


# ---------------------------------------------------------------- 2. monotonicity

def monotonicity(cfg: AcceptanceConfig):
    rng = random.Random(cfg.seed * 1000 + 2)
    structs = _structures(rng, cfg.structures)
    n, bad = cfg.scaled(500), []
    for i in range(n):
        A = structs[i % len(structs)]
        d1 = rng.getrandbits(A.size)
        d2 = d1 | rng.getrandbits(A.size)
        if i % 2 == 0:
            phi = random_mu(rng, A, 5, free=FREE_NAMES, free_polarity="pos")
            val = random_valuation(rng, A)
            lo = eval_mu(A, {**val, "P": d1}, phi)
            hi = eval_mu(A, {**val, "P": d2}, phi)
        else:
            phi = random_game(rng, A, 4)
            lo, hi = eval_game(A, {}, phi, d1), eval_game(A, {}, phi, d2)
        if lo & ~hi:
            bad.append(phi)
    return not bad, f"{n - len(bad)}/{n} inclusions hold", bad


# ---------------------------------------------------------------- 3. equi-expressivity

def _flat_denotation(A, phi):
    fr = flat(phi, avoid_ovars=A.support)
    big = control_structure(A, fr.encoding)
    return big, eval_gl(big, {}, fr.formula)


def equi_expressivity(cfg: AcceptanceConfig):
    rng = random.Random(cfg.seed * 1000 + 3)
    gcfg = GenConfig(max_domain=3, max_support=2)
    structs = _structures(rng, cfg.structures, gcfg)
    bad = []
    n1, n2, n3 = cfg.scaled(500), cfg.scaled(300), cfg.scaled(300)
    for i in range(n1):
        A = structs[i % len(structs)]
        phi = random_gl(rng, A, 5)
        if eval_gl(A, {}, phi) != eval_mu(A, {}, sharp(phi)):
            bad.append(("sharp", phi))
    for i in range(n2):
        A = structs[i % len(structs)]
        psi = random_mu(rng, A, 4)
        big, d = _flat_denotation(A, psi)
        if d != A.cylindrify(eval_mu(A, {}, psi), big):
            bad.append(("flat", psi))
    for i in range(n3):
        A = structs[i % len(structs)]
        phi = random_gl(rng, A, 3)
        big, d = _flat_denotation(A, sharp(phi))
        if d != A.cylindrify(eval_gl(A, {}, phi), big):
            bad.append(("roundtrip", phi))
    return not bad, f"sharp {n1}, flat {n2}, round trip {n3}; {len(bad)} mismatches", bad


# ---------------------------------------------------------------- 4. syntactic lemmas

def syntactic_lemmas(cfg: AcceptanceConfig):
    rng = random.Random(cfg.seed * 1000 + 4)
    structs = _structures(rng, 4)
    n, bad, skipped = cfg.scaled(500), [], 0
    X, Y = PVar("P"), PVar("Q")
    done = {"sharp-subst": 0, "bar-subst": 0, "subst-compose": 0, "subst-commute": 0}
    i = 0
    while sum(done.values()) < n and i < 20 * n:
        kind = list(done)[i % 4]
        i += 1
        A = structs[i % len(structs)]
        try:
            if kind == "sharp-subst":
                phi = random_gl(rng, A, 4, FREE_NAMES)
                psi = random_gl(rng, A, 3, FREE_NAMES)
                lhs = sharp(subst_pvar(phi, X, psi, "gl"))
                rhs = subst_pvar(sharp(phi), X, sharp(psi))
            else:
                phi = random_mu(rng, A, 4, free=FREE_NAMES)
                psi = random_mu(rng, A, 3, free=FREE_NAMES)
                rho = random_mu(rng, A, 3, free=FREE_NAMES)
                if kind == "bar-subst":
                    lhs = bar(subst_pvar(phi, X, psi))
                    rhs = subst_pvar(bar(phi), X, psi)
                elif kind == "subst-compose":
                    Yx = X if rng.random() < 0.5 else X.bar()
                    lhs = subst_pvar(subst_pvar(phi, X, psi), Yx, rho)
                    rhs = subst_pvar(phi, X, subst_pvar(psi, Yx, rho))
                else:
                    if "P" in free_bases(rho):
                        skipped += 1
                        continue
                    lhs = subst_pvar(subst_pvar(phi, X, psi), Y, rho)
                    rhs = subst_pvar(subst_pvar(phi, Y, rho), X, subst_pvar(psi, Y, rho))
        except CaptureError:
            skipped += 1
            continue
        done[kind] += 1
        if lhs != rhs:
            bad.append((kind, phi))
    total = sum(done.values())
    ok = not bad and total >= n
    counts = ", ".join(f"{k}: {v}" for k, v in done.items())
    return ok, f"{total} instances ({counts}), {skipped} failed side conditions, {len(bad)} mismatches", bad


# ---------------------------------------------------------------- 5. proof checking

def conclusion_valid(script, rng: random.Random, k: int = 20) -> bool:
    """The conclusion denotes the whole state space on k random interpretations."""
    phi = script.conclusion
    fps = script.footprints
    support = set(ovars(phi, fps))
    for fp in fps.values():
        support |= set(fp)
    support = sorted(support) or ["x"]
    sig = signature_of(phi)
    dom = 3 if len(support) <= 4 else 2
    for _ in range(k):
        A = structure_for(rng, sig, support, fps, dom)
        val = random_valuation(rng, A, sorted(free_bases(phi)))
        if evaluate(A, val, phi, script.calculus) != A.full:
            return False
    return True


def proof_checking(cfg: AcceptanceConfig):
    rng = random.Random(cfg.seed * 1000 + 5)
    bad = []
    good = corpus.proof_files()
    for p in good:
        s = corpus.load_script(p)
        v = check_proof(s)
        if not v.ok:
            bad.append((p.name, v.report()))
        elif not s.meta.get("theory") and not conclusion_valid(s, rng, cfg.structures):
            bad.append((p.name, "conclusion not valid"))
    broken = corpus.broken_files()
    for p in broken:
        s = corpus.load_script(p)
        v = check_proof(s)
        want = s.meta.get("expect_fail")
        if v.ok or v.first_failure.num != want:
            got = None if v.ok else v.first_failure.num
            bad.append((p.name, f"expected failure at {want}, got {got}"))
    ok = not bad and len(good) >= 25 and len(broken) >= 10
    return ok, f"{len(good)} scripts check, {len(broken)} broken scripts fail as documented; {len(bad)} problems", bad


# ---------------------------------------------------------------- 6. proof transforms

SUBST_PSI = "mu W. (R | <a> W)"


def proof_transforms(cfg: AcceptanceConfig):
    psi = parse_mu(SUBST_PSI)
    bad, nsub, nsharp = [], 0, 0
    for p in corpus.proof_files():
        s = corpus.load_script(p)
        try:
            if s.calculus == "mu":
                bases = sorted(free_bases(s.conclusion))
                X = PVar(bases[0] if bases else "P")
                out = subst_proof(s, X, psi)
                want = subst_pvar(s.conclusion, X, psi)
                nsub += 1
            else:
                out = translate_proof_sharp(s)
                want = sharp(s.conclusion)
                nsharp += 1
        except (TransformError, CaptureError) as e:
            bad.append((p.name, str(e)))
            continue
        v = check_proof(out)
        if not v.ok:
            bad.append((p.name, v.report()))
        elif out.conclusion != want:
            bad.append((p.name, "conclusion differs from the transformed conclusion"))
    return not bad, f"{nsub} substituted and {nsharp} translated proofs re-check; {len(bad)} problems", bad


# ---------------------------------------------------------------- 7. local reduction

def _is_assign(a) -> bool:
    return isinstance(a, Assign)


def local_reduction(cfg: AcceptanceConfig, max_new_vars: int = 3):
    rng = random.Random(cfg.seed * 1000 + 7)
    structs = _structures(rng, cfg.structures)
    n, bad, resampled, i = cfg.scaled(200), [], 0, 0
    done = 0
    while done < n:
        A = structs[i % len(structs)]
        i += 1
        phi = random_mu(rng, A, 4, free=FREE_NAMES)
        if not any(_is_assign(a) for a in actions_of(phi)):
            resampled += 1
            continue
        out = eliminate_modalities(phi, _is_assign, assign_to_random, avoid=A.support)
        new = sorted({a.var for a in actions_of(out) if isinstance(a, Havoc)} - set(A.support))
        if len(new) > max_new_vars:
            resampled += 1
            continue
        done += 1
        big = A.extend(new)
        val = random_valuation(rng, A)
        bval = {k: A.cylindrify(m, big) for k, m in val.items()}
        if not is_lambda_free(out, _is_assign):
            bad.append(("not assignment-free", phi))
        elif eval_mu(big, bval, out) != A.cylindrify(eval_mu(A, val, phi), big):
            bad.append(("denotation differs", phi))
    return not bad, f"{n} eliminations ({resampled} resampled), {len(bad)} mismatches", bad


# ---------------------------------------------------------------- 8. differential numerics

FD_STEPS = (1e-4, 1e-5)


def fd_error(F: PolyVec, pts, h: float) -> float:
    th = theta_hat(F)
    worst = 0.0
    for z in pts:
        fz = F(z)
        fd = (F(z + h * fz) - fz) / h
        worst = max(worst, float(np.linalg.norm(fd - th(z))))
    return worst


def differential_numerics(cfg: AcceptanceConfig):
    rng = np.random.default_rng(cfg.seed)
    bad, notes = [], []
    e = rk4_trajectory(parse_field({"vars": ["x"], "field": ["x"]}), [1.0], 1.0, 6).samples[-1][0]
    if abs(e - 2.718281828) > 1e-6:
        bad.append(("rk4 e", e))
    rot = parse_field({"vars": ["x", "y"], "field": ["y", "-x"]})
    end = rk4_trajectory(rot, [1.0, 0.0], 2 * math.pi, 6).samples[-1]
    if np.linalg.norm(end - np.array([1.0, 0.0])) > 1e-5:
        bad.append(("rotation", end))
    ncert = ntrip = 0
    ratios = []
    for p in corpus.field_files():
        F, M, doc = load_field(p)
        K = Ball(M)
        for x0 in doc.get("starts", []):
            cert = rk4_trajectory(F, x0, doc["horizon"], 6)
            ncert += 1
            v = certify_trajectory(F, K, cert)
            if not v.ok:
                bad.append((p.stem, "certificate", x0, v))
            if refute_reach(F, K, cert.samples[0], cert.samples[-1], cert.t):
                bad.append((p.stem, "refuted a reachable endpoint", x0))
        csv = p.with_suffix(".csv")
        if csv.exists():
            for tr in load_triples(csv, F.dim):
                ntrip += 1
                if refute_reach(F, K, tr.x, tr.y, tr.t) != (tr.expected == "unreachable"):
                    bad.append((p.stem, "triple", tr))
        if max(q.degree for q in F.polys) >= 2:
            pts = rng.uniform(-M / 2, M / 2, size=(8, F.dim))
            errs = [fd_error(F, pts, h) for h in FD_STEPS]
            ratio = errs[0] / errs[1]
            ratios.append(ratio)
            if not 5 <= ratio <= 20:
                bad.append((p.stem, "finite-difference ratio", ratio))
    if not ratios:
        bad.append(("no nonlinear field for the finite-difference check",))
    notes.append(f"e err {abs(e - math.e):.1e}")
    notes.append(f"rotation err {np.linalg.norm(end - [1, 0]):.1e}")
    notes.append(f"{ncert} certificates, {ntrip} triples")
    notes.append("fd ratios " + ", ".join(f"{r:.2f}" for r in ratios))
    return not bad, "; ".join(notes), bad


# ---------------------------------------------------------------- 9. fixpoint over a finite N

NAT_FORMULA = "mu X. (n = 0 | <n := n - 1> X)"


def nat_fixpoint(cfg: AcceptanceConfig):
    # five elements: one over the default domain cap
    A = corpus.load_structure("nat", Caps(max_domain=5))
    phi = parse_mu(NAT_FORMULA)
    d, dd = eval_mu(A, {}, phi), eval_mu(A, {}, bar(phi))
    ok = d == A.full and dd == 0
    return ok, f"|[[phi]]| = {bin(d).count('1')}/{A.size}, |[[bar phi]]| = {bin(dd).count('1')}", []


# ---------------------------------------------------------------- driver

CRITERIA = [
    (1, "negation is complement", negation, 30),
    (2, "monotonicity", monotonicity, 30),
    (3, "equi-expressivity", equi_expressivity, 300),
    (4, "syntactic substitution lemmas", syntactic_lemmas, 10),
    (5, "proof checking", proof_checking, 30),
    (6, "proof transforms re-check", proof_transforms, 30),
    (7, "local reduction", local_reduction, 60),
    (8, "differential numerics", differential_numerics, 60),
    (9, "fixpoint over a finite N", nat_fixpoint, 5),
]


def run_criterion(number: int, cfg: AcceptanceConfig = AcceptanceConfig()) -> CriterionResult:
    num, name, fn, budget = CRITERIA[number - 1]
    t0 = time.perf_counter()
    ok, detail, failures = fn(cfg)
    dt = time.perf_counter() - t0
    if cfg.enforce_budget and dt > budget:
        ok = False
        detail += f"; over the {budget}s budget"
    return CriterionResult(num, name, bool(ok), detail, dt, budget, list(failures)[:10])


def run_all(cfg: AcceptanceConfig = AcceptanceConfig(), only=None,
            report: Callable[[CriterionResult], None] = None) -> list:
    out = []
    for num, *_ in CRITERIA:
        if only and num not in only:
            continue
        r = run_criterion(num, cfg)
        if report:
            report(r)
        out.append(r)
    return out

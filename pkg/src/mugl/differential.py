"""Polynomial vector fields, ODE axiom instances and numeric reachability certificates.

Norms are Euclidean throughout.  Formula constructors compare squared norms
so no square root symbol is needed.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .binding import fresh_name, fresh_pvar
from .syntax import (
    And, App, Assign, Atom, Box, Const, Dia, Evolve, Havoc, Lit, Mu, Not, Nu, Or, PVar, Var,
    all_pvars, bar, ovars,
)


class FieldError(ValueError):
    pass


# ---------------------------------------------------------------- polynomials

@dataclass(frozen=True)
class Poly:
    """Multivariate polynomial: exponent tuple -> rational coefficient."""
    nvars: int
    coeffs: tuple = ()          # sorted ((exps, Fraction), ...), zero coefficients dropped

    @classmethod
    def make(cls, nvars: int, d: dict) -> "Poly":
        return cls(nvars, tuple(sorted((e, Fraction(c)) for e, c in d.items() if c != 0)))

    @classmethod
    def const(cls, nvars: int, c) -> "Poly":
        return cls.make(nvars, {(0,) * nvars: Fraction(c)})

    @classmethod
    def var(cls, nvars: int, i: int) -> "Poly":
        e = [0] * nvars
        e[i] = 1
        return cls.make(nvars, {tuple(e): 1})

    def as_dict(self) -> dict:
        return dict(self.coeffs)

    def __add__(self, o: "Poly") -> "Poly":
        d = self.as_dict()
        for e, c in o.coeffs:
            d[e] = d.get(e, 0) + c
        return Poly.make(self.nvars, d)

    def __neg__(self) -> "Poly":
        return Poly.make(self.nvars, {e: -c for e, c in self.coeffs})

    def __sub__(self, o: "Poly") -> "Poly":
        return self + (-o)

    def __mul__(self, o: "Poly") -> "Poly":
        d = {}
        for e1, c1 in self.coeffs:
            for e2, c2 in o.coeffs:
                e = tuple(a + b for a, b in zip(e1, e2))
                d[e] = d.get(e, 0) + c1 * c2
        return Poly.make(self.nvars, d)

    def scale(self, c) -> "Poly":
        return Poly.make(self.nvars, {e: c * v for e, v in self.coeffs})

    def diff(self, i: int) -> "Poly":
        d = {}
        for e, c in self.coeffs:
            if e[i]:
                e2 = list(e)
                e2[i] -= 1
                d[tuple(e2)] = d.get(tuple(e2), 0) + c * e[i]
        return Poly.make(self.nvars, d)

    @property
    def degree(self) -> int:
        return max((sum(e) for e, _ in self.coeffs), default=0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, z):
        """Evaluate at points; z has shape (nvars,) or (nvars, k)."""
        z = np.asarray(z, dtype=float)
        out = np.zeros(z.shape[1:]) if z.ndim > 1 else 0.0
        for e, c in self.coeffs:
            term = float(c)
            for i, k in enumerate(e):
                if k:
                    term = term * z[i] ** k
            out = out + term
        return out


@dataclass(frozen=True)
class PolyVec:
    """Polynomial vector field over the listed variables."""
    vars: tuple
    polys: tuple

    def __post_init__(self):
        if len(self.vars) != len(self.polys):
            raise FieldError("field needs one polynomial per variable")
        if len(set(self.vars)) != len(self.vars):
            raise FieldError("field variables must be distinct")
        for p in self.polys:
            if p.nvars != len(self.vars):
                raise FieldError("polynomial arity differs from the variable list")

    @property
    def dim(self) -> int:
        return len(self.vars)

    def __call__(self, z) -> np.ndarray:
        return np.array([p(z) for p in self.polys])

    def terms(self) -> list:
        return [poly_to_term(p, self.vars) for p in self.polys]


def theta_hat(F: PolyVec) -> PolyVec:
    """Componentwise sum_i (d_i p_j) * p_i, the second derivative along integral curves."""
    n = F.dim
    out = []
    for pj in F.polys:
        acc = Poly.const(n, 0)
        for i, pi in enumerate(F.polys):
            acc = acc + pj.diff(i) * pi
        out.append(acc)
    return PolyVec(F.vars, tuple(out))


def jacobian_product(F: PolyVec, z) -> np.ndarray:
    """(DF)F at a point, computed numerically from the partial derivatives."""
    z = np.asarray(z, dtype=float)
    J = np.array([[p.diff(i)(z) for i in range(F.dim)] for p in F.polys])
    return J @ F(z)


# ---------------------------------------------------------------- term <-> polynomial

def _numeral(name: str) -> Fraction:
    try:
        return Fraction(name)
    except (ValueError, ZeroDivisionError):
        raise FieldError(f"constant {name!r} is not a numeral")


def term_to_poly(t, vars: Sequence[str]) -> Poly:
    n = len(vars)
    if isinstance(t, Var):
        if t.name not in vars:
            raise FieldError(f"variable {t.name} is not a field variable")
        return Poly.var(n, list(vars).index(t.name))
    if isinstance(t, Const):
        return Poly.const(n, _numeral(t.name))
    if t.fn == "neg" and len(t.args) == 1:
        return -term_to_poly(t.args[0], vars)
    if t.fn in ("+", "-", "*") and len(t.args) == 2:
        a, b = term_to_poly(t.args[0], vars), term_to_poly(t.args[1], vars)
        return a + b if t.fn == "+" else a - b if t.fn == "-" else a * b
    if t.fn == "/" and len(t.args) == 2:
        d = term_to_poly(t.args[1], vars)
        if d.degree > 0 or d.is_zero():
            raise FieldError("division only by nonzero constants")
        return term_to_poly(t.args[0], vars).scale(1 / d.coeffs[0][1])
    raise FieldError(f"not a polynomial term: {t!r}")


def _num_term(c: Fraction):
    if c.denominator == 1:
        return Const(str(abs(c.numerator)))
    return App("/", (Const(str(abs(c.numerator))), Const(str(c.denominator))))


def poly_to_term(p: Poly, vars: Sequence[str]):
    if p.is_zero():
        return Const("0")
    out = None
    for e, c in sorted(p.coeffs, key=lambda ec: (-sum(ec[0]), ec[0]), reverse=False):
        factors = []
        for v, k in zip(vars, e):
            factors += [Var(v)] * k
        mag = abs(c)
        if not factors:
            mono = _num_term(mag)
        else:
            mono = factors[0]
            for f in factors[1:]:
                mono = App("*", (mono, f))
            if mag != 1:
                mono = App("*", (_num_term(mag), mono))
        if out is None:
            out = App("neg", (mono,)) if c < 0 else mono
        else:
            out = App("-" if c < 0 else "+", (out, mono))
    return out


def field_from_evolve(ev: Evolve) -> PolyVec:
    vs = ev.vars
    return PolyVec(vs, tuple(term_to_poly(t, vs) for _, t in ev.eqs))


def evolve_of(F: PolyVec, constraint=None) -> Evolve:
    return Evolve(tuple(zip(F.vars, F.terms())), constraint)


# ---------------------------------------------------------------- formula constructors

def _sub(a, b):
    return App("-", (a, b))


def _mul(a, b):
    return App("*", (a, b))


def _sumsq(ts: Sequence):
    out = None
    for t in ts:
        sq = _mul(t, t)
        out = sq if out is None else App("+", (out, sq))
    return out


def _le(a, b) -> Lit:
    return Lit(Atom("<=", (a, b)))


def _gt(a, b) -> Lit:
    return Lit(Atom(">", (a, b)))


def _exists(vs: Sequence[str], body):
    for v in reversed(vs):
        body = Dia(Havoc(v), body)
    return body


def _assign_all(xs: Sequence[str], ts: Sequence, body):
    for x, t in reversed(list(zip(xs, ts))):
        body = Dia(Assign(x, t), body)
    return body


def _subst_vars(t, m: dict):
    if isinstance(t, Var):
        return m.get(t.name, t)
    if isinstance(t, Const):
        return t
    return App(t.fn, tuple(_subst_vars(a, m) for a in t.args))


def _fresh_vec(prefix: str, n: int, avoid: set) -> list:
    out = []
    for _ in range(n):
        v = fresh_name(avoid, prefix)
        avoid.add(v)
        out.append(v)
    return out


@dataclass
class NablaNames:
    y: list
    t: str
    m: str
    z: list
    u: list
    X: str


def nabla_instance(ode: Evolve, phi, names: Optional[NablaNames] = None):
    """The fixpoint axiom for an unconstrained ODE as a mu-calculus equivalence.

    Returns (formula, names).  The bound M of the compact ball is the object
    variable ``m``; norms are compared squared.
    """
    if ode.constraint is not None:
        raise FieldError("constrained ODE: apply tba_rewrite first")
    F = field_from_evolve(ode)
    th = [t for _, t in ode.eqs]
    hat = theta_hat(F).terms()
    xs = list(ode.vars)
    n = len(xs)
    if names is None:
        avoid = set(ovars(phi)) | set(ovars(Dia(ode, phi))) | set(xs)
        names = NablaNames(_fresh_vec("y", n, avoid), fresh_name(avoid, "t"), "", [], [], "")
        avoid.add(names.t)
        names.m = fresh_name(avoid, "m")
        avoid.add(names.m)
        names.z = _fresh_vec("z", n, avoid)
        names.u = _fresh_vec("u", n, avoid)
        names.X = fresh_pvar(all_pvars(phi))
    X = PVar(names.X)
    x = [Var(v) for v in xs]
    y = [Var(v) for v in names.y]
    z = [Var(v) for v in names.z]
    t, m = Var(names.t), Var(names.m)
    m2 = _mul(m, m)
    t2 = _mul(t, t)
    zmap = dict(zip(xs, z))
    diff = [_sub(b, a) for a, b in zip(x, y)]
    c1 = And(_le(_sumsq(x), m2), _le(_sumsq(y), m2))
    in_ball = _le(_sumsq(z), m2)
    c2 = _exists(names.z, And(in_ball, _le(_sumsq(diff), _mul(t2, _sumsq([_subst_vars(p, zmap) for p in th])))))
    taylor = [_sub(d, _mul(t, p)) for d, p in zip(diff, th)]
    c3 = _exists(names.z, And(in_ball, _le(_mul(Const("4"), _sumsq(taylor)),
                                            _mul(_mul(t2, t2), _sumsq([_subst_vars(p, zmap) for p in hat])))))
    halve = Assign(names.t, App("/", (t, Const("2"))))
    uu = [Var(v) for v in names.u]
    c4 = _exists(names.u, Dia(halve, And(_assign_all(names.y, uu, X), _assign_all(xs, uu, X))))
    rho = And(And(c1, c2), And(c3, c4))
    rhs = _exists(names.y, And(_assign_all(xs, y, phi),
                                _exists([names.t], And(_gt(t, Const("0")),
                                                       _exists([names.m], And(_gt(m, Const("0")), Nu(X, rho)))))))
    lhs = Dia(ode, phi)
    return And(Or(bar(lhs), rhs), Or(bar(rhs), lhs)), names


def _neg_term(t):
    return App("neg", (t,))


def _tba_dia(ode: Evolve, phi, avoid: set):
    tname = fresh_name(avoid, "t")
    avoid.add(tname)
    t = Var(tname)
    fwd = Evolve(ode.eqs + ((tname, Const("1")),))
    back = Evolve(tuple((v, _neg_term(th)) for v, th in ode.eqs) + ((tname, _neg_term(Const("1"))),))
    guard = Or(Lit(Atom(">=", (t, Const("0"))), False), ode.constraint)
    return Dia(Assign(tname, Const("0")), Dia(fwd, And(phi, Box(back, guard))))


def tba_rewrite(phi, avoid=()):
    """Remove every evolution constraint with the there-and-back rewrite.

    Each rewrite introduces its own fresh clock; box modalities are handled
    through their diamond dual.
    """
    used = set(avoid) | ovars(phi)
    return _tba(phi, used)


def _tba(phi, used):
    if isinstance(phi, (Lit, PVar)):
        return phi
    if isinstance(phi, (Or, And)):
        return type(phi)(_tba(phi.left, used), _tba(phi.right, used))
    if isinstance(phi, (Mu, Nu)):
        return type(phi)(phi.var, _tba(phi.body, used))
    if isinstance(phi, Not):
        return Not(_tba(phi.body, used))
    if isinstance(phi, (Dia, Box)):
        body = _tba(phi.body, used)
        a = phi.action
        if not (isinstance(a, Evolve) and a.constraint is not None):
            return type(phi)(a, body)
        if isinstance(phi, Dia):
            return _tba_dia(a, body, used)
        return bar(_tba_dia(a, bar(body), used))
    raise FieldError(f"tba_rewrite expects a mu-calculus formula, got {phi!r}")


# ---------------------------------------------------------------- numerics

@dataclass(frozen=True)
class NumericConfig:
    grid: int = 101
    slack: float = 1.05
    rtol: float = 1e-9
    atol: float = 1e-12
    max_dim: int = 3
    max_step: float = 0.005
    norm: str = "euclidean"     # or "max"

    def __post_init__(self):
        if self.norm not in _NORMS:
            raise FieldError(f"unknown norm {self.norm!r}; use one of {sorted(_NORMS)}")


_NORMS = {
    "euclidean": lambda v: np.sqrt((np.asarray(v, float) ** 2).sum(axis=0)),
    "max": lambda v: np.abs(np.asarray(v, float)).max(axis=0),
}


def vnorm(v, cfg: "NumericConfig") -> float:
    """Norm of a vector (or of each column of a (N, k) array)."""
    return _NORMS[cfg.norm](v)


DEFAULT = NumericConfig()


@dataclass(frozen=True)
class Ball:
    """K = {z : |z| <= M}."""
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise FieldError("ball radius must be positive")


@dataclass
class TrajectoryCert:
    samples: np.ndarray         # shape (2**depth + 1, N)
    t: float

    @property
    def depth(self) -> int:
        n = len(self.samples) - 1
        d = n.bit_length() - 1
        if n < 1 or (1 << d) != n:
            raise FieldError("certificate needs 2**d + 1 samples")
        return d


def _grid_points(n: int, M: float, res: int) -> np.ndarray:
    axis = np.linspace(-M, M, res)
    mesh = np.meshgrid(*([axis] * n), indexing="ij")
    return np.stack([m.ravel() for m in mesh])


def grid_max(F: PolyVec, K: Ball, cfg: NumericConfig = DEFAULT) -> float:
    """Largest norm of F over grid points inside K."""
    if F.dim > cfg.max_dim:
        raise FieldError(f"dimension {F.dim} exceeds the cap of {cfg.max_dim}")
    return _grid_max_cached(F, K.radius, cfg)


@lru_cache(maxsize=256)
def _grid_max_cached(F: PolyVec, M: float, cfg: NumericConfig) -> float:
    pts = _grid_points(F.dim, M, cfg.grid)
    keep = vnorm(pts, cfg) <= M * (1 + 1e-12)
    pts = pts[:, keep]
    vals = np.array([np.broadcast_to(p(pts), pts.shape[1:]) for p in F.polys])
    return float(vnorm(vals, cfg).max())


def norm_estimate(F: PolyVec, K: Ball, cfg: NumericConfig = DEFAULT) -> float:
    """Heuristic upper estimate of sup over K of |F|: grid maximum times slack."""
    return grid_max(F, K, cfg) * cfg.slack


@dataclass(frozen=True)
class Bounds:
    """Norm estimates used by the G_K test for one field and ball."""
    f: float
    second: float

    @classmethod
    def upper(cls, F: PolyVec, K: Ball, cfg: NumericConfig = DEFAULT) -> "Bounds":
        return cls(norm_estimate(F, K, cfg), norm_estimate(theta_hat(F), K, cfg))


def _check_dims(F: PolyVec, *pts):
    for p in pts:
        if np.asarray(p).shape != (F.dim,):
            raise FieldError(f"point {p!r} does not have dimension {F.dim}")


def _gk_margins(F, K, x, y, t, bounds: Bounds, cfg: NumericConfig):
    """Left and right sides of the four G_K inequalities (with membership in K)."""
    d = y - x
    return [
        (float(vnorm(x, cfg)), K.radius),
        (float(vnorm(y, cfg)), K.radius),
        (float(vnorm(d, cfg)), t * bounds.f),
        (float(vnorm(d - t * F(x), cfg)), t * t / 2 * bounds.second),
    ]


def g_k_member(F: PolyVec, K: Ball, x, y, t: float, cfg: NumericConfig = DEFAULT,
               bounds: Optional[Bounds] = None) -> bool:
    """Membership of (x, y, t) in the numeric over-approximation of G_K, with x, y in K."""
    x, y = np.atleast_1d(np.asarray(x, float)), np.atleast_1d(np.asarray(y, float))
    _check_dims(F, x, y)
    if t < 0:
        raise FieldError("time must be nonnegative")
    b = bounds or Bounds.upper(F, K, cfg)
    return all(l <= r * (1 + cfg.rtol) + cfg.atol for l, r in _gk_margins(F, K, x, y, t, b, cfg))


def refute_reach(F: PolyVec, K: Ball, x, y, t: float, cfg: NumericConfig = DEFAULT) -> bool:
    """True when no integral curve inside K can lead from x to y in time t.

    A bound is declared violated only when it fails strictly against the
    over-approximated norms, with the tolerance counted against refutation.
    """
    x, y = np.atleast_1d(np.asarray(x, float)), np.atleast_1d(np.asarray(y, float))
    _check_dims(F, x, y)
    b = Bounds.upper(F, K, cfg)
    return any(l > r * (1 + cfg.rtol) + cfg.atol for l, r in _gk_margins(F, K, x, y, t, b, cfg))


@dataclass
class CertVerdict:
    ok: bool
    level: Optional[int] = None
    index: Optional[int] = None

    def __bool__(self):
        return self.ok


def certify_trajectory(F: PolyVec, K: Ball, cert: TrajectoryCert,
                       cfg: NumericConfig = DEFAULT) -> CertVerdict:
    """Check that every dyadic triple of the certificate lies in G_K at every level."""
    samples = np.asarray(cert.samples, float)
    if samples.ndim == 1:
        samples = samples[:, None]
    d = TrajectoryCert(samples, cert.t).depth
    if samples.shape[1] != F.dim:
        raise FieldError("sample dimension differs from the field")
    b = Bounds.upper(F, K, cfg)
    for m in range(d + 1):
        step = 1 << (d - m)
        dt = cert.t / (1 << m)
        for k in range(1 << m):
            if not g_k_member(F, K, samples[k * step], samples[(k + 1) * step], dt, cfg, b):
                return CertVerdict(False, m, k)
    return CertVerdict(True)


def rk4_trajectory(F: PolyVec, x0, t: float, depth: int,
                   cfg: NumericConfig = DEFAULT) -> TrajectoryCert:
    """Integrate x' = F(x) and sample at the 2**depth + 1 dyadic times of [0, t]."""
    if t < 0:
        raise FieldError("time must be nonnegative")
    x = np.atleast_1d(np.asarray(x0, float)).copy()
    _check_dims(F, x)
    n = 1 << depth
    seg = t / n
    sub = max(1, math.ceil(seg / cfg.max_step)) if seg > 0 else 1
    h = seg / sub
    out = [x.copy()]
    for _ in range(n):
        for _ in range(sub):
            k1 = F(x)
            k2 = F(x + h / 2 * k1)
            k3 = F(x + h / 2 * k2)
            k4 = F(x + h * k3)
            x = x + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        out.append(x.copy())
    return TrajectoryCert(np.array(out), t)


# ---------------------------------------------------------------- real-valued evaluation

def eval_real_term(t, env: dict) -> float:
    if isinstance(t, Var):
        return env[t.name]
    if isinstance(t, Const):
        return float(_numeral(t.name))
    a = [eval_real_term(s, env) for s in t.args]
    if t.fn == "neg":
        return -a[0]
    if t.fn == "+":
        return a[0] + a[1]
    if t.fn == "-":
        return a[0] - a[1]
    if t.fn == "*":
        return a[0] * a[1]
    if t.fn == "/":
        return a[0] / a[1]
    raise FieldError(f"no real interpretation for {t.fn}")


_CMP = {"=": lambda a, b: a == b, "<=": lambda a, b: a <= b, "<": lambda a, b: a < b,
        ">=": lambda a, b: a >= b, ">": lambda a, b: a > b}


def eval_real(phi, env: dict) -> bool:
    """Truth of a quantifier-free first-order formula over the reals."""
    if isinstance(phi, Lit):
        a, b = (eval_real_term(s, env) for s in phi.atom.args)
        return _CMP[phi.atom.pred](a, b) == phi.positive
    if isinstance(phi, Or):
        return eval_real(phi.left, env) or eval_real(phi.right, env)
    if isinstance(phi, And):
        return eval_real(phi.left, env) and eval_real(phi.right, env)
    raise FieldError(f"not a first-order formula: {phi!r}")


def constrained_reach(F: PolyVec, x0, t: float, psi, depth: int = 6,
                      cfg: NumericConfig = DEFAULT) -> tuple:
    """Endpoint after time t and whether psi held on every sample on the way."""
    cert = rk4_trajectory(F, x0, t, depth, cfg)
    ok = all(eval_real(psi, dict(zip(F.vars, s))) for s in cert.samples)
    return cert.samples[-1], ok


def there_and_back(F: PolyVec, x0, t: float, psi, depth: int = 6,
                   cfg: NumericConfig = DEFAULT) -> tuple:
    """Numeric reading of the rewritten modality: go forward, then check psi backward."""
    end = rk4_trajectory(F, x0, t, depth, cfg).samples[-1]
    back = PolyVec(F.vars, tuple(-p for p in F.polys))
    cert = rk4_trajectory(back, end, t, depth, cfg)
    ok = all(eval_real(psi, dict(zip(F.vars, s))) for s in cert.samples)
    return end, ok


# ---------------------------------------------------------------- corpus files

def parse_field(doc: dict) -> PolyVec:
    """Field document: {"vars": [...], "field": [component, ...]}.

    A component is a term string, or a coefficient table
    [[coefficient, [exponent, ...]], ...] with coefficients as numbers or
    strings such as "1/2".
    """
    from .surface import parse_term
    vs = tuple(doc["vars"])
    polys = []
    for comp in doc["field"]:
        if isinstance(comp, str):
            polys.append(term_to_poly(parse_term(comp), vs))
        else:
            d = {}
            for c, e in comp:
                if len(e) != len(vs):
                    raise FieldError("exponent vector length differs from the variable list")
                d[tuple(e)] = d.get(tuple(e), 0) + Fraction(str(c))
            polys.append(Poly.make(len(vs), d))
    return PolyVec(vs, tuple(polys))


def load_field(path) -> tuple:
    """(field, ball radius or None, document) from a JSON file."""
    doc = json.loads(Path(path).read_text())
    return parse_field(doc), doc.get("radius"), doc


@dataclass
class Triple:
    x: np.ndarray
    y: np.ndarray
    t: float
    expected: str           # "reachable" or "unreachable"


def load_triples(path, dim: int) -> list:
    """CSV rows x1..xN, y1..yN, t, expected."""
    out = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].lstrip().startswith("#"):
                continue
            if len(row) != 2 * dim + 2:
                raise FieldError(f"row {row!r} needs {2 * dim + 2} columns")
            vals = [float(v) for v in row[:-1]]
            out.append(Triple(np.array(vals[:dim]), np.array(vals[dim:2 * dim]), vals[-1],
                              row[-1].strip()))
    return out

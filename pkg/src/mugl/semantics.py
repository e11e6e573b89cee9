"""Finite-structure semantics for both logics.

States are enumerated lexicographically over the support (first support
variable most significant) and sets of states are Python ints used as
bitsets.  Fixpoints are computed by Kleene iteration, which is exact on the
finite powerset lattice.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

from .syntax import (
    Act, And, Assign, Box, Choice, Const, Dia, Dual, Evolve, Havoc, Lit, Mu, Named, Not, Nu,
    Or, Play, PVar, Seq, Star, Test, Var,
)


class StructureError(ValueError):
    """Schema or totality violations in a finite structure."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class EvalError(ValueError):
    pass


class NonMonotone(EvalError):
    pass


@dataclass(frozen=True)
class Caps:
    max_domain: int = 4
    max_support: int = 8
    max_states: int = 2 ** 20


DEFAULT_CAPS = Caps()


def bits(mask: int):
    """Indices of set bits in increasing order."""
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


class FiniteStructure:
    """Domain, symbol interpretations, named transitions and a finite support.

    ``functions`` maps name -> (arity, {args: result}); ``predicates`` maps
    name -> (arity, set of tuples); ``transitions`` maps name ->
    (footprint, [(pre, post)]) with pre/post dicts over the footprint.
    Elements are strings.
    """

    def __init__(self, domain, support, constants=None, functions=None, predicates=None,
                 transitions=None, caps: Caps = DEFAULT_CAPS, check_caps: bool = True):
        self.domain = tuple(domain)
        self.support = tuple(support)
        self.constants = dict(constants or {})
        self.functions = {k: (a, dict(t)) for k, (a, t) in (functions or {}).items()}
        self.predicates = {k: (a, frozenset(map(tuple, t))) for k, (a, t) in (predicates or {}).items()}
        self.transitions = {k: (tuple(fp), [(dict(p), dict(q)) for p, q in pairs])
                            for k, (fp, pairs) in (transitions or {}).items()}
        self.caps = caps
        self._validate(check_caps)
        self.nd = len(self.domain)
        self.nv = len(self.support)
        self.size = self.nd ** self.nv
        self.full = (1 << self.size) - 1
        self.elem = {e: i for i, e in enumerate(self.domain)}
        self.pos = {v: i for i, v in enumerate(self.support)}
        self.weight = {v: self.nd ** (self.nv - 1 - i) for i, v in enumerate(self.support)}
        self.states = list(itertools.product(range(self.nd), repeat=self.nv))
        self._lit_cache: dict = {}
        self._succ_cache: dict = {}
        self._perm_cache: dict = {}

    # ------------------------------------------------------------ validation
    def _validate(self, check_caps: bool):
        probs = []
        dom = set(self.domain)
        if not self.domain:
            probs.append("domain: must be nonempty")
        if len(dom) != len(self.domain):
            probs.append("domain: duplicate elements")
        if len(set(self.support)) != len(self.support):
            probs.append("support: duplicate variables")
        if check_caps:
            if len(self.domain) > self.caps.max_domain:
                probs.append(f"domain: size {len(self.domain)} exceeds cap {self.caps.max_domain}")
            if len(self.support) > self.caps.max_support:
                probs.append(f"support: size {len(self.support)} exceeds cap {self.caps.max_support}")
            if self.domain and len(self.domain) ** len(self.support) > self.caps.max_states:
                probs.append(f"state space exceeds cap {self.caps.max_states}")
        for c, e in self.constants.items():
            if e not in dom:
                probs.append(f"constants.{c}: {e!r} not in domain")
        for f, (arity, table) in self.functions.items():
            for args, r in table.items():
                if len(args) != arity:
                    probs.append(f"functions.{f}: row {list(args)} has wrong arity")
                elif any(a not in dom for a in args) or r not in dom:
                    probs.append(f"functions.{f}: row {list(args) + [r]} leaves the domain")
            for args in itertools.product(self.domain, repeat=arity):
                if args not in table:
                    probs.append(f"functions.{f}: missing value at {list(args)}")
        for p, (arity, rows) in self.predicates.items():
            for row in rows:
                if len(row) != arity or any(a not in dom for a in row):
                    probs.append(f"predicates.{p}: tuple {list(row)} outside domain^{arity}")
        sup = set(self.support)
        for a, (fp, pairs) in self.transitions.items():
            for v in fp:
                if v not in sup:
                    probs.append(f"transitions.{a}.footprint: {v} not in support")
            for k, (p, q) in enumerate(pairs):
                for side, st in (("pre", p), ("post", q)):
                    if set(st) != set(fp):
                        extra = sorted(set(st) - set(fp))
                        what = f"undeclared variables {extra}" if extra else "missing footprint variables"
                        probs.append(f"transitions.{a}.pairs[{k}].{side}: {what}")
                    for v, e in st.items():
                        if e not in dom:
                            probs.append(f"transitions.{a}.pairs[{k}].{side}.{v}: {e!r} not in domain")
        if probs:
            raise StructureError(probs)

    # ------------------------------------------------------------ states
    def index(self, state) -> int:
        """Index of a state given as a dict var -> element or a tuple of element indices."""
        if isinstance(state, dict):
            if set(state) != set(self.support):
                raise EvalError(f"state {state} does not cover exactly the support {list(self.support)}")
            digits = [self.elem[state[v]] for v in self.support]
        else:
            digits = list(state)
        i = 0
        for d in digits:
            i = i * self.nd + d
        return i

    def state_dict(self, i: int) -> dict:
        return {v: self.domain[d] for v, d in zip(self.support, self.states[i])}

    def enumerate_states(self) -> list:
        return [self.state_dict(i) for i in range(self.size)]

    def set_of(self, mask: int) -> list:
        return [self.state_dict(i) for i in bits(mask)]

    def mask_of(self, states: Iterable) -> int:
        m = 0
        for s in states:
            m |= 1 << self.index(s)
        return m

    def extend(self, new_vars: Iterable[str]) -> "FiniteStructure":
        """Same interpretation with extra variables appended to the support."""
        new_vars = [v for v in new_vars if v not in self.pos]
        return FiniteStructure(self.domain, self.support + tuple(new_vars), self.constants,
                               {k: (a, t) for k, (a, t) in self.functions.items()},
                               {k: (a, t) for k, (a, t) in self.predicates.items()},
                               {k: (fp, pairs) for k, (fp, pairs) in self.transitions.items()},
                               self.caps)

    def cylindrify(self, mask: int, big: "FiniteStructure") -> int:
        """Lift a state set to a structure whose support extends ours at the end."""
        if big.support[:self.nv] != self.support:
            raise EvalError("support is not a prefix of the extended support")
        block = big.size // self.size
        ones = (1 << block) - 1
        out = 0
        for i in bits(mask):
            out |= ones << (i * block)
        return out

    def swap_perm(self, x: str, y: str) -> list:
        key = (x, y)
        if key not in self._perm_cache:
            for v in (x, y):
                if v not in self.pos:
                    raise EvalError(f"renamed variable {v} is not in the support")
            px, py = self.pos[x], self.pos[y]
            perm = []
            for st in self.states:
                s = list(st)
                s[px], s[py] = s[py], s[px]
                perm.append(self.index(s))
            self._perm_cache[key] = perm
        return self._perm_cache[key]

    def swap_mask(self, mask: int, x: str, y: str) -> int:
        perm = self.swap_perm(x, y)
        out = 0
        for i in bits(mask):
            out |= 1 << perm[i]
        return out

    # ------------------------------------------------------------ terms and literals
    def eval_term_idx(self, st: tuple, t) -> int:
        if isinstance(t, Var):
            if t.name not in self.pos:
                raise EvalError(f"variable {t.name} is not in the support")
            return st[self.pos[t.name]]
        if isinstance(t, Const):
            if t.name not in self.constants:
                raise EvalError(f"constant {t.name} is not interpreted")
            return self.elem[self.constants[t.name]]
        if t.fn not in self.functions:
            raise EvalError(f"function {t.fn} is not interpreted")
        arity, table = self.functions[t.fn]
        if arity != len(t.args):
            raise EvalError(f"function {t.fn} has arity {arity}")
        args = tuple(self.domain[self.eval_term_idx(st, a)] for a in t.args)
        return self.elem[table[args]]

    def eval_term(self, state: dict, t) -> str:
        return self.domain[self.eval_term_idx(self.states[self.index(state)], t)]

    def lit_mask(self, lit: Lit) -> int:
        m = self._lit_cache.get(lit)
        if m is not None:
            return m
        a = lit.atom
        if a.pred == "=":
            test = lambda st: self.eval_term_idx(st, a.args[0]) == self.eval_term_idx(st, a.args[1])
        else:
            if a.pred not in self.predicates:
                raise EvalError(f"predicate {a.pred} is not interpreted")
            arity, rows = self.predicates[a.pred]
            if arity != len(a.args):
                raise EvalError(f"predicate {a.pred} has arity {arity}")
            test = lambda st: tuple(self.domain[self.eval_term_idx(st, t)] for t in a.args) in rows
        m = 0
        for i, st in enumerate(self.states):
            if test(st):
                m |= 1 << i
        if not lit.positive:
            m = self.full ^ m
        self._lit_cache[lit] = m
        return m

    # ------------------------------------------------------------ transitions
    def successors(self, action) -> list:
        """Per state, the bitset of successor states."""
        got = self._succ_cache.get(action)
        if got is not None:
            return got
        if isinstance(action, Evolve):
            raise EvalError("ODE actions have no finite-structure semantics")
        if isinstance(action, Named) and action.tags:
            base = self.successors(Named(action.name, action.tags[:-1]))
            x, y = action.tags[-1]
            perm = self.swap_perm(x, y)
            succ = [0] * self.size
            for s in range(self.size):
                succ[perm[s]] = self.swap_mask(base[s], x, y)
        elif isinstance(action, Named):
            if action.name not in self.transitions:
                raise EvalError(f"action {action.name} is not interpreted")
            fp, pairs = self.transitions[action.name]
            fpos = [self.pos[v] for v in fp]
            table = {}
            for p, q in pairs:
                key = tuple(self.elem[p[v]] for v in fp)
                table.setdefault(key, []).append(tuple(self.elem[q[v]] for v in fp))
            succ = []
            for st in self.states:
                m = 0
                for post in table.get(tuple(st[k] for k in fpos), ()):
                    s2 = list(st)
                    for k, e in zip(fpos, post):
                        s2[k] = e
                    m |= 1 << self.index(s2)
                succ.append(m)
        elif isinstance(action, Assign):
            if action.var not in self.pos:
                raise EvalError(f"assignment target {action.var} is not in the support")
            w = self.weight[action.var]
            k = self.pos[action.var]
            succ = []
            for i, st in enumerate(self.states):
                v = self.eval_term_idx(st, action.term)
                succ.append(1 << (i + (v - st[k]) * w))
        elif isinstance(action, Havoc):
            if action.var not in self.pos:
                raise EvalError(f"assignment target {action.var} is not in the support")
            w = self.weight[action.var]
            k = self.pos[action.var]
            succ = []
            for i, st in enumerate(self.states):
                base = i - st[k] * w
                m = 0
                for e in range(self.nd):
                    m |= 1 << (base + e * w)
                succ.append(m)
        else:
            raise EvalError(f"unknown action {action!r}")
        self._succ_cache[action] = succ
        return succ

    def relation(self, action) -> set:
        succ = self.successors(action)
        return {(s, t) for s in range(self.size) for t in bits(succ[s])}

    def pre(self, action, D: int) -> int:
        """States with some successor in D."""
        out = 0
        for s, m in enumerate(self.successors(action)):
            if m & D:
                out |= 1 << s
        return out

    def pre_all(self, action, D: int) -> int:
        """States all of whose successors lie in D."""
        bad = self.full ^ D
        out = 0
        for s, m in enumerate(self.successors(action)):
            if not m & bad:
                out |= 1 << s
        return out


# ---------------------------------------------------------------- fixpoints

def lfp(f: Callable[[int], int], size: int) -> int:
    """Least fixpoint by Kleene iteration from the empty set."""
    D = 0
    for _ in range(size + 2):
        N = f(D)
        if N == D:
            return D
        if D & ~N:
            raise NonMonotone("iteration decreased: operator is not monotone")
        D = N
    raise NonMonotone("iteration did not stabilise within |S|+1 steps")


def gfp(f: Callable[[int], int], size: int) -> int:
    full = (1 << size) - 1
    D = full
    for _ in range(size + 2):
        N = f(D)
        if N == D:
            return D
        if N & ~D:
            raise NonMonotone("iteration increased: operator is not monotone")
        D = N
    raise NonMonotone("iteration did not stabilise within |S|+1 steps")


def lfp_by_intersection(f: Callable[[int], int], size: int) -> int:
    """Intersection of all pre-fixpoints; exhaustive, for small spaces only."""
    full = (1 << size) - 1
    out = full
    for D in range(1 << size):
        if f(D) & ~D == 0:
            out &= D
    return out


def gfp_by_union(f: Callable[[int], int], size: int) -> int:
    out = 0
    for D in range(1 << size):
        if D & ~f(D) == 0:
            out |= D
    return out


# ---------------------------------------------------------------- evaluation

def _lookup(A: FiniteStructure, val: dict, v: PVar) -> int:
    if v.base not in val:
        raise EvalError(f"propositional variable {v.base} has no value")
    m = val[v.base]
    for x, y in v.tags:
        m = A.swap_mask(m, x, y)
    return A.full ^ m if v.barred else m


def _bind(A: FiniteStructure, val: dict, v: PVar, D: int) -> dict:
    inner = dict(val)
    inner[v.base] = A.full ^ D if v.barred else D
    return inner


def eval_mu(A: FiniteStructure, val: Optional[dict], phi) -> int:
    """Denotation of a mu-calculus formula as a bitset of state indices."""
    val = val or {}
    if isinstance(phi, Lit):
        return A.lit_mask(phi)
    if isinstance(phi, PVar):
        return _lookup(A, val, phi)
    if isinstance(phi, Or):
        return eval_mu(A, val, phi.left) | eval_mu(A, val, phi.right)
    if isinstance(phi, And):
        left = eval_mu(A, val, phi.left)
        return left & eval_mu(A, val, phi.right) if left else 0
    if isinstance(phi, Dia):
        return A.pre(phi.action, eval_mu(A, val, phi.body))
    if isinstance(phi, Box):
        return A.pre_all(phi.action, eval_mu(A, val, phi.body))
    if isinstance(phi, Mu):
        return lfp(lambda D: eval_mu(A, _bind(A, val, phi.var, D), phi.body), A.size)
    if isinstance(phi, Nu):
        return gfp(lambda D: eval_mu(A, _bind(A, val, phi.var, D), phi.body), A.size)
    raise EvalError(f"not a mu-calculus formula: {type(phi).__name__}")


def eval_gl(A: FiniteStructure, val: Optional[dict], phi) -> int:
    val = val or {}
    if isinstance(phi, Lit):
        return A.lit_mask(phi)
    if isinstance(phi, PVar):
        return _lookup(A, val, phi)
    if isinstance(phi, Not):
        return A.full ^ eval_gl(A, val, phi.body)
    if isinstance(phi, Or):
        return eval_gl(A, val, phi.left) | eval_gl(A, val, phi.right)
    if isinstance(phi, Play):
        return eval_game(A, val, phi.game, eval_gl(A, val, phi.body))
    raise EvalError(f"not a game-logic formula: {type(phi).__name__}")


def eval_game(A: FiniteStructure, val: Optional[dict], g, D: int) -> int:
    """States from which the angel can force the game g to end in D."""
    val = val or {}
    if isinstance(g, Act):
        return A.pre(g.action, D)
    if isinstance(g, Test):
        return eval_gl(A, val, g.formula) & D
    if isinstance(g, Choice):
        return eval_game(A, val, g.left, D) | eval_game(A, val, g.right, D)
    if isinstance(g, Seq):
        return eval_game(A, val, g.left, eval_game(A, val, g.right, D))
    if isinstance(g, Star):
        return lfp(lambda Z: D | eval_game(A, val, g.game, Z), A.size)
    if isinstance(g, Dual):
        return A.full ^ eval_game(A, val, g.game, A.full ^ D)
    raise EvalError(f"not a game: {type(g).__name__}")


def evaluate(A: FiniteStructure, val: Optional[dict], phi, logic: str) -> int:
    return eval_mu(A, val, phi) if logic == "mu" else eval_gl(A, val, phi)


def is_valid_on(A: FiniteStructure, phi, logic: str = "mu", val: Optional[dict] = None) -> bool:
    return evaluate(A, val, phi, logic) == A.full


def cylindrify_valuation(A: FiniteStructure, val: dict, big: FiniteStructure) -> dict:
    return {k: A.cylindrify(m, big) for k, m in val.items()}

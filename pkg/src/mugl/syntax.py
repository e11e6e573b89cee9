"""Abstract syntax for the first-order modal mu-calculus and first-order game logic.

Both logics share terms, literals and propositional variables.  Mu-calculus
formulas are built from ``Or``, ``And``, ``Dia``, ``Box``, ``Mu`` and ``Nu``;
game-logic formulas from ``Not``, ``Or`` and ``Play`` (the diamond over a game).
Sugar (demonic choice, demonic repetition, game box, implication,
equivalence, true, false) lives in separate node classes that ``desugar``
expands into the core constructors.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union


# ---------------------------------------------------------------- terms

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    """Constant symbol.  Numerals are constant symbols interpreted by the structure."""
    name: str


@dataclass(frozen=True)
class App:
    fn: str
    args: tuple

    def __post_init__(self):
        if not isinstance(self.args, tuple):
            object.__setattr__(self, "args", tuple(self.args))


Term = Union[Var, Const, App]

# infix arithmetic symbols the parser and printer know about; "neg" is unary minus
INFIX = {"+": 1, "-": 1, "*": 2, "/": 2}


def term_vars(t: Term) -> set:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, Const):
        return set()
    out = set()
    for a in t.args:
        out |= term_vars(a)
    return out


def term_symbols(t: Term, funcs: dict, consts: set) -> None:
    if isinstance(t, Const):
        consts.add(t.name)
    elif isinstance(t, App):
        funcs[t.fn] = len(t.args)
        for a in t.args:
            term_symbols(a, funcs, consts)


# ---------------------------------------------------------------- literals

RELOPS = ("=", "<=", "<", ">=", ">")


@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple = ()

    def __post_init__(self):
        if not isinstance(self.args, tuple):
            object.__setattr__(self, "args", tuple(self.args))
        if self.pred in RELOPS and len(self.args) != 2:
            raise ValueError(f"relation {self.pred} takes two arguments")


@dataclass(frozen=True)
class Lit:
    atom: Atom
    positive: bool = True

    def negate(self) -> "Lit":
        return Lit(self.atom, not self.positive)


def eq(s: Term, t: Term, positive: bool = True) -> Lit:
    return Lit(Atom("=", (s, t)), positive)


# ---------------------------------------------------------------- propositional variables

def _norm_tag(x: str, y: str) -> tuple:
    return (x, y) if x <= y else (y, x)


def add_tag(tags: tuple, x: str, y: str) -> tuple:
    """Append the swap x<->y to a tag list; a repeated swap cancels."""
    tag = _norm_tag(x, y)
    if x == y:
        return tags
    if tags and tags[-1] == tag:
        return tags[:-1]
    return tags + (tag,)


@dataclass(frozen=True)
class PVar:
    """Propositional variable X, its bar, optionally carrying rename tags."""
    base: str
    barred: bool = False
    tags: tuple = ()

    def __post_init__(self):
        if not isinstance(self.tags, tuple):
            object.__setattr__(self, "tags", tuple(tuple(t) for t in self.tags))

    def bar(self) -> "PVar":
        return PVar(self.base, not self.barred, self.tags)

    @property
    def tagged(self) -> bool:
        return bool(self.tags)

    def key(self) -> tuple:
        return (self.base, self.barred)


# ---------------------------------------------------------------- actions

@dataclass(frozen=True)
class Named:
    """Uninterpreted action symbol; its footprint comes from the signature or structure."""
    name: str
    tags: tuple = ()

    def __post_init__(self):
        if not isinstance(self.tags, tuple):
            object.__setattr__(self, "tags", tuple(tuple(t) for t in self.tags))


@dataclass(frozen=True)
class Assign:
    var: str
    term: Term


@dataclass(frozen=True)
class Havoc:
    """Nondeterministic assignment x := *."""
    var: str


@dataclass(frozen=True)
class Evolve:
    """ODE x' = theta (simultaneous) with an optional first-order constraint."""
    eqs: tuple
    constraint: Optional["MuFormula"] = None

    def __post_init__(self):
        eqs = tuple((x, t) for x, t in self.eqs)
        object.__setattr__(self, "eqs", eqs)
        names = [x for x, _ in eqs]
        if not names:
            raise ValueError("ODE needs at least one equation")
        if len(set(names)) != len(names):
            raise ValueError("ODE variables must be distinct")

    @property
    def vars(self) -> tuple:
        return tuple(x for x, _ in self.eqs)


Action = Union[Named, Assign, Havoc, Evolve]


# ---------------------------------------------------------------- formulas

@dataclass(frozen=True)
class Or:
    left: object
    right: object


@dataclass(frozen=True)
class And:
    left: object
    right: object


@dataclass(frozen=True)
class Dia:
    action: Action
    body: object


@dataclass(frozen=True)
class Box:
    action: Action
    body: object


@dataclass(frozen=True)
class Mu:
    var: PVar
    body: object


@dataclass(frozen=True)
class Nu:
    var: PVar
    body: object


@dataclass(frozen=True)
class Not:
    body: object


@dataclass(frozen=True)
class Play:
    """Game-logic diamond <game> body."""
    game: object
    body: object


MuFormula = Union[Lit, PVar, Or, And, Dia, Box, Mu, Nu]
GlFormula = Union[Lit, PVar, Not, Or, Play]


# ---------------------------------------------------------------- games

@dataclass(frozen=True)
class Act:
    action: Action


@dataclass(frozen=True)
class Test:
    formula: object


@dataclass(frozen=True)
class Choice:
    left: object
    right: object


@dataclass(frozen=True)
class Seq:
    left: object
    right: object


@dataclass(frozen=True)
class Star:
    game: object


@dataclass(frozen=True)
class Dual:
    game: object


Game = Union[Act, Test, Choice, Seq, Star, Dual]


# ---------------------------------------------------------------- sugar

@dataclass(frozen=True)
class DChoice:
    left: object
    right: object


@dataclass(frozen=True)
class DStar:
    game: object


@dataclass(frozen=True)
class GBox:
    game: object
    body: object


@dataclass(frozen=True)
class Implies:
    left: object
    right: object


@dataclass(frozen=True)
class Iff:
    left: object
    right: object


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Bot:
    pass


SUGAR = (DChoice, DStar, GBox, Implies, Iff, Top, Bot)

# the literal whose excluded middle is truth; every structure interprets 0
REFL = Lit(Atom("=", (Const("0"), Const("0"))))
TRUE = Or(REFL, REFL.negate())
FALSE = And(REFL, REFL.negate())
GL_FALSE = Not(Or(REFL.negate(), REFL))


# ---------------------------------------------------------------- negation

def bar(phi):
    """Syntactic negation of a mu-calculus formula (De Morgan dual)."""
    if isinstance(phi, Lit):
        return phi.negate()
    if isinstance(phi, PVar):
        return phi.bar()
    if isinstance(phi, Or):
        return And(bar(phi.left), bar(phi.right))
    if isinstance(phi, And):
        return Or(bar(phi.left), bar(phi.right))
    if isinstance(phi, Dia):
        return Box(phi.action, bar(phi.body))
    if isinstance(phi, Box):
        return Dia(phi.action, bar(phi.body))
    if isinstance(phi, Mu):
        return Nu(phi.var.bar(), bar(phi.body))
    if isinstance(phi, Nu):
        return Mu(phi.var.bar(), bar(phi.body))
    raise TypeError(f"not a mu-calculus formula: {phi!r}")


def gnot(phi):
    """Game-logic negation, folded into literals and variables; an involution."""
    if isinstance(phi, Lit):
        return phi.negate()
    if isinstance(phi, PVar):
        return phi.bar()
    if isinstance(phi, Not):
        return phi.body
    return Not(phi)


def gand(a, b):
    return Not(Or(gnot(a), gnot(b)))


def gl_norm(phi):
    """Collapse double negations and negated literals/variables in a game-logic formula."""
    if isinstance(phi, (Lit, PVar)):
        return phi
    if isinstance(phi, Not):
        return gnot(gl_norm(phi.body))
    if isinstance(phi, Or):
        return Or(gl_norm(phi.left), gl_norm(phi.right))
    if isinstance(phi, Play):
        return Play(game_norm(phi.game), gl_norm(phi.body))
    raise TypeError(f"not a game-logic formula: {phi!r}")


def game_norm(g):
    if isinstance(g, Act):
        return g
    if isinstance(g, Test):
        return Test(gl_norm(g.formula))
    if isinstance(g, (Choice, Seq)):
        return type(g)(game_norm(g.left), game_norm(g.right))
    return type(g)(game_norm(g.game))


# ---------------------------------------------------------------- desugaring

def desugar(node, logic: str = "gl"):
    """Expand every sugar node below ``node`` into core constructors."""
    if isinstance(node, Top):
        return TRUE
    if isinstance(node, Bot):
        return FALSE if logic == "mu" else GL_FALSE
    if isinstance(node, Implies):
        a, b = desugar(node.left, logic), desugar(node.right, logic)
        return Or(bar(a), b) if logic == "mu" else Or(gnot(a), b)
    if isinstance(node, Iff):
        a, b = desugar(node.left, logic), desugar(node.right, logic)
        if logic == "mu":
            return And(Or(bar(a), b), Or(bar(b), a))
        return gand(Or(gnot(a), b), Or(gnot(b), a))
    if isinstance(node, DChoice):
        return Dual(Choice(Dual(desugar(node.left, logic)), Dual(desugar(node.right, logic))))
    if isinstance(node, DStar):
        return Dual(Star(Dual(desugar(node.game, logic))))
    if isinstance(node, GBox):
        return Play(Dual(desugar(node.game, logic)), desugar(node.body, logic))
    if isinstance(node, (Lit, PVar, Var, Const, App, Named, Assign, Havoc)):
        return node
    if isinstance(node, Evolve):
        c = None if node.constraint is None else desugar(node.constraint, "mu")
        return Evolve(node.eqs, c)
    if isinstance(node, (Or, And)):
        return type(node)(desugar(node.left, logic), desugar(node.right, logic))
    if isinstance(node, (Dia, Box)):
        return type(node)(desugar(node.action, logic), desugar(node.body, logic))
    if isinstance(node, (Mu, Nu)):
        return type(node)(node.var, desugar(node.body, logic))
    if isinstance(node, Not):
        return Not(desugar(node.body, logic))
    if isinstance(node, Play):
        return Play(desugar(node.game, logic), desugar(node.body, logic))
    if isinstance(node, Act):
        return Act(desugar(node.action, logic))
    if isinstance(node, Test):
        return Test(desugar(node.formula, logic))
    if isinstance(node, (Choice, Seq)):
        return type(node)(desugar(node.left, logic), desugar(node.right, logic))
    if isinstance(node, (Star, Dual)):
        return type(node)(desugar(node.game, logic))
    raise TypeError(f"cannot desugar {node!r}")


def mu_implies(a, b):
    return Or(bar(a), b)


def mu_iff(a, b):
    return And(Or(bar(a), b), Or(bar(b), a))


def gl_implies(a, b):
    return Or(gnot(a), b)


def gl_iff(a, b):
    return gand(Or(gnot(a), b), Or(gnot(b), a))


def split_implies(phi, logic: str):
    """Read a disjunction as an implication; returns (antecedent, consequent) or None."""
    if not isinstance(phi, Or):
        return None
    neg = bar if logic == "mu" else gnot
    return neg(phi.left), phi.right


def split_iff(phi, logic: str):
    """Recognise the desugared shape of an equivalence; returns (lhs, rhs) or None."""
    if logic == "mu":
        if not isinstance(phi, And):
            return None
        l, r = phi.left, phi.right
    else:
        if not (isinstance(phi, Not) and isinstance(phi.body, Or)):
            return None
        l, r = gnot(phi.body.left), gnot(phi.body.right)
    a = split_implies(l, logic)
    b = split_implies(r, logic)
    if a is None or b is None:
        return None
    same = (lambda u, v: u == v) if logic == "mu" else (lambda u, v: gl_norm(u) == gl_norm(v))
    if same(a[0], b[1]) and same(a[1], b[0]):
        return a
    return None


# ---------------------------------------------------------------- rank

def rank(x) -> int:
    """Termination measure for the game-to-mu translation."""
    if isinstance(x, (Lit, PVar, Act)):
        return 0
    if isinstance(x, Not):
        return rank(x.body) + 1
    if isinstance(x, Or):
        return rank(x.left) + rank(x.right) + 1
    if isinstance(x, Play):
        return rank(x.game) + rank(x.body) + 1
    if isinstance(x, Test):
        return rank(x.formula)
    if isinstance(x, Choice):
        return max(rank(x.left), rank(x.right)) + 1
    if isinstance(x, Seq):
        return rank(x.left) + rank(x.right) + 2
    if isinstance(x, (Dual, Star)):
        return rank(x.game) + 2
    raise TypeError(f"rank is defined for game-logic syntax only: {x!r}")


# ---------------------------------------------------------------- traversals

def is_mu(phi) -> bool:
    if isinstance(phi, (Lit, PVar)):
        return True
    if isinstance(phi, (Or, And)):
        return is_mu(phi.left) and is_mu(phi.right)
    if isinstance(phi, (Dia, Box)):
        return is_mu(phi.body)
    if isinstance(phi, (Mu, Nu)):
        return is_mu(phi.body)
    return False


def is_gl(phi) -> bool:
    if isinstance(phi, (Lit, PVar)):
        return True
    if isinstance(phi, Not):
        return is_gl(phi.body)
    if isinstance(phi, Or):
        return is_gl(phi.left) and is_gl(phi.right)
    if isinstance(phi, Play):
        return is_game(phi.game) and is_gl(phi.body)
    return False


def is_game(g) -> bool:
    if isinstance(g, Act):
        return True
    if isinstance(g, Test):
        return is_gl(g.formula)
    if isinstance(g, (Choice, Seq)):
        return is_game(g.left) and is_game(g.right)
    if isinstance(g, (Star, Dual)):
        return is_game(g.game)
    return False


def subformulas(x):
    """Yield every formula, game, action and term node below ``x`` (pre-order)."""
    yield x
    if isinstance(x, Lit):
        for a in x.atom.args:
            yield from subformulas(a)
    elif isinstance(x, App):
        for a in x.args:
            yield from subformulas(a)
    elif isinstance(x, (Or, And, Choice, Seq)):
        yield from subformulas(x.left)
        yield from subformulas(x.right)
    elif isinstance(x, (Dia, Box)):
        yield from subformulas(x.action)
        yield from subformulas(x.body)
    elif isinstance(x, (Mu, Nu, Not)):
        yield from subformulas(x.body)
    elif isinstance(x, Play):
        yield from subformulas(x.game)
        yield from subformulas(x.body)
    elif isinstance(x, Act):
        yield from subformulas(x.action)
    elif isinstance(x, Test):
        yield from subformulas(x.formula)
    elif isinstance(x, (Star, Dual)):
        yield from subformulas(x.game)
    elif isinstance(x, Assign):
        yield from subformulas(x.term)
    elif isinstance(x, Evolve):
        for _, t in x.eqs:
            yield from subformulas(t)
        if x.constraint is not None:
            yield from subformulas(x.constraint)


def actions_of(x) -> list:
    return [n for n in subformulas(x) if isinstance(n, (Named, Assign, Havoc, Evolve))]


def all_pvars(x) -> set:
    """Base names of every propositional variable occurring anywhere, binders included."""
    out = set()
    for n in subformulas(x):
        if isinstance(n, PVar):
            out.add(n.base)
        elif isinstance(n, (Mu, Nu)):
            out.add(n.var.base)
    return out


def action_vars(a, footprints: Optional[dict] = None) -> Optional[set]:
    """Object variables an action may read or write; None if a footprint is unknown."""
    if isinstance(a, Assign):
        return {a.var} | term_vars(a.term)
    if isinstance(a, Havoc):
        return {a.var}
    if isinstance(a, Evolve):
        out = set(a.vars)
        for _, t in a.eqs:
            out |= term_vars(t)
        if a.constraint is not None:
            out |= ovars(a.constraint)
        return out
    if isinstance(a, Named):
        if footprints is None or a.name not in footprints:
            return None
        fp = set(footprints[a.name])
        for x, y in a.tags:
            fp = {y if v == x else x if v == y else v for v in fp}
        return fp
    raise TypeError(a)


def action_writes(a, footprints: Optional[dict] = None) -> Optional[set]:
    if isinstance(a, (Assign, Havoc)):
        return {a.var}
    if isinstance(a, Evolve):
        return set(a.vars)
    return action_vars(a, footprints)


def ovars(x, footprints: Optional[dict] = None) -> set:
    """Object variables mentioned syntactically: terms, assignment targets, ODEs, tags.

    Named actions contribute their footprint when ``footprints`` knows them.
    """
    out = set()
    for n in subformulas(x):
        if isinstance(n, Var):
            out.add(n.name)
        elif isinstance(n, (Assign, Havoc)):
            out.add(n.var)
        elif isinstance(n, Evolve):
            out |= set(n.vars)
        elif isinstance(n, Named):
            for t in n.tags:
                out |= set(t)
            if footprints and n.name in footprints:
                out |= action_vars(n, footprints)
        elif isinstance(n, PVar):
            for t in n.tags:
                out |= set(t)
    return out


free_ovars = ovars


def signature_of(x) -> dict:
    """Collect predicate, function, constant and named-action symbols used below ``x``."""
    preds, funcs, consts, acts = {}, {}, set(), set()
    for n in subformulas(x):
        if isinstance(n, Lit):
            if n.atom.pred != "=":
                preds[n.atom.pred] = len(n.atom.args)
        elif isinstance(n, App):
            funcs[n.fn] = len(n.args)
        elif isinstance(n, Const):
            consts.add(n.name)
        elif isinstance(n, Named):
            acts.add(n.name)
    return {"predicates": preds, "functions": funcs, "constants": consts, "actions": acts}


@dataclass
class Signature:
    """Declared symbols; named actions map to their footprint variables."""
    predicates: dict
    functions: dict
    actions: dict

    @classmethod
    def empty(cls) -> "Signature":
        return cls({}, {}, {})


# ---------------------------------------------------------------- free variables and well-formedness

def free_pvars(phi, bound: frozenset = frozenset()) -> set:
    """Free occurrences of propositional variables, as written (bar and tags kept)."""
    if isinstance(phi, PVar):
        return set() if phi.base in bound else {phi}
    if isinstance(phi, Lit):
        return set()
    if isinstance(phi, (Or, And)):
        return free_pvars(phi.left, bound) | free_pvars(phi.right, bound)
    if isinstance(phi, (Dia, Box, Not)):
        return free_pvars(phi.body, bound)
    if isinstance(phi, (Mu, Nu)):
        return free_pvars(phi.body, bound | {phi.var.base})
    if isinstance(phi, Play):
        return free_pvars(phi.game, bound) | free_pvars(phi.body, bound)
    if isinstance(phi, Act):
        return set()
    if isinstance(phi, Test):
        return free_pvars(phi.formula, bound)
    if isinstance(phi, (Choice, Seq)):
        return free_pvars(phi.left, bound) | free_pvars(phi.right, bound)
    if isinstance(phi, (Star, Dual)):
        return free_pvars(phi.game, bound)
    raise TypeError(f"free_pvars: unexpected {phi!r}")


def free_bases(phi) -> set:
    return {v.base for v in free_pvars(phi)}


def is_closed(phi) -> bool:
    return not free_pvars(phi)


@dataclass(frozen=True)
class Violation:
    path: str
    message: str

    def __str__(self):
        return f"{self.path or '<root>'}: {self.message}"


def _join(path: str, step: str) -> str:
    return f"{path}.{step}" if path else step


def _check_sig(lit: Lit, sig: Optional[Signature], path: str) -> Optional[Violation]:
    if sig is None:
        return None
    a = lit.atom
    if a.pred not in RELOPS and a.pred in sig.predicates and sig.predicates[a.pred] != len(a.args):
        return Violation(path, f"predicate {a.pred} expects {sig.predicates[a.pred]} arguments")
    stack = list(a.args)
    while stack:
        t = stack.pop()
        if isinstance(t, App):
            if t.fn in sig.functions and sig.functions[t.fn] != len(t.args):
                return Violation(path, f"function {t.fn} expects {sig.functions[t.fn]} arguments")
            stack.extend(t.args)
    return None


def mu_violation(phi, sig: Optional[Signature] = None, path: str = "",
                 scope: Optional[dict] = None) -> Optional[Violation]:
    """First well-formedness violation of a mu-calculus formula, or None.

    A fixpoint body must not mention the bar of its bound variable and
    binders carry no rename tags.
    """
    scope = scope or {}
    if isinstance(phi, Lit):
        return _check_sig(phi, sig, path)
    if isinstance(phi, PVar):
        if phi.base in scope and scope[phi.base] != phi.barred:
            return Violation(path, f"{'~' if phi.barred else ''}{phi.base} occurs with the wrong "
                                   f"polarity inside the fixpoint binding it")
        return None
    if isinstance(phi, (Or, And)):
        return (mu_violation(phi.left, sig, _join(path, "left"), scope)
                or mu_violation(phi.right, sig, _join(path, "right"), scope))
    if isinstance(phi, (Dia, Box)):
        a = phi.action
        if isinstance(a, Named) and sig is not None and sig.actions and a.name not in sig.actions:
            return Violation(_join(path, "action"), f"undeclared action {a.name}")
        if isinstance(a, Evolve) and a.constraint is not None:
            v = mu_violation(a.constraint, sig, _join(path, "action.constraint"), {})
            if v:
                return v
        return mu_violation(phi.body, sig, _join(path, "body"), scope)
    if isinstance(phi, (Mu, Nu)):
        if phi.var.tagged:
            return Violation(path, "a rename-tagged variable cannot be bound")
        inner = dict(scope)
        inner[phi.var.base] = phi.var.barred
        return mu_violation(phi.body, sig, _join(path, "body"), inner)
    return Violation(path, f"not a mu-calculus constructor: {type(phi).__name__}")


def gl_violation(phi, sig: Optional[Signature] = None, path: str = "") -> Optional[Violation]:
    if isinstance(phi, Lit):
        return _check_sig(phi, sig, path)
    if isinstance(phi, PVar):
        return None
    if isinstance(phi, Not):
        if isinstance(phi.body, PVar):
            return Violation(path, "negated variable must be written as its bar")
        return gl_violation(phi.body, sig, _join(path, "body"))
    if isinstance(phi, Or):
        return (gl_violation(phi.left, sig, _join(path, "left"))
                or gl_violation(phi.right, sig, _join(path, "right")))
    if isinstance(phi, Play):
        return (game_violation(phi.game, sig, _join(path, "game"))
                or gl_violation(phi.body, sig, _join(path, "body")))
    return Violation(path, f"not a game-logic constructor: {type(phi).__name__}")


def game_violation(g, sig: Optional[Signature] = None, path: str = "") -> Optional[Violation]:
    if isinstance(g, Act):
        a = g.action
        if isinstance(a, Named) and sig is not None and sig.actions and a.name not in sig.actions:
            return Violation(path, f"undeclared action {a.name}")
        return None
    if isinstance(g, Test):
        return gl_violation(g.formula, sig, _join(path, "test"))
    if isinstance(g, (Choice, Seq)):
        return (game_violation(g.left, sig, _join(path, "left"))
                or game_violation(g.right, sig, _join(path, "right")))
    if isinstance(g, (Star, Dual)):
        return game_violation(g.game, sig, _join(path, "game"))
    return Violation(path, f"not a game constructor: {type(g).__name__}")


def well_formed(x, logic: str = "mu", sig: Optional[Signature] = None) -> Optional[Violation]:
    """None when ``x`` is well formed in ``logic`` ('mu', 'gl' or 'game')."""
    if logic == "mu":
        return mu_violation(x, sig)
    if logic == "gl":
        return gl_violation(x, sig)
    return game_violation(x, sig)

import itertools

import pytest
from hypothesis import given, strategies as st

from mugl import corpus
from mugl.proofkit import Builder, check_proof, format_proof, is_taut, parse_proof, proves
from mugl.proofkit.taut import TooManyAtoms
from mugl.randgen import FREE_NAMES, random_mu
from mugl.semantics import FiniteStructure, eval_mu
from mugl.surface import parse_gl, parse_mu
from mugl.syntax import And, Or, PVar, bar

from conftest import structure_from_seed


def check(text, theory=None):
    return check_proof(parse_proof(text), theory)


# ---------------------------------------------------------------- tautologies

@pytest.mark.parametrize("text,logic,want", [
    ("P | ~P", "mu", True),
    ("<a> P -> <a> P", "mu", True),
    ("<a> P | <a> Q <-> <a> (P | Q)", "mu", False),
    ("mu X. <a> X | nu Y. [a] Y", "mu", True),
    ("mu X. <a> X | P", "mu", False),
    ("<a*> x = 1 | !<a*> x = 1", "gl", True),
])
def test_taut_examples(text, logic, want):
    f = parse_mu(text) if logic == "mu" else parse_gl(text)
    assert is_taut(f, logic) is want


def test_taut_atom_limit():
    f = parse_mu(" | ".join(f"p{i}(x)" for i in range(30)))
    with pytest.raises(TooManyAtoms):
        is_taut(f, "mu")


def _random_prop(rng, depth):
    if depth == 0 or rng.random() < 0.2:
        v = PVar(rng.choice(FREE_NAMES))
        return v.bar() if rng.random() < 0.5 else v
    a, b = _random_prop(rng, depth - 1), _random_prop(rng, depth - 1)
    return Or(a, b) if rng.random() < 0.5 else And(a, b)


@given(st.integers(0, 10 ** 6))
def test_taut_matches_truth_tables(seed):
    # a one-state structure with every 0/1 valuation is exactly a truth table
    import random
    rng = random.Random(seed)
    f = _random_prop(rng, 4)
    one = FiniteStructure(["0"], [])
    table = all(eval_mu(one, dict(zip(FREE_NAMES, bits)), f) == 1
                for bits in itertools.product((0, 1), repeat=len(FREE_NAMES)))
    assert is_taut(f, "mu") == table


@given(st.integers(0, 10 ** 6))
def test_taut_is_sound(seed):
    rng, A = structure_from_seed(seed)
    atoms = [random_mu(rng, A, 2, free=FREE_NAMES) for _ in range(3)]
    f = atoms[0]
    for a in atoms[1:] + [bar(atoms[0]), bar(atoms[1])]:
        f = Or(f, a) if rng.random() < 0.6 else And(f, a)
    if is_taut(f, "mu"):
        for _ in range(3):
            val = {n: rng.getrandbits(A.size) for n in FREE_NAMES}
            assert eval_mu(A, val, f) == A.full


# ---------------------------------------------------------------- individual justifications

def test_mu_unfolding_accepted():
    assert check("%calculus mu\n1. mu X. (p | <a> X) <-> p | <a> mu X. (p | <a> X) ; ax.mu\n").ok


def test_fpmu_capture_rejected_with_reason():
    v = check(corpus.BROKEN.joinpath("fpmu_capture.prf").read_text())
    assert not v.ok and "not free" in v.first_failure.message


def test_three_line_game_logic_proof():
    text = "%calculus gl\n1. p -> p | q ; taut\n2. <a*> p -> <a*> (p | q) ; M 1\n"
    assert check(text).ok


@pytest.mark.parametrize("body,ok", [
    ("1. x = x ; eq", True),
    ("1. x = z -> (p(f(x), x) <-> p(f(z), x)) ; eq", True),
    ("1. x = z -> (p(f(x), x) <-> p(f(z), z)) ; eq", False),
    ("1. x = z -> (x = 1 -> z = 1) ; eq", True),
])
def test_equality_axioms(body, ok):
    assert check("%calculus mu\n" + body + "\n").ok is ok


@pytest.mark.parametrize("body,ok", [
    ("1. <x := *> z = 1 -> z = 1 ; ax.V", True),
    ("1. <x := *> x = 1 -> x = 1 ; ax.V", False),
    ("1. <x := *> P -> P ; ax.V", False),
    ("1. <x := *> <b> z = 1 -> <b> z = 1 ; ax.V", False),
])
def test_vacuous_quantifier(body, ok):
    assert check("%calculus mu\n%action a: z\n" + body + "\n").ok is ok


@pytest.mark.parametrize("body,ok", [
    ("1. <x := 1> x = z <-> <y := *> (y = 1 & y = z) ; ax.assign", True),
    ("1. <y := *> (y = 1 & y = z) <-> <x := 1> x = z ; ax.assign", True),
    ("1. <x := 1> x = z <-> <z := *> (z = 1 & z = z) ; ax.assign", False),
    ("1. <x := f(y)> x = z <-> <y := *> (y = f(y) & y = z) ; ax.assign", False),
])
def test_assignment_axiom(body, ok):
    assert check("%calculus mu\n" + body + "\n").ok is ok


@pytest.mark.parametrize("body,ok", [
    ("1. p(z) -> <x := *> p(z) ; ax.exI", True),
    ("1. p(f(z)) -> <x := *> p(x) ; ax.exI", True),
    ("1. p(f(z)) -> <x := *> p(z) ; ax.exI", False),
    ("1. <a> p(z) -> <x := *> <a> p(x) ; ax.exI", False),
])
def test_existential_introduction(body, ok):
    assert check("%calculus mu\n%action a: z\n" + body + "\n").ok is ok


@pytest.mark.parametrize("body,ok", [
    ("1. <?x = 1> p(x) <-> x = 1 & p(x) ; ax.test", True),
    ("1. <a u b> p(x) <-> <b> p(x) | <a> p(x) ; ax.choice", False),
    ("1. <a; b> p(x) <-> <b> <a> p(x) ; ax.comp", False),
    ("1. <a*> p(x) <-> p(x) | <a*> <a> p(x) ; ax.star", False),
    ("1. <a^d> p(x) <-> !<a> !p(x) ; ax.dual", True),
])
def test_game_axioms(body, ok):
    assert check("%calculus gl\n" + body + "\n").ok is ok


def test_modus_ponens_either_order():
    base = "%calculus mu\n1. P -> Q | P ; taut\n2. (P -> Q | P) -> (~Q -> ~Q) ; taut\n"
    assert check(base + "3. ~Q -> ~Q ; mp 2 1\n").ok
    assert check(base + "3. ~Q -> ~Q ; mp 1 2\n").ok


def test_rules_restricted_to_their_calculus():
    assert not check("%calculus gl\n1. p -> p ; taut\n2. <a> p -> <a> p ; Ma 1\n").ok
    assert not check("%calculus mu\n1. P -> P ; taut\n2. <a> P -> <a> P ; M 1\n").ok


def test_hypotheses_from_theory_argument():
    text = "%calculus mu\n1. p(x) ; hyp 1\n"
    assert not check(text).ok
    assert check(text, [parse_mu("p(x)")]).ok
    assert not check(text, [parse_mu("p(z)")]).ok


def test_proves_goal():
    s = corpus.load_script(corpus.PROOFS / "mu_FPmu.prf")
    assert proves(s, parse_mu("mu X. (P | <a> X) -> mu X. (P | Q | <a> X)"))
    assert not proves(s, parse_mu("mu X. (P | Q | <a> X) -> mu X. (P | <a> X)"))


def test_verdict_reports_every_line():
    v = check("%calculus mu\n1. P ; taut\n2. P | ~P ; taut\n")
    assert [r.ok for r in v.results] == [False, True]
    assert "line 1" in v.report() or "1:" in v.report()


# ---------------------------------------------------------------- corpus

@pytest.mark.parametrize("path", corpus.proof_files(), ids=lambda p: p.stem)
def test_corpus_script_checks(path):
    v = check_proof(corpus.load_script(path))
    assert v.ok, v.report()


@pytest.mark.parametrize("path", corpus.broken_files(), ids=lambda p: p.stem)
def test_broken_script_fails_where_documented(path):
    s = corpus.load_script(path)
    v = check_proof(s)
    assert not v.ok
    assert v.first_failure.num == s.meta["expect_fail"]


def test_corpus_is_large_enough():
    assert len(corpus.proof_files()) >= 25
    assert len(corpus.broken_files()) >= 10


def test_generated_scripts_are_current():
    for name, script in corpus.generated_scripts().items():
        assert (corpus.PROOFS / f"{name}.prf").read_text() == format_proof(script), name


def test_format_parse_roundtrip():
    for p in corpus.proof_files() + corpus.broken_files():
        s = corpus.load_script(p)
        again = parse_proof(format_proof(s))
        assert again.lines == s.lines and again.meta == s.meta and again.footprints == s.footprints


def test_builder_chain():
    b = Builder("mu")
    k1 = b.add(parse_mu("P -> P | Q"), "taut")
    k2 = b.add(parse_mu("Q -> P | Q"), "taut")
    b.chain([k1, k2], parse_mu("P | Q -> P | Q"))
    assert check_proof(b.script()).ok

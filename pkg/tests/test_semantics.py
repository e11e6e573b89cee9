import pytest
from hypothesis import given, strategies as st

from mugl.randgen import FREE_NAMES, random_game, random_mu, random_valuation
from mugl.semantics import (
    Caps, EvalError, FiniteStructure, StructureError, eval_game, eval_gl, eval_mu, gfp,
    gfp_by_union, is_valid_on, lfp, lfp_by_intersection,
)
from mugl.surface import parse_action, parse_game, parse_gl, parse_mu, parse_term
from mugl.syntax import DChoice, bar, desugar

from conftest import structure_from_seed


def test_enumerate_states():
    A = FiniteStructure(["0", "1"], ["x"])
    assert A.enumerate_states() == [{"x": "0"}, {"x": "1"}]
    assert FiniteStructure(["0", "1", "2"], ["x", "y"]).size == 9
    assert FiniteStructure(["0", "1"], []).size == 1


def test_state_cap():
    with pytest.raises(StructureError):
        FiniteStructure(["0", "1", "2", "3"], list("abcdefgh"), caps=Caps(max_states=1000))


def test_eval_term():
    A = FiniteStructure(["0", "1"], ["x"], {"0": "0", "1": "1"}, {"f": (1, {("0",): "1", ("1",): "0"})})
    assert A.eval_term({"x": "1"}, parse_term("x")) == "1"
    assert A.eval_term({"x": "0"}, parse_term("0")) == "0"
    assert A.eval_term({"x": "0"}, parse_term("f(x)")) == "1"


def test_builtin_transitions(toggle):
    assert len(toggle.relation(parse_action("x := *"))) == 4
    one = toggle.relation(parse_action("x := 1"))
    assert one == {(0, 1), (1, 1)}
    assert toggle.relation(parse_action("tog")) == {(0, 1), (1, 0)}


def test_undeclared_action(toggle):
    with pytest.raises(EvalError):
        eval_mu(toggle, {}, parse_mu("<nope> x = 1"))


def test_fixpoint_engine_examples(toggle):
    assert lfp(lambda D: D, 2) == 0
    assert gfp(lambda D: D, 2) == 0b11
    x1 = toggle.lit_mask(parse_mu("x = 1"))
    x0 = toggle.full ^ x1
    assert lfp(lambda D: x1 | toggle.pre(parse_action("tog"), D), 2) == 0b11
    assert gfp(lambda D: D & x0 & toggle.pre(parse_action("tog"), D), 2) == 0


def test_eval_mu_examples(toggle):
    assert eval_mu(toggle, {}, parse_mu("<tog> x = 1")) == 0b01
    assert eval_mu(toggle, {}, parse_mu("mu X. (x = 1 | <tog> X)")) == 0b11
    assert eval_mu(toggle, {}, parse_mu("nu X. (x = 0 & <tog> X)")) == 0
    assert eval_mu(toggle, {}, parse_mu("<x := *> x = 1")) == 0b11


def test_eval_gl_examples(toggle):
    assert eval_game(toggle, {}, parse_game("tog*"), 0b10) == 0b11
    for D in range(4):
        d = eval_game(toggle, {}, parse_game("tog^d"), D)
        assert d == 3 ^ eval_game(toggle, {}, parse_game("tog"), 3 ^ D)
    p, q = toggle.lit_mask(parse_mu("x = 1")), toggle.lit_mask(parse_mu("x = 1"))
    assert eval_gl(toggle, {}, parse_gl("<?x = 1> x = 1")) == p & q


def test_validity(toggle):
    assert is_valid_on(toggle, parse_mu("x = x"))
    assert is_valid_on(toggle, parse_mu("mu X. (x = 1 | <tog> X) <-> x = 1 | <tog> mu X. (x = 1 | <tog> X)"))
    assert not is_valid_on(toggle, parse_mu("x = 1"))


@given(st.integers(0, 10 ** 6))
def test_negation_is_complement(seed):
    rng, A = structure_from_seed(seed)
    phi = random_mu(rng, A, 5, free=FREE_NAMES)
    val = random_valuation(rng, A)
    assert eval_mu(A, val, bar(phi)) == A.full ^ eval_mu(A, val, phi)


@given(st.integers(0, 10 ** 6))
def test_monotone_in_positive_variables(seed):
    rng, A = structure_from_seed(seed)
    phi = random_mu(rng, A, 5, free=FREE_NAMES, free_polarity="pos")
    val = random_valuation(rng, A)
    d1 = rng.getrandbits(A.size)
    d2 = d1 | rng.getrandbits(A.size)
    assert eval_mu(A, {**val, "P": d1}, phi) & ~eval_mu(A, {**val, "P": d2}, phi) == 0


@given(st.integers(0, 10 ** 6))
def test_games_monotone_and_demonic_choice(seed):
    rng, A = structure_from_seed(seed)
    g1, g2 = random_game(rng, A, 3), random_game(rng, A, 3)
    d1 = rng.getrandbits(A.size)
    d2 = d1 | rng.getrandbits(A.size)
    assert eval_game(A, {}, g1, d1) & ~eval_game(A, {}, g1, d2) == 0
    both = desugar(DChoice(g1, g2))
    assert eval_game(A, {}, both, d1) == eval_game(A, {}, g1, d1) & eval_game(A, {}, g2, d1)


@given(st.integers(0, 10 ** 6))
def test_kleene_matches_lattice_characterization(seed):
    rng, A = structure_from_seed(seed)
    if A.size > 16:
        return
    phi = random_mu(rng, A, 3, bound=("P",))
    f = lambda D: eval_mu(A, {"P": D}, phi)
    assert lfp(f, A.size) == lfp_by_intersection(f, A.size)
    assert gfp(f, A.size) == gfp_by_union(f, A.size)


@given(st.integers(0, 10 ** 6))
def test_unused_support_variable_is_irrelevant(seed):
    rng, A = structure_from_seed(seed)
    phi = random_mu(rng, A, 4, free=FREE_NAMES)
    val = random_valuation(rng, A)
    big = A.extend(["w"])
    bval = {k: A.cylindrify(m, big) for k, m in val.items()}
    assert eval_mu(big, bval, phi) == A.cylindrify(eval_mu(A, val, phi), big)

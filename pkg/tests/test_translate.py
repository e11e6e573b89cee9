import pytest
from hypothesis import given, strategies as st

from mugl.binding import subst_pvar
from mugl.randgen import FREE_NAMES, random_gl, random_mu, random_valuation
from mugl.semantics import eval_game, eval_gl, eval_mu
from mugl.surface import parse_gl, parse_mu, show
from mugl.syntax import Assign, Dual, Mu, Nu, PVar, Seq, Test as GTest, bar, subformulas, well_formed
from mugl.translate import (
    ControlEncoding, Dictionary, TranslationError, assign_game, assign_to_random,
    control_structure, eliminate_modalities, flat, flat_game, gl_eliminate_actions,
    is_lambda_free, sharp,
)

from conftest import structure_from_seed


def test_sharp_examples():
    assert show(sharp(parse_gl("<?p> q"))) == "p & q"
    assert show(sharp(parse_gl("<a*> p"))) == "mu X0. (p | <a> X0)"
    assert show(sharp(parse_gl("<a^d> p"))) == "[a] p"


def test_sharp_two_variable_mode_uses_two_names():
    phi = parse_gl("<(a; b*)*> <(b u a*)*> x = 1")
    out = sharp(phi, two_var=True)
    names = {n.var.base for n in subformulas(out) if isinstance(n, (Mu, Nu))}
    assert len(names) <= 2


def test_flat_literal_and_pvar_clauses():
    enc = ControlEncoding(("X",), ("l0",))
    g = flat_game(parse_mu("p"), Dictionary(), enc)
    assert show(Seq(GTest(parse_gl("p")), Dual(GTest(parse_gl("false"))))) == show(g)
    g = flat_game(PVar("X"), Dictionary(frozenset({"X"})), enc)
    assert show(g) == "l0 := 0; l0 := 1"


def test_flat_rejects_incompatible_dictionary():
    with pytest.raises(TranslationError):
        flat_game(parse_mu("mu X. <a> X"), Dictionary(frozenset({"X"})), ControlEncoding(("X",), ("l0",)))


def test_flat_on_toggle(toggle):
    psi = parse_mu("mu X. (x = 1 | <tog> X)")
    fr = flat(psi, avoid_ovars=toggle.support)
    big = control_structure(toggle, fr.encoding)
    assert eval_gl(big, {}, fr.formula) == big.full
    fr = flat(bar(psi), avoid_ovars=toggle.support)
    assert eval_gl(control_structure(toggle, fr.encoding), {}, fr.formula) == 0


def test_control_structure_needs_distinct_numerals(toggle):
    from mugl.semantics import FiniteStructure
    A = FiniteStructure(["0"], ["x"], {"0": "0", "1": "0"})
    with pytest.raises(TranslationError):
        control_structure(A, ControlEncoding(("X",), ("l0",)))


def test_assignment_elimination_example():
    out = eliminate_modalities(parse_mu("<x := 1> x = 1"), lambda a: isinstance(a, Assign), assign_to_random)
    assert show(out) == "<y0 := *> (y0 = 1 & y0 = 1)"


def test_identity_elimination():
    f = parse_mu("<x := 1> x = 1")
    assert eliminate_modalities(f, lambda a: False, assign_to_random) == f


def test_elimination_under_fixpoint_preserves_denotation(toggle):
    phi = parse_mu("mu X. (x = 1 | <x := 0> <tog> X)")
    out = eliminate_modalities(phi, lambda a: isinstance(a, Assign), assign_to_random, toggle.support)
    assert is_lambda_free(out, lambda a: isinstance(a, Assign))
    big = toggle.extend(["y0"])
    assert eval_mu(big, {}, out) == toggle.cylindrify(eval_mu(toggle, {}, phi), big)


def test_game_elimination_of_assignments(toggle):
    phi = parse_gl("<(x := 1)*> x = 1")
    out = gl_eliminate_actions(phi, lambda a: isinstance(a, Assign), assign_game)
    assert eval_gl(toggle, {}, out) == eval_gl(toggle, {}, phi)
    assert show(out) == "<(x := *; ?x = 1)*> x = 1"


@given(st.integers(0, 10 ** 6))
def test_sharp_preserves_denotation(seed):
    rng, A = structure_from_seed(seed)
    phi = random_gl(rng, A, 5, FREE_NAMES)
    val = random_valuation(rng, A)
    out = sharp(phi)
    assert well_formed(out) is None
    assert eval_gl(A, val, phi) == eval_mu(A, val, out)
    assert eval_mu(A, val, sharp(phi, two_var=True)) == eval_mu(A, val, out)


@given(st.integers(0, 10 ** 6))
def test_flat_preserves_denotation(seed):
    rng, A = structure_from_seed(seed)
    psi = random_mu(rng, A, 4)
    fr = flat(psi, avoid_ovars=A.support)
    big = control_structure(A, fr.encoding)
    assert eval_gl(big, {}, fr.formula) == A.cylindrify(eval_mu(A, {}, psi), big)


@given(st.integers(0, 10 ** 6))
def test_sharp_commutes_with_substitution(seed):
    rng, A = structure_from_seed(seed)
    phi, psi = random_gl(rng, A, 4, FREE_NAMES), random_gl(rng, A, 3, FREE_NAMES)
    P = PVar("P")
    assert sharp(subst_pvar(phi, P, psi, "gl")) == subst_pvar(sharp(phi), P, sharp(psi))


@given(st.integers(0, 10 ** 6))
def test_setting_fresh_controls_is_invisible(seed):
    rng, A = structure_from_seed(seed)
    phi = random_mu(rng, A, 4)
    enc = ControlEncoding(("X", "Y"), ("l0", "l1"))
    big = control_structure(A, enc)
    d = A.cylindrify(eval_mu(A, {}, phi), big)
    assert eval_game(big, {}, enc.set_game("Y"), d) == d

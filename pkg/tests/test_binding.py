import pytest
from hypothesis import given, strategies as st

from mugl.binding import (
    CaptureError, alpha_eq, fresh_ovar, fresh_pvar, free_for, rename_apart, rename_ovar, subst_pvar,
    subst_pvar_renaming,
)
from mugl.randgen import FREE_NAMES, random_mu, random_valuation
from mugl.semantics import eval_mu
from mugl.surface import parse_mu, show
from mugl.syntax import PVar, bar, free_bases

from conftest import structure_from_seed

X, Y = PVar("X"), PVar("Y")


def test_subst_simple():
    assert show(subst_pvar(parse_mu("X | p"), X, parse_mu("q"))) == "q | p"


def test_subst_barred_occurrence_inserts_bar():
    psi = parse_mu("<a> p & Q")
    assert subst_pvar(PVar("X", True), X, psi) == bar(psi)


def test_subst_capture_rejected():
    with pytest.raises(CaptureError):
        subst_pvar(parse_mu("mu Y. (X | Y)"), X, Y)


def test_subst_stops_at_binder():
    f = parse_mu("mu X. (p | <a> X)")
    assert subst_pvar(f, X, parse_mu("q")) == f


def test_subst_renaming_variant_avoids_capture():
    out = subst_pvar_renaming(parse_mu("mu Y. (X | <a> Y)"), X, Y)
    assert out.body.left == Y
    assert out.var != Y


def test_free_for():
    f = parse_mu("mu Y. (X | Y)")
    assert free_for(X, parse_mu("q"), f)
    assert not free_for(X, Y, f)
    assert free_for(X, Y, parse_mu("p"))


def test_rename_ovar_examples():
    assert show(rename_ovar(parse_mu("x = 0"), "x", "y")) == "y = 0"
    assert show(rename_ovar(parse_mu("<x := y> p(x)"), "x", "y")) == "<y := x> p(y)"


def test_rename_tags_free_pvars_only():
    out = rename_ovar(parse_mu("mu X. (Z | <a> X)"), "x", "y")
    assert show(out) == "mu X. (Z{x,y} | <a{x,y}> X)"


def test_fresh_names():
    assert fresh_pvar({"X"}) == "X0"
    assert fresh_ovar({"x", "l0"}) == "l1"
    a = fresh_pvar(set())
    assert fresh_pvar({a}) != a


def test_alpha_eq():
    assert alpha_eq(parse_mu("mu X. <a> X"), parse_mu("mu Y. <a> Y"))
    assert not alpha_eq(parse_mu("mu X. (<a> X | Y)"), parse_mu("mu Y. (<a> Y | Y)"))


@given(st.integers(0, 10 ** 6))
def test_rename_ovar_involution(seed):
    rng, A = structure_from_seed(seed)
    phi = random_mu(rng, A, 5, free=FREE_NAMES)
    assert rename_ovar(rename_ovar(phi, "x", "y"), "x", "y") == phi


@given(st.integers(0, 10 ** 6))
def test_rename_apart_is_alpha_equivalent(seed):
    rng, A = structure_from_seed(seed)
    phi = random_mu(rng, A, 5, free=FREE_NAMES)
    assert alpha_eq(rename_apart(phi), phi)


@given(st.integers(0, 10 ** 6))
def test_semantic_substitution(seed):
    # evaluating phi[psi/P] equals evaluating phi with P bound to psi's denotation
    rng, A = structure_from_seed(seed)
    phi = random_mu(rng, A, 4, free=FREE_NAMES)
    psi = random_mu(rng, A, 3, free=FREE_NAMES)
    P = PVar("P")
    if not free_for(P, psi, phi):
        return
    val = random_valuation(rng, A)
    lhs = eval_mu(A, val, subst_pvar(phi, P, psi))
    rhs = eval_mu(A, {**val, "P": eval_mu(A, val, psi)}, phi)
    assert lhs == rhs


@given(st.integers(0, 10 ** 6))
def test_semantic_renaming_is_state_swap(seed):
    rng, A = structure_from_seed(seed)
    if len(A.support) < 2:
        return
    phi = random_mu(rng, A, 4, free=FREE_NAMES)
    val = random_valuation(rng, A)
    lhs = eval_mu(A, val, rename_ovar(phi, "x", "z"))
    assert lhs == A.swap_mask(eval_mu(A, val, phi), "x", "z")


@given(st.integers(0, 10 ** 6))
def test_substitution_lemmas(seed):
    rng, A = structure_from_seed(seed)
    phi, psi, rho = (random_mu(rng, A, d, free=FREE_NAMES) for d in (4, 3, 3))
    P, Q = PVar("P"), PVar("Q")
    try:
        assert bar(subst_pvar(phi, P, psi)) == subst_pvar(bar(phi), P, psi)
        assert subst_pvar(subst_pvar(phi, P, psi), P, rho) == subst_pvar(phi, P, subst_pvar(psi, P, rho))
        if "P" not in free_bases(rho):
            assert subst_pvar(subst_pvar(phi, P, psi), Q, rho) == \
                subst_pvar(subst_pvar(phi, Q, rho), P, subst_pvar(psi, Q, rho))
    except CaptureError:
        pass

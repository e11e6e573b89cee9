import pytest
from hypothesis import given, strategies as st

from mugl.surface import parse_game, parse_gl, parse_mu, show
from mugl.syntax import (
    Choice, DChoice, Dual, GBox, Lit, Mu, Nu, Or, PVar, Play, Star, Top, bar, desugar, free_pvars,
    gnot, is_closed, ovars, rank, split_iff, split_implies, subformulas, well_formed,
)
from mugl.randgen import FREE_NAMES, random_gl, random_mu

from conftest import structure_from_seed


def test_bar_literal_flips_polarity():
    p = parse_mu("p(x)")
    assert bar(p) == Lit(p.atom, False)


def test_bar_of_least_fixpoint():
    assert show(bar(parse_mu("mu X. (p | X)"))) == "nu ~X. (!p & ~X)"


def test_bar_double_bar_pvar_collapses():
    assert PVar("X").bar().bar() == PVar("X")
    f = parse_mu("<a> X")
    assert bar(bar(f)) == f


def test_gnot_of_pvar_is_barred_pvar():
    assert gnot(PVar("X")) == PVar("X", True)


def test_well_formed_accepts_and_rejects():
    assert well_formed(parse_mu("mu X. (p | X)")) is None
    v = well_formed(parse_mu("mu ~X. (p | X)", check=False))
    assert v is not None
    v = well_formed(parse_mu("mu X. (p | <a> ~X)", check=False))
    assert v is not None and "body" in v.path


@pytest.mark.parametrize("text,r", [("a", 0), ("a; b", 2), ("a*", 2)])
def test_rank_games(text, r):
    assert rank(parse_game(text)) == r


def test_rank_formula():
    assert rank(parse_gl("<a*> p")) == 3


def test_desugar_demonic_choice():
    g = desugar(DChoice(parse_game("a"), parse_game("b")))
    assert g == Dual(Choice(Dual(parse_game("a")), Dual(parse_game("b"))))


def test_desugar_box_and_top():
    assert desugar(GBox(parse_game("a"), parse_gl("p"))) == Play(Dual(parse_game("a")), parse_gl("p"))
    t = desugar(Top(), "mu")
    assert isinstance(t, Or) and t.right == bar(t.left)


def test_free_variables():
    assert free_pvars(parse_mu("mu X. (X | Y)")) == {PVar("Y")}
    assert free_pvars(parse_mu("nu ~X. (p | ~X)")) == set()
    assert ovars(parse_mu("<x := y> x = 0")) == {"x", "y"}


def test_split_implies_and_iff_roundtrip():
    f = parse_mu("P -> Q")
    assert split_implies(f, "mu") == (PVar("P"), PVar("Q"))
    g = parse_gl("x = 1 <-> <a> x = 1")
    l, r = split_iff(g, "gl")
    assert show(l) == "x = 1" and show(r) == "<a> x = 1"


def test_closed():
    assert is_closed(parse_mu("mu X. <a> X"))
    assert not is_closed(parse_mu("<a> X"))


@given(st.integers(0, 10 ** 6))
def test_bar_involution_and_wellformedness(seed):
    rng, A = structure_from_seed(seed)
    phi = random_mu(rng, A, 5, free=FREE_NAMES)
    assert bar(bar(phi)) == phi
    assert well_formed(bar(phi)) is None


@given(st.integers(0, 10 ** 6))
def test_desugar_removes_sugar(seed):
    rng, A = structure_from_seed(seed)
    phi = random_gl(rng, A, 4)
    sugared = Play(DChoice(Star(parse_game("a")), parse_game("b")), GBox(parse_game("a"), phi))
    out = desugar(sugared)
    assert not any(isinstance(n, (DChoice, GBox, Top)) for n in subformulas(out))


def test_mu_nu_constructors_distinct():
    assert Mu(PVar("X"), PVar("X")) != Nu(PVar("X"), PVar("X"))

import json

import pytest
from hypothesis import given, strategies as st

from mugl.proofkit import parse_proof
from mugl.randgen import FREE_NAMES, random_game, random_gl, random_mu
from mugl.semantics import StructureError
from mugl.surface import (
    ParseError, WellFormednessError, parse_game, parse_gl, parse_mu, parse_structure,
    parse_valuation, print_game, print_gl, print_mu, show, structure_to_dict,
)
from mugl.syntax import Dia, Lit, Mu, Named, Or, PVar

from conftest import structure_from_seed


def test_parse_fixpoint():
    f = parse_mu("mu X. (x=1 | <tog> X)")
    assert isinstance(f, Mu) and isinstance(f.body, Or)
    assert isinstance(f.body.left, Lit) and f.body.right == Dia(Named("tog"), PVar("X"))


def test_modalities_bind_short():
    f = parse_mu("<a> p | q")
    assert isinstance(f, Or) and isinstance(f.left, Dia)


def test_wellformedness_error_is_distinct():
    with pytest.raises(WellFormednessError):
        parse_mu("mu ~X. (p | X)")
    with pytest.raises(ParseError) as e:
        parse_mu("mu X. (p |")
    assert e.value.pos >= 0


@pytest.mark.parametrize("text", ["nu X. [a] X", "p & q | r", "mu X0. (p | <a> X0)",
                                  "<x := *> x = 1", "<{x' = 1, y' = -x & x <= 5}> y = 0"])
def test_print_roundtrip_text(text):
    assert show(parse_mu(text)) == text


def test_box_prints_as_dual_in_game_logic():
    assert print_gl(parse_gl("[a] p")) == "<a^d> p"


def test_game_precedence():
    assert print_game(parse_game("a; b u c*")) == "a; b u c*"
    assert print_game(parse_game("(a u b); c")) == "(a u b); c"


@given(st.integers(0, 10 ** 6))
def test_parse_print_identity_mu(seed):
    rng, A = structure_from_seed(seed)
    phi = random_mu(rng, A, 5, free=FREE_NAMES)
    assert parse_mu(print_mu(phi)) == phi


@given(st.integers(0, 10 ** 6))
def test_parse_print_identity_gl(seed):
    rng, A = structure_from_seed(seed)
    phi = random_gl(rng, A, 5, FREE_NAMES)
    assert parse_gl(print_gl(phi)) == phi
    g = random_game(rng, A, 4)
    assert parse_game(print_game(g)) == g


TOGGLE = {"domain": ["0", "1"], "constants": {"0": "0", "1": "1"}, "functions": {},
          "predicates": {}, "support": ["x"],
          "transitions": {"tog": {"footprint": ["x"],
                                  "pairs": [[{"x": "0"}, {"x": "1"}], [{"x": "1"}, {"x": "0"}]]}}}


def test_structure_document():
    A = parse_structure(json.dumps(TOGGLE))
    assert A.size == 2
    assert parse_structure(json.dumps(structure_to_dict(A))).transitions == A.transitions


def test_structure_rejects_undeclared_variable():
    doc = json.loads(json.dumps(TOGGLE))
    doc["transitions"]["tog"]["pairs"][0][1] = {"y": "1"}
    with pytest.raises(StructureError):
        parse_structure(json.dumps(doc))


def test_structure_reports_partial_function():
    doc = json.loads(json.dumps(TOGGLE))
    doc["functions"] = {"f": {"arity": 1, "table": [["0", "1"]]}}
    with pytest.raises(StructureError) as e:
        parse_structure(json.dumps(doc))
    assert "f" in str(e.value)


def test_valuation_document():
    A = parse_structure(json.dumps(TOGGLE))
    val = parse_valuation('{"P": [{"x": "1"}]}', A)
    assert val == {"P": 0b10}


def test_proof_rejects_unknown_token():
    with pytest.raises(ParseError) as e:
        parse_proof("%calculus mu\n1. P | ~P ; tautology\n")
    assert "tautology" in str(e.value)

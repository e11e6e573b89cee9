import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from mugl import corpus
from mugl.acceptance import fd_error
from mugl.differential import (
    Ball, FieldError, NumericConfig, Poly, PolyVec, TrajectoryCert, certify_trajectory,
    constrained_reach, eval_real, g_k_member, jacobian_product, load_field, load_triples, nabla_instance,
    norm_estimate, parse_field, refute_reach, rk4_trajectory, tba_rewrite, there_and_back,
    theta_hat,
)
from mugl.surface import parse_action, parse_mu
from mugl.syntax import App, Const, Evolve, Lit, ovars, well_formed

CONST = parse_field({"vars": ["x"], "field": ["1"]})
LINEAR = parse_field({"vars": ["x"], "field": ["x"]})
ROT = parse_field({"vars": ["x", "y"], "field": ["y", "-x"]})


def field(*comps, vars=("x", "y")):
    return parse_field({"vars": list(vars), "field": list(comps)})


# ---------------------------------------------------------------- polynomials and theta_hat

@pytest.mark.parametrize("F,want", [
    (CONST, ["0"]),
    (LINEAR, ["x"]),
    (ROT, ["-x", "-y"]),
])
def test_theta_hat_examples(F, want):
    assert theta_hat(F) == parse_field({"vars": list(F.vars), "field": want})


def test_theta_hat_quadratic():
    # (x^2 - y, x): d/dx(x^2 - y) * (x^2 - y) + d/dy(x^2 - y) * x = 2x^3 - 2xy - x
    F = field("x * x - y", "x")
    assert theta_hat(F) == field("2 * x * x * x - 2 * x * y - x", "x * x - y")


def test_field_file_formats_agree():
    F, M, _ = load_field(corpus.FIELDS / "quadratic.json")
    assert F == field("x * x - y", "x") and M == 1.5


def test_field_errors():
    with pytest.raises(FieldError):
        field("x", "z")
    with pytest.raises(FieldError):
        field("x / y", "x")
    with pytest.raises(FieldError):
        PolyVec(("x", "x"), (Poly.var(2, 0), Poly.var(2, 1)))
    with pytest.raises(FieldError):
        NumericConfig(norm="taxicab")


coef = st.integers(-3, 3)


@st.composite
def quadratic_fields(draw):
    polys = []
    for _ in range(2):
        d = {(i, j): draw(coef) for i in range(3) for j in range(3) if i + j <= 2}
        polys.append(Poly.make(2, d))
    return PolyVec(("x", "y"), tuple(polys))


points = st.tuples(st.floats(-1, 1), st.floats(-1, 1)).map(np.array)


@given(quadratic_fields(), points)
def test_theta_hat_is_jacobian_times_field(F, z):
    assert np.allclose(theta_hat(F)(z), jacobian_product(F, z), atol=1e-9)


@given(quadratic_fields(), points)
def test_finite_differences_converge_at_first_order(F, z):
    # for a quadratic field the error is exactly h/2 |D^2F[F, F]|, so it shrinks tenfold
    e1, e2 = fd_error(F, [z], 1e-4), fd_error(F, [z], 1e-5)
    assume(e2 > 1e-8)
    assert 5 <= e1 / e2 <= 20


# ---------------------------------------------------------------- norms and G_K

def test_norm_estimates():
    assert norm_estimate(CONST, Ball(2)) == pytest.approx(1.05)
    assert norm_estimate(LINEAR, Ball(2)) == pytest.approx(2.1)
    assert norm_estimate(ROT, Ball(1)) == pytest.approx(1.05, abs=1e-9)


def test_max_norm_configuration():
    cfg = NumericConfig(norm="max")
    assert norm_estimate(ROT, Ball(1), cfg) == pytest.approx(1.05)
    assert norm_estimate(field("x", "y"), Ball(1), cfg) == pytest.approx(1.05)
    assert norm_estimate(field("x", "y"), Ball(1)) == pytest.approx(1.05)
    # the max-norm ball of radius 1 contains (1, 1)
    assert g_k_member(field("0", "0"), Ball(1), [1, 1], [1, 1], 0, cfg)
    assert not g_k_member(field("0", "0"), Ball(1), [1, 1], [1, 1], 0)


def test_dimension_cap():
    F = parse_field({"vars": list("abcd"), "field": ["1"] * 4})
    with pytest.raises(FieldError):
        norm_estimate(F, Ball(1))


@pytest.mark.parametrize("x,y,t,member", [
    (0, 1, 1, True),
    (0, 3, 1, False),
    (0, 1.1, 1, False),
    (0.5, 0.5, 0, True),
    (0.5, 0.6, 0, False),
])
def test_g_k_member_constant_field(x, y, t, member):
    assert g_k_member(CONST, Ball(2), [x], [y], t) is member


def test_g_k_member_rejects_dimension_mismatch():
    with pytest.raises(FieldError):
        g_k_member(ROT, Ball(2), [0], [0], 1)


@pytest.mark.parametrize("F,M,x,y,t,refuted", [
    (CONST, 2, 0, 3, 1, True),
    (CONST, 2, 0, 1, 1, False),
    (LINEAR, 3, 1, 10, 1, True),
    (CONST, 2, 0, 1.5, 1, True),
    (CONST, 2, 0, 1.04, 1, True),
    (LINEAR, 3, 1, math.e, 1, False),
])
def test_refute_examples(F, M, x, y, t, refuted):
    assert refute_reach(F, Ball(M), [x], [y], t) is refuted


# ---------------------------------------------------------------- certificates

def test_rk4_closed_forms():
    e = rk4_trajectory(LINEAR, [1.0], 1.0, 6).samples[-1][0]
    assert abs(e - 2.718281828) < 1e-6
    end = rk4_trajectory(ROT, [1.0, 0.0], 2 * math.pi, 6).samples[-1]
    assert np.linalg.norm(end - [1, 0]) < 1e-5
    c = rk4_trajectory(CONST, [0.0], 1.0, 6)
    assert np.allclose(c.samples[:, 0], np.arange(65) / 64, atol=1e-12)


def test_certify_straight_line():
    cert = TrajectoryCert(np.arange(65)[:, None] / 64, 1.0)
    assert certify_trajectory(CONST, Ball(2), cert).ok
    bad = cert.samples.copy()
    bad[-1] = 3
    v = certify_trajectory(CONST, Ball(2), TrajectoryCert(bad, 1.0))
    assert not v.ok and v.level == 0


def test_certify_standing_still():
    cert = TrajectoryCert(np.full((9, 2), 0.3), 0.0)
    assert certify_trajectory(ROT, Ball(1), cert).ok


def test_certificate_shape():
    with pytest.raises(FieldError):
        certify_trajectory(CONST, Ball(2), TrajectoryCert(np.zeros((6, 1)), 1.0))
    with pytest.raises(FieldError):
        certify_trajectory(CONST, Ball(2), TrajectoryCert(np.zeros((5, 2)), 1.0))


@pytest.mark.parametrize("path", corpus.field_files(), ids=lambda p: p.stem)
def test_corpus_fields(path):
    F, M, doc = load_field(path)
    K = Ball(M)
    for x0 in doc["starts"]:
        for depth in (4, 6, 8):
            cert = rk4_trajectory(F, x0, doc["horizon"], depth)
            assert certify_trajectory(F, K, cert).ok
            assert not refute_reach(F, K, cert.samples[0], cert.samples[-1], cert.t)
    for tr in load_triples(path.with_suffix(".csv"), F.dim):
        assert refute_reach(F, K, tr.x, tr.y, tr.t) == (tr.expected == "unreachable")


# ---------------------------------------------------------------- formula constructors

def _lits(f):
    if isinstance(f, Lit):
        yield f
    for name in ("left", "right", "body"):
        if hasattr(f, name):
            yield from _lits(getattr(f, name))


def test_nabla_well_formed_and_fresh():
    phi = parse_mu("x >= 0 & y0 = t0")
    ode = parse_action("{x' = 1}")
    f, names = nabla_instance(ode, phi)
    assert well_formed(f, "mu") is None
    new = set(names.y) | {names.t, names.m} | set(names.z) | set(names.u)
    assert not new & ovars(phi) and "x" not in new
    assert len(new) == 5


def test_nabla_constant_field_pins_endpoint():
    # with theta_hat = 0 the Taylor conjunct forces y = x + t
    f, n = nabla_instance(parse_action("{x' = 1}"), parse_mu("x >= 0"))
    taylor = [l for l in _lits(f) if isinstance(l.atom.args[0], App)
              and l.atom.args[0].args[0] == Const("4")][0]
    env = {"x": 0.0, n.t: 1.0}
    assert eval_real(taylor, {**env, n.y[0]: 1.0})
    assert not eval_real(taylor, {**env, n.y[0]: 1.001})


def test_nabla_rejects_constrained_ode():
    with pytest.raises(FieldError):
        nabla_instance(parse_action("{x' = 1 & x <= 5}"), parse_mu("x = 5"))


def test_tba_shape():
    out = tba_rewrite(parse_mu("<{x' = 1 & x <= 5}> x = 5"))
    assert out == parse_mu("<t0 := 0> <{x' = 1, t0' = 1}> (x = 5 & [{x' = -1, t0' = -1}] (!t0 >= 0 | x <= 5))", check=False)


def test_tba_fresh_clocks_and_boxes():
    out = tba_rewrite(parse_mu("[{x' = 1 & x <= 5}] <{x' = x & x >= 0}> x = 5"))
    clocks = {e.eqs[-1][0] for e in _evolves(out)}
    assert len(clocks) == 2 and not clocks & {"x"}
    assert all(e.constraint is None for e in _evolves(out))


def _evolves(f):
    if isinstance(getattr(f, "action", None), Evolve):
        yield f.action
    for name in ("left", "right", "body"):
        if hasattr(f, name):
            yield from _evolves(getattr(f, name))


@pytest.mark.parametrize("path", corpus.field_files(), ids=lambda p: p.stem)
def test_trivial_constraint_keeps_reachability(path):
    F, _, doc = load_field(path)
    top = parse_mu("0 = 0")
    for x0 in doc["starts"]:
        a, ok_a = constrained_reach(F, x0, doc["horizon"], top)
        b, ok_b = there_and_back(F, x0, doc["horizon"], top)
        assert ok_a and ok_b and np.allclose(a, b)


def test_there_and_back_sees_the_constraint():
    psi = parse_mu("x <= 5")
    for t, ok in ((4.0, True), (6.0, False)):
        assert constrained_reach(CONST, [0.0], t, psi)[1] is ok
        assert there_and_back(CONST, [0.0], t, psi)[1] is ok

import json

import pytest

from mugl import corpus
from mugl.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_ok(capsys):
    code, out, _ = run(capsys, "parse", "mu X. (P | <a> X)")
    assert code == 0 and out.splitlines() == ["mu X. (P | <a> X)", "OK"]


def test_parse_game_and_gl(capsys):
    assert run(capsys, "parse", "--game", "a* ; b^d")[0] == 0
    assert run(capsys, "parse", "--logic", "gl", "<a*> x = 1")[0] == 0


@pytest.mark.parametrize("text", ["mu X. (P | <a> ~X)", "P |", "<a> P)"])
def test_parse_errors_exit_2(capsys, text):
    code, out, err = run(capsys, "parse", text)
    assert code == 2 and err.startswith("error:")


def test_unknown_subcommand_exit_2(capsys):
    assert run(capsys, "frobnicate")[0] == 2


def test_eval_lists_states(capsys):
    code, out, err = run(capsys, "eval", "--structure", "toggle", "--formula", "<tog> x = 1")
    assert code == 0
    assert out == "{x=0}\n" and "1 of 2 states" in err


def test_eval_nat_needs_bigger_domain(capsys, tmp_path):
    assert run(capsys, "eval", "--structure", "nat", "--formula", "n = 0")[0] == 2
    cfg = tmp_path / "caps.json"
    cfg.write_text(json.dumps({"caps": {"max_domain": 5}}))
    code, out, _ = run(capsys, "--config", str(cfg), "eval", "--structure", "nat",
                       "--formula", "mu X. (n = 0 | <n := n - 1> X)")
    assert code == 0 and len(out.splitlines()) == 5


def test_translate_sharp(capsys):
    code, out, _ = run(capsys, "translate", "--dir", "sharp", "--in", "<a*> p")
    assert code == 0 and out.strip() == "mu X0. (p | <a> X0)"


def test_translate_flat_checked_on_structure(capsys):
    code, _, err = run(capsys, "translate", "--dir", "flat", "--in", "mu X. (x = 1 | <tog> X)",
                       "--structure", "toggle")
    assert code == 0 and "agree" in err


def test_translate_roundtrip_checked(capsys):
    code, _, err = run(capsys, "translate", "--dir", "roundtrip", "--in", "<tog* ; tog^d> x = 0",
                       "--structure", "toggle")
    assert code == 0 and "agree" in err


def test_flat_rejects_open_formula(capsys):
    assert run(capsys, "translate", "--dir", "flat", "--in", "P | <a> P")[0] == 2


def test_reduce(capsys):
    code, out, _ = run(capsys, "reduce", "--strategy", "assign-to-random", "--in", "<x := 1> x = 1")
    assert code == 0 and ":=" in out and "x := 1" not in out


@pytest.mark.parametrize("path", corpus.proof_files()[:5], ids=lambda p: p.stem)
def test_prove_good(capsys, path):
    assert run(capsys, "prove", str(path))[0] == 0


@pytest.mark.parametrize("path", corpus.broken_files()[:5], ids=lambda p: p.stem)
def test_prove_broken_exit_1(capsys, path):
    code, _, err = run(capsys, "prove", str(path))
    assert code == 1 and "line" in err


def test_prove_with_theory(capsys, tmp_path):
    prf = tmp_path / "h.prf"
    prf.write_text("%calculus mu\n1. p(x) ; hyp 1\n")
    th = tmp_path / "t.txt"
    th.write_text("p(x)\n")
    assert run(capsys, "prove", str(prf))[0] == 1
    assert run(capsys, "prove", str(prf), "--theory", str(th))[0] == 0


def test_prove_missing_file(capsys):
    assert run(capsys, "prove", "/nonexistent.prf")[0] == 2


@pytest.mark.parametrize("args", [
    ["dchoice", "a", "b", "x = 1"],
    ["dseq", "a", "b*", "x = 1"],
    ["loop-swap", "a u b", "b u a", "x = 1"],
    ["sharp", str(corpus.PROOFS / "gl_M.prf")],
    ["subst", str(corpus.PROOFS / "mu_FPmu.prf"), "P", "mu W. (R | <a> W)"],
])
def test_derive(capsys, args):
    code, out, _ = run(capsys, "derive", *args)
    assert code == 0 and out.startswith("%calculus")


def test_derive_monotonicity_from_premise(capsys, tmp_path):
    prem = tmp_path / "p.prf"
    prem.write_text("%calculus mu\n1. P | <a> X -> P | Q | <a> X ; taut\n")
    assert run(capsys, "derive", "mmu", str(prem), "X")[0] == 0


def test_derive_wrong_arity(capsys):
    assert run(capsys, "derive", "dchoice", "a")[0] == 2


def test_nabla_and_tba(capsys):
    code, out, _ = run(capsys, "nabla", "--ode", "{x' = 1}", "--post", "x >= 0")
    assert code == 0 and "nu X0." in out
    assert run(capsys, "nabla", "--ode", "a", "--post", "x >= 0")[0] == 2
    code, out, _ = run(capsys, "tba", "--in", "<{x' = 1 & x <= 5}> x = 5")
    assert code == 0 and "&" not in out.split("}")[0]


@pytest.mark.parametrize("path", corpus.field_files(), ids=lambda p: p.stem)
def test_reach_triples(capsys, path):
    code, out, _ = run(capsys, "reach", "--field", str(path), "--triples", str(path.with_suffix(".csv")))
    assert code == 0 and out


def test_reach_single_triple(capsys):
    f = str(corpus.FIELDS / "constant.json")
    assert run(capsys, "reach", "--field", f, "--x", "0", "--y", "3", "--t", "1")[0] == 0
    assert run(capsys, "reach", "--field", f, "--x", "0", "--y", "1", "--t", "1")[0] == 1
    assert run(capsys, "reach", "--field", f, "--mode", "certify", "--x", "0", "--y", "0.5",
               "--t", "0.5")[0] == 0
    assert run(capsys, "reach", "--field", f, "--x", "0,0", "--y", "1", "--t", "1")[0] == 2


def test_config_numeric_override(capsys, tmp_path):
    cfg = tmp_path / "num.json"
    cfg.write_text(json.dumps({"numeric": {"norm": "max"}}))
    f = str(corpus.FIELDS / "rotation.json")
    assert run(capsys, "--config", str(cfg), "reach", "--field", f, "--x", "1.5,1.5",
               "--y", "1.5,1.5", "--t", "0", "--mode", "certify")[0] == 0
    assert run(capsys, "reach", "--field", f, "--x", "1.5,1.5",
               "--y", "1.5,1.5", "--t", "0", "--mode", "certify")[0] == 1


def test_selftest_small(capsys):
    code, out, _ = run(capsys, "selftest", "--only", "1,9", "--count", "50")
    assert code == 0
    assert [l.split()[0] for l in out.splitlines()] == ["PASS", "PASS"]

"""Bundled data: proof scripts, broken scripts, structures and vector fields.

``generated_scripts`` rebuilds the derived-rule expansions and translated
proofs that ``scripts/make_corpus.py`` writes under ``proofs/``.
"""
from __future__ import annotations

from pathlib import Path

from ..proofkit.derived import (
    box_mono_script, choice_swap, dual_choice_axiom, dual_seq_axiom, mono_mu_script,
    mono_nu_script, replace_in_loop,
)
from ..proofkit.script import parse_proof
from ..proofkit.transform import translate_proof_sharp
from ..surface import parse_game, parse_gl, parse_structure
from ..syntax import Named, PVar

ROOT = Path(__file__).parent
PROOFS = ROOT / "proofs"
BROKEN = ROOT / "broken"
STRUCTURES = ROOT / "structures"
FIELDS = ROOT / "fields"


def proof_files() -> list:
    return sorted(PROOFS.glob("*.prf"))


def broken_files() -> list:
    return sorted(BROKEN.glob("*.prf"))


def field_files() -> list:
    return sorted(FIELDS.glob("*.json"))


def load_script(path):
    return parse_proof(Path(path).read_text())


def load_structure(name: str, caps=None):
    p = Path(name)
    if not p.exists():
        p = STRUCTURES / (name if name.endswith(".json") else name + ".json")
    return parse_structure(p.read_text(), caps)


_PREMISES = {
    "Mmu": "%calculus mu\n1. P | <a> X -> P | Q | <a> X ; taut\n",
    "Mnu": "%calculus mu\n1. P & [a] X -> (P | Q) & [a] X ; taut\n",
    "boxMa": "%calculus mu\n1. P -> P | Q ; taut\n",
}


def generated_scripts() -> dict:
    """Name -> script for the derived-rule expansions and translated proofs."""
    out = {
        "derived_Mmu": mono_mu_script(parse_proof(_PREMISES["Mmu"]), PVar("X")),
        "derived_Mnu": mono_nu_script(parse_proof(_PREMISES["Mnu"]), PVar("X")),
        "derived_boxMa": box_mono_script(parse_proof(_PREMISES["boxMa"]), Named("a")),
    }
    a, b = parse_game("a"), parse_game("b")
    phi = parse_gl("x = 1")
    out["derived_dchoice"] = dual_choice_axiom(a, b, phi)
    out["derived_dseq"] = dual_seq_axiom(a, parse_game("b*"), phi)
    out["derived_loop"] = replace_in_loop(parse_game("a u b"), parse_game("b u a"),
                                          phi, choice_swap(a, b))
    for name in ("gl_multistep", "gl_FPstar", "gl_M"):
        out["sharp_" + name] = translate_proof_sharp(load_script(PROOFS / f"{name}.prf"))
    return out

"""Regenerate the derived-rule and translated proof scripts in the bundled corpus."""
from mugl.corpus import PROOFS, generated_scripts
from mugl.proofkit import check_proof, format_proof


def main():
    for name, script in sorted(generated_scripts().items()):
        v = check_proof(script)
        if not v.ok:
            raise SystemExit(f"{name}: {v.report()}")
        (PROOFS / f"{name}.prf").write_text(format_proof(script))
        print(f"{name}: {len(script.lines)} lines")


if __name__ == "__main__":
    main()

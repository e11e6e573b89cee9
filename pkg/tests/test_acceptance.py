"""The nine acceptance criteria at full size.

Each test prints its PASS/FAIL line straight to the terminal; running this
file as a script prints all nine lines and exits nonzero on any failure.
"""
import sys

import pytest

from mugl.acceptance import CRITERIA, AcceptanceConfig, run_all, run_criterion

FULL = AcceptanceConfig()


@pytest.mark.parametrize("number", [c[0] for c in CRITERIA], ids=[c[1] for c in CRITERIA])
def test_criterion(number, capsys):
    r = run_criterion(number, FULL)
    with capsys.disabled():
        print("\n" + r.line())
    assert r.passed, f"{r.detail}; first failures: {r.failures[:3]}"


if __name__ == "__main__":
    results = run_all(FULL, report=lambda r: print(r.line(), flush=True))
    sys.exit(0 if all(r.passed for r in results) else 1)

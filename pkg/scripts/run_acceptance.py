"""Run the acceptance criteria, optionally over several seeds.

    python3 scripts/run_acceptance.py                 # full size, seed 0
    python3 scripts/run_acceptance.py --seeds 0-4     # robustness sweep
    python3 scripts/run_acceptance.py --only 3,7 --count 100
"""
import argparse
import sys

from mugl.acceptance import AcceptanceConfig, run_all


def seed_range(text):
    lo, _, hi = text.partition("-")
    return range(int(lo), int(hi or lo) + 1)


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--seeds", type=seed_range, default=range(0, 1), help="seed or range a-b")
    ap.add_argument("--count", type=int, default=500, help="instances per randomized criterion (500 = full)")
    ap.add_argument("--only", help="comma-separated criterion numbers")
    ap.add_argument("--no-budget", action="store_true")
    a = ap.parse_args()
    only = {int(k) for k in a.only.split(",")} if a.only else None
    failed = 0
    for seed in a.seeds:
        if len(a.seeds) > 1:
            print(f"-- seed {seed}")
        cfg = AcceptanceConfig(seed=seed, count=a.count, enforce_budget=not a.no_budget)
        results = run_all(cfg, only, report=lambda r: print(r.line(), flush=True))
        failed += sum(not r.passed for r in results)
    sys.exit(1 if failed else 0)


if __name__ == "__main__":
    main()

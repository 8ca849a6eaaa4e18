#!/usr/bin/env python3
"""Random runs over several models and seeds; one summary row per run."""
import argparse
import sys

from biobig.experiment import RunSummary, SweepConfig, sweep


def main(argv=None) -> int:
    d = SweepConfig()
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--models", nargs="+", default=list(d.models))
    ap.add_argument("--seeds", type=int, default=len(d.seeds), help="seeds 0..N-1")
    ap.add_argument("--steps", type=int, default=d.steps)
    ap.add_argument("--no-theorem", action="store_true")
    a = ap.parse_args(argv)
    cfg = SweepConfig(tuple(a.models), tuple(range(a.seeds)), a.steps, not a.no_theorem)
    rows = sweep(cfg)
    print(RunSummary.HEADER)
    for r in rows:
        print(r.row())
    bad = [r for r in rows if r.sorting_violations or r.theorem_ok is False]
    print(f"# {len(rows)} runs, {sum(r.steps for r in rows)} steps, {len(bad)} with problems", file=sys.stderr)
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())

#!/usr/bin/env python3
"""Run one model under a strategy and print a summary row.

    python3 scripts/simulate.py --model phago.biobig --strategy random:3 --out runs/phago
"""
import argparse
import dataclasses
import sys

from biobig.experiment import RunConfig, RunSummary, simulate


def parse_args(argv=None) -> RunConfig:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    defaults = RunConfig()
    ap.add_argument("--model", default=defaults.model)
    ap.add_argument("--strategy", default=defaults.strategy)
    ap.add_argument("--steps", type=int, default=defaults.steps)
    ap.add_argument("--no-sorting", dest="check_sorting", action="store_false")
    ap.add_argument("--no-theorem", dest="check_theorem", action="store_false")
    ap.add_argument("--out", dest="out_dir")
    a = ap.parse_args(argv)
    fields = {f.name for f in dataclasses.fields(RunConfig)}
    return RunConfig(**{k: v for k, v in vars(a).items() if k in fields})


def main(argv=None) -> int:
    cfg = parse_args(argv)
    trace, summary = simulate(cfg)
    sys.stdout.write(trace.tsv())
    print()
    print(RunSummary.HEADER)
    print(summary.row())
    return 0 if summary.sorting_violations == 0 and summary.theorem_ok is not False else 1


if __name__ == "__main__":
    sys.exit(main())

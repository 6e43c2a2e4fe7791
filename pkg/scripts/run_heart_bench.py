#!/usr/bin/env python3
"""Heart-disease classification benchmark (270 cases, 13 features).

Each run re-splits 216/54 and re-initializes with seed = base + run, so the
activations face identical conditions.  Pass the data file as the first
argument; scripts/make_heart_fixture.py can generate a stand-in when the
real file is not on disk.
"""

import argparse
import pathlib
import sys

from modhtan.activations import Elu, Htan, ModHtan
from modhtan.bench import ExperimentSpec, emit_report, run_experiment, runtime_ordering
from modhtan.training import LmConfig


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("data", type=pathlib.Path, help="heart data file (13 features + 1/2 label)")
    ap.add_argument("--runs", type=int, default=10)
    ap.add_argument("--epochs", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--outdir", type=pathlib.Path, default=pathlib.Path("results"))
    args = ap.parse_args()

    if not args.data.exists():
        sys.exit(f"no such file: {args.data} (try scripts/make_heart_fixture.py)")

    spec = ExperimentSpec(
        dataset="heart",
        activations=(Htan(), Elu(), ModHtan()),
        runs=args.runs,
        base_seed=args.seed,
        heart_path=str(args.data),
        lm=LmConfig(epochs=args.epochs),
    )
    report = run_experiment(spec)

    args.outdir.mkdir(parents=True, exist_ok=True)
    emit_report(report, "csv", args.outdir / "heart_bench.csv")
    emit_report(report, "markdown", args.outdir / "heart_bench.md")

    failed = [r for r in report.rows if r.error is not None]
    for row in report.averages:
        print(f"{row.activation:>8}: accuracy={row.metric_value:.2f}%  runtime={row.runtime_s:.3f}s")
    if failed:
        print(f"{len(failed)} run(s) stalled; see the failed-runs section of the report")
    print("runtime ordering (observational):", runtime_ordering(report))
    print(f"wrote {args.outdir}/heart_bench.{{csv,md}}")


if __name__ == "__main__":
    main()

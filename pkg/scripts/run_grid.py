#!/usr/bin/env python3
"""Run the standard experiment grid and write results.csv.

Covers the same families and sizes as the acceptance suite; tune the seed
count or add --jobs for a faster pass.
"""

from __future__ import annotations

import argparse

from qcongest.harness import ExperimentConfig, run_grid, scaling_summary, write_csv


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results.csv")
    parser.add_argument("--seeds", type=int, default=5)
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--algos", default="exact,approx")
    args = parser.parse_args()

    config = ExperimentConfig(
        families=("path", "cycle", "random:0.05", "random:0.2", "lollipop"),
        sizes=(16, 32, 64, 128),
        seeds=tuple(range(args.seeds)),
        algos=tuple(args.algos.split(",")),
        jobs=args.jobs,
        out=args.out,
    )
    rows = run_grid(config)
    write_csv(rows, config.out)
    failures = sum(1 for r in rows if not r["ok"])
    print(f"{len(rows)} rows -> {config.out}; {failures} validation failures")
    for algo, stats in scaling_summary(rows).items():
        print(f"  {algo}: slope={stats['slope']}, points={stats['points']}")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Benchmark prox wall time across problem sizes and print scaling ratios.

Usage: python scripts/bench_prox_scaling.py [--sizes 1000,10000,100000]
"""

import argparse
import sys
from pathlib import Path

from groupflow import cli


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", default="1000,10000,100000")
    ap.add_argument("--kind", default="windows-1d",
                    choices=("windows-1d", "squares-2d"))
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="runs/bench_prox.csv")
    args = ap.parse_args()

    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    code = cli.main(["bench-prox", "--sizes", args.sizes, "--kind", args.kind,
                     "--repeats", str(args.repeats), "--seed", str(args.seed),
                     "--out", args.out])
    if code != 0:
        return code

    rows = [line.split(",") for line in
            Path(args.out).read_text().strip().splitlines()[1:]]
    print(Path(args.out).read_text().strip())
    for prev, cur in zip(rows, rows[1:]):
        ratio = float(cur[3]) / float(prev[3])
        print(f"time({cur[0]}) / time({prev[0]}) = {ratio:.1f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

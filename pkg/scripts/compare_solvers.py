#!/usr/bin/env python3
"""Generate a synthetic instance and race FISTA against the tuned
subgradient baseline under a shared wall-clock budget.

Emits per-solver trace CSVs plus compare.csv (time vs primal-minus-best,
ready for plotting) into the output directory.

Usage: python scripts/compare_solvers.py [--n 100] [--p 1000] [--budget 60]
"""

import argparse
import sys
from pathlib import Path

from groupflow import cli


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=100)
    ap.add_argument("--p", type=int, default=1000)
    ap.add_argument("--kind", default="dct-1d")
    ap.add_argument("--budget", type=float, default=60.0)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out-dir", default="runs/compare")
    args = ap.parse_args()

    out = Path(args.out_dir)
    inst = out / "instance"
    code = cli.main(["gen", "--n", str(args.n), "--p", str(args.p),
                     "--kind", args.kind, "--seed", str(args.seed),
                     "--out-dir", str(inst)])
    if code != 0:
        return code
    import json
    lam = json.loads((inst / "manifest.json").read_text())["options"]["lam"]
    return cli.main(["compare", "--X", str(inst / "X.txt"),
                     "--y", str(inst / "y.txt"),
                     "--groups", str(inst / "groups.txt"),
                     "--lambda", str(lam), "--budget", str(args.budget),
                     "--seed", str(args.seed), "--out-dir", str(out)])


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface.

Subcommands: gen, prox, dualnorm, solve, bench-prox, compare. Vectors are
text files with one float per line; matrices start with an `n p` header
line; groups files use the 1-based line format of groups.read_groups.
Every run that writes files also writes a JSON manifest next to them.

Exit codes: 0 success, 2 usage error, 3 validation error, 4 non-convergence.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import statistics
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .dualnorm import dual_norm
from .errors import ValidationError
from .groups import GroupStructure, grid_squares, read_groups, sliding_windows, write_groups
from .oracle import prox_oracle
from .prox import EPS_OPT, ProxOptions, ProxWorkspace, prox
from .solver import (Problem, SolverConfig, SolveTrace, fista, relative_gap,
                     subgradient_baseline, tune_subgradient)
from .synth import KINDS, generate_synthetic

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VALIDATION = 3
EXIT_NONCONVERGED = 4


def fmt(x: float) -> str:
    """Locale-independent, 12 significant digits."""
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.12g}"


def read_vector(path) -> np.ndarray:
    vals = [float(line.split("#")[0]) for line in Path(path).read_text().splitlines()
            if line.split("#")[0].strip()]
    return np.array(vals, dtype=float)


def write_vector(path, v: np.ndarray) -> None:
    Path(path).write_text("".join(fmt(x) + "\n" for x in v))


def read_matrix(path) -> np.ndarray:
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValidationError(f"{path}: expected 'n p' header")
        n, p = int(header[0]), int(header[1])
        X = np.loadtxt(fh, ndmin=2)
    if X.shape != (n, p):
        raise ValidationError(f"{path}: header says {(n, p)}, data is {X.shape}")
    return X


def write_matrix(path, X: np.ndarray) -> None:
    with open(path, "w") as fh:
        fh.write(f"{X.shape[0]} {X.shape[1]}\n")
        for row in X:
            fh.write(" ".join(fmt(x) for x in row) + "\n")


def write_trace(path, trace: SolveTrace) -> None:
    with open(path, "w") as fh:
        fh.write("iter,time_s,primal,gap\n")
        for it, t, primal, gap in trace.records:
            fh.write(f"{it},{fmt(t)},{fmt(primal)},{fmt(gap)}\n")


def _digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_manifest(dest, subcommand: str, args: argparse.Namespace,
                   input_paths: list) -> None:
    options = {k: v for k, v in vars(args).items()
               if k not in ("func", "command") and not callable(v)}
    manifest = {
        "subcommand": subcommand,
        "options": {k: (str(v) if isinstance(v, Path) else v)
                    for k, v in options.items()},
        "inputs": {str(p): _digest(p) for p in input_paths},
        "seed": getattr(args, "seed", None),
        "version": __version__,
    }
    Path(dest).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _load_groups(path) -> GroupStructure:
    with open(path) as fh:
        return read_groups(fh)


def cmd_gen(args) -> int:
    prob, w_true = generate_synthetic(args.n, args.p, args.kind,
                                      noise=args.noise, seed=args.seed,
                                      lam=args.lam)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_matrix(out / "X.txt", prob.X)
    write_vector(out / "y.txt", prob.y)
    write_vector(out / "w0.txt", w_true)
    with open(out / "groups.txt", "w") as fh:
        write_groups(prob.gs, fh)
    args.lam = prob.lam  # record the resolved value, not the default
    write_manifest(out / "manifest.json", "gen", args, [])
    print(f"lambda {fmt(prob.lam)}")
    print(f"wrote X.txt y.txt w0.txt groups.txt to {out}")
    return EXIT_OK


def cmd_prox(args) -> int:
    gs = _load_groups(args.groups)
    u = read_vector(args.input)
    if args.oracle:
        w = prox_oracle(u, gs, args.lam, tol=1e-14)
        residual = None
    else:
        opts = ProxOptions(box_projection=not args.no_box_projection,
                           keep_group_flows=args.keep_group_flows or args.check,
                           parallel_components=args.parallel_components)
        result = prox(u, gs, args.lam, opts)
        w = result.w
        residual = result.residual
        if args.keep_group_flows and args.out:
            write_matrix(str(args.out) + ".flows", result.group_flows)
    if args.out:
        write_vector(args.out, w)
        write_manifest(str(args.out) + ".manifest.json", "prox", args,
                       [args.groups, args.input])
    else:
        sys.stdout.write("".join(fmt(x) + "\n" for x in w))
    if args.check:
        print(f"residual {fmt(residual)}", file=sys.stderr)
        if residual > EPS_OPT:
            return EXIT_NONCONVERGED
    return EXIT_OK


def cmd_dualnorm(args) -> int:
    gs = _load_groups(args.groups)
    kappa = read_vector(args.input)
    print(fmt(dual_norm(kappa, gs).tau))
    return EXIT_OK


def _build_problem(args) -> Problem:
    X = read_matrix(args.X)
    y = read_vector(args.y)
    gs = _load_groups(args.groups)
    return Problem(X=X, y=y, gs=gs, lam=args.lam)


def cmd_solve(args) -> int:
    prob = _build_problem(args)
    if args.solver == "fista":
        cfg = SolverConfig(gap_tol=args.gap_tol, max_iter=args.max_iter,
                           time_budget_s=args.time_budget)
        w, trace = fista(prob, cfg)
    else:
        a, b = args.sg_a, args.sg_b
        if a is None or b is None:
            a, b = tune_subgradient(prob, iters=100)
        w, trace = subgradient_baseline(prob, a, b, args.max_iter,
                                        time_budget_s=args.time_budget)
        last = trace.records[-1]
        trace.converged = relative_gap(last[2], last[3]) <= args.gap_tol
    write_trace(args.trace, trace)
    write_manifest(str(args.trace) + ".manifest.json", "solve", args,
                   [args.X, args.y, args.groups])
    if args.out:
        write_vector(args.out, w)
    last = trace.records[-1]
    print(f"iters {last[0]} primal {fmt(last[2])} gap {fmt(last[3])}")
    return EXIT_OK if trace.converged else EXIT_NONCONVERGED


BENCH_KINDS = ("windows-1d", "squares-2d")


def _bench_structure(p: int, kind: str) -> GroupStructure:
    if kind == "windows-1d":
        return sliding_windows(p, 3)
    side = math.isqrt(p)
    if side * side != p:
        raise ValidationError("squares-2d needs a square p")
    return grid_squares(side, side, 3)


def cmd_bench_prox(args) -> int:
    rng = np.random.default_rng(args.seed)
    rows = []
    for p in args.sizes:
        gs = _bench_structure(p, args.kind)
        u = rng.standard_normal(p)
        lam = 0.2  # partial per-group shrinkage for standard-normal inputs
        ws = ProxWorkspace(gs)
        net = ws.net
        ws.prox(u, lam)  # warm-up (JIT compilation, allocations)
        times = []
        result = None
        for _ in range(args.repeats):
            cold = ProxWorkspace(gs)
            t0 = time.perf_counter()
            result = cold.prox(u, lam)
            times.append(time.perf_counter() - t0)
        rows.append((p, net.n_nodes, net.n_arcs, statistics.median(times),
                     result.pushes, result.relabels))
    lines = ["p,V,E,time_s,pushes,relabels"]
    lines += [f"{p},{v},{e},{fmt(t)},{pu},{re}" for p, v, e, t, pu, re in rows]
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
        write_manifest(str(args.out) + ".manifest.json", "bench-prox", args, [])
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_compare(args) -> int:
    prob = _build_problem(args)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    traces: dict[str, SolveTrace] = {}
    for solver in args.solvers:
        if solver == "fista":
            cfg = SolverConfig(gap_tol=args.gap_tol, max_iter=args.max_iter,
                               time_budget_s=args.budget)
            _, trace = fista(prob, cfg)
        else:
            a, b = tune_subgradient(prob, iters=100)
            _, trace = subgradient_baseline(prob, a, b, args.max_iter,
                                            time_budget_s=args.budget)
        traces[solver] = trace
        write_trace(out / f"trace_{solver}.csv", trace)
    best = min(r[2] for tr in traces.values() for r in tr.records)
    with open(out / "compare.csv", "w") as fh:
        fh.write("solver,time_s,primal_minus_best\n")
        for solver, tr in traces.items():
            for _, t, primal, _ in tr.records:
                fh.write(f"{solver},{fmt(t)},{fmt(primal - best)}\n")
    write_manifest(out / "manifest.json", "compare", args,
                   [args.X, args.y, args.groups])
    for solver, tr in traces.items():
        last = tr.records[-1]
        print(f"{solver}: iters {last[0]} primal {fmt(last[2])} gap {fmt(last[3])}")
    return EXIT_OK


def _solver_list(text: str) -> list[str]:
    names = [s.strip() for s in text.split(",") if s.strip()]
    for s in names:
        if s not in ("fista", "sg"):
            raise argparse.ArgumentTypeError(f"unknown solver {s!r}")
    if not names:
        raise argparse.ArgumentTypeError("need at least one solver")
    return names


def _size_list(text: str) -> list[int]:
    return [int(s) for s in text.split(",") if s.strip()]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="groupflow")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a synthetic problem instance")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--p", type=int, required=True)
    g.add_argument("--kind", choices=KINDS, required=True)
    g.add_argument("--noise", type=float, default=1.0)
    g.add_argument("--lambda", dest="lam", type=float, default=None)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out-dir", required=True)
    g.set_defaults(func=cmd_gen)

    pr = sub.add_parser("prox", help="proximal operator of the group penalty")
    pr.add_argument("--groups", required=True)
    pr.add_argument("--input", required=True)
    pr.add_argument("--lambda", dest="lam", type=float, required=True)
    pr.add_argument("--out", default=None)
    pr.add_argument("--check", action="store_true",
                    help="print the optimality residual; nonzero exit if large")
    pr.add_argument("--no-box-projection", action="store_true")
    pr.add_argument("--keep-group-flows", action="store_true")
    pr.add_argument("--parallel-components", action="store_true")
    pr.add_argument("--oracle", action="store_true", help=argparse.SUPPRESS)
    pr.add_argument("--seed", type=int, default=0)
    pr.set_defaults(func=cmd_prox)

    dn = sub.add_parser("dualnorm", help="dual norm of the group penalty")
    dn.add_argument("--groups", required=True)
    dn.add_argument("--input", required=True)
    dn.set_defaults(func=cmd_dualnorm)

    so = sub.add_parser("solve", help="solve the penalized regression")
    so.add_argument("--X", required=True)
    so.add_argument("--y", required=True)
    so.add_argument("--groups", required=True)
    so.add_argument("--lambda", dest="lam", type=float, required=True)
    so.add_argument("--solver", choices=("fista", "sg"), default="fista")
    so.add_argument("--gap-tol", type=float, default=1e-4)
    so.add_argument("--max-iter", type=int, default=10_000)
    so.add_argument("--trace", required=True)
    so.add_argument("--out", default=None)
    so.add_argument("--time-budget", type=float, default=None)
    so.add_argument("--sg-a", type=float, default=None)
    so.add_argument("--sg-b", type=float, default=None)
    so.add_argument("--seed", type=int, default=0)
    so.set_defaults(func=cmd_solve)

    bp = sub.add_parser("bench-prox", help="time prox solves across sizes")
    bp.add_argument("--sizes", type=_size_list, required=True,
                    help="comma-separated list of p values")
    bp.add_argument("--kind", choices=BENCH_KINDS, default="windows-1d")
    bp.add_argument("--repeats", type=int, default=3)
    bp.add_argument("--out", default=None)
    bp.add_argument("--seed", type=int, default=0)
    bp.set_defaults(func=cmd_bench_prox)

    cp = sub.add_parser("compare", help="run solvers under a time budget")
    cp.add_argument("--X", required=True)
    cp.add_argument("--y", required=True)
    cp.add_argument("--groups", required=True)
    cp.add_argument("--lambda", dest="lam", type=float, required=True)
    cp.add_argument("--solvers", type=_solver_list, default=["fista", "sg"])
    cp.add_argument("--budget", type=float, required=True,
                    help="wall-clock budget in seconds per solver")
    cp.add_argument("--gap-tol", type=float, default=1e-4)
    cp.add_argument("--max-iter", type=int, default=10_000_000)
    cp.add_argument("--out-dir", required=True)
    cp.add_argument("--seed", type=int, default=0)
    cp.set_defaults(func=cmd_compare)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())

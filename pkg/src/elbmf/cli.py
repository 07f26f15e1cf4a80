"""Command-line interface.

    elbmf factorize   --input A.mtx --rank K --out-dir RUN
    elbmf rank-select --input A.mtx --k-min 1 --k-max 20 --out-dir SWEEP
    elbmf simulate    --rows 400 --cols 300 --tiles 5 --row-extent 50:100 ... --out-dir DATA
    elbmf eval        --input A.mtx --u RUN/U.mtx --v RUN/V.mtx [--ground-truth A_star.mtx]
    elbmf trace       --run-dir RUN

Exit codes: 0 success, 2 usage, 3 numerical failure, 4 I/O or parse error.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time
from dataclasses import asdict
from pathlib import Path

from . import __version__
from .boolean import density
from .datagen import GenConfig, PlacementError, generate
from .io import MatrixParseError, read_bool_matrix, write_bool_matrix
from .metrics import evaluate
from .model_selection import DEFAULT_RESTARTS, rank_select
from .optimizer import ElbmfConfig, IterationTrace, NumericalError, factorize

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4

log = logging.getLogger("elbmf")


class UsageError(Exception):
    pass


def _extent(s: str) -> tuple[int, int]:
    try:
        lo, hi = s.split(":")
        return int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LOW:HIGH, got {s!r}") from None


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    d = ElbmfConfig(rank=1)
    p.add_argument("--kappa", type=float, default=d.kappa, help="l1 weight (default %(default)s)")
    p.add_argument("--lambda", dest="lam", type=float, default=d.lam, help="base l2 weight (default %(default)s)")
    p.add_argument("--rate-base", type=float, default=d.rate_base,
                   help="l2 weight grows as lambda * rate_base**t (default %(default)s)")
    p.add_argument("--beta", type=float, default=d.beta, help="inertia (default %(default)s)")
    p.add_argument("--max-iters", type=int, default=d.max_iters)
    p.add_argument("--tol", type=float, default=d.tol)
    p.add_argument("--integrality-eps", type=float, default=d.integrality_eps)
    p.add_argument("--seed", type=int, default=d.seed)
    p.add_argument("--no-nonneg", dest="nonneg", action="store_false", help="allow negative factor entries")


def _config(args, rank: int) -> ElbmfConfig:
    try:
        return ElbmfConfig(
            rank=rank, kappa=args.kappa, lam=args.lam, rate_base=args.rate_base, beta=args.beta,
            max_iters=args.max_iters, tol=args.tol, integrality_eps=args.integrality_eps,
            seed=args.seed, nonneg=args.nonneg,
        )
    except ValueError as e:
        raise UsageError(str(e)) from None


def _write_json(obj, path: Path) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _metrics(A, U, V, A_star=None) -> dict:
    report = evaluate(A, U, V, A_star).to_dict()
    if report["recall_star"] is None:
        del report["recall_star"]
    return report


def _load_truth(args):
    return read_bool_matrix(args.ground_truth) if args.ground_truth else None


def cmd_factorize(args) -> int:
    A = read_bool_matrix(args.input)
    if args.rank > min(A.shape):
        raise UsageError(f"--rank {args.rank} exceeds min(n, m) = {min(A.shape)}")
    cfg = _config(args, args.rank)
    A_star = _load_truth(args)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    t0 = time.perf_counter()
    res = factorize(A, cfg)
    wall = time.perf_counter() - t0

    write_bool_matrix(res.U, out / "U.mtx")
    write_bool_matrix(res.V, out / "V.mtx")
    with open(out / "trace.csv", "w", newline="") as fh:
        res.trace.to_csv(fh)
    summary = {
        "command": "factorize",
        "input": str(args.input),
        "shape": list(A.shape),
        "config": cfg.to_dict(),
        "metrics": _metrics(A, res.U, res.V, A_star),
        "iterations": res.n_iter,
        "converged": res.converged,
        "trace_cadence": res.trace.cadence,
        "final_boolean_gap": res.trace.final().boolean_gap,
        "factor_density": {"U": density(res.U), "V": density(res.V)},
        "wall_seconds": wall,
    }
    _write_json(summary, out / "summary.json")
    log.info("rank %d: xor loss %d after %d iterations (%.2fs)",
             cfg.rank, summary["metrics"]["xor_loss"], res.n_iter, wall)
    return EXIT_OK


def cmd_rank_select(args) -> int:
    A = read_bool_matrix(args.input)
    if not 1 <= args.k_min <= args.k_max <= min(A.shape):
        raise UsageError(f"infeasible rank range {args.k_min}..{args.k_max} for shape {A.shape}")
    if args.restarts < 1:
        raise UsageError("--restarts must be positive")
    base = _config(args, args.k_min)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    t0 = time.perf_counter()
    sweep = rank_select(A, args.k_min, args.k_max, base, restarts=args.restarts,
                        workers=args.workers, criterion=args.criterion)
    wall = time.perf_counter() - t0

    cols = ("rank", "mdl_cost", "aic_cost", "xor_loss", "seed", "n_iter")
    with open(out / "sweep.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for c in sweep.candidates:
            w.writerow([c.rank, repr(c.mdl_cost), repr(c.aic_cost), c.xor_loss, c.seed, c.n_iter])
    _write_json({
        "command": "rank-select",
        "input": str(args.input),
        "shape": list(A.shape),
        "config": asdict(base) | {"rank": None},
        "k_min": args.k_min,
        "k_max": args.k_max,
        "restarts": args.restarts,
        "criterion": args.criterion,
        "chosen_rank": sweep.chosen_rank,
        "wall_seconds": wall,
    }, out / "summary.json")
    print(sweep.chosen_rank)
    return EXIT_OK


def cmd_simulate(args) -> int:
    try:
        cfg = GenConfig(
            n_rows=args.rows, n_cols=args.cols, n_tiles=args.tiles,
            row_extent=args.row_extent, col_extent=args.col_extent,
            noise_p=args.noise, overlap=args.overlap, seed=args.seed,
        )
    except ValueError as e:
        raise UsageError(str(e)) from None
    try:
        A, A_star, tiles = generate(cfg)
    except PlacementError as e:
        raise UsageError(str(e)) from None
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_bool_matrix(A, out / "A.mtx")
    write_bool_matrix(A_star, out / "A_star.mtx")
    _write_json({"config": asdict(cfg), "tiles": [t.to_dict() for t in tiles]}, out / "tiles.json")
    return EXIT_OK


def cmd_eval(args) -> int:
    A = read_bool_matrix(args.input)
    U = read_bool_matrix(args.u)
    V = read_bool_matrix(args.v)
    if U.n_cols != V.n_rows or (U.n_rows, V.n_cols) != A.shape:
        raise UsageError(f"factor shapes {U.shape} and {V.shape} do not fit target {A.shape}")
    json.dump(_metrics(A, U, V, _load_truth(args)), sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")
    return EXIT_OK


def cmd_trace(args) -> int:
    path = Path(args.run_dir) / "trace.csv"
    with open(path, newline="") as fh:
        try:
            trace = IterationTrace.from_csv(fh)
        except (ValueError, KeyError) as e:
            raise MatrixParseError(path, 1, str(e)) from None
    if args.output:
        with open(args.output, "w", newline="") as fh:
            trace.to_csv(fh)
    else:
        trace.to_csv(sys.stdout)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="elbmf", description="Elastic Boolean matrix factorization",
                                allow_abbrev=False)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    f = sub.add_parser("factorize", help="factorize a Boolean matrix at a fixed rank")
    f.add_argument("--input", required=True)
    f.add_argument("--rank", type=int, required=True)
    f.add_argument("--ground-truth", help="noise-free matrix for recall*")
    f.add_argument("--out-dir", required=True)
    _add_solver_flags(f)
    f.set_defaults(func=cmd_factorize)

    r = sub.add_parser("rank-select", help="choose the rank by description length")
    r.add_argument("--input", required=True)
    r.add_argument("--k-min", type=int, required=True)
    r.add_argument("--k-max", type=int, required=True)
    r.add_argument("--restarts", type=int, default=DEFAULT_RESTARTS)
    r.add_argument("--criterion", choices=("mdl", "aic"), default="mdl")
    r.add_argument("--workers", type=int, default=1)
    r.add_argument("--out-dir", required=True)
    _add_solver_flags(r)
    r.set_defaults(func=cmd_rank_select)

    s = sub.add_parser("simulate", help="generate a planted-tile matrix")
    s.add_argument("--rows", type=int, required=True)
    s.add_argument("--cols", type=int, required=True)
    s.add_argument("--tiles", type=int, required=True)
    s.add_argument("--row-extent", type=_extent, required=True)
    s.add_argument("--col-extent", type=_extent, required=True)
    s.add_argument("--noise", type=float, default=0.0)
    s.add_argument("--overlap", action="store_true")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out-dir", required=True)
    s.set_defaults(func=cmd_simulate)

    e = sub.add_parser("eval", help="score factor files against a target")
    e.add_argument("--input", required=True)
    e.add_argument("--u", required=True)
    e.add_argument("--v", required=True)
    e.add_argument("--ground-truth")
    e.set_defaults(func=cmd_eval)

    t = sub.add_parser("trace", help="re-emit a run's per-iteration trace as CSV")
    t.add_argument("--run-dir", required=True)
    t.add_argument("--output")
    t.set_defaults(func=cmd_trace)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as e:
        print(f"elbmf: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as e:
        print(f"elbmf: numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except (OSError, MatrixParseError) as e:
        print(f"elbmf: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

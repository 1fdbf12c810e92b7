"""``lktrack`` command line: generate, track, bench.

Exit status is 0 on success, 1 on data or runtime failure and 2 on usage
errors (argparse's own convention).
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import bench, optim, synthgen
from .errors import ParseError
from .tracker import TrackConfig, track_sequence, write_trajectory

DEFAULT_SEED = 42


def _seed_default() -> int:
    raw = os.environ.get("LK_SEED")
    if raw is None:
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"error: LK_SEED must be an integer, got {raw!r}") from None


def _method(name: str) -> str:
    try:
        return optim.canonical_method(name)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_float(raw: str) -> float:
    try:
        v = float(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {raw!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError(f"step must be positive, got {raw}")
    return v


def _csv_list(conv):
    def parse(raw: str):
        return [conv(tok.strip()) for tok in raw.split(",") if tok.strip()]
    return parse


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lktrack", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write the synthetic video suite")
    g.add_argument("--out-dir", required=True, type=Path)
    g.add_argument("--seed", type=int, default=None, help="suite seed (default: $LK_SEED or 42)")
    g.add_argument("--scale", choices=("full", "desk"), default="desk")
    g.add_argument("--frames", type=int, default=100, help="frames per video")

    t = sub.add_parser("track", help="track one sequence and write its trajectory")
    t.add_argument("--seq-dir", required=True, type=Path)
    t.add_argument("--method", required=True, type=_method)
    t.add_argument("--step", type=_positive_float, default=None)
    t.add_argument("--out-csv", required=True, type=Path)
    t.add_argument("--max-iters", type=int, default=50)

    b = sub.add_parser("bench", help="run the method x step grid over a dataset")
    b.add_argument("--dataset-dir", required=True, type=Path)
    b.add_argument("--methods", type=_csv_list(_method), default=list(optim.METHODS))
    b.add_argument("--steps", type=_csv_list(_positive_float), default=list(optim.DEFAULT_STEPS))
    b.add_argument("--out-csv", required=True, type=Path)
    b.add_argument("--workers", type=int, default=1)
    b.add_argument("--trajectory-dir", type=Path, default=None)
    return parser


def cmd_generate(args) -> int:
    seed = _seed_default() if args.seed is None else args.seed
    spec = synthgen.SynthSpec(seed=seed, frames_per_video=args.frames)
    try:
        synthgen.generate_suite(args.out_dir, spec, args.scale, log=print)
    except OSError as exc:
        print(f"error: cannot write suite to {args.out_dir}: {exc}", file=sys.stderr)
        return 1
    return 0


def cmd_track(args) -> int:
    try:
        cfg = TrackConfig(optim.OptimizerSpec(args.method, args.step), max_iters=args.max_iters)
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    try:
        frames, gt = bench.load_external_sequence(args.seq_dir)
        traj = track_sequence(frames, gt[0], cfg)
        write_trajectory(args.out_csv, traj)
    except (OSError, ParseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    res = bench.evaluate(traj, gt)
    avg = "-" if res.avg_error_px is None else f"{res.avg_error_px:.4f}"
    print(f"{args.seq_dir.name}: frames={res.n_frames} avg_error_px={avg} "
          f"fail_pct={res.fail_pct:.3f} avg_time_s={res.avg_time_s:.6f}")
    return 0


def cmd_bench(args) -> int:
    if args.workers < 1:
        print("usage error: --workers must be >= 1", file=sys.stderr)
        return 2
    cfg = bench.SuiteConfig(
        dataset_root=args.dataset_dir,
        methods=tuple(args.methods),
        steps=tuple(args.steps),
        workers=args.workers,
        trajectory_dir=args.trajectory_dir,
    )
    try:
        outcome = bench.run_suite_detailed(cfg)
        bench.emit_report(outcome.rows, args.out_csv)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for name, err in outcome.errors:
        print(f"skipped {name}: {err}", file=sys.stderr)
    print(bench.format_table(outcome.rows))
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.command == "track" and args.method != optim.GAUSS_NEWTON and args.step is None:
        parser.error(f"--step is required for {args.method}")
    handler = {"generate": cmd_generate, "track": cmd_track, "bench": cmd_bench}[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())

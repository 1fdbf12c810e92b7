"""Tracking-error metrics, the method x step benchmark grid and its CSV report."""
from __future__ import annotations

import csv
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import optim
from .errors import ParseError
from .pgm import read_pgm
from .raster import Box, round_half_away
from .tracker import FrameResult, TrackConfig, track_sequence, write_trajectory

log = logging.getLogger(__name__)

FAIL_THRESHOLD_PX = 10.0
REPORT_HEADER = "method,step,avg_error_px,avg_time_s,fail_pct"


def box_error(est: Box, gt: Box) -> float:
    """Euclidean distance between box centres."""
    (ex, ey), (gx, gy) = est.center, gt.center
    return math.hypot(ex - gx, ey - gy)


@dataclass(frozen=True)
class EvalResult:
    avg_error_px: float | None
    fail_pct: float
    avg_time_s: float
    n_frames: int
    n_fail: int
    error_sum: float
    time_sum: float


def _summarize(errors: np.ndarray, times: np.ndarray, threshold: float) -> EvalResult:
    fail = errors > threshold
    n = len(errors)
    n_fail = int(fail.sum())
    ok_sum = float(errors[~fail].sum())
    return EvalResult(
        avg_error_px=ok_sum / (n - n_fail) if n > n_fail else None,
        fail_pct=100.0 * n_fail / n if n else 0.0,
        avg_time_s=float(times.sum()) / n if n else 0.0,
        n_frames=n,
        n_fail=n_fail,
        error_sum=ok_sum,
        time_sum=float(times.sum()),
    )


def evaluate(traj: Sequence[FrameResult], gt: Sequence[Box], threshold: float = FAIL_THRESHOLD_PX) -> EvalResult:
    """Score a trajectory against ground truth that still includes the initial box.

    Frames with error above ``threshold`` are fails; the average error runs
    over the remaining frames and is ``None`` when every frame failed.
    """
    if len(gt) != len(traj) + 1:
        raise ValueError(f"ground truth has {len(gt)} boxes for {len(traj)} tracked frames; expected one more")
    errors = np.array([box_error(r.box, g) for r, g in zip(traj, gt[1:])], dtype=np.float64)
    times = np.array([r.elapsed for r in traj], dtype=np.float64)
    return _summarize(errors, times, threshold)


# --------------------------------------------------------------------------
# sequences on disk
# --------------------------------------------------------------------------

def read_gt(path) -> list[Box]:
    boxes = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["frame", "x", "y", "w", "h"]:
            raise ParseError(f"{path}: expected header frame,x,y,w,h, got {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                frame, x, y, w, h = (int(float(v)) for v in row)
                if frame != len(boxes):
                    raise ValueError(f"frame index {frame} out of order")
                boxes.append(Box(x, y, w, h))
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: bad ground-truth row {row}: {exc}") from None
    if not boxes:
        raise ParseError(f"{path}: no ground-truth rows")
    return boxes


def normalize_boxes(boxes: Sequence[Box]) -> list[Box]:
    """Give every box the size ``round((min + max) / 2)`` while keeping its centre."""
    ws = [b.w for b in boxes]
    hs = [b.h for b in boxes]
    w = round_half_away((min(ws) + max(ws)) / 2.0)
    h = round_half_away((min(hs) + max(hs)) / 2.0)
    out = []
    for b in boxes:
        cx, cy = b.center
        out.append(Box(round_half_away(cx - w / 2.0), round_half_away(cy - h / 2.0), w, h))
    return out


def frame_paths(seq_dir) -> list[Path]:
    return sorted(Path(seq_dir).glob("*.pgm"))


def load_external_sequence(seq_dir) -> tuple[list[np.ndarray], list[Box]]:
    """Frames (sorted ``*.pgm``) and size-normalized ground truth of one sequence."""
    seq_dir = Path(seq_dir)
    gt_path = seq_dir / "gt.csv"
    if not gt_path.is_file():
        raise ParseError(f"{seq_dir}: missing gt.csv")
    gt = read_gt(gt_path)
    paths = frame_paths(seq_dir)
    if len(paths) != len(gt):
        raise ParseError(f"{seq_dir}: {len(paths)} frames but {len(gt)} ground-truth rows")
    frames = [read_pgm(p) for p in paths]
    shape = frames[0].shape
    for p, f in zip(paths, frames):
        if f.shape != shape:
            raise ParseError(f"{p}: frame size {f.shape[::-1]} differs from {shape[::-1]}")
    return frames, normalize_boxes(gt)


def find_sequences(root) -> list[Path]:
    root = Path(root)
    if not root.is_dir():
        raise ValueError(f"dataset root {root} is not a directory")
    return sorted(p for p in root.iterdir() if p.is_dir() and ((p / "gt.csv").exists() or any(p.glob("*.pgm"))))


# --------------------------------------------------------------------------
# suite
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class BenchRow:
    method: str
    step: float | None  # None stands for the Gauss-Newton "auto" step
    avg_error_px: float | None
    avg_time_s: float
    fail_pct: float

    @property
    def step_label(self) -> str:
        return "auto" if self.step is None else f"{self.step:.6f}"


@dataclass(frozen=True)
class SuiteConfig:
    dataset_root: str | os.PathLike
    methods: tuple[str, ...] = optim.METHODS
    steps: tuple[float, ...] = optim.DEFAULT_STEPS
    threshold_px: float = FAIL_THRESHOLD_PX
    workers: int = 1
    trajectory_dir: str | os.PathLike | None = None
    max_iters: int = 50
    tol_dp: float = 1e-3

    def cells(self) -> list[tuple[str, float | None]]:
        """(method, step) pairs in report order; Gauss-Newton gets one step-free cell."""
        steps = sorted(set(float(s) for s in self.steps))
        out = []
        for m in dict.fromkeys(optim.canonical_method(m) for m in self.methods):
            if m == optim.GAUSS_NEWTON:
                out.append((m, None))
            else:
                out.extend((m, s) for s in steps)
        return out


@dataclass
class SuiteOutcome:
    rows: list[BenchRow]
    errors: list[tuple[str, str]] = field(default_factory=list)
    frames_per_cell: int = 0
    sequences: int = 0


def _run_sequence(args):
    seq_dir, cells, threshold, max_iters, tol_dp, traj_dir = args
    try:
        frames, gt = load_external_sequence(seq_dir)
    except (OSError, ParseError) as exc:
        return Path(seq_dir).name, None, f"{type(exc).__name__}: {exc}"
    results = []
    try:
        for method, step in cells:
            cfg = TrackConfig(optim.OptimizerSpec(method, step), max_iters=max_iters, tol_dp=tol_dp)
            traj = track_sequence(frames, gt[0], cfg)
            results.append(evaluate(traj, gt, threshold))
            if traj_dir is not None:
                out = Path(traj_dir) / Path(seq_dir).name
                out.mkdir(parents=True, exist_ok=True)
                label = "auto" if step is None else f"{step:g}"
                write_trajectory(out / f"{optim.SHORT_NAMES[method]}_{label}.csv", traj)
    except ValueError as exc:
        return Path(seq_dir).name, None, f"{type(exc).__name__}: {exc}"
    return Path(seq_dir).name, results, None


def run_suite_detailed(cfg: SuiteConfig) -> SuiteOutcome:
    seqs = find_sequences(cfg.dataset_root)
    if not seqs:
        raise ValueError(f"no sequences under {cfg.dataset_root}")
    cells = cfg.cells()
    if not cells:
        raise ValueError("no (method, step) cells to run")
    jobs = [(str(s), cells, cfg.threshold_px, cfg.max_iters, cfg.tol_dp, cfg.trajectory_dir) for s in seqs]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            done = list(pool.map(_run_sequence, jobs))
    else:
        done = [_run_sequence(j) for j in jobs]
    done.sort(key=lambda item: item[0])

    outcome = SuiteOutcome(rows=[])
    per_cell = [[] for _ in cells]
    for name, results, err in done:
        if err is not None:
            log.warning("sequence %s skipped: %s", name, err)
            outcome.errors.append((name, err))
            continue
        outcome.sequences += 1
        for acc, r in zip(per_cell, results):
            acc.append(r)
    if outcome.sequences == 0:
        raise ValueError(f"none of the {len(seqs)} sequences under {cfg.dataset_root} could be read")

    for (method, step), results in zip(cells, per_cell):
        n = sum(r.n_frames for r in results)
        n_fail = sum(r.n_fail for r in results)
        err_sum = sum(r.error_sum for r in results)
        time_sum = sum(r.time_sum for r in results)
        outcome.rows.append(BenchRow(
            method=method,
            step=step,
            avg_error_px=err_sum / (n - n_fail) if n > n_fail else None,
            avg_time_s=time_sum / n,
            fail_pct=100.0 * n_fail / n,
        ))
        outcome.frames_per_cell = n
    return outcome


def run_suite(cfg: SuiteConfig) -> list[BenchRow]:
    """One :class:`BenchRow` per (method, step) cell, frame-weighted over all sequences."""
    return run_suite_detailed(cfg).rows


def _fmt(v: float | None) -> str:
    return "" if v is None else f"{v:.6f}"


def report_lines(rows: Sequence[BenchRow]) -> list[str]:
    return [REPORT_HEADER] + [
        f"{r.method},{r.step_label},{_fmt(r.avg_error_px)},{_fmt(r.avg_time_s)},{_fmt(r.fail_pct)}" for r in rows
    ]


def emit_report(rows: Sequence[BenchRow], path) -> None:
    if not rows:
        raise ValueError("refusing to write an empty report")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(report_lines(rows)) + "\n")


def parse_report(path) -> list[BenchRow]:
    rows = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != REPORT_HEADER.split(","):
            raise ParseError(f"{path}: unexpected header {reader.fieldnames}")
        for rec in reader:
            rows.append(BenchRow(
                method=rec["method"],
                step=None if rec["step"] == "auto" else float(rec["step"]),
                avg_error_px=float(rec["avg_error_px"]) if rec["avg_error_px"] else None,
                avg_time_s=float(rec["avg_time_s"]),
                fail_pct=float(rec["fail_pct"]),
            ))
    return rows


def format_table(rows: Sequence[BenchRow]) -> str:
    cols = ["method", "step", "avg_error_px", "avg_time_s", "fail_pct"]
    body = [[r.method, "auto" if r.step is None else f"{r.step:g}", _fmt(r.avg_error_px) or "-",
             _fmt(r.avg_time_s), f"{r.fail_pct:.3f}"] for r in rows]
    widths = [max(len(c), *(len(b[i]) for b in body)) for i, c in enumerate(cols)]
    lines = ["  ".join(c.ljust(w) if i < 2 else c.rjust(w) for i, (c, w) in enumerate(zip(cols, widths)))]
    for b in body:
        lines.append("  ".join(v.ljust(w) if i < 2 else v.rjust(w) for i, (v, w) in enumerate(zip(b, widths))))
    return "\n".join(lines)

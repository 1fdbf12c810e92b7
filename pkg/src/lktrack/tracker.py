"""Translation-only Lucas-Kanade alignment and frame-to-frame tracking."""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from . import _kernels, optim
from .errors import DegenerateHessianError, DimensionError, SingularHessianError
from .optim import OptimizerSpec
from .raster import Box, GradField, Patch, extract_warped_patch, gradient, round_half_away, second_derivatives

# context ring kept around the template so that first and second derivatives
# at the box rim are central differences over real pixels
TEMPLATE_MARGIN = 2


@dataclass(frozen=True)
class TrackConfig:
    optimizer: OptimizerSpec
    max_iters: int = 50
    tol_dp: float = 1e-3

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not self.tol_dp > 0:
            raise ValueError("tol_dp must be positive")


@dataclass(frozen=True)
class FrameResult:
    box: Box
    p_refined: tuple[float, float]
    iterations: int
    converged: bool
    degenerate: bool
    elapsed: float


class IterationInfo(NamedTuple):
    """What the per-iteration hook sees."""

    iteration: int
    p: np.ndarray
    dp: np.ndarray
    d: np.ndarray
    hessian: np.ndarray | None


IterationHook = Callable[[IterationInfo], None]


def make_template(frame: np.ndarray, box: Box, margin: int = TEMPLATE_MARGIN) -> Patch:
    """Copy ``box`` out of ``frame`` together with a ``margin``-pixel ring."""
    return extract_warped_patch(frame, box, (0.0, 0.0), margin)


def _template_margin(template: Patch, box: Box) -> int:
    dh = template.height - box.h
    dw = template.width - box.w
    if dh != dw or dh < 0 or dh % 2:
        raise DimensionError(
            f"template {template.width}x{template.height} does not match box {box.w}x{box.h}"
        )
    return dh // 2


def _crop(a: np.ndarray, m: int) -> np.ndarray:
    return np.ascontiguousarray(a[m:a.shape[0] - m, m:a.shape[1] - m]) if m else a


def _commit(box: Box, p: np.ndarray, width: int, height: int) -> Box:
    x = box.x + round_half_away(p[0])
    y = box.y + round_half_away(p[1])
    x = min(max(x, 0), width - box.w)
    y = min(max(y, 0), height - box.h)
    return Box(x, y, box.w, box.h)


def align(
    template: Patch,
    frame: np.ndarray,
    box: Box,
    cfg: TrackConfig,
    on_iter: IterationHook | None = None,
) -> FrameResult:
    """Refine the translation that maps ``template`` onto ``frame`` at ``box``.

    ``template`` is either exactly box-sized or carries a symmetric context
    ring (see :func:`make_template`).  Gauss-Newton runs in inverse
    compositional form: template gradients and their Hessian are formed once
    here, never inside the loop.
    """
    t0 = time.perf_counter()
    height, width = frame.shape
    if not box.inside(width, height):
        raise ValueError(f"{box} lies outside the {width}x{height} frame")
    m = _template_margin(template, box)
    spec = cfg.optimizer
    method = spec.method
    guard = spec.epsilon_guard
    eta = spec.eta
    K = _kernels.K

    tvals = np.ascontiguousarray(template.values, dtype=np.float64)
    T = _crop(tvals, m)
    tgrad = gradient(tvals)
    tgrad = GradField(_crop(tgrad.gx, m), _crop(tgrad.gy, m))

    hessian = None
    degenerate = False
    if method == optim.GAUSS_NEWTON:
        hessian = optim.gn_hessian(tgrad)
        if optim.is_singular(hessian, guard):
            return FrameResult(box, (0.0, 0.0), 0, False, True, time.perf_counter() - t0)
    elif method == optim.NEWTON:
        sd = second_derivatives(tvals)
        try:
            hessian = optim.newton_hessian(type(sd)(*(_crop(a, m) for a in sd)))
        except DegenerateHessianError:
            hessian = None
    cg_key = optim._BETA_KEYS.get(method)
    state = optim.CgState()

    p = np.zeros(2)
    iterations = 0
    converged = False
    for k in range(1, cfg.max_iters + 1):
        if method == optim.GAUSS_NEWTON:
            warped = K.sample_patch(frame, box.x + p[0], box.y + p[1], box.w, box.h)
            d = K.residual_gradient(T, warped, tgrad.gx, tgrad.gy)
            try:
                dp = optim.solve_gn_step(hessian, d, guard)
            except SingularHessianError:  # pragma: no cover - screened above
                dp = np.zeros(2)
                degenerate = True
        else:
            wp = K.sample_patch(frame, box.x - 1 + p[0], box.y - 1 + p[1], box.w + 2, box.h + 2)
            gx, gy = K.gradient(wp)
            d = K.residual_gradient(T, wp[1:-1, 1:-1], gx[1:-1, 1:-1], gy[1:-1, 1:-1])
            if method == optim.GRADIENT_DESCENT:
                dp = optim.gd_step(d, eta)
            elif cg_key is not None:
                beta = optim.cg_beta(cg_key, d, state.d_prev, state.s_prev, guard) if state.initialized else 0.0
                dp, state = optim.cg_step(d, state, beta, eta)
            elif hessian is None:
                dp = optim.gd_step(d, eta)
                degenerate = True
            else:
                dp, fell_back = optim.newton_step(hessian, d, eta, guard)
                degenerate |= fell_back
        iterations = k
        if not np.all(np.isfinite(dp)) or not np.all(np.isfinite(p + dp)):
            # diverged: keep the last finite estimate
            break
        p = p + dp
        if on_iter is not None:
            on_iter(IterationInfo(k, p.copy(), dp, d, hessian))
        if np.hypot(dp[0], dp[1]) < cfg.tol_dp:
            converged = True
            break

    result_box = _commit(box, p, width, height)
    return FrameResult(
        result_box, (float(p[0]), float(p[1])), iterations, converged, degenerate, time.perf_counter() - t0
    )


def track_sequence(
    frames: Sequence[np.ndarray],
    init_box: Box,
    cfg: TrackConfig,
    on_iter: IterationHook | None = None,
) -> list[FrameResult]:
    """Track ``init_box`` through ``frames``; one result per frame after the first."""
    if len(frames) < 2:
        raise ValueError("tracking needs at least two frames")
    height, width = frames[0].shape
    if not init_box.inside(width, height):
        raise ValueError(f"initial {init_box} lies outside the {width}x{height} frame")
    box = init_box
    out = []
    for k in range(len(frames) - 1):
        template = make_template(frames[k], box)
        res = align(template, frames[k + 1], box, cfg, on_iter)
        out.append(res)
        box = res.box
    return out


TRAJECTORY_HEADER = "frame,x,y,w,h,iters,converged,elapsed_s"


def write_trajectory(path, trajectory: Sequence[FrameResult]) -> None:
    lines = [TRAJECTORY_HEADER]
    for k, r in enumerate(trajectory, start=1):
        b = r.box
        lines.append(f"{k},{b.x},{b.y},{b.w},{b.h},{r.iterations},{int(r.converged)},{r.elapsed:.6f}")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")

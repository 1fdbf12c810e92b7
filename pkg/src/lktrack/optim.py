"""Step rules for the translation-only alignment problem.

Every rule consumes the same driving vector ``d = sum(grad * (T - I(W)))``,
which already points downhill on the SSD cost.  Vectors are length-2 float
arrays ``(x, y)``; Hessians are 2x2 arrays.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import DegenerateHessianError, DimensionError, SingularHessianError
from .raster import GradField, Patch, SecondDerivField

GUARD = 1e-12

GAUSS_NEWTON = "gauss_newton"
GRADIENT_DESCENT = "gradient_descent"
CG_FR = "cg_fletcher_reeves"
CG_PR = "cg_polak_ribiere"
CG_HS = "cg_hestenes_stiefel"
CG_DY = "cg_dai_yuan"
NEWTON = "newton"

METHODS = (GAUSS_NEWTON, GRADIENT_DESCENT, CG_FR, CG_PR, CG_HS, CG_DY, NEWTON)
CG_METHODS = (CG_FR, CG_PR, CG_HS, CG_DY)
DEFAULT_STEPS = (0.005, 0.01, 0.02, 0.04, 0.08)

SHORT_NAMES = {
    GAUSS_NEWTON: "gauss_newton",
    GRADIENT_DESCENT: "gd",
    CG_FR: "cg_fr",
    CG_PR: "cg_pr",
    CG_HS: "cg_hs",
    CG_DY: "cg_dy",
    NEWTON: "newton",
}
_ALIASES = {short: long for long, short in SHORT_NAMES.items()}
_ALIASES.update({m: m for m in METHODS})
_BETA_KEYS = {CG_FR: "fr", CG_PR: "pr", CG_HS: "hs", CG_DY: "dy"}


def canonical_method(name: str) -> str:
    try:
        return _ALIASES[name]
    except KeyError:
        raise ValueError(f"unknown method {name!r}; expected one of {sorted(_ALIASES)}") from None


@dataclass(frozen=True)
class OptimizerSpec:
    method: str
    eta: float | None = None
    epsilon_guard: float = GUARD

    def __post_init__(self):
        object.__setattr__(self, "method", canonical_method(self.method))
        if self.method != GAUSS_NEWTON:
            if self.eta is None or not np.isfinite(self.eta) or self.eta <= 0:
                raise ValueError(f"{self.method} needs a positive step size, got {self.eta!r}")
        if self.epsilon_guard < 0:
            raise ValueError("epsilon_guard must be non-negative")

    @property
    def step_label(self) -> str:
        return "auto" if self.method == GAUSS_NEWTON else f"{self.eta:g}"


def _check_same_shape(*arrays):
    shape = arrays[0].shape
    for a in arrays[1:]:
        if a.shape != shape:
            raise DimensionError(f"shape mismatch: {shape} vs {a.shape}")


def _vals(p):
    return p.values if isinstance(p, Patch) else np.asarray(p, dtype=np.float64)


def residual_gradient(template, warped, grads: GradField) -> np.ndarray:
    """``(sum gx*r, sum gy*r)`` with ``r = template - warped``.

    Equals minus one half of the SSD cost gradient with respect to the
    translation, i.e. it is a descent direction.
    """
    t = np.asarray(_vals(template), dtype=np.float64)
    w = np.asarray(_vals(warped), dtype=np.float64)
    gx = np.asarray(grads.gx, dtype=np.float64)
    gy = np.asarray(grads.gy, dtype=np.float64)
    _check_same_shape(t, w, gx, gy)
    return _kernels.K.residual_gradient(t, w, gx, gy)


def gn_hessian(grads: GradField) -> np.ndarray:
    """Gauss-Newton Hessian ``sum [gx gy]^T [gx gy]`` over the field."""
    gx = np.asarray(grads.gx, dtype=np.float64)
    gy = np.asarray(grads.gy, dtype=np.float64)
    _check_same_shape(gx, gy)
    if gx.size == 0:
        raise DimensionError("empty gradient field")
    return _kernels.K.gram(gx, gy)


def is_singular(h: np.ndarray, guard: float = GUARD) -> bool:
    det = h[0, 0] * h[1, 1] - h[0, 1] * h[1, 0]
    tr = h[0, 0] + h[1, 1]
    return not abs(det) > guard * tr * tr


def _solve2(h, d):
    det = h[0, 0] * h[1, 1] - h[0, 1] * h[1, 0]
    return np.array([
        (h[1, 1] * d[0] - h[0, 1] * d[1]) / det,
        (h[0, 0] * d[1] - h[1, 0] * d[0]) / det,
    ])


def solve_gn_step(h: np.ndarray, d, guard: float = GUARD) -> np.ndarray:
    """Closed-form ``H^-1 d``; raises :class:`SingularHessianError` when |det H| <= guard tr(H)^2."""
    if is_singular(h, guard):
        raise SingularHessianError(f"singular Hessian {h.tolist()}")
    return _solve2(h, np.asarray(d, dtype=np.float64))


def gd_step(d, eta: float) -> np.ndarray:
    return eta * np.asarray(d, dtype=np.float64)


def cg_beta(variant: str, d_n, d_prev, s_prev, guard: float = GUARD) -> float:
    """Conjugacy coefficient for the four classical nonlinear CG rules.

    ``variant`` is ``fr``, ``pr``, ``hs`` or ``dy`` (or the matching method
    name).  The formulas are written for ``d = -gradient``; a denominator with
    magnitude ``<= guard`` yields 0, i.e. a steepest-descent restart.
    """
    key = variant if variant in ("fr", "pr", "hs", "dy") else _BETA_KEYS.get(canonical_method(variant))
    if key is None:
        raise ValueError(f"{variant!r} is not a conjugate-gradient variant")
    d_n = np.asarray(d_n, dtype=np.float64)
    d_prev = np.asarray(d_prev, dtype=np.float64)
    s_prev = np.asarray(s_prev, dtype=np.float64)
    y = d_n - d_prev
    if key == "fr":
        num, den = d_n @ d_n, d_prev @ d_prev
    elif key == "pr":
        num, den = d_n @ y, d_prev @ d_prev
    elif key == "hs":
        num, den = -(d_n @ y), s_prev @ y
    else:
        num, den = -(d_n @ d_n), s_prev @ y
    if abs(den) <= guard:
        return 0.0
    return float(num / den)


@dataclass(frozen=True)
class CgState:
    s_prev: np.ndarray = field(default_factory=lambda: np.zeros(2))
    d_prev: np.ndarray = field(default_factory=lambda: np.zeros(2))
    initialized: bool = False


def cg_step(d_n, state: CgState, beta: float, eta: float) -> tuple[np.ndarray, CgState]:
    """One constant-step conjugate-gradient move; returns ``(dp, next_state)``."""
    d_n = np.asarray(d_n, dtype=np.float64)
    s_n = d_n + beta * state.s_prev if state.initialized else d_n.copy()
    return eta * s_n, CgState(s_n, d_n.copy(), True)


def sumsq_hessian(sd: SecondDerivField) -> np.ndarray:
    """``[[sum ixx^2, sum ixy^2], [sum iyx^2, sum iyy^2]]``."""
    sq = _kernels.K.sumsq
    return np.array([
        [sq(np.ascontiguousarray(sd.ixx)), sq(np.ascontiguousarray(sd.ixy))],
        [sq(np.ascontiguousarray(sd.iyx)), sq(np.ascontiguousarray(sd.iyy))],
    ])


def newton_hessian(sd: SecondDerivField) -> np.ndarray:
    """Sum-of-squares curvature matrix scaled so its four entries add up to 1."""
    if sd.ixx.size == 0:
        raise DimensionError("empty second-derivative field")
    h = sumsq_hessian(sd)
    total = h.sum()
    if total == 0.0:
        raise DegenerateHessianError("second derivatives vanish everywhere")
    return h / total


def newton_step(h_norm: np.ndarray, d, eta: float, guard: float = GUARD) -> tuple[np.ndarray, bool]:
    """``eta * H_norm^-1 d``, or ``eta * d`` with the fallback flag set when H_norm is singular."""
    d = np.asarray(d, dtype=np.float64)
    if is_singular(h_norm, guard):
        return eta * d, True
    return eta * _solve2(h_norm, d), False

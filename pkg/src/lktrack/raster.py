"""Images, boxes, subpixel sampling, finite differences and impulse noise.

Images are 2-D ``float64`` arrays indexed ``[row, col]`` with intensities in
``[0, 1]``.  The x axis runs along columns, y along rows.  Sampling and
differencing clamp to the border.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _kernels
from .errors import DimensionError


def as_image(data) -> np.ndarray:
    """Validate and return ``data`` as a contiguous float64 image."""
    img = np.ascontiguousarray(data, dtype=np.float64)
    if img.ndim != 2 or img.size == 0:
        raise DimensionError(f"image must be a non-empty 2-D array, got shape {img.shape}")
    if not np.all((img >= 0.0) & (img <= 1.0)):
        raise ValueError("image intensities must lie in [0, 1]")
    return img


def round_half_away(v: float) -> int:
    return int(math.copysign(math.floor(abs(v) + 0.5), v))


@dataclass(frozen=True)
class Box:
    """Axis-aligned box; ``x``/``y`` is the top-left pixel, ``w``/``h`` the size."""

    x: int
    y: int
    w: int
    h: int

    def __post_init__(self):
        if self.w <= 0 or self.h <= 0:
            raise ValueError(f"box size must be positive, got {self.w}x{self.h}")

    @property
    def center(self) -> tuple[float, float]:
        return self.x + self.w / 2.0, self.y + self.h / 2.0

    def translated(self, dx: int, dy: int) -> "Box":
        return Box(self.x + dx, self.y + dy, self.w, self.h)

    def inside(self, width: int, height: int) -> bool:
        return self.x >= 0 and self.y >= 0 and self.x + self.w <= width and self.y + self.h <= height


@dataclass(frozen=True)
class Patch:
    """Rectangular sample of an image; ``origin`` is the frame (x, y) of ``values[0, 0]``."""

    origin: tuple[float, float]
    values: np.ndarray

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


class GradField(NamedTuple):
    gx: np.ndarray
    gy: np.ndarray


class SecondDerivField(NamedTuple):
    ixx: np.ndarray
    ixy: np.ndarray
    iyx: np.ndarray
    iyy: np.ndarray


def _values(patch) -> np.ndarray:
    return patch.values if isinstance(patch, Patch) else np.asarray(patch, dtype=np.float64)


def sample_bilinear(img: np.ndarray, x: float, y: float) -> float:
    """Bilinear intensity at real coordinates, clamped to the image border."""
    return float(_kernels.K.sample_patch(img, float(x), float(y), 1, 1)[0, 0])


def sample_patch(img: np.ndarray, x0: float, y0: float, w: int, h: int) -> np.ndarray:
    return _kernels.K.sample_patch(img, float(x0), float(y0), int(w), int(h))


def gradient(patch) -> GradField:
    """Central differences inside the patch, one-sided differences on its rim."""
    f = _values(patch)
    if f.ndim != 2 or f.shape[0] < 3 or f.shape[1] < 3:
        raise DimensionError(f"gradient needs at least a 3x3 patch, got {f.shape}")
    gx, gy = _kernels.K.gradient(np.ascontiguousarray(f, dtype=np.float64))
    return GradField(gx, gy)


def second_derivatives(patch) -> SecondDerivField:
    """Second derivatives by differencing the first-derivative fields again.

    ``ixy`` differences ``gx`` along y and ``iyx`` differences ``gy`` along x;
    the two are computed independently and must agree.
    """
    f = _values(patch)
    if f.ndim != 2 or f.shape[0] < 5 or f.shape[1] < 5:
        raise DimensionError(f"second derivatives need at least a 5x5 patch, got {f.shape}")
    grad = _kernels.K.gradient
    gx, gy = grad(np.ascontiguousarray(f, dtype=np.float64))
    ixx, ixy = grad(gx)
    iyx, iyy = grad(gy)
    if not np.allclose(ixy, iyx, rtol=0.0, atol=1e-9):
        raise ArithmeticError("mixed second derivatives disagree")
    return SecondDerivField(ixx, ixy, iyx, iyy)


def extract_warped_patch(img: np.ndarray, box: Box, p=(0.0, 0.0), margin: int = 0) -> Patch:
    """Sample ``img`` over ``box`` translated by ``p``.

    ``margin`` grows the sampled window by that many pixels on every side, which
    lets derivatives at the box rim see real neighbours instead of one-sided
    differences.
    """
    x0 = box.x - margin + float(p[0])
    y0 = box.y - margin + float(p[1])
    values = _kernels.K.sample_patch(img, x0, y0, box.w + 2 * margin, box.h + 2 * margin)
    return Patch((x0, y0), values)


def add_salt_pepper(img: np.ndarray, density: float, rng: np.random.Generator) -> np.ndarray:
    """Return a copy with a ``density`` fraction of pixels forced to 0 or 1."""
    if not 0.0 <= density <= 1.0:
        raise ValueError(f"noise density must be in [0, 1], got {density}")
    out = np.array(img, dtype=np.float64, copy=True)
    hit = rng.random(out.shape) < density
    salt = rng.random(out.shape) < 0.5
    out[hit & salt] = 1.0
    out[hit & ~salt] = 0.0
    return out

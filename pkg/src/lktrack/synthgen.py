"""Synthetic tracking videos: one white shape sliding over a noisy black frame."""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import hull
from .pgm import write_pgm
from .raster import Box, add_salt_pepper

SHAPES = ("circle", "rectangle", "triangle", "hexagram", "hull5", "hull7", "hull9")
SIZES = (15, 20, 25)
MAX_STEP = 2
MIN_HULL_FILL = 0.1


@dataclass(frozen=True)
class SynthSpec:
    frame_size: tuple[int, int] = (200, 200)  # (width, height)
    noise_density: float = 0.01
    object_sizes: tuple[int, ...] = SIZES
    videos_per_shape: int = 5
    frames_per_video: int = 100
    seed: int = 42
    # random hulls covering less than this fraction of the object square are
    # redrawn; 0 keeps every hull with at least three vertices
    min_hull_fill: float = MIN_HULL_FILL


@dataclass(frozen=True)
class VideoKey:
    shape: str
    size: int
    index: int

    @property
    def name(self) -> str:
        return f"{self.shape}_{self.size}_v{self.index}"


def video_keys(spec: SynthSpec, scale: str = "full") -> list[VideoKey]:
    """Every (shape, size, video) triple of the suite; ``desk`` keeps video 0 only."""
    if scale not in ("full", "desk"):
        raise ValueError(f"scale must be 'full' or 'desk', got {scale!r}")
    count = spec.videos_per_shape if scale == "full" else 1
    return [VideoKey(s, z, i) for s in SHAPES for z in spec.object_sizes for i in range(count)]


def video_rng(seed: int, key: VideoKey) -> np.random.Generator:
    """Independent stream per video, derived from the suite seed and the video identity."""
    return np.random.default_rng([seed, SHAPES.index(key.shape), key.size, key.index])


def _pixel_centers(size: int) -> tuple[np.ndarray, np.ndarray]:
    c = np.arange(size) + 0.5
    return np.meshgrid(c, c)  # x varies along columns


def _fill_convex(poly: np.ndarray, size: int) -> np.ndarray:
    """Mask of pixels whose centre lies in the CCW convex polygon (image coordinates)."""
    xs, ys = _pixel_centers(size)
    mask = np.ones((size, size), dtype=bool)
    n = len(poly)
    for k in range(n):
        o, a = poly[k], poly[(k + 1) % n]
        mask &= (a[0] - o[0]) * (ys - o[1]) - (a[1] - o[1]) * (xs - o[0]) >= -1e-9
    return mask


def _ccw(poly) -> np.ndarray:
    poly = np.asarray(poly, dtype=np.float64)
    area2 = sum(hull.cross((0.0, 0.0), poly[k], poly[(k + 1) % len(poly)]) for k in range(len(poly)))
    return poly if area2 > 0 else poly[::-1]


def polygon_area(poly) -> float:
    poly = np.asarray(poly, dtype=np.float64)
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def rasterize(
    kind: str, size: int, rng: np.random.Generator | None = None, min_hull_fill: float = MIN_HULL_FILL
) -> np.ndarray:
    """Boolean ``size x size`` mask of one object."""
    if size not in SIZES:
        raise ValueError(f"object size must be one of {SIZES}, got {size}")
    s = float(size)
    if kind == "rectangle":
        return np.ones((size, size), dtype=bool)
    if kind == "circle":
        xs, ys = _pixel_centers(size)
        return (xs - s / 2) ** 2 + (ys - s / 2) ** 2 <= (s / 2) ** 2
    if kind == "triangle":
        return _fill_convex(_ccw([(s / 2, 0.0), (0.0, s), (s, s)]), size)
    if kind == "hexagram":
        r = s / 2
        up = [(r + r * math.cos(a), r + r * math.sin(a)) for a in np.radians([-90, 30, 150])]
        down = [(r + r * math.cos(a), r + r * math.sin(a)) for a in np.radians([90, 210, 330])]
        return _fill_convex(_ccw(up), size) | _fill_convex(_ccw(down), size)
    if kind in ("hull5", "hull7", "hull9"):
        if rng is None:
            raise ValueError(f"{kind} needs a random generator")
        n = int(kind[4:])
        while True:
            pts = rng.uniform(0.0, s, size=(n, 2))
            try:
                poly = hull.monotone_chain(hull.interior_prune(pts))
            except hull.DegenerateInputError:
                continue
            if polygon_area(poly) < min_hull_fill * s * s:
                continue
            mask = _fill_convex(_ccw(poly), size)
            if mask.any():
                return mask
    raise ValueError(f"unknown shape {kind!r}")


def gen_trajectory(rng: np.random.Generator, frames: int, frame_size=(200, 200), obj_size: int = 15) -> np.ndarray:
    """``(frames, 2)`` integer top-left positions of an ``obj_size`` square.

    Each axis moves by a uniform step in [-2, 2] per frame and reflects off
    the frame border so the square never leaves the frame.
    """
    if frames < 1:
        raise ValueError("frames must be >= 1")
    width, height = frame_size
    if obj_size > width or obj_size > height:
        raise ValueError(f"object of size {obj_size} does not fit a {width}x{height} frame")
    hi = np.array([width - obj_size, height - obj_size])
    pos = np.array([rng.integers(0, hi[0] + 1), rng.integers(0, hi[1] + 1)])
    out = np.empty((frames, 2), dtype=np.int64)
    out[0] = pos
    for k in range(1, frames):
        pos = pos + rng.integers(-MAX_STEP, MAX_STEP + 1, size=2)
        pos = np.where(pos < 0, -pos, pos)
        pos = np.where(pos > hi, 2 * hi - pos, pos)
        out[k] = pos
    return out


def mask_bbox(mask: np.ndarray) -> Box:
    rows = np.flatnonzero(mask.any(axis=1))
    cols = np.flatnonzero(mask.any(axis=0))
    return Box(int(cols[0]), int(rows[0]), int(cols[-1] - cols[0] + 1), int(rows[-1] - rows[0] + 1))


def render_video(spec: SynthSpec, kind: str, size: int, rng: np.random.Generator):
    """Frames and per-frame ground-truth boxes for one video."""
    mask = rasterize(kind, size, rng, spec.min_hull_fill)
    track = gen_trajectory(rng, spec.frames_per_video, spec.frame_size, size)
    width, height = spec.frame_size
    frames = []
    gt = []
    for x, y in track:
        img = np.zeros((height, width))
        img[y:y + size, x:x + size][mask] = 1.0
        gt.append(mask_bbox(img > 0))
        frames.append(add_salt_pepper(img, spec.noise_density, rng) if spec.noise_density > 0 else img)
    return frames, gt


def write_gt(path, boxes) -> None:
    lines = ["frame,x,y,w,h"] + [f"{k},{b.x},{b.y},{b.w},{b.h}" for k, b in enumerate(boxes)]
    Path(path).write_text("\n".join(lines) + "\n")


def write_video(out_dir, spec: SynthSpec, key: VideoKey) -> Path:
    """Render one video into ``out_dir/<key.name>`` and return that directory."""
    frames, gt = render_video(spec, key.shape, key.size, video_rng(spec.seed, key))
    vdir = Path(out_dir) / key.name
    vdir.mkdir(parents=True, exist_ok=True)
    for k, img in enumerate(frames):
        write_pgm(vdir / f"frame_{k:04d}.pgm", img)
    write_gt(vdir / "gt.csv", gt)
    (vdir / "meta.txt").write_text(f"seed={spec.seed}\nshape={key.shape}\nsize={key.size}\nvideo={key.index}\n")
    return vdir


def generate_suite(out_dir, spec: SynthSpec = SynthSpec(), scale: str = "full", log=None) -> list[Path]:
    os.makedirs(out_dir, exist_ok=True)
    dirs = []
    for key in video_keys(spec, scale):
        vdir = write_video(out_dir, spec, key)
        if log is not None:
            log(f"{key.name}\t{spec.frames_per_video} frames\t{vdir}")
        dirs.append(vdir)
    return dirs

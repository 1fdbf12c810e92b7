"""Per-pixel inner loops, in a numba flavour and a pure-numpy flavour.

Both flavours expose the same five functions and agree to rounding error.
The numba flavour is used when numba imports cleanly and the environment
variable ``LKTRACK_DISABLE_NUMBA`` is unset (or ``0``); otherwise the numpy
flavour is used.  ``benchmarks/bench_kernels.py`` times one against the other.
"""
from __future__ import annotations

import os
from types import SimpleNamespace

import numpy as np

ENV_FLAG = "LKTRACK_DISABLE_NUMBA"


# --------------------------------------------------------------------------
# numpy flavour
# --------------------------------------------------------------------------

def _np_sample_patch(img, x0, y0, w, h):
    rows, cols = img.shape
    xs = np.clip(x0 + np.arange(w, dtype=np.float64), 0.0, cols - 1.0)
    ys = np.clip(y0 + np.arange(h, dtype=np.float64), 0.0, rows - 1.0)
    xi = np.floor(xs).astype(np.intp)
    yi = np.floor(ys).astype(np.intp)
    xi1 = np.minimum(xi + 1, cols - 1)
    yi1 = np.minimum(yi + 1, rows - 1)
    fx = (xs - xi)[None, :]
    fy = (ys - yi)[:, None]
    top = (1.0 - fx) * img[yi[:, None], xi[None, :]] + fx * img[yi[:, None], xi1[None, :]]
    bot = (1.0 - fx) * img[yi1[:, None], xi[None, :]] + fx * img[yi1[:, None], xi1[None, :]]
    return (1.0 - fy) * top + fy * bot


def _np_gradient(f):
    gy, gx = np.gradient(f)
    return gx, gy


def _np_residual_gradient(template, warped, gx, gy):
    r = template - warped
    return np.array([np.sum(gx * r), np.sum(gy * r)])


def _np_gram(gx, gy):
    h12 = np.sum(gx * gy)
    return np.array([[np.sum(gx * gx), h12], [h12, np.sum(gy * gy)]])


def _np_sumsq(a):
    return float(np.sum(a * a))


NUMPY = SimpleNamespace(
    name="numpy",
    sample_patch=_np_sample_patch,
    gradient=_np_gradient,
    residual_gradient=_np_residual_gradient,
    gram=_np_gram,
    sumsq=_np_sumsq,
)


# --------------------------------------------------------------------------
# numba flavour
# --------------------------------------------------------------------------

def _build_numba():
    from numba import njit

    @njit(cache=True)
    def sample_patch(img, x0, y0, w, h):
        rows, cols = img.shape
        out = np.empty((h, w))
        xmax = cols - 1.0
        ymax = rows - 1.0
        for i in range(h):
            y = y0 + float(i)
            if y < 0.0:
                y = 0.0
            elif y > ymax:
                y = ymax
            yi = int(np.floor(y))
            yi1 = min(yi + 1, rows - 1)
            fy = y - yi
            for j in range(w):
                x = x0 + float(j)
                if x < 0.0:
                    x = 0.0
                elif x > xmax:
                    x = xmax
                xi = int(np.floor(x))
                xi1 = min(xi + 1, cols - 1)
                fx = x - xi
                top = (1.0 - fx) * img[yi, xi] + fx * img[yi, xi1]
                bot = (1.0 - fx) * img[yi1, xi] + fx * img[yi1, xi1]
                out[i, j] = (1.0 - fy) * top + fy * bot
        return out

    @njit(cache=True)
    def gradient(f):
        h, w = f.shape
        gx = np.empty((h, w))
        gy = np.empty((h, w))
        for i in range(h):
            gx[i, 0] = f[i, 1] - f[i, 0]
            for j in range(1, w - 1):
                gx[i, j] = (f[i, j + 1] - f[i, j - 1]) / 2.0
            gx[i, w - 1] = f[i, w - 1] - f[i, w - 2]
        for j in range(w):
            gy[0, j] = f[1, j] - f[0, j]
            gy[h - 1, j] = f[h - 1, j] - f[h - 2, j]
        for i in range(1, h - 1):
            for j in range(w):
                gy[i, j] = (f[i + 1, j] - f[i - 1, j]) / 2.0
        return gx, gy

    @njit(cache=True)
    def residual_gradient(template, warped, gx, gy):
        h, w = template.shape
        d1 = 0.0
        d2 = 0.0
        for i in range(h):
            for j in range(w):
                r = template[i, j] - warped[i, j]
                d1 += gx[i, j] * r
                d2 += gy[i, j] * r
        out = np.empty(2)
        out[0] = d1
        out[1] = d2
        return out

    @njit(cache=True)
    def gram(gx, gy):
        h, w = gx.shape
        a = 0.0
        b = 0.0
        c = 0.0
        for i in range(h):
            for j in range(w):
                a += gx[i, j] * gx[i, j]
                b += gx[i, j] * gy[i, j]
                c += gy[i, j] * gy[i, j]
        out = np.empty((2, 2))
        out[0, 0] = a
        out[0, 1] = b
        out[1, 0] = b
        out[1, 1] = c
        return out

    @njit(cache=True)
    def sumsq(a):
        s = 0.0
        for v in a.ravel():
            s += v * v
        return s

    return SimpleNamespace(
        name="numba",
        sample_patch=sample_patch,
        gradient=gradient,
        residual_gradient=residual_gradient,
        gram=gram,
        sumsq=sumsq,
    )


try:
    NUMBA = _build_numba()
except ImportError:  # pragma: no cover - numba is a declared dependency
    NUMBA = None


def numba_disabled() -> bool:
    return os.environ.get(ENV_FLAG, "0").strip().lower() not in ("", "0", "false", "no")


def select(name: str | None = None) -> SimpleNamespace:
    """Return the kernel set called ``name``, or the default one for this process."""
    if name is None:
        name = "numpy" if numba_disabled() or NUMBA is None else "numba"
    if name == "numpy":
        return NUMPY
    if name == "numba":
        if NUMBA is None:
            raise RuntimeError("numba kernels requested but numba is not importable")
        return NUMBA
    raise ValueError(f"unknown kernel backend {name!r}")


K = select()

"""Time the numpy and numba kernel sets against each other.

Two parts: each hot kernel in isolation on patch sizes the tracker actually
sees, then one synthetic video tracked end to end under each backend.

    python3 benchmarks/bench_kernels.py [--repeat 2000] [--method gd --step 0.02]
"""
import argparse
import timeit

import numpy as np

from lktrack import _kernels, synthgen
from lktrack.optim import OptimizerSpec
from lktrack.tracker import TrackConfig, track_sequence


def kernel_cases(size, rng):
    frame = rng.random((200, 200))
    patch = rng.random((size + 2, size + 2))
    t, w = rng.random((size, size)), rng.random((size, size))
    gx, gy = rng.normal(size=(2, size, size))
    return {
        "sample_patch": lambda k: k.sample_patch(frame, 50.3, 61.7, size + 2, size + 2),
        "gradient": lambda k: k.gradient(patch),
        "residual_gradient": lambda k: k.residual_gradient(t, w, gx, gy),
        "gram": lambda k: k.gram(gx, gy),
        "sumsq": lambda k: k.sumsq(gx),
    }


def best_of(fn, repeat):
    # min over several batches is the least noisy per-call estimate
    return min(timeit.repeat(fn, number=repeat, repeat=5)) / repeat


def bench_kernels(backends, repeat):
    rng = np.random.default_rng(0)
    print(f"{'kernel':<18} {'size':>4}  " + "  ".join(f"{b.name + ' (us)':>12}" for b in backends) + "   speedup")
    for size in synthgen.SIZES:
        for name, call in kernel_cases(size, rng).items():
            for b in backends:
                call(b)  # trigger compilation outside the timed region
            times = [best_of(lambda b=b: call(b), repeat) for b in backends]
            ratio = f"{times[0] / times[-1]:8.1f}x" if len(times) > 1 else ""
            print(f"{name:<18} {size:>4}  " + "  ".join(f"{t * 1e6:12.2f}" for t in times) + f"  {ratio}")


def bench_tracking(backends, method, step):
    spec = synthgen.SynthSpec()
    key = synthgen.VideoKey("hull7", 20, 0)
    frames, gt = synthgen.render_video(spec, key.shape, key.size, synthgen.video_rng(spec.seed, key))
    cfg = TrackConfig(OptimizerSpec(method, step))
    print(f"\ntracking {key.name} ({len(frames)} frames) with {method} step={step}")
    reference = None
    for b in backends:
        _kernels.K = b
        track_sequence(frames[:3], gt[0], cfg)  # warm-up
        traj = track_sequence(frames, gt[0], cfg)
        per_frame = sum(r.elapsed for r in traj) / len(traj)
        boxes = [r.box for r in traj]
        same = "" if reference is None else f"  boxes identical to {backends[0].name}: {boxes == reference}"
        reference = reference or boxes
        print(f"  {b.name:<6} {per_frame * 1e6:10.1f} us/frame{same}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=2000)
    ap.add_argument("--method", default="gauss_newton")
    ap.add_argument("--step", type=float, default=None)
    args = ap.parse_args()
    backends = [_kernels.NUMPY] + ([_kernels.NUMBA] if _kernels.NUMBA is not None else [])
    default = _kernels.K
    try:
        bench_kernels(backends, args.repeat)
        bench_tracking(backends, args.method, args.step)
    finally:
        _kernels.K = default


if __name__ == "__main__":
    main()

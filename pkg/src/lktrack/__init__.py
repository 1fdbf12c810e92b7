"""Pure-translation Lucas-Kanade tracking with swappable step solvers."""
from .bench import BenchRow, EvalResult, SuiteConfig, box_error, emit_report, evaluate, load_external_sequence, run_suite
from .optim import OptimizerSpec
from .raster import Box, Patch
from .synthgen import SynthSpec
from .tracker import FrameResult, TrackConfig, align, track_sequence

__version__ = "0.1.0"

__all__ = [
    "BenchRow",
    "Box",
    "EvalResult",
    "FrameResult",
    "OptimizerSpec",
    "Patch",
    "SuiteConfig",
    "SynthSpec",
    "TrackConfig",
    "align",
    "box_error",
    "emit_report",
    "evaluate",
    "load_external_sequence",
    "run_suite",
    "track_sequence",
]

import sys
from pathlib import Path

import numpy as np
import pytest

from lktrack import _kernels

sys.path.insert(0, str(Path(__file__).parent))

BACKENDS = ["numpy"] + (["numba"] if _kernels.NUMBA is not None else [])

# (criterion id, passed, detail) lines collected by test_acceptance.py
ACCEPTANCE_LINES = []


@pytest.fixture(params=BACKENDS)
def backend(request, monkeypatch):
    """Run the test once per kernel flavour."""
    k = _kernels.select(request.param)
    monkeypatch.setattr(_kernels, "K", k)
    return k


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for cid, ok, detail in sorted(ACCEPTANCE_LINES, key=lambda t: t[0]):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {cid}: {detail}")


@pytest.fixture(scope="session")
def desk_suite(tmp_path_factory):
    """The 21-video desk-scale suite at seed 42, written once per session."""
    from lktrack.cli import main

    root = tmp_path_factory.mktemp("desk") / "suite"
    assert main(["generate", "--out-dir", str(root), "--seed", "42", "--scale", "desk"]) == 0
    return root

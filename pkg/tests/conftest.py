import sys
import numpy as np
import pytest
from hypothesis import strategies as st

from pottsclust.evidence import FrameOfDiscernment, MassFunction, SimpleSupport


def random_evidence(rng, n, frame_size=4, s_high=0.9):
    """``n`` simple supports on random nonempty focal sets, supports in (0, s_high)."""
    frame = FrameOfDiscernment(frame_size)
    out = []
    for _ in range(n):
        focal = int(rng.integers(1, frame.theta + 1))
        s = float(rng.uniform(0.0, s_high))
        while s == 0.0:
            s = float(rng.uniform(0.0, s_high))
        out.append(SimpleSupport(frame, focal, s))
    return out


def interval_evidence(rng, n, frame_size=5, s_high=1.0):
    """Simple supports on contiguous runs ``{a, ..., b}`` of the frame."""
    frame = FrameOfDiscernment(frame_size)
    out = []
    for _ in range(n):
        a, b = sorted(int(x) for x in rng.integers(1, frame_size + 1, size=2))
        out.append(SimpleSupport.of(frame, range(a, b + 1), float(rng.uniform(1e-9, s_high))))
    return out


def disjoint_singletons(supports, frame_size=None):
    frame = FrameOfDiscernment(frame_size or len(supports))
    return [SimpleSupport.of(frame, [i + 1], s) for i, s in enumerate(supports)]


@st.composite
def simple_supports(draw, frame_size=4, max_size=6, s_max=0.99):
    frame = FrameOfDiscernment(frame_size)
    n = draw(st.integers(1, max_size))
    out = []
    for _ in range(n):
        focal = draw(st.integers(1, frame.theta))
        s = draw(st.floats(0.0, s_max, allow_nan=False))
        out.append(SimpleSupport(frame, focal, s))
    return out


@st.composite
def mass_functions(draw, frame_size=3):
    frame = FrameOfDiscernment(frame_size)
    keys = draw(st.lists(st.integers(1, frame.theta), min_size=1, max_size=5, unique=True))
    raw = [draw(st.floats(0.05, 1.0)) for _ in keys]
    z = sum(raw)
    masses = {k: v / z for k, v in zip(keys, raw)}
    # fold rounding residue into the first key so the sum is 1 to machine precision
    masses[keys[0]] += 1.0 - sum(masses.values())
    return MassFunction(frame, masses)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "REPORT", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)

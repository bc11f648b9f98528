import math

import numpy as np
import pytest

from thsplines.knots import BasisSpec, KnotVector, parse_knots

_RESULTS: list[tuple[str, str, bool, str]] = []

R2 = math.sqrt(2.0)

# closed-form control points of the two circle segments, evaluated numerically
SEGMENT_M5 = [
    (-2 * R2 / 3, 0.0),
    (-2 * R2 / 3, -2 / 3 + R2 / 3),
    (2 - 2 * R2, -2 + R2),
    (1 - R2, -1.0),
    (-1 + R2, -1.0),
    (1.0, 1 - R2),
    (1.0, -1 + R2),
    (2 - R2, -2 + 2 * R2),
    (2 / 3 - R2 / 3, 2 * R2 / 3),
    (0.0, 2 * R2 / 3),
]
SEGMENT_M7 = [
    (-3 + 3 * R2 / 2, 0.0),
    (-3 + 3 * R2 / 2, 2 - 3 * R2 / 2),
    (-32 / 7 + 37 * R2 / 14, 15 / 7 - 25 * R2 / 14),
    (-27 / 7 + 16 * R2 / 7, 9 / 7 - 10 * R2 / 7),
    (-3 + 2 * R2, -1.0),
    (-1 + R2, -1.0),
    (1.0, 1 - R2),
    (1.0, 3 - 2 * R2),
    (-9 / 7 + 10 * R2 / 7, 27 / 7 - 16 * R2 / 7),
    (-15 / 7 + 25 * R2 / 14, 32 / 7 - 37 * R2 / 14),
    (-2 + 3 * R2 / 2, 3 - 3 * R2 / 2),
    (0.0, 3 - 3 * R2 / 2),
]


def example_knots(m: int) -> KnotVector:
    return parse_knots(f"open({m}; 0, 0.5, 1, 2, 2.5, 3)")


def random_window(rng, family: str, n: int, span_cap: float | None = None) -> BasisSpec:
    """Single-function spec (2n+2 knots) whose interior knots span less than ``span_cap``."""
    if span_cap is None:
        span_cap = 0.95 * math.pi if family == "trig" else 3.0
    a = rng.uniform(-2.0, 2.0)
    span = rng.uniform(0.0, span_cap)
    inner = np.sort(a + span * rng.uniform(0.0, 1.0, 2 * n))
    knots = np.r_[inner[0] - rng.uniform(0, 0.1), inner, inner[-1] + rng.uniform(0, 0.1)]
    return BasisSpec(family, 2 * n + 1, KnotVector(knots))


def random_knots(rng, m: int, count: int, max_gap: float) -> KnotVector:
    gaps = rng.uniform(0.05, 1.0, count - 1) * max_gap
    return KnotVector(np.r_[0.0, np.cumsum(gaps)])


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture
def criterion():
    """Record an acceptance outcome before asserting it."""

    def record(name: str, case: str, passed: bool, detail: str) -> bool:
        _RESULTS.append((name, case, bool(passed), detail))
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, case, passed, detail in _RESULTS:
        tag = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"{tag}  {name:<34} {case:<26} {detail}")

"""Least-squares approximation and convergence studies."""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .basis import active_normalized
from .knots import BasisSpec, Family, KnotVector
from .weights import compute_weights

__all__ = [
    "FitProblem",
    "FitReport",
    "RankDeficientError",
    "StudyRow",
    "builtin_target",
    "make_fit_knots",
    "sample_grid",
    "banded_lstsq",
    "least_squares_fit",
    "convergence_study",
    "PRECISION_FLOOR",
]

PRECISION_FLOOR = 1e-13
DOMAIN = (0.0, 10.0)
N_SAMPLES = 10001


class RankDeficientError(ValueError):
    pass


def builtin_target(x):
    """Oscillatory test function ``sin(10x) (4(x/5 - 1)^2 + 1) / 5`` on ``[0, 10]``."""
    x = np.asarray(x, dtype=float)
    return np.sin(10.0 * x) * (4.0 * (x / 5.0 - 1.0) ** 2 + 1.0) / 5.0


def make_fit_knots(m: int, p: int) -> KnotVector:
    """Open knots ``k/p`` on ``[0, 10]``, ends repeated ``m`` times (``10p + m - 1`` functions)."""
    if p < 1:
        raise ValueError("p must be >= 1")
    inner = [k / p for k in range(1, 10 * p)]
    return KnotVector([0.0] * m + inner + [10.0] * m)


def sample_grid(count: int = N_SAMPLES, domain: tuple[float, float] = DOMAIN) -> np.ndarray:
    return np.linspace(domain[0], domain[1], count)


@dataclass(frozen=True)
class FitProblem:
    spec: BasisSpec
    x: np.ndarray
    y: np.ndarray
    target_id: str | None = None

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if x.shape != y.shape or x.ndim != 1:
            raise ValueError("x and y must be 1-D arrays of equal length")
        if x.size < self.spec.dimension:
            raise ValueError(f"{x.size} samples for {self.spec.dimension} unknowns")
        a, b = self.spec.domain
        if np.any((x < a) | (x > b)):
            raise ValueError(f"samples outside spline domain [{a}, {b}]")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @classmethod
    def from_function(cls, spec: BasisSpec, f: Callable, x=None, target_id: str | None = None) -> "FitProblem":
        x = sample_grid(domain=spec.domain) if x is None else np.asarray(x, dtype=float)
        return cls(spec, x, np.asarray(f(x), dtype=float), target_id)


@dataclass(frozen=True)
class FitReport:
    coefficients: np.ndarray
    linf_error: float
    ndof: int
    runtime: float
    residual: np.ndarray | None = None


def banded_lstsq(starts: np.ndarray, rows: np.ndarray, rhs: np.ndarray, ncols: int, *, rtol: float = 1e-13):
    """Solve ``min ||A c - rhs||`` where row ``i`` of ``A`` is ``rows[i]`` placed at column ``starts[i]``.

    Rows are accumulated block by block (rows sharing a start column) into a
    banded upper-triangular factor with Householder QR, then back-substituted.
    """
    order = np.argsort(starts, kind="stable")
    starts, rows, rhs = starts[order], rows[order], rhs[order]
    bw = rows.shape[1]
    R = np.zeros((ncols, bw))  # R[i, d] = R_{i, i+d}
    z = np.zeros(ncols)
    bounds = np.flatnonzero(np.diff(starts)) + 1
    for lo, hi in zip(np.r_[0, bounds], np.r_[bounds, starts.size]):
        s = int(starts[lo])
        width = min(bw, ncols - s)
        block = np.zeros((width + hi - lo, width + 1))
        for r in range(width):
            block[r, r:width] = R[s + r, : width - r]
            block[r, width] = z[s + r]
        block[width:, :width] = rows[lo:hi, :width]
        block[width:, width] = rhs[lo:hi]
        tri = np.linalg.qr(block, mode="r")
        for r in range(width):
            R[s + r, : width - r] = tri[r, r:width] if r < tri.shape[0] else 0.0
            z[s + r] = tri[r, width] if r < tri.shape[0] else 0.0
    diag = np.abs(R[:, 0])
    if diag.max(initial=0.0) == 0.0 or np.any(diag <= rtol * diag.max()):
        bad = np.nonzero(diag <= rtol * max(diag.max(initial=0.0), 1e-300))[0].tolist()
        raise RankDeficientError(f"collocation matrix is rank deficient at columns {bad}")
    c = np.zeros(ncols)
    for i in range(ncols - 1, -1, -1):
        d = min(bw, ncols - i)
        c[i] = (z[i] - R[i, 1:d] @ c[i + 1 : i + d]) / R[i, 0]
    return c


def least_squares_fit(problem: FitProblem, weights=None) -> FitReport:
    spec = problem.spec
    t0 = time.perf_counter()
    w = compute_weights(spec) if weights is None else weights
    k, vals = active_normalized(spec, problem.x, w)
    starts = k - spec.order + 1
    coef = banded_lstsq(starts, vals, problem.y, spec.dimension)
    m = spec.order
    j = starts[:, None] + np.arange(m)[None, :]
    approx = np.einsum("sa,sa->s", vals, coef[j])
    residual = approx - problem.y
    runtime = time.perf_counter() - t0
    return FitReport(coef, float(np.abs(residual).max()), spec.dimension, runtime, residual)


@dataclass(frozen=True)
class StudyRow:
    family: Family
    m: int
    p: int
    ndof: int
    linf_error: float
    rate: float | None
    floor: bool
    runtime: float


def _fit_cell(family: Family, m: int, p: int, f: Callable, x: np.ndarray):
    spec = BasisSpec(family, m, make_fit_knots(m, p))
    return least_squares_fit(FitProblem(spec, x, f(x)))


def convergence_study(
    family: "Family | str",
    orders: Sequence[int],
    levels: "int | Sequence[int]",
    *,
    target: Callable = builtin_target,
    samples: int = N_SAMPLES,
    workers: int = 1,
) -> list[StudyRow]:
    """L-infinity errors for ``p = 2^(l+1)`` and rates ``log2(e_l / e_{l+1})``.

    Rates are left as ``None`` when either error is below the precision floor.
    """
    family = Family.parse(family)
    lv = list(range(1, levels + 1)) if isinstance(levels, int) else list(levels)
    x = sample_grid(samples)
    cells = [(m, 2 ** (l + 1)) for m in orders for l in lv]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(lambda c: _fit_cell(family, c[0], c[1], target, x), cells))
    else:
        reports = [_fit_cell(family, m, p, target, x) for m, p in cells]
    rows: list[StudyRow] = []
    for (m, p), rep in zip(cells, reports):
        prev = rows[-1] if rows and rows[-1].m == m else None
        floor = rep.linf_error < PRECISION_FLOOR
        rate = None
        if prev is not None and not floor and not prev.floor:
            rate = math.log2(prev.linf_error / rep.linf_error) / math.log2(p / prev.p)
        rows.append(StudyRow(family, m, p, rep.ndof, rep.linf_error, rate, floor, rep.runtime))
    return rows

"""Normalized B-spline curves, knot insertion and exact circles."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .basis import DomainError, active_normalized, scatter_active
from .knots import BasisSpec, Family, KnotVector, multiplicity, validate
from .weights import WeightSet, compute_weights

__all__ = [
    "CurveModel",
    "CircleSpec",
    "make_curve",
    "eval_curve",
    "insert_knot",
    "make_circle",
    "make_circle_segment",
    "circle_radius",
    "polygon_edge_distances",
]


@dataclass(frozen=True, eq=False)
class CurveModel:
    spec: BasisSpec
    weights: WeightSet
    control_points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.control_points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.shape[0] != self.spec.dimension:
            raise ValueError(f"{pts.shape[0]} control points for a basis of dimension {self.spec.dimension}")
        pts.setflags(write=False)
        object.__setattr__(self, "control_points", pts)

    @property
    def dim(self) -> int:
        return int(self.control_points.shape[1])

    def __call__(self, x):
        return eval_curve(self, x)


def make_curve(spec: BasisSpec, control_points, *, level: str = "relaxed", strategy="auto") -> CurveModel:
    validate(spec).enforce(level)
    return CurveModel(spec, compute_weights(spec, strategy), control_points)


def eval_curve(curve: CurveModel, x, *, return_basis: bool = False):
    """Curve points ``sum_j P_j N_j(x)`` for ``x`` in the spline domain."""
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    a, b = curve.spec.domain
    bad = np.nonzero(~((xs >= a) & (xs <= b)))[0]
    if bad.size:
        raise DomainError(f"parameter outside curve domain [{a}, {b}]", bad)
    k, vals = active_normalized(curve.spec, xs, curve.weights)
    m = curve.spec.order
    j = k[:, None] - m + 1 + np.arange(m)[None, :]
    pts = np.einsum("sa,sad->sd", vals, curve.control_points[j])
    if np.ndim(x) == 0:
        pts = pts[0]
    if return_basis:
        return pts, scatter_active(curve.spec, k, vals)
    return pts


# --- knot insertion --------------------------------------------------------


def _positive_weights(spec: BasisSpec) -> WeightSet:
    # the spacing bounds are only sufficient; positivity is what the control polygon needs
    w = compute_weights(spec)
    if np.any(w.weights <= 0):
        bad = np.nonzero(w.weights <= 0)[0].tolist()
        raise ValueError(f"refined knot vector has nonpositive normalization weights at j={bad}")
    return w


def _insert_blossom(curve: CurveModel, x_new: float) -> CurveModel:
    spec = curve.spec
    t = spec.knots.values
    m = spec.order
    s = spec.family.s
    k = int(np.searchsorted(t, x_new, side="right")) - 1
    if not m - 1 <= k <= t.size - m:
        raise ValueError(f"insertion point {x_new!r} outside the curve domain")
    # coefficients w.r.t. s(x_{j+m}, x_j) T_{j,m}
    coef = curve.weights.weights[:, None] * curve.control_points
    new = np.empty((coef.shape[0] + 1, coef.shape[1]))
    new[: k - m + 2] = coef[: k - m + 2]
    new[k + 1 :] = coef[k:]
    for j in range(k - m + 2, k + 1):
        den = s((t[j + m - 1] - t[j]) / 2.0)
        new[j] = (s((t[j + m - 1] - x_new) / 2.0) * coef[j - 1] + s((x_new - t[j]) / 2.0) * coef[j]) / den
    new_spec = spec.with_knots(spec.knots.insert(x_new))
    w = _positive_weights(new_spec)
    return CurveModel(new_spec, w, new / w.weights[:, None])


def _insert_collocation(curve: CurveModel, x_new: float) -> CurveModel:
    new_spec = curve.spec.with_knots(curve.spec.knots.insert(x_new))
    w = _positive_weights(new_spec)
    a, b = new_spec.domain
    breaks = np.unique(new_spec.knots.values)
    breaks = breaks[(breaks >= a) & (breaks <= b)]
    # m samples per nonempty span pin every piece
    xs = np.concatenate(
        [np.linspace(lo, hi, new_spec.order + 2)[1:-1] for lo, hi in zip(breaks[:-1], breaks[1:])]
    )
    k, vals = active_normalized(new_spec, xs, w)
    A = scatter_active(new_spec, k, vals)
    target = eval_curve(curve, xs)
    pts, *_ = np.linalg.lstsq(A, target, rcond=None)
    return CurveModel(new_spec, w, pts)


def insert_knot(curve: CurveModel, x_new: float, *, method: str = "blossom") -> CurveModel:
    """Insert one knot without changing the curve.

    ``blossom`` updates the unnormalized coefficients ``c_j = w_j P_j`` with
    sine-ratio interpolation of neighbouring coefficients; ``collocation``
    refits the refined basis on interior samples.
    """
    x_new = float(x_new)
    spec = curve.spec
    if multiplicity(spec.knots, x_new) >= spec.order:
        raise ValueError(f"knot {x_new!r} already has full multiplicity {spec.order}")
    if validate(spec).relaxed and not validate(spec.with_knots(spec.knots.insert(x_new))).relaxed:
        raise ValueError(f"inserting {x_new!r} breaks the relaxed knot spacing")
    if method == "blossom":
        return _insert_blossom(curve, x_new)
    if method == "collocation":
        return _insert_collocation(curve, x_new)
    raise ValueError(f"unknown insertion method {method!r}")


# --- circles ---------------------------------------------------------------


@dataclass(frozen=True)
class CircleSpec:
    order: int
    sides: int
    theta: float | None = None
    segment: tuple[int, int] | None = None

    def __post_init__(self):
        m, p = self.order, self.sides
        if m < 3 or m % 2 == 0:
            raise ValueError(f"circle order must be odd and >= 3, got {m}")
        if p < m:
            raise ValueError(f"need at least m={m} polygon sides, got {p}")
        if self.segment is not None:
            a, b = self.segment
            if not 0 <= a < b <= p:
                raise ValueError(f"segment needs 0 <= a < b <= p, got ({a}, {b})")

    @property
    def phase(self) -> float:
        return math.pi / self.sides if self.theta is None else float(self.theta)


def _circle_knot(k: int, p: int) -> float:
    return 2 * k * math.pi / p


def make_circle(circle: CircleSpec) -> CurveModel:
    """Full circle on ``[0, 2pi]`` with uniform knots ``2k pi/p``, ``k = -2n..p+2n``.

    Control points are the corners of a regular ``p``-gon with inradius 1.
    For ``m = 3`` the curve is the unit circle; for larger orders its radius is
    :func:`circle_radius`.
    """
    if circle.segment is not None:
        raise ValueError("use make_circle_segment for circle segments")
    m, p, theta = circle.order, circle.sides, circle.phase
    n = (m - 1) // 2
    knots = KnotVector([_circle_knot(k, p) for k in range(-2 * n, p + 2 * n + 1)])
    spec = BasisSpec(Family.TRIGONOMETRIC, m, knots)
    j = np.arange(1, p + 2 * n + 1)
    ang = theta + 2 * j * math.pi / p
    pts = np.column_stack([np.cos(ang), np.sin(ang)]) / math.cos(math.pi / p)
    return make_curve(spec, pts, level="none")


def make_circle_segment(circle: CircleSpec, *, method: str = "blossom") -> CurveModel:
    """Arc over ``[2a pi/p, 2b pi/p]`` with an open knot vector, same parameterization as the full circle."""
    if circle.segment is None:
        raise ValueError("circle spec has no segment")
    a, b = circle.segment
    curve = make_circle(CircleSpec(circle.order, circle.sides, circle.theta))
    m = circle.order
    xa, xb = _circle_knot(a, circle.sides), _circle_knot(b, circle.sides)
    for x_new in (xa, xb):
        while multiplicity(curve.spec.knots, x_new) < m:
            curve = insert_knot(curve, x_new, method=method)
    t = curve.spec.knots.values
    ia = int(np.searchsorted(t, xa, side="left"))
    ib = int(np.searchsorted(t, xb, side="left"))
    spec = curve.spec.with_knots(t[ia : ib + m])
    return CurveModel(spec, compute_weights(spec), curve.control_points[ia:ib])


def circle_radius(order: int, sides: int) -> float:
    """Radius traced by :func:`make_circle` (phase independent)."""
    curve = make_circle(CircleSpec(order, sides, 0.0))
    return float(np.linalg.norm(eval_curve(curve, 0.0)))


def polygon_edge_distances(curve: CurveModel, radius: float = 1.0) -> np.ndarray:
    """Distance from a circle of ``radius`` about the origin to each control polygon edge.

    Zero means the edge touches the circle; positive means it stays outside.
    """
    P = curve.control_points
    A, B = P[:-1], P[1:]
    d = B - A
    tt = np.clip(-np.einsum("ij,ij->i", A, d) / np.einsum("ij,ij->i", d, d), 0.0, 1.0)
    closest = A + tt[:, None] * d
    return np.abs(np.linalg.norm(closest, axis=1) - radius)

"""Evaluation of trigonometric/hyperbolic B-splines.

All evaluators work span-wise: for a sample ``x`` in ``[x_k, x_{k+1})`` they
build the triangle of the (at most ``m``) nonzero functions
``j = k-m+1, ..., k``. Functions whose knots fall outside the sequence are
treated as absent (zero).
"""

from __future__ import annotations

import numpy as np

from .knots import BasisSpec
from .weights import WeightSet, compute_weights

__all__ = [
    "find_spans",
    "active_unnormalized",
    "active_normalized",
    "active_normalized_recurrence",
    "eval_unnormalized",
    "eval_normalized_by_definition",
    "eval_normalized_recurrence",
    "tabulate_basis",
    "DomainError",
]


class DomainError(ValueError):
    """Samples outside the partition-of-unity domain."""

    def __init__(self, message: str, indices):
        super().__init__(message)
        self.indices = np.asarray(indices)


def find_spans(spec: BasisSpec, x) -> np.ndarray:
    """Span index ``k`` with ``x_k <= x < x_{k+1}``; -1 outside ``[x_0, x_{K-1})``.

    The right end of the domain ``x_{K-m}`` is mapped to the last nonempty
    span before it, so the final interval behaves as closed.
    """
    t = spec.knots.values
    x = np.asarray(x, dtype=float)
    k = np.searchsorted(t, x, side="right") - 1
    right = t[spec.knots.count - spec.order]
    k_end = int(np.searchsorted(t, right, side="left")) - 1
    k = np.where((x == right) & (k_end >= 0), k_end, k)
    return np.where((k < 0) | (k >= t.size - 1), -1, k)


def _knot(t: np.ndarray, idx: np.ndarray) -> np.ndarray:
    return t[np.clip(idx, 0, t.size - 1)]


def _ratio(num, den, valid):
    # 0/0 -> 0 term-wise
    safe = np.where(valid, den, 1.0)
    return np.where(valid, num / safe, 0.0)


def _sine_ratio(s, num, den):
    """``s(num/2) / s(den/2)`` with ``0/0 -> 0``.

    Below 1e-100 the sines equal their arguments in double precision, so the
    plain quotient is used; halving a subnormal difference would flush it to zero.
    """
    tiny = np.abs(den) < 1e-100
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        q = np.where(tiny, num / np.where(den == 0, 1.0, den), s(num / 2.0) / s(np.where(tiny, 1.0, den) / 2.0))
    return np.where(den == 0, 0.0, q)


def _active_scaled(spec: BasisSpec, x, r_max: int):
    """``(k, M)`` with ``M[:, c] = s(x_{j+r}, x_j) T_{j,r}(x)``, ``j = k-r+1+c``.

    Run on the scaled functions so every factor is a bounded sine ratio and
    near-coincident knots cannot overflow the order-1 reciprocal.
    """
    t = spec.knots.values
    K = t.size
    s = spec.family.s
    x = np.atleast_1d(np.asarray(x, dtype=float))
    k = find_spans(spec, x)
    inside = k >= 0
    kk = np.where(inside, k, 0)
    vals = (inside & (_knot(t, kk + 1) > _knot(t, kk))).astype(float)[:, None]
    for r in range(2, r_max + 1):
        new = np.zeros((x.size, r))
        for col in range(r):
            i = kk - r + 1 + col
            xi, xir = _knot(t, i), _knot(t, i + r)
            exists = inside & (i >= 0) & (i + r <= K - 1)
            term = np.zeros(x.size)
            if col >= 1:
                # M_{i,r-1} lives on [x_i, x_{i+r-1}]
                d = _knot(t, i + r - 1)
                term = term + _sine_ratio(s, x - xi, d - xi) * vals[:, col - 1]
            if col < r - 1:
                d = _knot(t, i + 1)
                term = term + _sine_ratio(s, xir - x, xir - d) * vals[:, col]
            new[:, col] = np.where(exists, term, 0.0)
        vals = new
    return k, vals


def active_unnormalized(spec: BasisSpec, x, order: int | None = None):
    """Return ``(k, T)`` where ``T[:, c] = T_{k-r+1+c, r}(x)`` for ``r = order``."""
    r = spec.order if order is None else int(order)
    if r < 1:
        raise ValueError("order must be >= 1")
    t = spec.knots.values
    k, M = _active_scaled(spec, x, r)
    kk = np.where(k >= 0, k, 0)
    j = kk[:, None] - r + 1 + np.arange(r)[None, :]
    lo, hi = _knot(t, j), _knot(t, j + r)
    den = spec.family.s((hi - lo) / 2.0)
    valid = (k[:, None] >= 0) & (j >= 0) & (j + r <= t.size - 1) & (den != 0)
    with np.errstate(over="ignore"):
        return k, _ratio(M, den, valid)


def _weights_for(spec: BasisSpec, weights: WeightSet | None) -> np.ndarray:
    if weights is None:
        return compute_weights(spec).weights
    if len(weights) != spec.dimension:
        raise ValueError(f"weight set has {len(weights)} entries, basis has {spec.dimension}")
    return np.asarray(weights.weights)


def active_normalized(spec: BasisSpec, x, weights: WeightSet | None = None):
    """``(k, N)`` via ``N_j = w_j s(x_{j+m}, x_j) T_{j,m}``."""
    w = _weights_for(spec, weights)
    m = spec.order
    k, M = _active_scaled(spec, x, m)
    kk = np.where(k >= 0, k, 0)
    j = kk[:, None] - m + 1 + np.arange(m)[None, :]
    valid = (k[:, None] >= 0) & (j >= 0) & (j < spec.dimension)
    return k, np.where(valid, w[np.clip(j, 0, spec.dimension - 1)] * M, 0.0)


def _weights_all_orders(spec: BasisSpec, top: np.ndarray) -> dict[int, np.ndarray]:
    out = {spec.order: top}
    for r in range(spec.order - 2, 0, -2):
        out[r] = compute_weights(BasisSpec(spec.family, r, spec.knots)).weights
    return out


def active_normalized_recurrence(spec: BasisSpec, x, weights: WeightSet | None = None):
    """``(k, N)`` via the three-term recurrence on normalized functions of order ``m-2``."""
    t = spec.knots.values
    K = t.size
    s = spec.family.s
    w_by_order = _weights_all_orders(spec, _weights_for(spec, weights))

    def q(a, b, c, d):
        # s(a, b) / s(c, d)
        return _sine_ratio(s, a - b, c - d)

    x = np.atleast_1d(np.asarray(x, dtype=float))
    k = find_spans(spec, x)
    inside = k >= 0
    kk = np.where(inside, k, 0)
    vals = np.where(inside, 1.0, 0.0)[:, None]
    for r in range(3, spec.order + 1, 2):
        w_r, w_p = w_by_order[r], w_by_order[r - 2]

        def wr(idx, arr):
            return arr[np.clip(idx, 0, arr.size - 1)]

        new = np.zeros((x.size, r))
        for col in range(r):
            j = kk - r + 1 + col
            X = {d: _knot(t, j + d) for d in (0, 1, 2, r - 2, r - 1, r)}
            exists = inside & (j >= 0) & (j + r <= K - 1)
            prev = [vals[:, col + d - 2] if 0 <= col + d - 2 < r - 2 else np.zeros(x.size) for d in range(3)]

            wj = wr(j, w_r)
            total = np.zeros(x.size)
            # products of bounded ratios, since a product of two tiny spans would underflow.
            # Off-support terms may overflow; they meet a zero lower-order value and are masked.
            with np.errstate(over="ignore", invalid="ignore"):
                a0 = q(x, X[0], X[r - 1], X[0]) * q(x, X[0], X[r - 2], X[0])
                a1 = q(x, X[0], X[r - 1], X[0]) * q(X[r - 1], x, X[r - 1], X[1]) + q(
                    X[r], x, X[r], X[1]
                ) * q(x, X[1], X[r - 1], X[1])
                a2 = q(X[r], x, X[r], X[1]) * q(X[r], x, X[r], X[2])
                for d, coef in enumerate((a0, a1, a2)):
                    wsub = wr(j + d, w_p)
                    total = total + _ratio(coef * wj * prev[d], wsub, (prev[d] != 0) & (wsub != 0))
            new[:, col] = np.where(exists, total, 0.0)
        vals = new
    return k, vals


def _pick(spec: BasisSpec, k, vals, j: int, order: int):
    col = j - (k - order + 1)
    ok = (k >= 0) & (col >= 0) & (col < order)
    out = np.where(ok, vals[np.arange(k.size), np.clip(col, 0, order - 1)], 0.0)
    return out


def _scalar_or_array(x, out):
    return float(out[0]) if np.ndim(x) == 0 else out


def eval_unnormalized(spec: BasisSpec, j: int, m_eval: int, x):
    """``T_{j,m_eval}(x)`` (or ``H``); even intermediate orders are allowed."""
    if not 1 <= m_eval <= spec.order:
        raise ValueError(f"m_eval must be in 1..{spec.order}")
    k, vals = active_unnormalized(spec, x, m_eval)
    return _scalar_or_array(x, _pick(spec, k, vals, j, m_eval))


def eval_normalized_by_definition(spec: BasisSpec, j: int, x, weights: WeightSet | None = None):
    k, vals = active_normalized(spec, x, weights)
    return _scalar_or_array(x, _pick(spec, k, vals, j, spec.order))


def eval_normalized_recurrence(spec: BasisSpec, j: int, x, weights: WeightSet | None = None):
    k, vals = active_normalized_recurrence(spec, x, weights)
    return _scalar_or_array(x, _pick(spec, k, vals, j, spec.order))


def _check_domain(spec: BasisSpec, x: np.ndarray) -> None:
    a, b = spec.domain
    bad = np.nonzero(~((x >= a) & (x <= b)))[0]
    if bad.size:
        raise DomainError(
            f"{bad.size} sample(s) outside domain [{a}, {b}], first at index {int(bad[0])}", bad
        )


def tabulate_basis(spec: BasisSpec, x_samples, weights: WeightSet | None = None, *, method: str = "definition"):
    """Dense ``(len(x), K-m)`` matrix of normalized B-spline values."""
    x = np.atleast_1d(np.asarray(x_samples, dtype=float))
    _check_domain(spec, x)
    fn = {"definition": active_normalized, "recurrence": active_normalized_recurrence}[method]
    k, vals = fn(spec, x, weights)
    return scatter_active(spec, k, vals)


def scatter_active(spec: BasisSpec, k: np.ndarray, vals: np.ndarray) -> np.ndarray:
    m = spec.order
    out = np.zeros((k.size, spec.dimension))
    j = k[:, None] - m + 1 + np.arange(m)[None, :]
    ok = (k[:, None] >= 0) & (j >= 0) & (j < spec.dimension)
    rows = np.broadcast_to(np.arange(k.size)[:, None], j.shape)
    out[rows[ok], j[ok]] = vals[ok]
    return out

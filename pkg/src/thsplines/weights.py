"""Normalization weights for odd-order trigonometric and hyperbolic B-splines.

With ``m = 2n + 1`` the weight ``w_{j,m}`` rescales ``s(x_{j+m}, x_j) T_{j,m}``
so that the functions sum to one. It only depends on the interior knots
``x_{j+1}, ..., x_{j+2n}``. Several equivalent expressions are provided:

* :func:`weight_bruteforce_Q` -- average over all ``(2n)!`` permutations,
* :func:`weight_pruned_Qhat` -- average over the ``(2n-1)!!`` pairings,
* :func:`weight_signvector` -- average of ``c(y/2)`` over the
  ``binomial(2n-1, n-1)`` sign vectors (recursive, the production path),
* :func:`weight_uniform` -- closed form for equally spaced knots via
  q-binomial coefficients,

plus two trigonometric cross-checks (:func:`weight_integral_check`,
:func:`weight_walz_check`). ``c`` is ``cos`` or ``cosh`` by family.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

import numpy as np

from .knots import BasisSpec, Family, is_uniform

__all__ = [
    "N_MAX_Q",
    "N_MAX_QHAT",
    "OrderTooLargeError",
    "Strategy",
    "WeightSet",
    "RhoTable",
    "weight_bruteforce_Q",
    "weight_pruned_Qhat",
    "weight_signvector",
    "enumerate_signvectors",
    "signvector_prefactor",
    "rho_table",
    "rho_bruteforce",
    "weight_uniform",
    "weight_uniform_unmerged",
    "uniform_condition_scale",
    "weight_integral_check",
    "weight_walz_check",
    "walz_term_count",
    "cardinalities",
    "compute_weights",
    "weight",
]

N_MAX_Q = 5
N_MAX_QHAT = 8
N_MAX_CARDINALITY = 20


class OrderTooLargeError(ValueError):
    """Raised when a brute-force oracle is asked for more terms than its cap allows."""


class Strategy(enum.Enum):
    BRUTE_FORCE_Q = "q"
    PRUNED_QHAT = "qhat"
    SIGN_VECTOR_S = "s"
    UNIFORM_RHO = "uniform"

    @classmethod
    def parse(cls, value: "str | Strategy") -> "Strategy":
        if isinstance(value, Strategy):
            return value
        for member in cls:
            if member.value == value.lower():
                return member
        raise ValueError(f"unknown weight strategy {value!r}")


def _check_window(spec: BasisSpec, j: int) -> None:
    if not 0 <= j < spec.dimension:
        raise IndexError(f"B-spline index j={j} outside 0..{spec.dimension - 1}")


def _interior(spec: BasisSpec, j: int) -> np.ndarray:
    """Knots ``x_{j+1}, ..., x_{j+2n}`` (index k-1 holds ``x_{j+k}``)."""
    n = spec.half_degree
    return spec.knots.values[j + 1 : j + 2 * n + 1]


# --- permutation oracles ---------------------------------------------------


@lru_cache(maxsize=None)
def _permutations(n: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(2 * n))), dtype=np.int8).reshape(-1, 2 * n)


def _pairings(items: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
    # smallest remaining element always opens the next pair: q1 < q3 < ..., q_{2k-1} < q_{2k}
    if not items:
        yield ()
        return
    first, rest = items[0], items[1:]
    for i, partner in enumerate(rest):
        for tail in _pairings(rest[:i] + rest[i + 1 :]):
            yield (first, partner) + tail


@lru_cache(maxsize=None)
def _pruned_pairings(n: int) -> np.ndarray:
    return np.array(list(_pairings(tuple(range(2 * n)))), dtype=np.int8).reshape(-1, 2 * n)


def _pair_product_mean(spec: BasisSpec, j: int, q: np.ndarray) -> float:
    x = _interior(spec, j)
    c = spec.family.c
    table = c((x[None, :] - x[:, None]) / 2.0)  # table[a, b] = c((x_b - x_a)/2)
    prod = np.ones(q.shape[0])
    for k in range(q.shape[1] // 2):
        prod *= table[q[:, 2 * k], q[:, 2 * k + 1]]
    return float(prod.sum() / q.shape[0])


def weight_bruteforce_Q(spec: BasisSpec, j: int, *, n_max: int = N_MAX_Q) -> float:
    """Average of cosine products over all ``(2n)!`` permutations of ``1..2n``."""
    _check_window(spec, j)
    n = spec.half_degree
    if n == 0:
        return 1.0
    if n > n_max:
        raise OrderTooLargeError(f"brute-force Q weights capped at n={n_max} ((2n)! terms), got n={n}")
    return _pair_product_mean(spec, j, _permutations(n))


def weight_pruned_Qhat(spec: BasisSpec, j: int, *, n_max: int = N_MAX_QHAT) -> float:
    """Average of cosine products over the ``(2n-1)!!`` canonical pairings."""
    _check_window(spec, j)
    n = spec.half_degree
    if n == 0:
        return 1.0
    if n > n_max:
        raise OrderTooLargeError(f"pruned Q-hat weights capped at n={n_max}, got n={n}")
    return _pair_product_mean(spec, j, _pruned_pairings(n))


# --- sign vectors ----------------------------------------------------------


def enumerate_signvectors(n: int) -> Iterator[tuple[int, ...]]:
    """Yield all vectors of ``n-1`` entries ``-1`` and ``n`` entries ``+1``.

    Depth-first, ``-1`` branch first.
    """
    if n < 1:
        raise ValueError("sign vectors need n >= 1")

    def rec(prefix: tuple[int, ...], neg: int, pos: int):
        if neg + pos == 2 * n - 1:
            yield prefix
            return
        if neg < n - 1:
            yield from rec(prefix + (-1,), neg + 1, pos)
        if pos < n:
            yield from rec(prefix + (1,), neg, pos + 1)

    yield from rec((), 0, 0)


def signvector_prefactor(n: int) -> float:
    """``1 / |S_n|`` as a correctly rounded double."""
    return 1.0 / math.comb(2 * n - 1, n - 1)


def weight_signvector(spec: BasisSpec, j: int) -> float:
    """Depth-first sign-vector sum.

    The running sum ``y = -x_{j+1} + sum_i s_i x_{j+i+1}`` is extended one
    knot per level; a leaf contributes ``c(y/2)``.
    """
    _check_window(spec, j)
    n = spec.half_degree
    if n == 0:
        return 1.0
    x = spec.knots.values
    c = spec.family.c

    def rec(k: int, neg: int, pos: int, y: float) -> float:
        if k == 2 * n:
            return float(c(y / 2.0))
        w = 0.0
        if neg < n - 1:
            w += rec(k + 1, neg + 1, pos, y - x[j + k + 1])
        if pos < n:
            w += rec(k + 1, neg, pos + 1, y + x[j + k + 1])
        return w

    return signvector_prefactor(n) * rec(1, 0, 0, -float(x[j + 1]))


# --- q-binomial coefficients -----------------------------------------------


@dataclass(frozen=True)
class RhoTable:
    """Coefficients of the Gaussian binomial ``[a+b choose a]_q``."""

    a: int
    b: int
    coefficients: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.coefficients)

    def __getitem__(self, i: int) -> int:
        return self.coefficients[i]


@lru_cache(maxsize=None)
def _rho(a: int, b: int) -> tuple[int, ...]:
    rho = [1] * (a * b + 1)
    if a >= 2 and b >= 2:
        left = _rho(a - 1, b)
        right = _rho(a, b - 1)
        for i in range(0, a):
            rho[i] = left[i]
        for i in range(a, (a - 1) * b + 1):
            rho[i] = left[i] + right[i - a]
        for i in range((a - 1) * b + 1, a * b + 1):
            rho[i] = right[i - a]
    return tuple(rho)


def rho_table(a: int, b: int) -> RhoTable:
    if a < 0 or b < 0:
        raise ValueError("rho_table needs a, b >= 0")
    return RhoTable(a, b, _rho(a, b))


def rho_bruteforce(a: int, b: int) -> tuple[int, ...]:
    """Count placements of ``i`` identical balls in ``a`` identical bins of capacity ``b``."""
    counts = [0] * (a * b + 1)
    for filling in itertools.combinations_with_replacement(range(b + 1), a):
        counts[sum(filling)] += 1
    return tuple(counts)


# --- uniform knots ---------------------------------------------------------


def _uniform_term_list(n: int, h: float, family: Family, merged: bool) -> list[float]:
    rho = _rho(n - 1, n)
    c = family.c
    nsq = n * n
    if not merged:
        return [r * float(c((nsq - 2 * i) * h / 2.0)) for i, r in enumerate(rho)]
    # i1 + i2 = n^2 gives opposite arguments; c is even
    terms = [rho[i] * float(c((nsq - 2 * i) * h / 2.0)) for i in range(min(n, len(rho)))]
    terms += [(rho[i] + rho[nsq - i]) * float(c((nsq - 2 * i) * h / 2.0)) for i in range(n, (nsq + 1) // 2)]
    if nsq % 2 == 0 and n <= nsq // 2 <= n * (n - 1):
        terms.append(float(rho[nsq // 2]))
    return terms


def _uniform_terms(n: int, h: float, family: Family, merged: bool) -> float:
    return math.fsum(_uniform_term_list(n, h, family, merged)) * signvector_prefactor(n)


def uniform_condition_scale(n: int, h: float, family: "Family | str") -> float:
    """``sum |terms| / |S_n|``: the magnitude against which rounding in the uniform sum is measured."""
    terms = _uniform_term_list(n, h, Family.parse(family), merged=False)
    return math.fsum(abs(t) for t in terms) * signvector_prefactor(n)


def _uniform_spacing(spec: BasisSpec, j: int, h: float | None) -> float:
    found = is_uniform(spec.knots, j, spec.order)
    if found is None:
        raise ValueError(f"knot window at j={j} is not uniform")
    if h is not None and abs(h - found) > 1e-14 * max(1.0, abs(found)):
        raise ValueError(f"window spacing {found!r} differs from requested h={h!r}")
    return found if h is None else h


def weight_uniform(spec: BasisSpec, j: int, h: float | None = None) -> float:
    """Closed-form weight on a uniform window; independent of ``j``."""
    _check_window(spec, j)
    n = spec.half_degree
    if n == 0:
        return 1.0
    return _uniform_terms(n, _uniform_spacing(spec, j, h), spec.family, merged=True)


def weight_uniform_unmerged(spec: BasisSpec, j: int, h: float | None = None) -> float:
    """Same as :func:`weight_uniform` without folding symmetric terms."""
    _check_window(spec, j)
    n = spec.half_degree
    if n == 0:
        return 1.0
    return _uniform_terms(n, _uniform_spacing(spec, j, h), spec.family, merged=False)


# --- trigonometric cross-checks --------------------------------------------


def weight_integral_check(spec: BasisSpec, j: int, nodes: int | None = None) -> float:
    """Trigonometric weight from the constant Fourier term of ``prod sin((y - x_{j+k})/2)``.

    The integrand is a trigonometric polynomial of degree ``n`` in ``y``, so
    the equally spaced rule on ``[0, 2pi)`` is exact for ``nodes > n``.
    """
    if spec.family is not Family.TRIGONOMETRIC:
        raise ValueError("the integral form exists only for trigonometric splines")
    _check_window(spec, j)
    n = spec.half_degree
    if n == 0:
        return 1.0
    nodes = 4 * n + 8 if nodes is None else int(nodes)
    if nodes < 2 * n + 2:
        raise ValueError(f"need at least {2 * n + 2} quadrature nodes, got {nodes}")
    y = 2.0 * math.pi * np.arange(nodes) / nodes
    x = _interior(spec, j)
    integrand = np.prod(np.sin((y[:, None] - x[None, :]) / 2.0), axis=1)
    return float(2.0 ** (2 * n - 1) * signvector_prefactor(n) * integrand.mean())


def _walz_sum(n: int, h: float) -> tuple[float, int]:
    total = 0.0
    terms = 0
    cosines = [math.cos((2 * q - 1) * h / 2.0) for q in range(1, n + 1)]
    for i in range(n // 2 + 1):
        inner = 0.0
        for subset in itertools.combinations(range(n), n - 2 * i):
            inner += math.prod(cosines[q] for q in subset)
            terms += 1
        total += math.comb(2 * i, i) / 4.0**i * inner
    return 2.0 ** (n - 1) * signvector_prefactor(n) * total, terms


def weight_walz_check(n: int, h: float) -> float:
    """Alternative uniform trigonometric weight with ``2^(n-1)`` products."""
    if n < 1:
        raise ValueError("Walz form needs n >= 1")
    return _walz_sum(n, h)[0]


def walz_term_count(n: int) -> int:
    return _walz_sum(n, 0.0)[1]


def cardinalities(n: int) -> dict[str, int]:
    """Sizes of the permutation, pairing and sign-vector index sets."""
    if not 1 <= n <= N_MAX_CARDINALITY:
        raise ValueError(f"cardinalities defined for 1 <= n <= {N_MAX_CARDINALITY}, got {n}")
    qhat = math.prod(range(1, 2 * n, 2))
    return {"Q": math.factorial(2 * n), "Qhat": qhat, "S": math.comb(2 * n - 1, n - 1)}


# --- weight sets -----------------------------------------------------------

_STRATEGY_FN = {
    Strategy.BRUTE_FORCE_Q: weight_bruteforce_Q,
    Strategy.PRUNED_QHAT: weight_pruned_Qhat,
    Strategy.SIGN_VECTOR_S: weight_signvector,
    Strategy.UNIFORM_RHO: weight_uniform,
}


def weight(spec: BasisSpec, j: int, strategy: "str | Strategy" = "auto") -> float:
    """Single weight; ``auto`` uses the uniform closed form where it applies."""
    if strategy == "auto":
        if spec.half_degree >= 1 and is_uniform(spec.knots, j, spec.order) is not None:
            return weight_uniform(spec, j)
        return weight_signvector(spec, j)
    return _STRATEGY_FN[Strategy.parse(strategy)](spec, j)


@dataclass(frozen=True, eq=False)
class WeightSet:
    spec: BasisSpec
    weights: np.ndarray
    strategy: str

    def __len__(self) -> int:
        return int(self.weights.size)

    def __getitem__(self, j):
        return self.weights[j]


def compute_weights(spec: BasisSpec, strategy: "str | Strategy" = "auto") -> WeightSet:
    """Weights ``w_{j,m}`` for ``j = 0 .. K-m-1``."""
    label = "auto" if strategy == "auto" else Strategy.parse(strategy).value
    w = np.array([weight(spec, j, strategy) for j in range(spec.dimension)], dtype=float)
    w.setflags(write=False)
    return WeightSet(spec, w, label)

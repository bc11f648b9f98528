"""Knot sequences, spline families and basis specifications.

Knots are stored 0-based. A basis of order ``m`` on ``K`` knots has
``K - m`` functions; function ``j`` is supported on ``[x_j, x_{j+m})``.
"""

from __future__ import annotations

import ast
import enum
import math
import operator
import re
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Family",
    "KnotVector",
    "BasisSpec",
    "ValidationReport",
    "SpacingWarning",
    "validate",
    "multiplicity",
    "is_uniform",
    "parse_knots",
    "format_knots",
    "eval_scalar",
]


class Family(enum.Enum):
    TRIGONOMETRIC = "trig"
    HYPERBOLIC = "hyp"

    @classmethod
    def parse(cls, value: "str | Family") -> "Family":
        if isinstance(value, Family):
            return value
        key = value.strip().lower()
        aliases = {
            "trig": cls.TRIGONOMETRIC,
            "t": cls.TRIGONOMETRIC,
            "trigonometric": cls.TRIGONOMETRIC,
            "hyp": cls.HYPERBOLIC,
            "h": cls.HYPERBOLIC,
            "hyperbolic": cls.HYPERBOLIC,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown spline family {value!r}") from None

    # sin/cos for trigonometric splines, sinh/cosh for hyperbolic ones
    @property
    def s(self):
        return np.sin if self is Family.TRIGONOMETRIC else np.sinh

    @property
    def c(self):
        return np.cos if self is Family.TRIGONOMETRIC else np.cosh


class SpacingWarning(UserWarning):
    """Knot spacing violates the strict trigonometric bound but not the relaxed one."""


@dataclass(frozen=True, eq=False)
class KnotVector:
    """Immutable nondecreasing knot sequence."""

    values: np.ndarray

    def __init__(self, values: Iterable[float]):
        arr = np.array(list(values) if not isinstance(values, np.ndarray) else values, dtype=float)
        if arr.ndim != 1:
            raise ValueError("knots must be a one-dimensional sequence")
        if arr.size < 2:
            raise ValueError(f"need at least 2 knots, got {arr.size}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("knots must be finite")
        bad = np.nonzero(np.diff(arr) < 0)[0]
        if bad.size:
            i = int(bad[0])
            raise ValueError(f"knots must be nondecreasing: x[{i}]={float(arr[i])!r} > x[{i + 1}]={float(arr[i + 1])!r}")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def count(self) -> int:
        return int(self.values.size)

    def __len__(self) -> int:
        return self.count

    def __getitem__(self, i):
        return self.values[i]

    def __iter__(self):
        return iter(self.values.tolist())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, KnotVector):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    def __hash__(self) -> int:
        return hash(self.values.tobytes())

    def __repr__(self) -> str:
        return f"KnotVector({self.values.tolist()!r})"

    def distinct(self) -> np.ndarray:
        return np.unique(self.values)

    def insert(self, value: float) -> "KnotVector":
        pos = int(np.searchsorted(self.values, value, side="right"))
        return KnotVector(np.insert(self.values, pos, value))


@dataclass(frozen=True)
class BasisSpec:
    """Spline family, odd order ``m = 2n + 1`` and knot vector."""

    family: Family
    order: int
    knots: KnotVector

    def __post_init__(self):
        object.__setattr__(self, "family", Family.parse(self.family))
        if not isinstance(self.knots, KnotVector):
            object.__setattr__(self, "knots", KnotVector(self.knots))
        if int(self.order) != self.order or self.order < 1 or self.order % 2 == 0:
            raise ValueError(f"order must be an odd positive integer, got {self.order}")
        object.__setattr__(self, "order", int(self.order))
        if self.knots.count < self.order + 1:
            raise ValueError(f"order {self.order} needs at least {self.order + 1} knots, got {self.knots.count}")

    @property
    def half_degree(self) -> int:
        return (self.order - 1) // 2

    n = half_degree

    @property
    def dimension(self) -> int:
        """Number of B-splines, ``K - m``."""
        return self.knots.count - self.order

    @property
    def domain(self) -> tuple[float, float]:
        """Interval ``[x_{m-1}, x_{K-m}]`` on which the basis is a partition of unity."""
        x = self.knots.values
        return float(x[self.order - 1]), float(x[self.knots.count - self.order])

    def with_knots(self, knots: "KnotVector | Sequence[float]") -> "BasisSpec":
        return BasisSpec(self.family, self.order, knots)


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of :func:`validate`.

    ``strict`` is ``x_{j+m} - x_j < pi`` for all ``j``; ``relaxed`` is
    ``x_{j+2n} - x_{j+1} < pi``, which is what keeps the weights positive.
    Both are vacuously true for hyperbolic splines.
    """

    family: Family
    order: int
    nondecreasing: bool
    enough_knots: bool
    strict: bool
    relaxed: bool
    strict_failures: tuple[int, ...] = field(default=())
    relaxed_failures: tuple[int, ...] = field(default=())

    @property
    def ok(self) -> bool:
        return self.passes("relaxed")

    def passes(self, level: str = "relaxed") -> bool:
        base = self.nondecreasing and self.enough_knots
        if level == "strict":
            return base and self.strict
        if level == "relaxed":
            return base and self.relaxed
        if level == "none":
            return base
        raise ValueError(f"unknown enforcement level {level!r}")

    def enforce(self, level: str = "relaxed") -> None:
        """Raise ``ValueError`` if the report fails at ``level``.

        At the relaxed level a :class:`SpacingWarning` is issued when only
        the strict bound fails.
        """
        if not self.passes(level):
            if not (self.nondecreasing and self.enough_knots):
                raise ValueError("invalid knot vector for the requested order")
            failed = self.strict_failures if level == "strict" else self.relaxed_failures
            raise ValueError(f"{level} trigonometric knot spacing violated at j={list(failed)}")
        if level == "relaxed" and not self.strict:
            warnings.warn(
                f"strict spacing x[j+m]-x[j] < pi fails at j={list(self.strict_failures)}; "
                "relaxed bound holds",
                SpacingWarning,
                stacklevel=3,
            )


def validate(spec: BasisSpec) -> ValidationReport:
    x = spec.knots.values
    m, n = spec.order, spec.half_degree
    nfun = spec.knots.count - m
    nondecreasing = bool(np.all(np.diff(x) >= 0))
    enough = spec.knots.count >= m + 1
    strict_fail: tuple[int, ...] = ()
    relaxed_fail: tuple[int, ...] = ()
    if spec.family is Family.TRIGONOMETRIC and enough:
        j = np.arange(nfun)
        strict_fail = tuple(int(i) for i in j[(x[j + m] - x[j]) >= math.pi])
        if n >= 1:
            relaxed_fail = tuple(int(i) for i in j[(x[j + 2 * n] - x[j + 1]) >= math.pi])
    return ValidationReport(
        family=spec.family,
        order=m,
        nondecreasing=nondecreasing,
        enough_knots=enough,
        strict=not strict_fail,
        relaxed=not relaxed_fail,
        strict_failures=strict_fail,
        relaxed_failures=relaxed_fail,
    )


def multiplicity(knots: "KnotVector | Sequence[float]", value: float) -> int:
    x = knots.values if isinstance(knots, KnotVector) else np.asarray(knots, dtype=float)
    return int(np.count_nonzero(x == value))


def is_uniform(knots: "KnotVector | Sequence[float]", j: int, m: int) -> float | None:
    """Return the spacing ``h`` if ``x_j, ..., x_{j+m}`` are equally spaced, else ``None``.

    Gaps must agree to ``1e-14 * max(1, |h|)`` and be positive.
    """
    x = knots.values if isinstance(knots, KnotVector) else np.asarray(knots, dtype=float)
    if j < 0 or j + m >= x.size:
        raise IndexError(f"window [{j}, {j + m}] outside knot vector of length {x.size}")
    gaps = np.diff(x[j : j + m + 1])
    h = float(gaps[0])
    if h <= 0:
        return None
    if np.all(np.abs(gaps - h) <= 1e-14 * max(1.0, abs(h))):
        return h
    return None


# --- text formats ----------------------------------------------------------

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}
_UNOPS = {ast.UAdd: operator.pos, ast.USub: operator.neg}
_NAMES = {"pi": math.pi, "e": math.e}


def eval_scalar(token: str) -> float:
    """Evaluate a numeric token such as ``0.5``, ``pi/4`` or ``-2*pi/3``."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id in _NAMES:
            return _NAMES[node.id]
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNOPS:
            return _UNOPS[type(node.op)](ev(node.operand))
        raise ValueError(f"unsupported numeric token {token!r}")

    try:
        tree = ast.parse(token.strip(), mode="eval")
    except SyntaxError:
        raise ValueError(f"cannot parse numeric token {token!r}") from None
    return float(ev(tree))


_GEN = re.compile(r"^\s*(open|uniform)\s*\((.*)\)\s*$", re.IGNORECASE | re.DOTALL)


def _split_tokens(text: str) -> list[str]:
    return [t for t in re.split(r"[,\s]+", text.strip()) if t]


def parse_knots(text: str) -> KnotVector:
    """Parse a knot vector from text.

    Accepted forms::

        0, 0, 0, 0.5, 1 2 3          plain list (comma/whitespace separated)
        open(3; 0, 0.5, 1, 2, 2.5, 3)  end values repeated m times
        uniform(start, step, count)  start + k*step, k = 0..count-1

    Numeric tokens may use ``pi`` (``pi/4``, ``2*pi/8``).
    """
    mt = _GEN.match(text)
    if not mt:
        return KnotVector([eval_scalar(t) for t in _split_tokens(text)])
    kind, body = mt.group(1).lower(), mt.group(2)
    if kind == "open":
        if ";" not in body:
            raise ValueError("open generator syntax is open(m; x0, x1, ..., xL)")
        head, tail = body.split(";", 1)
        m = int(eval_scalar(head))
        pts = [eval_scalar(t) for t in re.split(r",", tail) if t.strip()]
        if m < 1 or len(pts) < 2:
            raise ValueError("open generator needs m >= 1 and at least two breakpoints")
        return KnotVector([pts[0]] * m + pts[1:-1] + [pts[-1]] * m)
    args = [a for a in body.split(",") if a.strip()]
    if len(args) != 3:
        raise ValueError("uniform generator syntax is uniform(start, step, count)")
    start, step = eval_scalar(args[0]), eval_scalar(args[1])
    count = int(eval_scalar(args[2]))
    return KnotVector([start + k * step for k in range(count)])


def format_knots(knots: "KnotVector | Sequence[float]") -> str:
    """Comma-separated list at 17 significant digits; round-trips through :func:`parse_knots`."""
    return ",".join(f"{v:.17g}" for v in (knots.values if isinstance(knots, KnotVector) else knots))

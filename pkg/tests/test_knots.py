import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thsplines.knots import (
    BasisSpec,
    Family,
    KnotVector,
    SpacingWarning,
    eval_scalar,
    format_knots,
    is_uniform,
    multiplicity,
    parse_knots,
    validate,
)

from conftest import example_knots


def test_family_aliases():
    assert Family.parse("trigonometric") is Family.TRIGONOMETRIC
    assert Family.parse("H") is Family.HYPERBOLIC
    with pytest.raises(ValueError):
        Family.parse("poly")


def test_knot_vector_rejects_decreasing():
    with pytest.raises(ValueError, match="nondecreasing"):
        KnotVector([0.0, 1.0, 0.5])


def test_knot_vector_rejects_nan_and_short():
    with pytest.raises(ValueError):
        KnotVector([0.0, float("nan")])
    with pytest.raises(ValueError):
        KnotVector([1.0])


def test_knot_vector_is_read_only():
    kv = KnotVector([0, 1, 2])
    with pytest.raises(ValueError):
        kv.values[0] = 5.0


def test_insert_keeps_order():
    kv = KnotVector([0, 1, 1, 2]).insert(1.0)
    assert kv.values.tolist() == [0, 1, 1, 1, 2]
    assert KnotVector([0, 2]).insert(0.5).values.tolist() == [0, 0.5, 2]


def test_basis_spec_rules():
    with pytest.raises(ValueError):
        BasisSpec("trig", 4, KnotVector(range(10)))
    with pytest.raises(ValueError):
        BasisSpec("trig", 5, KnotVector(range(5)))
    spec = BasisSpec("hyp", 3, example_knots(3))
    assert spec.half_degree == 1
    assert spec.dimension == 10 - 3
    assert spec.domain == (0.0, 3.0)


def test_example_open_knots_pass_strict():
    for m in (3, 5, 7, 9):
        rep = validate(BasisSpec("trig", m, example_knots(m)))
        assert rep.strict and rep.relaxed
        rep.enforce("strict")


def test_circle_knots_fail_strict_pass_relaxed():
    # p = 4, m = 3: x_{j+3} - x_j = 3pi/2 but x_{j+2} - x_{j+1} = pi/2
    kv = KnotVector([2 * k * math.pi / 4 for k in range(-2, 7)])
    rep = validate(BasisSpec("trig", 3, kv))
    assert not rep.strict
    assert rep.relaxed
    assert rep.strict_failures == tuple(range(6))
    with pytest.raises(ValueError, match="strict"):
        rep.enforce("strict")
    with pytest.warns(SpacingWarning):
        rep.enforce("relaxed")
    rep.enforce("none")


def test_relaxed_failure_raises():
    kv = KnotVector([0, 0.1, 3.5, 4.0])
    rep = validate(BasisSpec("trig", 3, kv))
    assert not rep.relaxed
    with pytest.raises(ValueError):
        rep.enforce("relaxed")


def test_hyperbolic_has_no_spacing_bound():
    rep = validate(BasisSpec("hyp", 3, KnotVector([0, 10, 20, 30])))
    assert rep.strict and rep.relaxed
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        rep.enforce("strict")


def test_multiplicity_exact():
    kv = example_knots(5)
    assert multiplicity(kv, 0.0) == 5
    assert multiplicity(kv, 2.5) == 1
    assert multiplicity(kv, 2.5000000001) == 0


def test_is_uniform():
    kv = KnotVector([0, 0.1, 0.2, 0.3, 0.5])
    assert is_uniform(kv, 0, 3) == pytest.approx(0.1)
    assert is_uniform(kv, 0, 4) is None
    assert is_uniform(KnotVector([1, 1, 1, 1]), 0, 3) is None
    with pytest.raises(IndexError):
        is_uniform(kv, 2, 3)


def test_uniform_with_pi_steps():
    kv = parse_knots("uniform(-pi/2, pi/4, 9)")
    assert is_uniform(kv, 0, 8) == pytest.approx(math.pi / 4)


def test_parse_forms():
    assert parse_knots("0, 0.5 1").values.tolist() == [0, 0.5, 1]
    assert parse_knots("open(3; 0, 0.5, 1, 2, 2.5, 3)").values.tolist() == [
        0, 0, 0, 0.5, 1, 2, 2.5, 3, 3, 3,
    ]
    assert parse_knots("uniform(0, 2, 4)").values.tolist() == [0, 2, 4, 6]
    assert parse_knots("pi/2, pi").values[1] == math.pi


def test_parse_errors():
    for bad in ("0, x", "open(3 0, 1)", "uniform(0, 1)", "1, 0", "__import__('os')"):
        with pytest.raises(ValueError):
            parse_knots(bad)


def test_eval_scalar():
    assert eval_scalar("-2*pi/3") == -2 * math.pi / 3
    assert eval_scalar("2**3") == 8.0


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=2, max_size=30))
def test_format_round_trip(values):
    kv = KnotVector(sorted(values))
    assert parse_knots(format_knots(kv)) == kv


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0.01, 1.0), min_size=1, max_size=12), st.integers(1, 5))
def test_open_generator_end_multiplicity(gaps, m):
    pts = np.r_[0.0, np.cumsum(gaps)]
    text = f"open({m}; " + ", ".join(f"{v:.17g}" for v in pts) + ")"
    kv = parse_knots(text)
    assert multiplicity(kv, kv[0]) == m
    assert multiplicity(kv, kv[-1]) == m
    assert kv.count == len(pts) + 2 * (m - 1)

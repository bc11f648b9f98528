import math

import numpy as np
import pytest

from thsplines.approx import (
    FitProblem,
    RankDeficientError,
    banded_lstsq,
    builtin_target,
    convergence_study,
    least_squares_fit,
    make_fit_knots,
    sample_grid,
)
from thsplines.basis import tabulate_basis
from thsplines.knots import BasisSpec, KnotVector, multiplicity


def fit(family, m, p, f, samples=4001):
    spec = BasisSpec(family, m, make_fit_knots(m, p))
    return least_squares_fit(FitProblem.from_function(spec, f, sample_grid(samples)))


def test_target_values():
    assert builtin_target(5.0) == pytest.approx(math.sin(50) / 5, rel=1e-15)
    assert builtin_target(5.0) == pytest.approx(-0.0524750, abs=1e-7)
    assert builtin_target(10.0) == pytest.approx(math.sin(100), rel=1e-15)
    assert builtin_target(10.0) == pytest.approx(-0.5063656, abs=1e-7)
    assert builtin_target(0.0) == 0.0


def test_fit_knots_and_ndof():
    kv = make_fit_knots(3, 1)
    assert kv.count - 3 == 12
    assert multiplicity(kv, 0.0) == 3 and multiplicity(kv, 10.0) == 3
    assert make_fit_knots(5, 4).count - 5 == 44
    with pytest.raises(ValueError):
        make_fit_knots(3, 0)


@pytest.mark.parametrize("family", ["trig", "hyp"])
@pytest.mark.parametrize("m", [3, 5, 7])
def test_constants_reproduced(family, m):
    rep = fit(family, m, 2, lambda x: np.full_like(x, 1.75))
    assert rep.linf_error <= 1e-9
    assert np.max(np.abs(rep.coefficients - 1.75)) <= 1e-9


@pytest.mark.parametrize("m", [3, 5])
def test_in_space_targets_reproduced(m):
    assert fit("trig", m, 2, lambda x: np.sin(x) - 0.5 * np.cos(x)).linf_error <= 1e-9
    assert fit("hyp", m, 2, lambda x: np.sinh(x - 5) / np.cosh(5) + 0.3).linf_error <= 1e-9


def test_higher_harmonic_only_in_higher_order():
    f = lambda x: np.cos(2 * x)  # noqa: E731
    assert fit("trig", 5, 2, f).linf_error <= 1e-9
    assert fit("trig", 3, 2, f).linf_error > 1e-6


def test_residual_orthogonal_to_columns():
    spec = BasisSpec("trig", 5, make_fit_knots(5, 4))
    x = sample_grid(3001)
    prob = FitProblem.from_function(spec, builtin_target, x)
    rep = least_squares_fit(prob)
    A = tabulate_basis(spec, x)
    assert np.max(np.abs(A.T @ rep.residual)) <= 1e-8 * np.linalg.norm(prob.y)


@pytest.mark.parametrize("family", ["trig", "hyp"])
def test_banded_solver_matches_dense(family):
    spec = BasisSpec(family, 7, make_fit_knots(7, 2))
    x = sample_grid(2001)
    prob = FitProblem.from_function(spec, builtin_target, x)
    dense, *_ = np.linalg.lstsq(tabulate_basis(spec, x), prob.y, rcond=None)
    assert np.max(np.abs(least_squares_fit(prob).coefficients - dense)) <= 1e-11


def test_banded_lstsq_random_band():
    rng = np.random.default_rng(5)
    ncols, bw = 30, 4
    starts = np.sort(rng.integers(0, ncols - bw + 1, 200))
    starts[: ncols - bw + 1] = np.arange(ncols - bw + 1)
    rows = rng.normal(size=(starts.size, bw))
    rhs = rng.normal(size=starts.size)
    A = np.zeros((starts.size, ncols))
    for i, (s0, row) in enumerate(zip(starts, rows)):
        A[i, s0 : s0 + bw] = row
    expected, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    perm = rng.permutation(starts.size)
    got = banded_lstsq(starts[perm], rows[perm], rhs[perm], ncols)
    assert np.max(np.abs(got - expected)) <= 1e-12 * np.abs(expected).max()


def test_rank_deficiency_detected():
    spec = BasisSpec("trig", 3, make_fit_knots(3, 2))
    # all samples in the first span leave most columns untouched
    x = np.linspace(0.0, 0.4, 200)
    prob = FitProblem(spec, x, np.sin(x))
    with pytest.raises(RankDeficientError):
        least_squares_fit(prob)


def test_fit_problem_validation():
    spec = BasisSpec("trig", 3, make_fit_knots(3, 1))
    with pytest.raises(ValueError):
        FitProblem(spec, np.linspace(0, 10, 5), np.zeros(5))
    with pytest.raises(ValueError):
        FitProblem(spec, np.linspace(0, 11, 50), np.zeros(50))
    with pytest.raises(ValueError):
        FitProblem(spec, np.linspace(0, 10, 50), np.zeros(49))


def test_error_drops_with_refinement():
    e4 = fit("trig", 3, 4, builtin_target).linf_error
    e8 = fit("trig", 3, 8, builtin_target).linf_error
    ratio = e4 / e8
    assert 4.0 <= ratio <= 16.0


def test_higher_order_wins_at_similar_ndof():
    # NDOF 82 / 84 / 86 at p = 8
    errs = [fit("trig", m, 8, builtin_target).linf_error for m in (3, 5, 7)]
    assert errs[0] > errs[1] > errs[2]


def test_study_rows_and_rates():
    rows = convergence_study("hyp", [3], [1, 2, 3], samples=2001)
    assert [r.p for r in rows] == [4, 8, 16]
    assert [r.ndof for r in rows] == [42, 82, 162]
    assert rows[0].rate is None
    for prev, cur in zip(rows, rows[1:]):
        assert cur.rate == pytest.approx(math.log2(prev.linf_error / cur.linf_error))


def test_study_is_deterministic_across_workers():
    a = convergence_study("trig", [3, 5], 2, samples=1001, workers=1)
    b = convergence_study("trig", [3, 5], 2, samples=1001, workers=4)
    assert [r.linf_error for r in a] == [r.linf_error for r in b]


def test_study_flags_precision_floor():
    rows = convergence_study("trig", [3], 2, target=lambda x: np.sin(x), samples=501)
    assert all(r.floor for r in rows)
    assert all(r.rate is None for r in rows)


def test_custom_knots_fit():
    spec = BasisSpec("hyp", 3, KnotVector([0, 0, 0, 2, 3, 7, 10, 10, 10]))
    rep = least_squares_fit(FitProblem.from_function(spec, lambda x: np.cosh(x - 5)))
    assert rep.ndof == 6
    assert rep.linf_error <= 1e-9 * math.cosh(5)

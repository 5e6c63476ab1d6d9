"""Clopper-Pearson interval and the power-meter APN interval."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from passiveqkd import apn_interval, clopper_pearson


def binomial_tail_ge(x, M, p):
    """P(X >= x) for X ~ Binomial(M, p), by direct summation."""
    return sum(math.comb(M, k) * p**k * (1.0 - p) ** (M - k) for k in range(x, M + 1))


def binomial_tail_le(x, M, p):
    return sum(math.comb(M, k) * p**k * (1.0 - p) ** (M - k) for k in range(0, x + 1))


def test_boundary_closed_forms():
    alpha = 0.05
    M = 1000
    assert clopper_pearson(0, M, alpha).lower == 0.0
    assert clopper_pearson(M, M, alpha).upper == 1.0
    # full-success lower bound solves p^M = alpha/2 exactly
    assert clopper_pearson(M, M, alpha).lower == pytest.approx(
        (alpha / 2.0) ** (1.0 / M), abs=1e-12
    )
    assert clopper_pearson(0, M, alpha).upper == pytest.approx(
        1.0 - (alpha / 2.0) ** (1.0 / M), abs=1e-12
    )


def test_bounds_invert_the_binomial_tails():
    # at the returned bounds the corresponding tail equals alpha/2
    for M in (5, 12, 20):
        for x in range(M + 1):
            for alpha in (0.1, 0.01):
                res = clopper_pearson(x, M, alpha)
                if x > 0:
                    assert binomial_tail_ge(x, M, res.lower) == pytest.approx(
                        alpha / 2.0, abs=1e-10
                    )
                if x < M:
                    assert binomial_tail_le(x, M, res.upper) == pytest.approx(
                        alpha / 2.0, abs=1e-10
                    )


def test_large_trial_counts_stay_tractable():
    res = clopper_pearson(99_999_000, 100_000_000, 1e-6)
    assert 0.9999 < res.lower < 0.99999 < res.upper < 1.0


@given(
    M=st.integers(1, 300),
    frac=st.floats(0.0, 1.0),
    alpha=st.floats(0.001, 0.2),
)
@settings(max_examples=60, deadline=None)
def test_interval_brackets_the_point_estimate(M, frac, alpha):
    x = int(round(frac * M))
    res = clopper_pearson(x, M, alpha)
    assert res.lower <= x / M <= res.upper
    assert res.level == pytest.approx(1.0 - alpha)


def test_lower_bound_monotone_in_successes():
    M, alpha = 50, 0.05
    lowers = [clopper_pearson(x, M, alpha).lower for x in range(M + 1)]
    assert all(b >= a for a, b in zip(lowers, lowers[1:]))


def test_coverage_is_conservative():
    # quick version; the acceptance suite runs the full-scale check
    rng = np.random.default_rng(11)
    M, p, alpha = 200, 0.3, 0.05
    xs = rng.binomial(M, p, size=2000)
    covered = sum(
        1 for x in xs if clopper_pearson(int(x), M, alpha).lower <= p <= clopper_pearson(int(x), M, alpha).upper
    )
    se = math.sqrt(alpha * (1.0 - alpha) / 2000)
    assert covered / 2000 >= 1.0 - alpha - 3.0 * se


def test_validation():
    with pytest.raises(ValueError):
        clopper_pearson(-1, 10, 0.05)
    with pytest.raises(ValueError):
        clopper_pearson(11, 10, 0.05)
    with pytest.raises(ValueError):
        clopper_pearson(5, 10, 0.0)


def test_apn_interval_basic():
    rng = np.random.default_rng(0)
    records = rng.normal(1000.0, 5.0, size=400)
    res = apn_interval(records, xi=0.5, alpha=0.05)
    assert res.lower < records.mean() / 0.5 < res.upper
    assert not res.degenerate
    # more records shrink the interval
    wide = apn_interval(records[:50], xi=0.5, alpha=0.05)
    assert wide.upper - wide.lower > res.upper - res.lower


def test_apn_interval_degenerate_on_constant_records():
    res = apn_interval([7.0, 7.0, 7.0], xi=0.7, alpha=0.05)
    assert res.degenerate
    assert res.lower == res.upper == pytest.approx(10.0)


def test_apn_interval_validation():
    with pytest.raises(ValueError):
        apn_interval([1.0], xi=0.5, alpha=0.05)
    with pytest.raises(ValueError):
        apn_interval([1.0, 2.0], xi=0.0, alpha=0.05)

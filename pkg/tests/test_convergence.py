import math

import pytest

from powerbin.core import MarketParams
from powerbin.products import convergence_study
from powerbin.products.convergence import continuous_limit, discrete_value

DESK = MarketParams(0.05, 0.0, 0.2)


@pytest.mark.parametrize("kind", ["fixed", "floating"])
def test_short_ladder_improves(kind):
    rows = convergence_study(kind, [4, 8], 100.0, DESK)
    assert rows[1].abs_error < rows[0].abs_error
    assert rows[0].error_ratio_vs_prev is None


@pytest.mark.parametrize("kind", ["fixed", "floating"])
def test_large_n_is_within_one_percent(kind):
    (row,) = convergence_study(kind, [512], 100.0, DESK)
    assert row.rel_error < 1e-2


@pytest.mark.parametrize("kind", ["fixed", "floating"])
def test_error_halves_per_doubling(kind):
    rows = convergence_study(kind, [8, 16, 32, 64, 128], 100.0, DESK)
    errs = [r.abs_error for r in rows]
    assert all(b < a for a, b in zip(errs, errs[1:]))
    for r in rows[1:]:
        assert 0.3 <= r.error_ratio_vs_prev <= 0.7
        assert r.error_ratio_vs_prev == r.abs_error / rows[rows.index(r) - 1].abs_error


def test_zero_strike_forward_gap_vanishes():
    K = 1e-300
    gaps = [abs(discrete_value("fixed", n, 100.0, DESK, K, 1.0) / continuous_limit("fixed", 100.0, DESK, K, 1.0) - 1.0) for n in (8, 64, 512)]
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 1e-4


def test_zero_strike_is_forward_of_geometric_mean():
    # both normal factors are one, so V_inf = e^{-rT} E[G]
    v = continuous_limit("fixed", 100.0, DESK, 1e-300, 1.0)
    nu = DESK.log_drift
    expected = math.exp(-0.05) * 100.0 * math.exp(nu / 2 + DESK.sigma**2 / 6)
    assert v == pytest.approx(expected, rel=1e-14)


def test_ladder_validation():
    with pytest.raises(ValueError):
        convergence_study("fixed", [8, 4], 100.0, DESK)
    with pytest.raises(ValueError):
        convergence_study("fixed", [1, 4], 100.0, DESK)
    with pytest.raises(ValueError):
        convergence_study("fixed", [], 100.0, DESK)
    with pytest.raises(ValueError):
        convergence_study("arith", [4], 100.0, DESK)

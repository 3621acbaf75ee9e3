import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate
from scipy.stats import norm

from powerbin.gaussian import (
    binorm_cdf,
    markov_correlation,
    markov_orthant_cdf,
    mvn_cdf,
    norm_cdf,
)

corr = st.floats(-0.999, 0.999)
lims = st.floats(-6.0, 6.0)


def bvn_by_quad(a, b, rho):
    """P(Y0 <= a, Y1 <= b) as a single integral of the conditional CDF."""
    s = math.sqrt(1.0 - rho * rho)
    f = lambda y: norm.pdf(y) * norm.cdf((b - rho * y) / s)  # noqa: E731
    val, _ = integrate.quad(f, -np.inf, a, epsabs=1e-14, epsrel=1e-13, limit=200)
    return val


@st.composite
def schedules(draw, n_max=10):
    n = draw(st.integers(1, n_max))
    gaps = draw(st.lists(st.floats(0.01, 2.0), min_size=n, max_size=n))
    return np.cumsum(gaps)


def test_norm_cdf_values():
    assert norm_cdf(0.0) == 0.5
    assert norm_cdf(math.inf) == 1.0 and norm_cdf(-math.inf) == 0.0
    mp.mp.dps = 30
    assert norm_cdf(1.0) == pytest.approx(float(mp.ncdf(1)), abs=1e-15)
    assert norm_cdf(1.0) == pytest.approx(0.841344746068543, abs=1e-15)
    with pytest.raises(ValueError):
        norm_cdf(math.nan)


@pytest.mark.parametrize("x", [-30.0, -8.0, -1.5, 0.3, 2.0, 7.5])
def test_norm_cdf_against_mpmath(x):
    mp.mp.dps = 40
    assert norm_cdf(x) == pytest.approx(float(mp.ncdf(x)), abs=1e-15, rel=1e-13)


def test_binorm_trivial_values():
    assert binorm_cdf(math.inf, 0.7, 0.3) == pytest.approx(norm_cdf(0.7), abs=1e-16)
    assert binorm_cdf(0.0, 0.0, 0.0) == pytest.approx(0.25, abs=1e-16)
    exact = 0.25 + math.asin(0.5) / (2 * math.pi)
    assert binorm_cdf(0.0, 0.0, 0.5) == pytest.approx(exact, abs=1e-15)
    assert binorm_cdf(0.0, 0.0, 0.5) == pytest.approx(bvn_by_quad(0.0, 0.0, 0.5), abs=1e-12)


def test_binorm_degenerate_and_errors():
    assert binorm_cdf(0.3, -0.2, 1.0) == pytest.approx(norm_cdf(-0.2))
    assert binorm_cdf(0.3, 0.2, -1.0) == pytest.approx(norm_cdf(0.3) - norm_cdf(-0.2))
    assert binorm_cdf(-0.3, -0.2, -1.0) == 0.0
    with pytest.raises(ValueError):
        binorm_cdf(0.0, 0.0, 1.2)
    with pytest.raises(ValueError):
        binorm_cdf(math.nan, 0.0, 0.2)


@given(lims, lims, corr)
def test_binorm_against_quadrature(a, b, rho):
    assert binorm_cdf(a, b, rho) == pytest.approx(bvn_by_quad(a, b, rho), abs=1e-10)


@given(lims, lims, corr)
def test_binorm_sign_flip_identity(a, b, rho):
    assert binorm_cdf(a, b, rho) + binorm_cdf(a, -b, -rho) == pytest.approx(norm_cdf(a), abs=1e-14)


@given(st.floats(-0.9999, 0.9999))
def test_orthant_identity(rho):
    assert binorm_cdf(0.0, 0.0, rho) == pytest.approx(0.25 + math.asin(rho) / (2 * math.pi), abs=1e-14)


def test_markov_small_cases():
    one = markov_correlation(0.0, [1.0])
    assert one.rho.tolist() == [[1.0]] and one.a_matrix.tolist() == [[1.0]]
    two = markov_correlation(0.0, [1.0, 2.0], ["+", "+"])
    assert two.rho[0, 1] == pytest.approx(math.sqrt(0.5), abs=1e-16)
    three = markov_correlation(0.0, [1.0, 2.0, 4.0])
    assert np.allclose(three.a_matrix @ three.rho, np.eye(3), atol=1e-12)
    assert np.allclose(three.a_matrix, np.linalg.inv(three.rho), atol=1e-12)


@given(schedules(), st.floats(0.0, 0.5))
def test_a_inverts_r(gaps, t):
    T = t + gaps
    cs = markov_correlation(t, T)
    n = T.size
    assert np.allclose(cs.a_matrix @ cs.rho, np.eye(n), atol=1e-12 * max(1.0, np.abs(cs.a_matrix).max()))
    assert np.allclose(cs.a_matrix, np.triu(np.tril(cs.a_matrix, 1), -1))


@given(schedules(6), st.data())
def test_signed_structure(gaps, data):
    n = gaps.size
    signs = data.draw(st.lists(st.sampled_from([1, -1]), min_size=n, max_size=n))
    cs = markov_correlation(0.0, gaps, signs)
    s = np.array(signs, dtype=float)
    assert np.array_equal(cs.rho, cs.rho_unsigned * np.outer(s, s))
    assert np.allclose(cs.a_matrix @ cs.rho, np.eye(n), atol=1e-10 * max(1.0, np.abs(cs.a_matrix).max()))


def test_markov_errors():
    with pytest.raises(ValueError):
        markov_correlation(0.0, [1.0, 1.0])
    with pytest.raises(ValueError):
        markov_correlation(1.0, [1.0, 2.0])


def test_mvn_trivial():
    assert mvn_cdf([0.4], np.eye(1)).prob == pytest.approx(norm_cdf(0.4), abs=1e-16)
    assert mvn_cdf([0.0, 0.0, 0.0], np.eye(3)).prob == pytest.approx(0.125, abs=1e-10)
    assert mvn_cdf([np.inf] * 4, markov_correlation(0.0, [1, 2, 3, 4])).prob == pytest.approx(1.0, abs=1e-12)
    assert mvn_cdf([0.1, -np.inf, 0.3], np.eye(3)).prob == 0.0


def test_mvn_rejects_bad_correlation():
    bad = np.array([[1.0, 0.9, 0.0], [0.9, 1.0, 0.9], [0.0, 0.9, 1.0]])
    with pytest.raises(ValueError, match="positive definite"):
        mvn_cdf([0.0, 0.0, 0.0], bad)
    with pytest.raises(ValueError):
        mvn_cdf([0.0, 0.0], np.array([[1.0, 0.2], [0.3, 1.0]]))


@given(lims, lims, st.floats(-0.99, 0.99))
def test_mvn_two_dim_matches_binorm(a, b, rho):
    got = mvn_cdf([a, b], np.array([[1.0, rho], [rho, 1.0]])).prob
    assert got == pytest.approx(binorm_cdf(a, b, rho), abs=1e-9)


def test_mvn_error_estimate_meets_tolerance():
    cs = markov_correlation(0.0, [0.5, 1.0, 1.5, 2.0])
    res = mvn_cdf([0.2, -0.1, 0.4, 0.0], cs, tol=1e-8)
    assert res.error <= 1e-8
    ref = markov_orthant_cdf([0.2, -0.1, 0.4, 0.0], cs).prob
    assert res.prob == pytest.approx(ref, abs=1e-8)


def test_mvn_reproducible():
    cs = markov_correlation(0.0, [0.5, 1.0, 1.5])
    assert mvn_cdf([0.1, 0.2, 0.3], cs) == mvn_cdf([0.1, 0.2, 0.3], cs)


def test_mvn_monotone_in_each_limit():
    cs = markov_correlation(0.0, [0.3, 0.7, 1.0], [1, -1, 1])
    base = np.array([0.2, -0.4, 0.5])
    p0 = mvn_cdf(base, cs, points=1 << 14).prob
    for i in range(3):
        bumped = base.copy()
        bumped[i] += 0.25
        assert mvn_cdf(bumped, cs, points=1 << 14).prob >= p0


def test_markov_orthant_matches_generic(rng):
    for _ in range(5):
        n = int(rng.integers(3, 7))
        T = np.cumsum(rng.uniform(0.05, 1.0, n))
        signs = rng.choice([1, -1], n)
        cs = markov_correlation(0.0, T, signs)
        lim = rng.normal(size=n)
        exact = markov_orthant_cdf(lim, cs)
        qmc = mvn_cdf(lim, cs, tol=1e-9)
        assert exact.prob == pytest.approx(qmc.prob, abs=max(3e-9, 2 * qmc.error))
        assert exact.error < 1e-12


def test_markov_orthant_limits_and_validation():
    cs = markov_correlation(0.0, [1.0, 2.0, 3.0])
    assert markov_orthant_cdf([np.inf] * 3, cs).prob == pytest.approx(1.0, abs=1e-13)
    assert markov_orthant_cdf([0.0, -np.inf, 1.0], cs).prob == 0.0
    with pytest.raises(ValueError, match="Markov"):
        markov_orthant_cdf([0.0] * 3, np.array([[1, 0.5, 0.5], [0.5, 1, 0.5], [0.5, 0.5, 1.0]]))


def test_markov_orthant_close_expiries():
    # conditional standard deviation ~0.03: the grid must resolve it
    cs = markov_correlation(0.0, [1.0, 1.001, 2.0])
    lim = [0.1, 0.12, 0.3]
    assert markov_orthant_cdf(lim, cs).prob == pytest.approx(mvn_cdf(lim, cs, tol=1e-9).prob, abs=1e-8)

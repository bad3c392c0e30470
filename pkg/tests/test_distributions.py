import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from listintersect.distributions import (
    BinomialSpec,
    PoissonSpec,
    binomial_tail,
    normal_cdf,
    normal_quantile,
    poisson_tail,
)
from listintersect.errors import InvalidProbabilityError, ParameterOutOfRangeError, ValidationError

mpmath.mp.dps = 50


def binom_tail_oracle(N, p, k):
    p = mpmath.mpf(p)
    return float(mpmath.fsum(mpmath.binomial(N, j) * p**j * (1 - p) ** (N - j) for j in range(k, N + 1)))


def poisson_tail_oracle(lam, k):
    lam = mpmath.mpf(lam)
    return float(1 - mpmath.fsum(mpmath.exp(-lam) * lam**j / mpmath.factorial(j) for j in range(k)))


@pytest.mark.parametrize("N,p,k", [
    (4, 0.0081, 3), (4, 0.01, 2), (6, 0.02, 3), (132, 0.001, 2), (132, 0.001, 5),
    (10, 0.5, 5), (50, 0.9, 48), (10_000, 1e-4, 3), (300, 0.0079, 4), (8, 0.0755, 6),
])
def test_binomial_tail_matches_exact_sum(N, p, k):
    got = binomial_tail(BinomialSpec(N, p), k)
    want = binom_tail_oracle(N, p, k)
    assert got == pytest.approx(want, rel=1e-12, abs=1e-300)


def test_binomial_tail_vectorised_over_p():
    ps = np.array([0.0, 1e-6, 0.01, 0.3, 1.0])
    got = binomial_tail(BinomialSpec(10, ps), 3)
    want = [0.0] + [binom_tail_oracle(10, p, 3) for p in ps[1:-1]] + [1.0]
    np.testing.assert_allclose(got, want, rtol=1e-12)


def test_binomial_edges():
    assert binomial_tail(BinomialSpec(5, 0.3), 0) == 1.0
    assert binomial_tail(BinomialSpec(5, 0.3), 6) == 0.0
    assert binomial_tail(BinomialSpec(5, 0.0), 1) == 0.0
    assert binomial_tail(BinomialSpec(5, 1.0), 5) == 1.0


@pytest.mark.parametrize("lam,k", [(1.53, 5), (0.0211, 1), (2.38, 4), (5.92, 10), (40.0, 60), (1e-6, 1)])
def test_poisson_tail_matches_exact_sum(lam, k):
    assert poisson_tail(PoissonSpec(lam), k) == pytest.approx(poisson_tail_oracle(lam, k), rel=1e-10)


def test_poisson_edges():
    assert poisson_tail(PoissonSpec(0.0), 0) == 1.0
    assert poisson_tail(PoissonSpec(0.0), 1) == 0.0
    assert poisson_tail(PoissonSpec(3.0), 0) == 1.0


def test_normal_quantile_inverts_cdf():
    for u in (1e-10, 0.01, 0.5, 0.975, 1 - 1e-10):
        assert normal_cdf(normal_quantile(u)) == pytest.approx(u, rel=1e-9)
    assert normal_quantile(0.975) == pytest.approx(1.959963984540054, rel=1e-12)


@pytest.mark.parametrize("bad", [-0.1, 1.5, float("nan")])
def test_invalid_probability(bad):
    with pytest.raises(InvalidProbabilityError):
        BinomialSpec(3, bad)


def test_invalid_arguments():
    with pytest.raises(ParameterOutOfRangeError):
        binomial_tail(BinomialSpec(3, 0.5), -1)
    with pytest.raises(ParameterOutOfRangeError):
        BinomialSpec(-1, 0.5)
    with pytest.raises(ValidationError):
        PoissonSpec(-1.0)
    for u in (0.0, 1.0):
        with pytest.raises(ValidationError):
            normal_quantile(u)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 400), st.floats(1e-6, 1 - 1e-6), st.integers(0, 400))
def test_binomial_tail_is_probability_and_monotone_in_k(N, p, k):
    spec = BinomialSpec(N, p)
    a, b = binomial_tail(spec, k), binomial_tail(spec, k + 1)
    assert 0.0 <= b <= a <= 1.0


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 200), st.floats(1e-6, 0.5), st.floats(1e-6, 0.5), st.integers(1, 200))
def test_binomial_tail_monotone_in_p(N, p1, p2, k):
    lo, hi = sorted((p1, p2))
    assert binomial_tail(BinomialSpec(N, lo), k) <= binomial_tail(BinomialSpec(N, hi), k) + 1e-14


@settings(max_examples=100, deadline=None)
@given(st.integers(200, 3000), st.floats(0.1, 5.0), st.integers(1, 8))
def test_binomial_approaches_poisson(N, lam, k):
    # Le Cam: |Bin(N, lam/N) - Poisson(lam)| <= lam^2 / N in total variation
    b = binomial_tail(BinomialSpec(N, lam / N), k)
    assert abs(b - poisson_tail(PoissonSpec(lam), k)) <= lam**2 / N + 1e-12


@settings(max_examples=100, deadline=None)
@given(st.floats(1e-8, 1 - 1e-8))
def test_quantile_roundtrip_property(u):
    assert math.isclose(normal_cdf(normal_quantile(u)), u, rel_tol=1e-8)

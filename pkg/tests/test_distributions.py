import math

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal
from scipy import integrate, stats
from scipy.special import betaln, gammaln

from lswtest.distributions import (
    RandomSource,
    betainc,
    betainc_tails,
    chi2_cdf,
    f_cdf,
    f_sf,
    gaussian_stream,
    norm_cdf,
    quantile,
    t_cdf,
    t_sf,
    t_two_sided,
    welch_df,
)
from lswtest.errors import DomainError, InsufficientReplicatesError


def t_pdf(x, df):
    return math.exp(gammaln((df + 1) / 2) - gammaln(df / 2) - 0.5 * math.log(df * math.pi)) * (
        1 + x * x / df
    ) ** (-(df + 1) / 2)


def f_pdf(x, d1, d2):
    if x <= 0:
        return 0.0
    logp = 0.5 * d1 * math.log(d1 / d2) + (d1 / 2 - 1) * math.log(x) - (d1 + d2) / 2 * math.log1p(d1 * x / d2)
    return math.exp(logp - betaln(d1 / 2, d2 / 2))


def t_oracle(x, df):
    mass, _ = integrate.quad(t_pdf, 0, abs(x), args=(df,), epsabs=1e-13, epsrel=1e-13, limit=200)
    return 0.5 + math.copysign(mass, x)


def f_oracle(x, d1, d2):
    mode = max((d1 - 2) / d1 * d2 / (d2 + 2), 0.0)
    pts = [p for p in (mode,) if 0 < p < x]
    val, _ = integrate.quad(f_pdf, 0, x, args=(d1, d2), epsabs=1e-13, epsrel=1e-13, limit=400, points=pts or None)
    return val


@pytest.mark.parametrize("df", [1, 3, 10, 48])
def test_t_cdf_against_integration(df):
    xs = np.linspace(-6, 6, 50)
    ours = t_cdf(xs, df)
    ref = [t_oracle(x, df) for x in xs]
    assert_allclose(ours, ref, atol=1e-8)


@pytest.mark.parametrize("d1,d2", [(1, 5), (10, 25), (25, 25), (2, 48)])
def test_f_cdf_against_integration(d1, d2):
    xs = np.linspace(0.02, 6, 50)
    assert_allclose(f_cdf(xs, d1, d2), [f_oracle(x, d1, d2) for x in xs], atol=1e-8)


def test_named_values():
    assert t_cdf(0.0, 7) == 0.5
    assert t_cdf(1.0, 10) == pytest.approx(0.82955, abs=5e-6)
    assert f_cdf(1.0, 25, 25) == pytest.approx(0.5, abs=1e-14)
    assert f_cdf(0.0, 3, 4) == 0.0
    assert f_cdf(2.0, 25, 25) == pytest.approx(f_oracle(2.0, 25, 25), abs=1e-10)
    assert t_cdf(1.3, 1e6) == pytest.approx(norm_cdf(1.3), abs=1e-3)


def test_betainc_matches_reference(rng):
    a = rng.uniform(0.2, 40, 300)
    b = rng.uniform(0.2, 40, 300)
    x = rng.uniform(0, 1, 300)
    from scipy.special import betainc as ref

    assert_allclose(betainc(a, b, x), ref(a, b, x), atol=1e-12)
    lo, hi = betainc_tails(a, b, x)
    assert_allclose(lo + hi, 1.0, atol=1e-14)


def test_betainc_edges_and_scalars():
    assert betainc(2.0, 3.0, 0.0) == 0.0
    assert betainc(2.0, 3.0, 1.0) == 1.0
    assert np.ndim(betainc(2.0, 3.0, 0.3)) == 0
    with pytest.raises(DomainError):
        betainc(0.0, 1.0, 0.5)


def test_small_upper_tail_keeps_relative_accuracy():
    assert f_sf(60.0, 25, 25) == pytest.approx(stats.f.sf(60.0, 25, 25), rel=1e-9)
    assert t_sf(12.0, 48) == pytest.approx(stats.t.sf(12.0, 48), rel=1e-9)


def test_cdf_monotone_with_limits():
    xs = np.linspace(-50, 50, 2001)
    c = t_cdf(xs, 4)
    assert np.all(np.diff(c) >= 0)
    assert c[0] < 1e-5 and c[-1] > 1 - 1e-5
    f = f_cdf(np.linspace(0, 200, 2001), 5, 9)
    assert np.all(np.diff(f) >= 0)
    assert f[-1] > 1 - 1e-5


def test_f_reciprocal_and_t_squared_identities():
    xs = np.linspace(0.05, 8, 40)
    assert_allclose(f_cdf(xs, 7, 13), 1 - f_cdf(1 / xs, 13, 7), atol=1e-9)
    assert_allclose(t_two_sided(xs, 11), f_sf(xs**2, 1, 11), atol=1e-9)


def test_df_errors():
    with pytest.raises(DomainError):
        t_cdf(1.0, 0)
    with pytest.raises(DomainError):
        f_cdf(1.0, -1, 3)
    with pytest.raises(DomainError):
        f_cdf(-1.0, 2, 3)


def test_norm_and_chi2():
    assert norm_cdf(0.0) == 0.5
    assert norm_cdf(1.96) == pytest.approx(0.9750021048517795, abs=1e-12)
    assert chi2_cdf(3.841458820694124, 1) == pytest.approx(0.95, abs=1e-12)


def test_quantile_roundtrip():
    for p in np.linspace(0.01, 0.99, 99):
        assert abs(t_cdf(quantile(("t", 9), p), 9) - p) < 1e-9
        assert abs(f_cdf(quantile(("F", 25, 25), p), 25, 25) - p) < 1e-9
        assert abs(norm_cdf(quantile("normal", p)) - p) < 1e-9
    assert quantile(("t", 5), 0.5) == 0.0
    assert quantile(("F", 25, 25), 0.975) == pytest.approx(stats.f.ppf(0.975, 25, 25), rel=1e-9)


@pytest.mark.parametrize("p", [0.0, 1.0, -0.2])
def test_quantile_rejects(p):
    with pytest.raises(DomainError):
        quantile("normal", p)


def test_welch_df():
    assert welch_df(3.0, 3.0, 8, 8) == pytest.approx(14.0)
    assert welch_df(2.0, 0.0, 10, 25) == pytest.approx(9.0)
    a, b = 2 / 10, 1 / 25
    assert welch_df(2.0, 1.0, 10, 25) == pytest.approx((a + b) ** 2 / (a * a / 9 + b * b / 24))
    with pytest.raises(InsufficientReplicatesError):
        welch_df(1.0, 1.0, 1, 5)
    with pytest.raises(DomainError):
        welch_df(0.0, 0.0, 5, 5)


def test_random_source_determinism():
    a = gaussian_stream(RandomSource(11, 4), 1001)
    b = gaussian_stream(RandomSource(11, 4), 1001)
    assert_array_equal(a, b)
    c = gaussian_stream(RandomSource(11, 5), 1001)
    assert not np.array_equal(a, c)
    assert abs(np.corrcoef(a, c)[0, 1]) < 0.15
    assert a.size == 1001


def test_gaussian_stream_distribution():
    z = gaussian_stream(RandomSource(2024, 0), 10**6)
    assert abs(z.mean()) < 4 / math.sqrt(10**6)
    assert stats.kstest(z[:100000], "norm").pvalue > 0.01

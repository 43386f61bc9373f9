"""Empirical statistics: tie-aware KS, TV distances, DKW proxy, chi-square."""

import math

import numpy as np
import pytest
from scipy import stats

from magnet.errors import InvalidParamsError
from magnet.stats import (
    chi_square_gof,
    dkw_proxy,
    empirical_pmf,
    ks_statistic,
    tv_distance,
    tv_to_exact,
    two_sample_ks,
)


def test_ks_statistic_matches_scipy_on_continuous_data():
    rng = np.random.default_rng(1)
    x = rng.standard_normal(5000)
    got = ks_statistic(x, lambda v: stats.norm.cdf(v))
    want = stats.ks_1samp(x, stats.norm.cdf).statistic
    assert got == pytest.approx(want, abs=1e-12)


def test_ks_statistic_handles_ties_exactly():
    # four points, two tied at 1: ECDF jumps 0 -> 0.75 there.
    x = np.array([1.0, 1.0, 1.0, 2.0])
    # reference cdf F(1) = 0.5, F(2) = 0.9:
    # at 1: |0.75 - 0.5| = 0.25 (above), |0.5 - 0.0| = 0.5 (below)
    got = ks_statistic(x, lambda v: np.where(np.asarray(v) >= 2, 0.9, 0.5))
    assert got == pytest.approx(0.5, abs=1e-15)


def test_ks_statistic_null_distribution_self_test():
    # draws truly from the reference law: KS below the 95% band 1.36/sqrt(N)
    rng = np.random.default_rng(2024)
    n = 10**4
    x = np.exp(0.2186 * rng.standard_normal(n))
    got = ks_statistic(x, lambda v: stats.norm.cdf(np.log(v) / 0.2186))
    assert got < 1.36 / math.sqrt(n)


def test_ks_statistic_rejects_empty():
    with pytest.raises(InvalidParamsError):
        ks_statistic(np.array([]), lambda v: v)


def test_empirical_pmf_counts():
    pm = empirical_pmf(np.array([0, 1, 1, 3]), 5)
    np.testing.assert_allclose(pm, [0.25, 0.5, 0.0, 0.25, 0.0])
    assert pm.sum() == pytest.approx(1.0)


def test_tv_distance_basic():
    p = np.array([0.5, 0.5, 0.0])
    q = np.array([0.25, 0.25, 0.5])
    assert tv_distance(p, q) == pytest.approx(0.5)
    assert tv_distance(p, p) == 0.0
    assert tv_distance(p, q) == tv_distance(q, p)


def test_tv_to_exact_includes_tail_mass():
    # all draws at 0, exact pmf has mass 0.5 beyond the prefix
    draws = np.zeros(100, dtype=np.int64)
    exact_prefix = np.array([0.25, 0.25])  # tail mass 0.5 implied
    # TV = 0.5*(|1-0.25| + |0-0.25| + |0-0.5|) = 0.75
    assert tv_to_exact(draws, exact_prefix) == pytest.approx(0.75)
    # perfect agreement when empirical matches the prefix and no tail
    rng = np.random.default_rng(0)
    big = rng.integers(0, 2, size=200000)
    assert tv_to_exact(big, np.array([0.5, 0.5])) < 0.01


def test_dkw_proxy_frozen_value():
    # sqrt(ln(2/alpha) / (2 N)) at alpha=0.05, N=1e4
    assert dkw_proxy(10**4) == pytest.approx(
        math.sqrt(math.log(2 / 0.05) / (2 * 10**4)), rel=1e-15
    )
    assert dkw_proxy(10**4) == pytest.approx(0.013581015157406195, rel=1e-12)
    assert dkw_proxy(4 * 10**4) == pytest.approx(dkw_proxy(10**4) / 2, rel=1e-15)


def test_two_sample_ks_same_law_high_p():
    rng = np.random.default_rng(7)
    a = rng.poisson(5.0, size=20000)
    b = rng.poisson(5.0, size=20000)
    _, p = two_sample_ks(a, b)
    assert p > 0.001
    c = rng.poisson(6.0, size=20000)
    _, p_diff = two_sample_ks(a, c)
    assert p_diff < 1e-6


def test_chi_square_gof_calibration():
    rng = np.random.default_rng(11)
    pmf = np.array([0.1, 0.2, 0.3, 0.25, 0.15])
    draws = rng.choice(5, size=50000, p=pmf)
    stat, p, dof = chi_square_gof(draws, pmf)
    assert p > 1e-3
    assert dof >= 3
    # a wrong reference law is rejected hard
    wrong = np.array([0.3, 0.3, 0.2, 0.1, 0.1])
    _, p_bad, _ = chi_square_gof(draws, wrong)
    assert p_bad < 1e-10


def test_chi_square_gof_merges_sparse_tail():
    rng = np.random.default_rng(3)
    lam = 2.0
    draws = rng.poisson(lam, size=20000)
    k = 30  # far into the sparse tail; merging must keep expected >= 5
    pmf = stats.poisson.pmf(np.arange(k), lam)
    stat, p, dof = chi_square_gof(draws, pmf)
    assert p > 1e-3
    assert dof < k  # tail bins were merged


def test_chi_square_gof_needs_two_bins():
    with pytest.raises(InvalidParamsError):
        chi_square_gof(np.zeros(10, dtype=np.int64), np.array([1.0]))

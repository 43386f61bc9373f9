"""Distributional test statistics shared by the experiment harness."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np
from scipy import stats as sps

from .errors import InvalidParamsError

__all__ = [
    "empirical_pmf",
    "tv_distance",
    "tv_to_exact",
    "ks_statistic",
    "dkw_proxy",
    "two_sample_ks",
    "chi_square_gof",
]


def empirical_pmf(values: np.ndarray, support: int) -> np.ndarray:
    """Normalized counts of integer draws over 0..support-1."""
    if len(values) == 0:
        raise InvalidParamsError("empirical pmf needs at least one draw")
    counts = np.bincount(np.asarray(values, dtype=np.int64), minlength=support)
    if len(counts) > support:
        raise InvalidParamsError("draw exceeds the stated support")
    return counts / float(len(values))


def tv_distance(p: np.ndarray, q: np.ndarray) -> float:
    """Total variation distance 0.5 * sum |p - q| over a common support."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    k = max(len(p), len(q))
    pp = np.zeros(k)
    qq = np.zeros(k)
    pp[: len(p)] = p
    qq[: len(q)] = q
    return 0.5 * float(np.abs(pp - qq).sum())


def tv_to_exact(values: np.ndarray, exact_pmf_prefix: np.ndarray) -> float:
    """TV between integer draws and an exact law given by its pmf on
    0..K-1; the exact tail mass beyond K-1 enters as unmatched mass."""
    k = len(exact_pmf_prefix)
    emp = empirical_pmf(values, max(k, int(np.max(values)) + 1))
    exact = np.zeros(len(emp))
    exact[:k] = exact_pmf_prefix
    tail = max(0.0, 1.0 - float(np.sum(exact_pmf_prefix)))
    return 0.5 * (float(np.abs(emp - exact).sum()) + tail)


def ks_statistic(samples: np.ndarray, cdf: Callable[[np.ndarray], np.ndarray]) -> float:
    """One-sample Kolmogorov statistic against a cdf callable, tie-aware.

    For each distinct sample value x with cumulative count c(x) and
    preceding count c^-(x), the deviation is max(|F(x) - c(x)/N|,
    |F(x) - c^-(x)/N|); the statistic is the maximum over x.
    """
    x = np.sort(np.asarray(samples, dtype=np.float64))
    if len(x) == 0:
        raise InvalidParamsError("KS statistic needs at least one sample")
    n = len(x)
    uniq, counts = np.unique(x, return_counts=True)
    hi = np.cumsum(counts) / n
    lo = np.concatenate([[0.0], hi[:-1]])
    f = np.asarray(cdf(uniq), dtype=np.float64)
    return float(np.maximum(np.abs(f - hi), np.abs(f - lo)).max())


def dkw_proxy(n: int, alpha: float = 0.05) -> float:
    """Dvoretzky-Kiefer-Wolfowitz band half-width sqrt(ln(2/alpha) / (2n))."""
    if n < 1:
        raise InvalidParamsError("sample size must be >= 1")
    if not 0.0 < alpha < 1.0:
        raise InvalidParamsError("alpha must lie in (0, 1)")
    return math.sqrt(math.log(2.0 / alpha) / (2.0 * n))


def two_sample_ks(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Two-sample KS statistic and p-value."""
    res = sps.ks_2samp(np.asarray(x), np.asarray(y), method="auto")
    return float(res.statistic), float(res.pvalue)


def chi_square_gof(values: np.ndarray, exact_pmf_prefix: np.ndarray,
                   min_expected: float = 5.0) -> tuple[float, float, int]:
    """Chi-square goodness of fit of integer draws against an exact pmf.

    Bins with expected counts below ``min_expected`` are merged from the
    tail inward; the final bin absorbs the exact tail mass beyond the
    given prefix.  Returns (statistic, p-value, dof).
    """
    values = np.asarray(values, dtype=np.int64)
    n = len(values)
    k = len(exact_pmf_prefix)
    obs = np.bincount(np.clip(values, 0, k), minlength=k + 1).astype(np.float64)
    exp = np.zeros(k + 1)
    exp[:k] = np.asarray(exact_pmf_prefix, dtype=np.float64) * n
    exp[k] = max(0.0, 1.0 - float(np.sum(exact_pmf_prefix))) * n

    # Merge sparse bins from the right, then from the left.
    obs_b, exp_b = _merge_bins(obs, exp, min_expected)
    if len(obs_b) < 2:
        raise InvalidParamsError("chi-square needs at least two bins with mass")
    # Rescale residual normalization mismatch (regularity, not correction).
    exp_b *= obs_b.sum() / exp_b.sum()
    stat, p = sps.chisquare(obs_b, exp_b)
    return float(stat), float(p), len(obs_b) - 1


def _merge_bins(obs: np.ndarray, exp: np.ndarray, min_expected: float):
    obs_list: list[float] = []
    exp_list: list[float] = []
    acc_o = acc_e = 0.0
    for o, e in zip(obs, exp):
        acc_o += o
        acc_e += e
        if acc_e >= min_expected:
            obs_list.append(acc_o)
            exp_list.append(acc_e)
            acc_o = acc_e = 0.0
    if acc_e > 0 and obs_list:
        obs_list[-1] += acc_o
        exp_list[-1] += acc_e
    return np.asarray(obs_list), np.asarray(exp_list)

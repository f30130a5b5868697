"""Goodness-of-fit helpers shared by tests, reports and the verification suite."""
from __future__ import annotations

import numpy as np
from scipy import stats


def standard_pareto_cdf(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.where(x > 1.0, 1.0 - 1.0 / np.maximum(x, 1.0), 0.0)


def standard_frechet_cdf(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        return np.where(x > 0.0, np.exp(-1.0 / np.maximum(x, 1e-300)), 0.0)


def ks_statistic(samples: np.ndarray, cdf) -> float:
    """One-sample Kolmogorov-Smirnov statistic against a given cdf."""
    return float(stats.kstest(samples, cdf).statistic)


def ks_critical_value(n: int, alpha: float = 0.01) -> float:
    """Asymptotic one-sample KS critical value c(alpha)/sqrt(n)
    (about 1.63/sqrt(n) at the 1% level)."""
    return float(np.sqrt(-0.5 * np.log(alpha / 2.0)) / np.sqrt(n))


def two_sample_ks_pvalue(a: np.ndarray, b: np.ndarray) -> float:
    return float(stats.ks_2samp(a, b).pvalue)

"""Monte Carlo estimators and their standard errors."""

from __future__ import annotations

import numpy as np

DEFAULT_BATCHES = 100


def frequencies(codes: np.ndarray, arity: int) -> np.ndarray:
    n = len(codes)
    if n == 0:
        return np.full(arity, np.nan)
    return np.bincount(codes, minlength=arity)[:arity] / n


def binomial_se(p: np.ndarray, n: int) -> np.ndarray:
    if n == 0:
        return np.full_like(p, np.nan)
    return np.sqrt(p * (1.0 - p) / n)


def weighted_frequencies(codes: np.ndarray, weights: np.ndarray, arity: int
                         ) -> tuple[np.ndarray, np.ndarray]:
    """Self-normalized weighted frequencies and their delta-method standard errors."""
    total = weights.sum()
    if total <= 0.0:
        nan = np.full(arity, np.nan)
        return nan, nan.copy()
    est = np.bincount(codes, weights=weights, minlength=arity)[:arity] / total
    se = np.empty(arity)
    for k in range(arity):
        resid = (codes == k) - est[k]
        se[k] = np.sqrt(np.sum((weights * resid) ** 2)) / total
    return est, se


def effective_sample_size(weights: np.ndarray) -> float:
    s2 = float(np.sum(weights ** 2))
    return float(weights.sum()) ** 2 / s2 if s2 > 0 else 0.0


def batch_means_se(x: np.ndarray, n_batches: int = DEFAULT_BATCHES) -> float:
    """Standard error of the mean of a correlated series by non-overlapping batch means."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    if n < 2:
        return float("nan")
    n_batches = max(2, min(n_batches, n))
    size = n // n_batches
    means = x[: size * n_batches].reshape(n_batches, size).mean(axis=1)
    return float(np.std(means, ddof=1) / np.sqrt(n_batches))

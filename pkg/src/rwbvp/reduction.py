"""Deterministic reductions over per-walk samples."""
from __future__ import annotations

import numpy as np


def pairwise_sum(values) -> float:
    """Sum with a fixed binary tree: neighbours are added level by level.

    The tree depends only on the array length, so the result is identical
    however the samples were produced (serially or by any number of threads).
    """
    a = np.array(values, dtype=np.float64).ravel()
    if a.size == 0:
        return 0.0
    while a.size > 1:
        if a.size % 2:
            a = np.append(a, 0.0)
        a = a[0::2] + a[1::2]
    return float(a[0])


def mean_and_stderr(samples) -> tuple[float, float]:
    """Sample mean and standard error with the unbiased (n - 1) variance."""
    x = np.asarray(samples, dtype=np.float64)
    n = x.size
    if n == 0:
        raise ValueError("no samples")
    mean = pairwise_sum(x) / n
    if n == 1:
        return mean, 0.0
    var = pairwise_sum((x - mean) ** 2) / (n - 1)
    return mean, float(np.sqrt(var / n))

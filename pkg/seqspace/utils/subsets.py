from __future__ import annotations

from itertools import combinations
from typing import Sequence

import numpy as np

from ..errors import BruteForceTooLarge
from ..numeric import Scalar

BRUTE_FORCE_LIMIT = 20


def subset_sup(column: Sequence[Scalar]) -> Scalar:
    """sup over finite subsets S of |Σ_{n∈S} c_n|: all positives or all negatives."""
    positives = sum((c for c in column if c > 0), 0)
    negatives = sum((c for c in column if c < 0), 0)
    return max(positives, -negatives)


def brute_force_subset_sup(column: Sequence[Scalar]) -> Scalar:
    if len(column) > BRUTE_FORCE_LIMIT:
        raise BruteForceTooLarge(
            f"{len(column)} entries means 2^{len(column)} subsets; limit is {BRUTE_FORCE_LIMIT}"
        )
    best = 0
    for size in range(1, len(column) + 1):
        for subset in combinations(column, size):
            best = max(best, abs(sum(subset)))
    return best


def column_subset_sups(matrix: np.ndarray) -> np.ndarray:
    """subset_sup of every column of a float matrix."""
    m = np.asarray(matrix, dtype=np.float64)
    positives = np.where(m > 0, m, 0.0).sum(axis=0)
    negatives = np.where(m < 0, -m, 0.0).sum(axis=0)
    return np.maximum(positives, negatives)

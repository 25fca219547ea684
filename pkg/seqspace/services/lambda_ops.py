"""The Λ weighted-mean matrix, its closed-form inverse and the S-operator.

Everything is a prefix scan over λ and x; nothing here builds an N×N matrix except
`lambda_matrix` / `inverse_matrix`, which exist for cross-checks.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Iterator, Optional, Tuple

import numpy as np

from ..numeric import Mode, Scalar, shift_right, zeros, zeros2d
from ..sequences import LambdaSeq, SeqSpec, sample

logger = logging.getLogger(__name__)


def _lam(lam: LambdaSeq, N: int, mode: Mode) -> Tuple[np.ndarray, np.ndarray]:
    lam.require(N, mode)
    return lam.with_previous(N, mode)


def lambda_entry(lam: LambdaSeq, n: int, k: int, mode: Mode = "float") -> Scalar:
    """(λ_k − λ_{k−1}) / λ_n below the diagonal, 0 above it."""
    if n < 0 or k < 0:
        raise ValueError("indices must be non-negative")
    if k > n:
        return Fraction(0) if mode == "rational" else 0.0
    values, prev = _lam(lam, n, mode)
    return (values[k] - prev[k]) / values[n]


def lambda_matrix(lam: LambdaSeq, N: int, mode: Mode = "float") -> np.ndarray:
    """Rows and columns 0..N of Λ."""
    values, prev = _lam(lam, N, mode)
    out = zeros2d(N + 1, N + 1, mode)
    weights = values - prev
    for n in range(N + 1):
        out[n, : n + 1] = weights[: n + 1] / values[n]
    return out


def inverse_matrix(lam: LambdaSeq, N: int, mode: Mode = "float") -> np.ndarray:
    """Rows and columns 0..N of Λ⁻¹: two nonzeros per row, at k = n−1 and k = n."""
    values, prev = _lam(lam, N, mode)
    out = zeros2d(N + 1, N + 1, mode)
    for n in range(N + 1):
        gap = values[n] - prev[n]
        out[n, n] = values[n] / gap
        if n:
            out[n, n - 1] = -prev[n] / gap
    return out


@dataclass
class LambdaTransformState:
    """Running numerator c_n = Σ_{k≤n} (λ_k − λ_{k−1}) x_k of the Λ-transform."""

    c: Scalar = 0
    n: int = -1
    last_lambda: Scalar = 0

    def step(self, lam_n: Scalar, x_n: Scalar) -> Scalar:
        self.c = self.c + (lam_n - self.last_lambda) * x_n
        self.last_lambda = lam_n
        self.n += 1
        return self.c / lam_n


def stream_transform(
    lam: LambdaSeq, values: Iterable[Scalar], mode: Mode = "float"
) -> Iterator[Scalar]:
    """Yield y_0, y_1, ... one at a time as x arrives."""
    state = LambdaTransformState(c=Fraction(0) if mode == "rational" else 0.0)
    N = 0
    for n, x_n in enumerate(values):
        if n >= N:
            N = max(2 * N, 16)
            lam_values, _ = _lam(lam, N, mode)
        yield state.step(lam_values[n], x_n)


def transform_values(lam_values: np.ndarray, prev: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """Λx from already sampled arrays."""
    return np.cumsum((lam_values - prev) * xs) / lam_values


def lambda_transform(
    lam: LambdaSeq, x: SeqSpec, N: int, mode: Mode = "float", direct: bool = False
) -> np.ndarray:
    """y_n = Λ_n(x) for n = 0..N.

    `direct=True` sums each row of the explicit triangle instead of the prefix scan,
    for cross-checking.
    """
    values, prev = _lam(lam, N, mode)
    xs = sample(x, N, mode)
    if direct:
        logger.debug("direct O(N^2) Λ-transform at N=%d", N)
        return lambda_matrix(lam, N, mode).dot(xs)
    return transform_values(values, prev, xs)


def inverse_values(
    lam_values: np.ndarray, prev: np.ndarray, ys: np.ndarray, mode: Mode
) -> np.ndarray:
    return (lam_values * ys - prev * shift_right(ys, mode)) / (lam_values - prev)


def inverse_transform(lam: LambdaSeq, y: SeqSpec, N: int, mode: Mode = "float") -> np.ndarray:
    """x_n = (λ_n y_n − λ_{n−1} y_{n−1}) / (λ_n − λ_{n−1}), the two-term inverse of Λ."""
    values, prev = _lam(lam, N, mode)
    return inverse_values(values, prev, sample(y, N, mode), mode)


def s_values(lam_values: np.ndarray, prev: np.ndarray, xs: np.ndarray, mode: Mode) -> np.ndarray:
    steps = zeros(len(xs), mode)
    steps[1:] = prev[1:] * (xs[1:] - xs[:-1])
    return np.cumsum(steps) / lam_values


def s_operator(lam: LambdaSeq, x: SeqSpec, N: int, mode: Mode = "float") -> np.ndarray:
    """S_0 = 0, S_n = (1/λ_n) Σ_{k=1..n} λ_{k−1}(x_k − x_{k−1})."""
    values, prev = _lam(lam, N, mode)
    return s_values(values, prev, sample(x, N, mode), mode)


def lemma_residuals(lam: LambdaSeq, x: SeqSpec, N: int, mode: Mode = "float") -> Dict[str, Scalar]:
    """Largest deviations from S = x − Λx and S_n = λ_{n−1}(Λ_n − Λ_{n−1})/(λ_n − λ_{n−1})."""
    values, prev = _lam(lam, N, mode)
    xs = sample(x, N, mode)
    ys = transform_values(values, prev, xs)
    s = s_values(values, prev, xs, mode)
    increments = prev[1:] * (ys[1:] - ys[:-1]) / (values[1:] - prev[1:])
    return {
        "difference_form": max_abs(s - (xs - ys), mode),
        "increment_form": max_abs(s[1:] - increments, mode),
    }


def max_abs(values: np.ndarray, mode: Optional[Mode] = None) -> Scalar:
    items = np.abs(values).tolist()
    if not items:
        return Fraction(0) if mode == "rational" else 0.0
    return max(items)

"""α-, β- and γ-dual tests for ℓ(λ,p) through the matrices D^a and B^a.

With y = Λx the products a_n x_n and the partial sums Σ_{k≤n} a_k x_k become
(D^a y)_n and (B^a y)_n, so dual membership turns into a matrix-class question about
D^a and B^a, which is answered with the sup-type test on K1 and the conjugate-sum
test on K2.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Literal, Optional, Tuple

import numpy as np

from ..config import Thresholds
from ..models import DualCheckReport, DualPart, Verdict
from ..numeric import Mode, Scalar, shift_right, to_float, zeros2d
from ..sequences import ExponentSeq, LambdaSeq, SeqSpec, sample
from ..utils.subsets import column_subset_sups
from ..verdicts import (
    checkpoints,
    classify_running_sup,
    classify_series,
    combine,
    exists_on_grid,
)

logger = logging.getLogger(__name__)

Which = Literal["alpha", "beta", "gamma"]
WHICH: Tuple[str, ...] = ("alpha", "beta", "gamma")


def _gaps(lam: LambdaSeq, N: int, mode: Mode) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    lam.require(N, mode)
    values, prev = lam.with_previous(N, mode)
    return values, prev, values - prev


@dataclass(frozen=True)
class DualMatrixD:
    """d_nn = λ_n a_n / (λ_n − λ_{n−1}), d_{n,n−1} = −λ_{n−1} a_n / (λ_n − λ_{n−1})."""

    a: SeqSpec
    lam: LambdaSeq

    def bands(self, N: int, mode: Mode = "float") -> Tuple[np.ndarray, np.ndarray]:
        """(diagonal, subdiagonal) for rows 0..N; subdiagonal[0] is the empty slot d_{0,−1}."""
        values, prev, gaps = _gaps(self.lam, N, mode)
        a = sample(self.a, N, mode)
        return values * a / gaps, -prev * a / gaps

    def entry(self, n: int, k: int, mode: Mode = "float") -> Scalar:
        diag, sub = self.bands(n, mode)
        if k == n:
            return diag[n]
        if k == n - 1:
            return sub[n]
        return diag[n] * 0

    def dense(self, N: int, mode: Mode = "float") -> np.ndarray:
        diag, sub = self.bands(N, mode)
        out = zeros2d(N + 1, N + 1, mode)
        idx = np.arange(N + 1)
        out[idx, idx] = diag
        out[idx[1:], idx[:-1]] = sub[1:]
        return out

    def apply(self, ys: np.ndarray, mode: Mode = "float") -> np.ndarray:
        """(D^a y)_n for n = 0..len(ys)−1."""
        diag, sub = self.bands(len(ys) - 1, mode)
        return diag * ys + sub * shift_right(ys, mode)

    def column_sups(self, N: int) -> np.ndarray:
        """Finite-subset sup of each column k ≤ N (entries at rows k and k+1)."""
        diag, sub = self.bands(N + 1)
        return column_subset_sups(np.vstack((diag[: N + 1], sub[1 : N + 2])))


@dataclass(frozen=True)
class DualMatrixB:
    """b_nk = s¹_k below the diagonal, s²_n on it, 0 above."""

    a: SeqSpec
    lam: LambdaSeq

    def s_sequences(self, N: int, mode: Mode = "float") -> Tuple[np.ndarray, np.ndarray]:
        """(s¹_0..s¹_N, s²_0..s²_N); s¹ reads a_{N+1}."""
        values, _, gaps = _gaps(self.lam, N + 1, mode)
        ratio = sample(self.a, N + 1, mode) / gaps
        s1 = (ratio[:-1] - ratio[1:]) * values[:-1]
        s2 = ratio[:-1] * values[:-1]
        return s1, s2

    def entry(self, n: int, k: int, mode: Mode = "float") -> Scalar:
        s1, s2 = self.s_sequences(max(n, k), mode)
        if k < n:
            return s1[k]
        if k == n:
            return s2[n]
        return s2[n] * 0

    def dense(self, N: int, mode: Mode = "float") -> np.ndarray:
        s1, s2 = self.s_sequences(N, mode)
        out = zeros2d(N + 1, N + 1, mode)
        for n in range(N + 1):
            out[n, :n] = s1[:n]
            out[n, n] = s2[n]
        return out

    def apply(self, ys: np.ndarray, mode: Mode = "float") -> np.ndarray:
        """(B^a y)_n = Σ_{k<n} s¹_k y_k + s²_n y_n."""
        s1, s2 = self.s_sequences(len(ys) - 1, mode)
        below = shift_right(np.cumsum(s1 * ys), mode)
        return below + s2 * ys


def build_D(a: SeqSpec, lam: LambdaSeq) -> DualMatrixD:
    return DualMatrixD(a, lam)


def build_B(a: SeqSpec, lam: LambdaSeq) -> DualMatrixB:
    return DualMatrixB(a, lam)


def _running(values: np.ndarray, N: int) -> List[Tuple[int, float]]:
    running = np.maximum.accumulate(values) if values.size else values
    return [(c, float(running[c])) for c in checkpoints(N)]


def _sup_part(
    name: str, magnitudes: np.ndarray, p: np.ndarray, k1: np.ndarray, N: int, th: Thresholds
) -> DualPart:
    """sup_{k∈K1} |v_k|^{p_k} as a running sup over [0, N]."""
    terms = np.zeros(N + 1)
    with np.errstate(over="ignore"):
        terms[k1] = np.abs(magnitudes[k1]) ** p[k1]
    curve = _running(terms, N)
    verdict = classify_running_sup(curve, th)
    return DualPart(name, verdict, curve, None, int(k1.size))


def _conjugate_part(
    name: str,
    magnitudes: np.ndarray,
    conj: np.ndarray,
    k2: np.ndarray,
    N: int,
    th: Thresholds,
    bounded_too: bool = False,
) -> DualPart:
    """∃M: Σ_{k∈K2} |v_k/M|^{p̀_k} < ∞ (and, for ℓ ∩ ℓ∞, sup bounded) on the M grid."""
    results = []
    curves = {}
    for M in th.grid():
        terms = np.zeros(N + 1)
        with np.errstate(over="ignore"):
            terms[k2] = (np.abs(magnitudes[k2]) / M) ** conj[k2]
        verdict, _ = classify_series(terms, th)
        if bounded_too:
            verdict = combine([verdict, classify_running_sup(_running(terms, N), th)], th, "parts")
        sums = np.cumsum(terms)
        curves[M] = [(c, float(sums[c])) for c in checkpoints(N)]
        logger.debug("%s at M=%d: %s", name, M, verdict.tag.value)
        results.append((M, verdict))
    verdict, chosen = exists_on_grid(results, th)
    shown = chosen if chosen is not None else th.grid()[-1]
    return DualPart(name, verdict, curves[shown], chosen, int(k2.size))


def alpha_dual_check(
    a: SeqSpec,
    lam: LambdaSeq,
    p: ExponentSeq,
    N: int,
    th: Optional[Thresholds] = None,
) -> DualCheckReport:
    """sup-type test on the D^a columns over K1 and the conjugate-sum test over K2."""
    th = th or Thresholds()
    D = build_D(a, lam)
    sups = D.column_sups(N)
    exps = to_float(p.values(N))
    k1, k2 = p.partition(N)
    parts = [
        _sup_part("column_sup_K1", sups, exps, k1, N, th),
        _conjugate_part("conjugate_sum_K2", sups, p.conjugate(N), k2, N, th),
    ]
    return DualCheckReport("alpha", N, parts, combine((q.verdict for q in parts), th, "parts"))


def beta_gamma_dual_check(
    a: SeqSpec,
    lam: LambdaSeq,
    p: ExponentSeq,
    N: int,
    th: Optional[Thresholds] = None,
    which: Which = "beta",
) -> DualCheckReport:
    """s¹, s² ∈ ℓ∞(p) over K1; s¹/M, s²/M ∈ ℓ(p̀) ∩ ℓ∞(p̀) for some M over K2.

    The β- and γ-duals of ℓ(λ,p) are described by the same conditions.
    """
    th = th or Thresholds()
    s1, s2 = build_B(a, lam).s_sequences(N)
    exps = to_float(p.values(N))
    k1, k2 = p.partition(N)
    parts: List[DualPart] = []
    conj = p.conjugate(N)
    for label, s in (("s1", s1), ("s2", s2)):
        parts.append(_sup_part(f"{label}_sup_K1", s, exps, k1, N, th))
        parts.append(_conjugate_part(f"{label}_conjugate_K2", s, conj, k2, N, th, True))
    combined: Verdict = combine((q.verdict for q in parts), th, "parts")
    return DualCheckReport(which, N, parts, combined)


def dual_check(
    which: Which,
    a: SeqSpec,
    lam: LambdaSeq,
    p: ExponentSeq,
    N: int,
    th: Optional[Thresholds] = None,
) -> DualCheckReport:
    if which == "alpha":
        return alpha_dual_check(a, lam, p, N, th)
    return beta_gamma_dual_check(a, lam, p, N, th, which)

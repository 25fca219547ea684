"""The ã-matrix and the numeric test of A ∈ (ℓ(λ,p) : ℓ(q) | c0(q) | c(q) | ℓ∞(q)).

With y = Λx, Σ_{k≤m} a_nk x_k = Σ_{k<m} ã_nk y_k + e_nm y_m, so every mapping
condition on A is a condition on the ã-matrix and on e_nk = λ_k a_nk / (λ_k − λ_{k−1}).
Conditions are evaluated in float on the (N+1)×(N+1) corner; see `conditions.CATALOG`
for the exact formulas.
"""

from __future__ import annotations

import asyncio
import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from ..config import Settings, Thresholds
from ..errors import InputError
from ..models import ClassificationResult, ConditionResult, Verdict, VerdictTag
from ..numeric import Mode, Scalar, readonly, to_float, zeros2d
from ..sequences import ExponentSeq, LambdaSeq, MatrixSpec, SeqSpec, block, sample
from ..verdicts import (
    Curve,
    checkpoints,
    classify_bounded,
    classify_null,
    classify_running_sup,
    combine,
    exists_on_grid,
    forall_on_grid,
    window_start,
)
from .conditions import Condition, conditions_for, get_condition
from .lambda_ops import lambda_transform, max_abs

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class TildeMatrix:
    """ã_nk = (a_nk/(λ_k − λ_{k−1}) − a_{n,k+1}/(λ_{k+1} − λ_k))·λ_k on n, k ≤ N."""

    A: MatrixSpec
    lam: LambdaSeq
    N: int
    mode: Mode
    values: np.ndarray
    edge: np.ndarray  # e_nk
    source: np.ndarray  # a_nk

    def entry(self, n: int, k: int) -> Scalar:
        return self.values[n, k]

    def identity_residual(self, x: SeqSpec) -> Scalar:
        """max over n, m ≤ N of |Σ_{k≤m} a_nk x_k − Σ_{k<m} ã_nk y_k − e_nm y_m|."""
        N, mode = self.N, self.mode
        xs = sample(x, N, mode)
        ys = lambda_transform(self.lam, x, N, mode)
        left = np.cumsum(self.source * xs, axis=1)
        below = np.cumsum(self.values * ys, axis=1)
        right = np.concatenate((zeros2d(N + 1, 1, mode), below[:, :-1]), axis=1)
        right = right + self.edge * ys
        return max_abs((left - right).ravel(), mode)

    def column_limits(
        self, th: Thresholds, N: Optional[int] = None
    ) -> Tuple[np.ndarray, np.ndarray, int]:
        """(ã_k estimates, stability flags, number of columns observed).

        ã_k is the mean of the last tenth of the rows. Columns that reach into the
        trailing window have no tail of their own and are not observed.
        """
        N = self.N if N is None else N
        observed = observed_span(N, th)
        T = to_float(self.values)[: N + 1, :observed]
        tail = T[-max(1, (N + 1) // 10) :]
        limits = tail.mean(axis=0)
        deviation = np.abs(tail - limits).max(axis=0)
        scale = np.abs(T).max(axis=0)
        stable = deviation <= th.limit_tol * np.maximum(1.0, scale)
        return limits, stable, observed


def observed_span(N: int, th: Thresholds) -> int:
    """Lines k < observed_span end before the trailing window starts."""
    return max(1, window_start(N + 1, th) - 1)


def build_tilde(A: MatrixSpec, lam: LambdaSeq, N: int, mode: Mode = "float") -> TildeMatrix:
    lam.require(N + 1, mode)
    values, prev = lam.with_previous(N + 1, mode)
    a = block(A, N + 1, N + 2, mode)
    scaled = a / (values - prev)
    tilde = (scaled[:, :-1] - scaled[:, 1:]) * values[:-1]
    edge = scaled[:, :-1] * values[:-1]
    return TildeMatrix(A, lam, N, mode, readonly(tilde), readonly(edge), a[:, :-1])


def apply_matrix(A: MatrixSpec, x: SeqSpec, N: int, mode: Mode = "float") -> np.ndarray:
    """(Ax)_n = Σ_{k≤N} a_nk x_k for n ≤ N."""
    return block(A, N + 1, N + 1, mode).dot(sample(x, N, mode))


# -- condition engine -----------------------------------------------------------------


@dataclass(eq=False)
class _Inputs:
    tilde: TildeMatrix
    T: np.ndarray
    E: np.ndarray
    p: np.ndarray
    q: np.ndarray
    k1: np.ndarray
    k2: np.ndarray
    conj: np.ndarray
    N: int
    th: Thresholds

    @classmethod
    def build(
        cls, tilde: TildeMatrix, p: ExponentSeq, q: ExponentSeq, N: int, th: Thresholds
    ) -> "_Inputs":
        if N > tilde.N:
            raise InputError(f"horizon {N} exceeds the ã-matrix horizon {tilde.N}")
        q.require_nondecreasing(N)
        k1_idx, k2_idx = p.partition(N)
        k1 = np.zeros(N + 1, dtype=bool)
        k1[k1_idx] = True
        k2 = np.zeros(N + 1, dtype=bool)
        k2[k2_idx] = True
        return cls(
            tilde=tilde,
            T=to_float(tilde.values)[: N + 1, : N + 1],
            E=to_float(tilde.edge)[: N + 1, : N + 1],
            p=to_float(p.values(N)),
            q=to_float(q.values(N)),
            k1=k1,
            k2=k2,
            conj=p.conjugate(N),
            N=N,
            th=th,
        )

    def row_scale(self, L: float, sign: int = 1) -> np.ndarray:
        """L^{±1/q_n} as a column vector."""
        return (float(L) ** (sign / self.q))[:, None]

    def subset_sups(self) -> np.ndarray:
        """Row c holds sup_{F ⊆ [0,c]} |Σ_{n∈F} ã_nk| for every column k."""
        positives = np.cumsum(np.where(self.T > 0, self.T, 0.0), axis=0)
        negatives = np.cumsum(np.where(self.T < 0, -self.T, 0.0), axis=0)
        return np.maximum(positives, negatives)

    def limit_gaps(self) -> Tuple[np.ndarray, bool, int]:
        limits, stable, observed = self.tilde.column_limits(self.th, self.N)
        gaps = np.zeros_like(self.T)
        gaps[:, :observed] = np.abs(self.T[:, :observed] - limits[None, :observed])
        return gaps, bool(np.all(stable)), observed


def _pow(base: np.ndarray, exponent: np.ndarray, mask: Optional[np.ndarray] = None) -> np.ndarray:
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        out = np.power(base, exponent)
    if mask is None:
        return out
    return np.where(mask, out, 0.0)


def _sup_curve(F: np.ndarray, N: int) -> Curve:
    """sup over n, k ≤ c."""
    R = np.maximum.accumulate(np.maximum.accumulate(F, axis=0), axis=1)
    return [(c, float(R[c, c])) for c in checkpoints(N)]


def _row_sum_curve(G: np.ndarray, N: int) -> Curve:
    """sup_{n≤c} Σ_{k≤c}."""
    C = np.cumsum(G, axis=1)
    return [(c, float(C[: c + 1, c].max())) for c in checkpoints(N)]


def _column_sum_curve(G: np.ndarray, N: int) -> Curve:
    """sup_{k≤c} Σ_{n≤c}."""
    C = np.cumsum(G, axis=0)
    return [(c, float(C[c, : c + 1].max())) for c in checkpoints(N)]


def _horizon_sup_curve(F: np.ndarray, N: int) -> Curve:
    """sup_{k≤c} F[c, k] where row c already aggregates rows ≤ c."""
    return [(c, float(F[c, : c + 1].max())) for c in checkpoints(N)]


def _horizon_sum_curve(F: np.ndarray, N: int) -> Curve:
    return [(c, float(F[c, : c + 1].sum())) for c in checkpoints(N)]


Evaluation = Tuple[Verdict, Curve]
Outcome = Tuple[Verdict, Curve, List[int], Optional[int], List[str]]


def _running(curve: Curve, th: Thresholds) -> Evaluation:
    return classify_running_sup(curve, th), curve


def _exists(evaluate: Callable[[int], Evaluation], th: Thresholds, label: str) -> Outcome:
    results: List[Tuple[int, Verdict]] = []
    curves: Dict[int, Curve] = {}
    for point in th.grid():
        verdict, curve = evaluate(point)
        logger.debug("%s=%d: %s", label, point, verdict.tag.value)
        results.append((point, verdict))
        curves[point] = curve
        if verdict.convergent:
            break
    verdict, chosen = exists_on_grid(results, th)
    shown = chosen if chosen is not None else results[-1][0]
    return verdict, curves[shown], [p for p, _ in results], chosen, []


def _forall(evaluate: Callable[[int], Outcome], th: Thresholds) -> Outcome:
    results: List[Tuple[int, Verdict]] = []
    curves: Dict[int, Curve] = {}
    notes: List[str] = []
    for L in th.grid():
        verdict, curve, _, chosen, _ = evaluate(L)
        logger.debug("L=%d: %s", L, verdict.tag.value)
        results.append((L, verdict))
        curves[L] = curve
        if chosen is not None:
            notes.append(f"L={L}: bounded at M={chosen}")
        if verdict.divergent:
            break
    shown = results[-1][0]
    return forall_on_grid(results, th), curves[shown], [p for p, _ in results], None, notes


def _plain(evaluation: Evaluation) -> Outcome:
    verdict, curve = evaluation
    return verdict, curve, [], None, []


def _lines(verdicts: List[Verdict], N: int, th: Thresholds, what: str) -> Tuple[Verdict, Curve]:
    """Combine per-row or per-column verdicts; the curve counts lines lacking evidence."""
    failing = np.zeros(N + 1, dtype=np.int64)
    for i, v in enumerate(verdicts):
        if not v.convergent:
            failing[i] = 1
    counts = np.cumsum(failing)
    curve = [(c, float(counts[c])) for c in checkpoints(N)]
    return combine(verdicts, th, what), curve


def _column_null(D: np.ndarray, inp: _Inputs, observed: int) -> Tuple[Verdict, Curve]:
    verdicts = [classify_null(D[:, k], inp.th)[0] for k in range(observed)]
    return _lines(verdicts, inp.N, inp.th, "columns")


def _c4_6(inp: _Inputs) -> Outcome:
    F = _pow(inp.subset_sups(), inp.p, inp.k1)
    return _plain(_running(_horizon_sup_curve(F, inp.N), inp.th))


def _c4_7(inp: _Inputs) -> Outcome:
    S = inp.subset_sups()
    return _exists(
        lambda M: _running(_horizon_sum_curve(_pow(S / M, inp.conj, inp.k2), inp.N), inp.th),
        inp.th,
        "M",
    )


def _c4_8(inp: _Inputs) -> Outcome:
    A = np.abs(inp.T)
    return _exists(
        lambda M: _running(
            _column_sum_curve(_pow(A * float(M) ** (-1.0 / inp.p), inp.q[:, None]), inp.N), inp.th
        ),
        inp.th,
        "M",
    )


def _c4_9(inp: _Inputs) -> Outcome:
    D = _pow(np.abs(inp.T), inp.q[:, None])
    return _plain(_column_null(D, inp, observed_span(inp.N, inp.th)))


def _c4_10(inp: _Inputs) -> Outcome:
    A = np.abs(inp.T)
    return _forall(
        lambda L: _plain(
            _running(_sup_curve(_pow(A * inp.row_scale(L), inp.p, inp.k1), inp.N), inp.th)
        ),
        inp.th,
    )


def _c4_11(inp: _Inputs) -> Outcome:
    A = np.abs(inp.T)

    def for_L(L: int) -> Outcome:
        scaled = A * inp.row_scale(L)
        return _exists(
            lambda M: _running(_row_sum_curve(_pow(scaled / M, inp.conj, inp.k2), inp.N), inp.th),
            inp.th,
            "M",
        )

    return _forall(for_L, inp.th)


def _c4_12(inp: _Inputs) -> Outcome:
    F = _pow(np.abs(inp.T), inp.p, inp.k1)
    return _plain(_running(_sup_curve(F, inp.N), inp.th))


def _c4_13(inp: _Inputs) -> Outcome:
    A = np.abs(inp.T)
    return _exists(
        lambda M: _running(_row_sum_curve(_pow(A / M, inp.conj, inp.k2), inp.N), inp.th),
        inp.th,
        "M",
    )


def _with_limits(inp: _Inputs, run: Callable[[np.ndarray, int], Outcome]) -> Outcome:
    gaps, stable, observed = inp.limit_gaps()
    verdict, curve, grid, chosen, notes = run(gaps, observed)
    notes = notes + [f"column limits estimated on the first {observed} columns"]
    if not stable:
        verdict = Verdict(
            VerdictTag.INCONCLUSIVE,
            "column limits are not numerically stable",
            inp.th.as_dict(),
        )
    return verdict, curve, grid, chosen, notes


def _c4_14(inp: _Inputs) -> Outcome:
    def run(gaps: np.ndarray, observed: int) -> Outcome:
        return _forall(
            lambda L: _plain(
                _running(_sup_curve(_pow(gaps * inp.row_scale(L), inp.p, inp.k1), inp.N), inp.th)
            ),
            inp.th,
        )

    return _with_limits(inp, run)


def _c4_15(inp: _Inputs) -> Outcome:
    def run(gaps: np.ndarray, observed: int) -> Outcome:
        return _plain(_column_null(_pow(gaps, inp.q[:, None]), inp, observed))

    return _with_limits(inp, run)


def _c4_16(inp: _Inputs) -> Outcome:
    def run(gaps: np.ndarray, observed: int) -> Outcome:
        def for_L(L: int) -> Outcome:
            scaled = gaps * inp.row_scale(L)
            return _exists(
                lambda M: _running(
                    _row_sum_curve(_pow(scaled / M, inp.conj, inp.k2), inp.N), inp.th
                ),
                inp.th,
                "M",
            )

        return _forall(for_L, inp.th)

    return _with_limits(inp, run)


def _c4_17(inp: _Inputs) -> Outcome:
    A = np.abs(inp.T)
    return _exists(
        lambda L: _running(
            _sup_curve(_pow(A * inp.row_scale(L, -1), inp.p, inp.k1), inp.N), inp.th
        ),
        inp.th,
        "L",
    )


def _c4_18(inp: _Inputs) -> Outcome:
    A = np.abs(inp.T)
    return _exists(
        lambda L: _running(
            _row_sum_curve(_pow(A * inp.row_scale(L, -1), inp.conj, inp.k2), inp.N), inp.th
        ),
        inp.th,
        "L",
    )


def _row_terms(inp: _Inputs, values: np.ndarray) -> np.ndarray:
    return _pow(np.abs(values), inp.q)


def _c4_19(inp: _Inputs) -> Outcome:
    rows = observed_span(inp.N, inp.th)
    terms = _row_terms(inp, inp.E[:rows])
    verdicts = [classify_null(terms[n], inp.th)[0] for n in range(rows)]
    return _plain(_lines(verdicts, inp.N, inp.th, "rows"))


def _c4_20(inp: _Inputs) -> Outcome:
    rows = observed_span(inp.N, inp.th)
    tail = inp.E[:rows, -max(1, (inp.N + 1) // 10) :]
    limits = tail.mean(axis=1)
    deviation = np.abs(tail - limits[:, None]).max(axis=1)
    scale = np.abs(inp.E[:rows]).max(axis=1)
    stable = deviation <= inp.th.limit_tol * np.maximum(1.0, scale)
    terms = _row_terms(inp, inp.E[:rows] - limits[:, None])
    verdicts = []
    for n in range(rows):
        if stable[n]:
            verdicts.append(classify_null(terms[n], inp.th)[0])
        else:
            verdicts.append(
                Verdict(VerdictTag.INCONCLUSIVE, f"row {n} has no stable limit", inp.th.as_dict())
            )
    return _plain(_lines(verdicts, inp.N, inp.th, "rows"))


def _c4_21(inp: _Inputs) -> Outcome:
    rows = observed_span(inp.N, inp.th)
    terms = _row_terms(inp, inp.E[:rows])
    verdicts = [classify_bounded(terms[n], inp.th) for n in range(rows)]
    verdict = combine(verdicts, inp.th, "rows")
    running = np.maximum.accumulate(terms, axis=1).max(axis=0) if rows else np.zeros(inp.N + 1)
    curve = [(c, float(running[c])) for c in checkpoints(inp.N)]
    return verdict, curve, [], None, []


_EVALUATORS: Dict[str, Callable[[_Inputs], Outcome]] = {
    "4.6": _c4_6,
    "4.7": _c4_7,
    "4.8": _c4_8,
    "4.9": _c4_9,
    "4.10": _c4_10,
    "4.11": _c4_11,
    "4.12": _c4_12,
    "4.13": _c4_13,
    "4.14": _c4_14,
    "4.15": _c4_15,
    "4.16": _c4_16,
    "4.17": _c4_17,
    "4.18": _c4_18,
    "4.19": _c4_19,
    "4.20": _c4_20,
    "4.21": _c4_21,
}


def _evaluate(condition: Condition, inp: _Inputs) -> ConditionResult:
    logger.debug("evaluating condition %s at N=%d", condition.id, inp.N)
    verdict, curve, grid, chosen, notes = _EVALUATORS[condition.id](inp)
    if condition.deviation:
        notes = [condition.deviation] + notes
    return ConditionResult(
        id=condition.id,
        N=inp.N,
        verdict=verdict,
        curve=curve,
        grid=grid,
        chosen=chosen,
        formula=condition.formula,
        notes=notes,
    )


def eval_condition(
    cid: str,
    tilde: TildeMatrix,
    p: ExponentSeq,
    q: ExponentSeq,
    N: Optional[int] = None,
    th: Optional[Thresholds] = None,
) -> ConditionResult:
    """Evaluate one catalog condition on the (N+1)×(N+1) corner of the ã-matrix."""
    condition = get_condition(cid)
    inp = _Inputs.build(tilde, p, q, tilde.N if N is None else N, th or Thresholds())
    return _evaluate(condition, inp)


async def classify_async(
    A: MatrixSpec,
    lam: LambdaSeq,
    p: ExponentSeq,
    q: ExponentSeq,
    target: str,
    N: int,
    th: Optional[Thresholds] = None,
    threads: Optional[int] = None,
) -> ClassificationResult:
    """Run the target's conditions concurrently on worker threads.

    Results keep the catalog order whatever order the threads finish in.
    """
    ids = conditions_for(target)
    th = th or Thresholds()
    limit = asyncio.Semaphore(threads or Settings.from_env().threads)
    tilde = await asyncio.to_thread(build_tilde, A, lam, N)
    inp = await asyncio.to_thread(_Inputs.build, tilde, p, q, N, th)

    async def _one(cid: str) -> ConditionResult:
        async with limit:
            return await asyncio.to_thread(_evaluate, get_condition(cid), inp)

    tasks = [asyncio.create_task(_one(cid)) for cid in ids]
    results = [await task for task in tasks]
    combined = combine((r.verdict for r in results), th)
    return ClassificationResult(target, N, results, combined)


def classify(
    A: MatrixSpec,
    lam: LambdaSeq,
    p: ExponentSeq,
    q: ExponentSeq,
    target: str,
    N: int,
    th: Optional[Thresholds] = None,
    threads: Optional[int] = None,
) -> ClassificationResult:
    return asyncio.run(classify_async(A, lam, p, q, target, N, th, threads))

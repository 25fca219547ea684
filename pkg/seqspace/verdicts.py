"""Turn finite samples into convergent / divergent / inconclusive evidence.

Nothing here proves anything. Each rule looks at the trailing part of the sample and
records what it saw in an evidence dict so a reader can judge the call.
"""

from __future__ import annotations

import logging
import math
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .config import Thresholds
from .models import Verdict, VerdictTag

logger = logging.getLogger(__name__)

Curve = List[Tuple[int, float]]


def _verdict(tag: VerdictTag, rationale: str, th: Thresholds) -> Verdict:
    logger.debug("verdict %s: %s", tag.value, rationale)
    return Verdict(tag, rationale, th.as_dict())


def window_start(length: int, th: Thresholds) -> int:
    """First index of the trailing window (last `th.window` share of the sample)."""
    size = max(1, math.ceil(th.window * length))
    return max(0, length - size)


def checkpoints(N: int) -> List[int]:
    """Decade checkpoints 10, 100, ... below N plus N//100, N//10 and N itself."""
    points = {N}
    p = 10
    while p < N:
        points.add(p)
        p *= 10
    for d in (10, 100):
        if N // d >= 1:
            points.add(N // d)
    return sorted(points)


Evidence = Dict[str, Optional[float]]


def classify_series(terms: np.ndarray, th: Thresholds) -> Tuple[Verdict, Evidence]:
    """Verdict on Σ t_n for non-negative float terms t_0..t_N."""
    t = np.asarray(terms, dtype=np.float64)
    length = t.size
    evidence: Evidence = {
        "window_start": None,
        "window_max": None,
        "window_min": None,
        "decay_exponent": None,
        "tail_bound": None,
        "growth_ratio": None,
        "harmonic_constant": None,
    }
    if length == 0:
        return _verdict(VerdictTag.CONVERGENT, "empty sum", th), evidence
    with np.errstate(over="ignore"):
        total = float(t.sum())
    if not np.all(np.isfinite(t)) or total > th.divergence_cap:
        return _verdict(VerdictTag.DIVERGENT, "partial sum exceeds divergence cap", th), evidence

    start = window_start(length, th)
    window = t[start:]
    evidence.update(
        window_start=float(start), window_max=float(window.max()), window_min=float(window.min())
    )
    if not window.any():
        evidence["tail_bound"] = 0.0
        return _verdict(VerdictTag.CONVERGENT, "terms vanish over the window", th), evidence
    last = int(np.flatnonzero(t)[-1])
    if last < length - 1:
        evidence["tail_bound"] = 0.0
        return (
            _verdict(VerdictTag.CONVERGENT, f"terms are exactly zero after index {last}", th),
            evidence,
        )

    N = length - 1
    span = max(1, length // 100)
    term_tail = float(t[-span:].max())
    m = N // 10
    if N > m:
        head = float(t[m:].max())
        if head > 0 and term_tail > 0:
            s = math.log(head / term_tail) / math.log((N + 1) / (m + 1))
            r = (term_tail / head) ** (1.0 / (N - m))
            bounds = []
            if s > 1:
                bounds.append(term_tail * (N + 1) / (s - 1))
            if r < 1:
                bounds.append(term_tail * r / (1 - r))
            evidence["decay_exponent"] = s
            evidence["tail_bound"] = min(bounds) if bounds else None
            if s > 1 + th.decay_margin and term_tail < th.tail_tol:
                return (
                    _verdict(
                        VerdictTag.CONVERGENT,
                        f"last decade decays like n^-{s:.3g} and the term tail is below tail_tol",
                        th,
                    ),
                    evidence,
                )

    if window.size >= 2:
        g = window * np.arange(start + 1, length + 1, dtype=np.float64)
        half = g.size // 2
        first, second = float(g[:half].mean()), float(g[half:].mean())
        c = float(g.min())
        evidence["harmonic_constant"] = c
        evidence["growth_ratio"] = second / first if first > 0 else None
        if c > th.harmonic_floor and second >= first * (1 - th.trend_slack):
            return (
                _verdict(
                    VerdictTag.DIVERGENT,
                    f"terms stay above {c:.3g}/(n+1) over the trailing window without decaying "
                    "(harmonic comparison)",
                    th,
                ),
                evidence,
            )
    return _verdict(VerdictTag.INCONCLUSIVE, "decay too slow to call at this horizon", th), evidence


def classify_null(terms: np.ndarray, th: Thresholds) -> Tuple[Verdict, Evidence]:
    """Verdict on t_n -> 0 (limit evidence, not summability)."""
    t = np.asarray(terms, dtype=np.float64)
    length = t.size
    evidence: Evidence = {"head_sup": None, "window_sup": None}
    if length == 0:
        return _verdict(VerdictTag.CONVERGENT, "empty sequence", th), evidence
    if not np.all(np.isfinite(t)):
        return _verdict(VerdictTag.DIVERGENT, "non-finite terms", th), evidence
    start = window_start(length, th)
    window, head = t[start:], t[:start]
    head_sup = float(head.max()) if head.size else 0.0
    window_sup = float(window.max())
    evidence.update(head_sup=head_sup, window_sup=window_sup)
    if window_sup == 0:
        return _verdict(VerdictTag.CONVERGENT, "terms vanish over the window", th), evidence
    if head_sup > 0 and window_sup < th.c0_ratio * head_sup:
        return (
            _verdict(VerdictTag.CONVERGENT, "window sup fell below c0_ratio of the initial sup", th),
            evidence,
        )
    if window.size >= 2:
        half = window.size // 2
        early, late = float(window[:half].max()), float(window[half:].min())
        if late > 0 and late >= early * (1 - th.trend_slack):
            return _verdict(VerdictTag.DIVERGENT, "no decay across the window", th), evidence
    return _verdict(VerdictTag.INCONCLUSIVE, "terms shrink but not decisively", th), evidence


def classify_running_sup(curve: Sequence[Tuple[int, float]], th: Thresholds) -> Verdict:
    """Bounded when the top decade is flat and the top two decades decelerate;
    growth when the last decade multiplies the value."""
    values = [v for _, v in curve]
    if any(not math.isfinite(v) for v in values):
        return _verdict(VerdictTag.DIVERGENT, "running value is infinite", th)
    if all(v == 0 for v in values):
        return _verdict(VerdictTag.CONVERGENT, "running value is identically zero", th)
    at = dict(curve)
    N = curve[-1][0]
    if N // 100 < 1 or N // 100 not in at or N // 10 not in at:
        return _verdict(VerdictTag.INCONCLUSIVE, "horizon shorter than two decades", th)
    v0, v1, v2 = at[N // 100], at[N // 10], at[N]
    if v2 <= v1 * (1 + th.flat_tol) and v2 - v1 <= v1 - v0:
        return _verdict(
            VerdictTag.CONVERGENT, "flat over the top decade and not accelerating", th
        )
    if v1 > 0 and v2 >= th.growth_factor * v1:
        return _verdict(
            VerdictTag.DIVERGENT, f"grew by a factor {v2 / v1:.3g} over the last decade", th
        )
    return _verdict(VerdictTag.INCONCLUSIVE, "still creeping upward", th)


def classify_bounded(terms: np.ndarray, th: Thresholds) -> Verdict:
    """sup_n t_n < ∞ for one fixed sequence: no new highs in the trailing window."""
    t = np.asarray(terms, dtype=np.float64)
    if t.size == 0 or not t.any():
        return _verdict(VerdictTag.CONVERGENT, "identically zero", th)
    if not np.all(np.isfinite(t)):
        return _verdict(VerdictTag.DIVERGENT, "non-finite terms", th)
    start = window_start(t.size, th)
    head = float(t[:start].max()) if start else 0.0
    tail = float(t[start:].max())
    if tail <= head * (1 + th.flat_tol):
        return _verdict(VerdictTag.CONVERGENT, "no new highs in the trailing window", th)
    if head > 0 and tail >= th.growth_factor * head:
        return _verdict(VerdictTag.DIVERGENT, "trailing window exceeds the earlier sup", th)
    return _verdict(VerdictTag.INCONCLUSIVE, "trailing window sets a new high", th)


def combine(verdicts: Iterable[Verdict], th: Thresholds, what: str = "conditions") -> Verdict:
    """AND of requirements: any growth wins, all bounded is bounded, else inconclusive."""
    items = list(verdicts)
    if any(v.divergent for v in items):
        return _verdict(VerdictTag.DIVERGENT, f"at least one of the {what} shows growth", th)
    if all(v.convergent for v in items):
        return _verdict(VerdictTag.CONVERGENT, f"all {what} show bounded evidence", th)
    return _verdict(VerdictTag.INCONCLUSIVE, f"some {what} are inconclusive", th)


def exists_on_grid(
    results: Sequence[Tuple[int, Verdict]], th: Thresholds
) -> Tuple[Verdict, Optional[int]]:
    """∃ quantifier searched on a finite grid."""
    for point, verdict in results:
        if verdict.convergent:
            return _verdict(VerdictTag.CONVERGENT, f"bounded at grid point {point}", th), point
    if results and all(v.divergent for _, v in results):
        return _verdict(VerdictTag.DIVERGENT, "growth at every grid point", th), None
    return _verdict(VerdictTag.INCONCLUSIVE, "no grid point gave bounded evidence", th), None


def forall_on_grid(results: Sequence[Tuple[int, Verdict]], th: Thresholds) -> Verdict:
    """∀ quantifier: every grid point (the largest included) must be bounded."""
    bad = [p for p, v in results if v.divergent]
    if bad:
        return _verdict(VerdictTag.DIVERGENT, f"growth at grid point {bad[0]}", th)
    if all(v.convergent for _, v in results):
        return _verdict(VerdictTag.CONVERGENT, "bounded at every grid point", th)
    return _verdict(VerdictTag.INCONCLUSIVE, "some grid points are inconclusive", th)

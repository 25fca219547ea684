import numpy as np

from seqspace.config import Thresholds
from seqspace.models import Verdict, VerdictTag
from seqspace.verdicts import (
    checkpoints,
    classify_bounded,
    classify_null,
    classify_running_sup,
    classify_series,
    combine,
    exists_on_grid,
    forall_on_grid,
    window_start,
)

TH = Thresholds()
YES = Verdict(VerdictTag.CONVERGENT, "bounded")
NO = Verdict(VerdictTag.DIVERGENT, "growth")
MAYBE = Verdict(VerdictTag.INCONCLUSIVE, "unclear")


def test_checkpoints():
    assert checkpoints(1000) == [10, 100, 1000]
    assert checkpoints(100_000) == [10, 100, 1000, 10_000, 100_000]
    assert checkpoints(50) == [5, 10, 50]
    assert checkpoints(1) == [1]


def test_window_start():
    assert window_start(1001, TH) == 750
    assert window_start(1, TH) == 0


def test_series_zero_and_finite_support():
    assert classify_series(np.zeros(100), TH)[0].convergent
    terms = np.zeros(1001)
    terms[:10] = 1.0
    verdict, evidence = classify_series(terms, TH)
    assert verdict.convergent
    assert evidence["tail_bound"] == 0.0


def test_series_support_ending_inside_the_window():
    terms = np.ones(11)
    terms[9:] = 0.0
    verdict, evidence = classify_series(terms, TH)
    assert verdict.convergent
    assert evidence["tail_bound"] == 0.0
    late = np.zeros(1001)
    late[:800] = 1.0
    assert classify_series(late, TH)[0].convergent
    assert not classify_series(np.ones(11), TH)[0].convergent


def test_series_basel_is_convergent():
    n = np.arange(100_001, dtype=np.float64)
    verdict, evidence = classify_series(1.0 / (n + 1) ** 2, TH)
    assert verdict.convergent
    assert evidence["decay_exponent"] > 1.9


def test_series_harmonic_is_divergent():
    n = np.arange(10_001, dtype=np.float64)
    verdict, evidence = classify_series(1.0 / (n + 1), TH)
    assert verdict.divergent
    assert abs(evidence["harmonic_constant"] - 1.0) < 1e-9


def test_series_cap_and_infinity():
    assert classify_series(np.full(1000, 1e10), TH)[0].divergent
    assert classify_series(np.array([1.0, np.inf]), TH)[0].divergent


def test_series_slow_decay_is_inconclusive():
    n = np.arange(1001, dtype=np.float64)
    assert classify_series(1.0 / (n + 1) ** 2, TH)[0].tag is VerdictTag.INCONCLUSIVE


def test_overridden_tail_tol_changes_the_call():
    n = np.arange(1001, dtype=np.float64)
    loose = TH.model_copy(update={"tail_tol": 1e-5})
    assert classify_series(1.0 / (n + 1) ** 2, loose)[0].convergent


def test_null():
    n = np.arange(10_001, dtype=np.float64)
    assert classify_null(1.0 / (n + 1), TH)[0].convergent
    assert classify_null(np.ones(1000), TH)[0].divergent
    assert classify_null(np.zeros(10), TH)[0].convergent


def test_running_sup():
    assert classify_running_sup([(10, 1.0), (100, 1.0), (1000, 1.0)], TH).convergent
    assert classify_running_sup([(10, 10.0), (100, 100.0), (1000, 1000.0)], TH).divergent
    assert classify_running_sup([(10, 0.0), (100, 0.0), (1000, 0.0)], TH).convergent
    assert classify_running_sup([(10, 1.0), (100, 1.5), (1000, 1.6)], TH).tag is (
        VerdictTag.INCONCLUSIVE
    )
    assert classify_running_sup([(5, 1.0), (10, 1.0), (50, 1.0)], TH).tag is (
        VerdictTag.INCONCLUSIVE
    )
    assert classify_running_sup([(10, 1.0), (100, float("inf")), (1000, 1.0)], TH).divergent


def test_bounded():
    n = np.arange(1000)
    assert classify_bounded((n % 7).astype(float), TH).convergent
    assert classify_bounded(np.exp(n / 100.0), TH).divergent
    assert classify_bounded(np.zeros(5), TH).convergent


def test_combine():
    assert combine([YES, YES], TH).convergent
    assert combine([YES, NO, MAYBE], TH).divergent
    assert combine([YES, MAYBE], TH).tag is VerdictTag.INCONCLUSIVE


def test_exists_on_grid():
    verdict, chosen = exists_on_grid([(2, MAYBE), (4, YES)], TH)
    assert verdict.convergent and chosen == 4
    verdict, chosen = exists_on_grid([(2, NO), (4, NO)], TH)
    assert verdict.divergent and chosen is None
    verdict, _ = exists_on_grid([(2, NO), (4, MAYBE)], TH)
    assert verdict.tag is VerdictTag.INCONCLUSIVE


def test_forall_on_grid():
    assert forall_on_grid([(2, YES), (4, YES)], TH).convergent
    assert forall_on_grid([(2, YES), (4, NO)], TH).divergent
    assert forall_on_grid([(2, YES), (4, MAYBE)], TH).tag is VerdictTag.INCONCLUSIVE

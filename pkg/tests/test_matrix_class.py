import random
from fractions import Fraction

import pytest

from seqspace.config import Thresholds
from seqspace.errors import InputError, QNotMonotone, UnsupportedCondition
from seqspace.models import VerdictTag
from seqspace.sequences import (
    IDENTITY,
    ZERO_MATRIX,
    ClosedForm,
    Derived,
    ExponentSeq,
    FullMatrix,
    LambdaSeq,
    Tail,
    TriangleMatrix,
    constant_exponent,
    diagonal,
    list_seq,
)
from seqspace.services.conditions import CATALOG, TARGETS, conditions_for, get_condition
from seqspace.services.matrix_class import (
    apply_matrix,
    build_tilde,
    classify,
    classify_async,
    eval_condition,
    observed_span,
)
from seqspace.services.paranorm import Space, membership, report_from_values

LAM = LambdaSeq(ClosedForm("n+1"))
P1 = constant_exponent(1)
P2 = constant_exponent(2)


def _random_seq(rng: random.Random, length: int):
    return list_seq([Fraction(rng.randint(-100, 100), rng.randint(1, 10)) for _ in range(length)])


def test_tilde_of_identity():
    T = build_tilde(IDENTITY, LAM, 5, "rational")
    for n in range(6):
        assert T.entry(n, n) == n + 1
        if n:
            assert T.entry(n, n - 1) == -n
    assert T.entry(0, 3) == 0
    assert T.entry(4, 1) == 0
    assert T.edge[3, 3] == 4


@pytest.mark.parametrize(
    "A", [FullMatrix("1/(n+k+1)"), TriangleMatrix("1/(n+1)"), diagonal("2^(-n)"), IDENTITY]
)
def test_identity_residual_is_exactly_zero(A):
    rng = random.Random(17)
    lam = LambdaSeq(ClosedForm("n^2+1"))
    T = build_tilde(A, lam, 30, "rational")
    for _ in range(5):
        assert T.identity_residual(_random_seq(rng, 31)) == 0


def test_column_limits_of_identity():
    th = Thresholds()
    T = build_tilde(IDENTITY, LAM, 1000)
    limits, stable, observed = T.column_limits(th)
    assert observed == observed_span(1000, th) == 749
    assert stable.all()
    assert not limits.any()


def test_catalog_covers_every_target():
    assert sorted(CATALOG, key=lambda c: float(c.split(".")[1])) == [
        f"4.{i}" for i in range(6, 22)
    ]
    for ids in TARGETS.values():
        assert all(cid in CATALOG for cid in ids)
    assert get_condition("4.8").deviation
    with pytest.raises(UnsupportedCondition):
        get_condition("4.99")
    with pytest.raises(UnsupportedCondition):
        conditions_for("lp")


class TestConditions:
    N = 1000

    def _tilde(self, A):
        return build_tilde(A, LAM, self.N)

    def test_column_null_for_identity(self):
        result = eval_condition("4.9", self._tilde(IDENTITY), P1, P2)
        assert result.verdict.convergent
        assert result.id == "4.9"

    def test_sup_grows_for_identity(self):
        result = eval_condition("4.12", self._tilde(IDENTITY), P1, P2)
        assert result.verdict.divergent
        assert [c for c, _ in result.curve] == [10, 100, 1000]

    def test_rows_vanish_for_identity(self):
        assert eval_condition("4.19", self._tilde(IDENTITY), P1, P2).verdict.convergent

    def test_exists_M_reports_grid_point(self):
        result = eval_condition("4.8", self._tilde(diagonal("2^(-n)")), P2, P2)
        assert result.verdict.convergent
        assert result.chosen == 2
        assert result.notes[0] == get_condition("4.8").deviation

    def test_every_condition_on_zero_matrix(self):
        T = self._tilde(ZERO_MATRIX)
        for cid in CATALOG:
            assert eval_condition(cid, T, P2, P2).verdict.convergent, cid

    def test_curves_are_monotone(self):
        T = self._tilde(IDENTITY)
        for cid in CATALOG:
            for N in (100, 1000):
                values = [v for _, v in eval_condition(cid, T, P1, P2, N).curve]
                assert values == sorted(values), (cid, N)

    def test_q_must_be_nondecreasing(self):
        q = ExponentSeq.of(list_seq([2, 1], Tail("repeat")))
        with pytest.raises(QNotMonotone):
            eval_condition("4.9", self._tilde(IDENTITY), P1, q)

    def test_horizon_cannot_exceed_tilde(self):
        with pytest.raises(InputError):
            eval_condition("4.9", build_tilde(IDENTITY, LAM, 10), P1, P2, N=20)


@pytest.mark.parametrize("target", ["lq", "c0q", "cq", "linfq"])
def test_zero_matrix_is_in_every_class(target):
    result = classify(ZERO_MATRIX, LAM, P2, P2, target, 1000)
    assert result.combined.convergent
    assert [r.id for r in result.conditions] == list(TARGETS[target])


def test_identity_is_not_bounded_from_l1_style_space():
    result = classify(IDENTITY, LAM, P1, P2, "linfq", 1000)
    assert result.combined.divergent
    by_id = {r.id: r for r in result.conditions}
    assert by_id["4.17"].verdict.divergent


def test_geometric_diagonal_maps_into_lq():
    result = classify(diagonal("2^(-n)"), LAM, P2, P2, "lq", 1000)
    assert result.combined.convergent


def test_classification_coherent_with_mapped_sequences():
    rng = random.Random(23)
    A = diagonal("2^(-n)")
    N = 1000
    assert classify(A, LAM, P2, P2, "lq", N).combined.convergent
    for _ in range(10):
        x = Derived("inverse", _random_seq(rng, 40), LAM)
        assert membership(x, Space("ell_lambda", P2, LAM), N).convergent
        report = report_from_values(apply_matrix(A, x, N), P2, N)
        assert report.verdict.tag is not VerdictTag.DIVERGENT


@pytest.mark.asyncio
async def test_classify_async_keeps_catalog_order():
    result = await classify_async(IDENTITY, LAM, P1, P2, "cq", 200, threads=2)
    assert [r.id for r in result.conditions] == list(TARGETS["cq"])
    assert result.N == 200


def test_thread_count_does_not_change_results():
    one = classify(IDENTITY, LAM, P1, P2, "c0q", 200, threads=1)
    many = classify(IDENTITY, LAM, P1, P2, "c0q", 200, threads=8)
    assert [r.verdict for r in one.conditions] == [r.verdict for r in many.conditions]
    assert one.combined == many.combined

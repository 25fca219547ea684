import random
from fractions import Fraction

import numpy as np
import pytest

from seqspace.errors import NotIncreasing
from seqspace.sequences import ONES, ZERO, ClosedForm, Derived, LambdaSeq, list_seq, sample, unit
from seqspace.services.lambda_ops import (
    inverse_matrix,
    inverse_transform,
    lambda_entry,
    lambda_matrix,
    lambda_transform,
    lemma_residuals,
    s_operator,
    stream_transform,
)

FAMILIES = ["n+1", "n^2+1", "2^n"]


def _lam(text: str) -> LambdaSeq:
    return LambdaSeq(ClosedForm(text))


def _random_seq(rng: random.Random, length: int):
    return list_seq([Fraction(rng.randint(-100, 100), rng.randint(1, 10)) for _ in range(length)])


def test_entries():
    lam = _lam("n+1")
    assert lambda_entry(lam, 2, 1, "rational") == Fraction(1, 3)
    assert lambda_entry(lam, 1, 2, "rational") == 0
    assert lambda_entry(lam, 0, 0, "rational") == 1
    with pytest.raises(ValueError):
        lambda_entry(lam, -1, 0)


@pytest.mark.parametrize("family", FAMILIES)
def test_rows_sum_to_one(family):
    lam = _lam(family)
    for n in range(12):
        assert sum(lambda_entry(lam, n, k, "rational") for k in range(n + 1)) == 1


def test_transform_of_unit_vector():
    ys = lambda_transform(_lam("n+1"), list_seq([1, 0, 0]), 5, "rational")
    assert ys.tolist() == [Fraction(1, n + 1) for n in range(6)]


def test_transform_of_constants():
    lam = _lam("n^2+1")
    assert lambda_transform(lam, ONES, 50, "rational").tolist() == [1] * 51
    assert lambda_transform(lam, ZERO, 50, "rational").tolist() == [0] * 51


def test_inverse_of_harmonic():
    xs = inverse_transform(_lam("n+1"), ClosedForm("1/(n+1)"), 10, "rational")
    assert xs.tolist() == [1] + [0] * 10


def test_rejects_bad_lambda():
    with pytest.raises(NotIncreasing):
        lambda_transform(LambdaSeq(ClosedForm("1")), ONES, 5)


@pytest.mark.parametrize("family", FAMILIES)
def test_triangle_times_inverse_is_identity(family):
    lam = _lam(family)
    product = lambda_matrix(lam, 63, "rational").dot(inverse_matrix(lam, 63, "rational"))
    identity = np.eye(64, dtype=np.int64)
    assert (product == identity).all()


@pytest.mark.parametrize("family", FAMILIES)
def test_exact_round_trip(family):
    rng = random.Random(20240611)
    lam = _lam(family)
    for _ in range(100):
        x = _random_seq(rng, 201)
        back = sample(Derived("inverse", Derived("lambda", x, lam), lam), 200, "rational")
        assert back.tolist() == list(x.prefix)


@pytest.mark.parametrize("family", FAMILIES)
def test_float_round_trip(family):
    rng = random.Random(7)
    lam = _lam(family)
    for _ in range(20):
        x = _random_seq(rng, 201)
        xs = sample(x, 200)
        back = sample(Derived("inverse", Derived("lambda", x, lam), lam), 200)
        assert np.all(np.abs(back - xs) <= 1e-8 * np.maximum(1.0, np.abs(xs)))


def test_direct_summation_matches_prefix_scan():
    rng = random.Random(3)
    lam = _lam("n^2+1")
    x = _random_seq(rng, 31)
    fast = lambda_transform(lam, x, 30, "rational")
    slow = lambda_transform(lam, x, 30, "rational", direct=True)
    assert fast.tolist() == slow.tolist()


def test_stream_transform_matches_batch():
    rng = random.Random(11)
    lam = _lam("2^n")
    x = _random_seq(rng, 41)
    streamed = list(stream_transform(lam, sample(x, 40, "rational"), "rational"))
    assert streamed == lambda_transform(lam, x, 40, "rational").tolist()


def test_s_operator_examples():
    lam = _lam("n+1")
    assert s_operator(lam, ONES, 10, "rational").tolist() == [0] * 11
    s = s_operator(lam, unit(0), 5, "rational")
    assert s.tolist() == [0] + [Fraction(-1, n + 1) for n in range(1, 6)]


@pytest.mark.parametrize("family", ["n+1", "n^2+1"])
def test_s_operator_identities_hold_exactly(family):
    rng = random.Random(5)
    lam = _lam(family)
    for _ in range(50):
        residuals = lemma_residuals(lam, _random_seq(rng, 201), 200, "rational")
        assert residuals == {"difference_form": 0, "increment_form": 0}

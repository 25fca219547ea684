from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seqspace.errors import BruteForceTooLarge
from seqspace.utils.subsets import brute_force_subset_sup, column_subset_sups, subset_sup


def test_examples():
    assert subset_sup([3, -5, 2]) == 5
    assert subset_sup([]) == 0
    assert subset_sup([1, 1, 1]) == 3
    assert subset_sup([Fraction(1, 2), Fraction(-1, 3)]) == Fraction(1, 2)


@given(st.lists(st.integers(min_value=-50, max_value=50), max_size=12))
@settings(max_examples=500)
def test_matches_brute_force(column):
    assert subset_sup(column) == brute_force_subset_sup(column)


def test_brute_force_refuses_large_columns():
    with pytest.raises(BruteForceTooLarge):
        brute_force_subset_sup([1] * 21)


def test_column_sups():
    m = np.array([[3.0, 1.0], [-5.0, -4.0], [2.0, 0.0]])
    assert column_subset_sups(m).tolist() == [5.0, 4.0]

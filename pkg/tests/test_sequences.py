import numpy as np
import pytest
from hypothesis import given, strategies as st

from pcap.errors import BadSequence
from pcap.sequences import AnnulusSequence, dyadic, dyadic_within, running_sup, stabilizes, tends_to_zero


def test_dyadic():
    seq = dyadic(0, 3)
    assert seq.inner.tolist() == [1, 2, 4, 8]
    assert seq.outer.tolist() == [2, 4, 8, 16]
    assert len(seq) == 4 and seq.name == "dyadic"
    assert list(seq)[1] == (2.0, 4.0)
    assert seq.as_dict()["inner"] == [1, 2, 4, 8]


def test_dyadic_within():
    seq = dyadic_within(1.0, 2.0 ** 20, min_terms=2)
    assert seq.inner[0] == 2.0 and seq.outer[-1] == 2.0 ** 20
    assert dyadic_within(1.0, 10.0, min_terms=9) is None


@pytest.mark.parametrize(
    "inner, outer",
    [
        ([1.0], [2.0]),
        ([1.0, 2.0], [2.0]),
        ([0.0, 2.0], [1.0, 3.0]),
        ([1.0, 2.0], [1.0, 3.0]),
        ([2.0, 1.0], [3.0, 4.0]),
        ([1.0, np.inf], [2.0, np.inf]),
    ],
)
def test_bad_sequences(inner, outer):
    with pytest.raises(BadSequence):
        AnnulusSequence(inner, outer)


def test_running_sup_and_stabilizes():
    assert running_sup([1, 3, 2, 5]).tolist() == [1, 3, 3, 5]
    assert stabilizes([1.0] * 9)
    assert not stabilizes([1.0] * 8)               # too short for the window
    assert not stabilizes(np.arange(1.0, 20.0))
    assert stabilizes(np.concatenate([np.arange(1.0, 5.0), np.full(10, 4.0)]))
    assert not stabilizes([1.0] * 8 + [np.inf])


def test_tends_to_zero():
    assert tends_to_zero(2.0 ** -np.arange(12))
    assert not tends_to_zero(np.ones(12))
    assert tends_to_zero(np.zeros(8))
    assert not tends_to_zero([1.0, 0.0])


@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=50))
def test_running_sup_property(xs):
    s = running_sup(xs)
    assert np.all(np.diff(s) >= 0)
    assert np.all(s >= np.asarray(xs))
    assert s[-1] == max(xs)

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import brute_force_assignment_min, brute_force_matches
from kmcluster.core import UsageError
from kmcluster.evaluation import cer, confusion, count_singletons, hungarian


def test_confusion_examples():
    assert confusion([0, 0, 1, 1], [0, 0, 1, 1]).tolist() == [[2, 0], [0, 2]]
    assert confusion([0, 0, 1, 1], [1, 1, 0, 0]).tolist() == [[0, 2], [2, 0]]
    assert confusion([0, 0, 1, 1], [0, 1, 0, 1]).tolist() == [[1, 1], [1, 1]]


def test_hungarian_examples():
    a, total = hungarian([[1, 2], [2, 1]])
    assert a.tolist() == [0, 1] and total == 2
    a, total = hungarian([[5, 1], [1, 5]])
    assert a.tolist() == [1, 0] and total == 2
    with pytest.raises(UsageError):
        hungarian([[1, 2, 3]])


def test_hungarian_5x5_integer(rng):
    cost = rng.integers(0, 20, size=(5, 5)).astype(float)
    a, total = hungarian(cost)
    assert total == brute_force_assignment_min(cost)
    assert sorted(a.tolist()) == list(range(5))


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 7).flatmap(lambda m: arrays(np.float64, (m, m), elements=st.floats(-100, 100))))
def test_hungarian_matches_brute_force(cost):
    a, total = hungarian(cost)
    assert total == pytest.approx(brute_force_assignment_min(cost), abs=1e-9)
    assert sorted(a.tolist()) == list(range(cost.shape[0]))


def test_cer_examples():
    t = [0, 0, 1, 1]
    assert cer(t, t).cer == 0.0
    assert cer(t, [1, 1, 0, 0]).cer == 0.0
    r = cer(t, [0, 1, 0, 1])
    assert r.cer == 0.5 and r.matched_count == 2


def test_cer_unequal_k():
    # three estimated clusters against two true ones: best match keeps 4 of 5
    r = cer([0, 0, 0, 1, 1], [0, 0, 2, 1, 1])
    assert r.matched_count == 4 and r.cer == pytest.approx(0.2)
    assert r.mapping.tolist() == [0, 1]
    r = cer([0, 1, 2, 2], [0, 0, 0, 0])
    assert r.matched_count == 2 and -1 in r.mapping.tolist()


labels = st.lists(st.integers(0, 3), min_size=1, max_size=12)


@settings(max_examples=200, deadline=None)
@given(labels, st.data())
def test_cer_against_enumeration(truth, data):
    est = data.draw(st.lists(st.integers(0, 3), min_size=len(truth), max_size=len(truth)))
    r = cer(truth, est)
    assert r.matched_count == brute_force_matches(truth, est)
    assert 0.0 <= r.cer <= 1.0
    assert r.cer == 1.0 - r.matched_count / len(truth)


@settings(max_examples=200, deadline=None)
@given(labels, st.permutations(range(4)), st.permutations(range(4)))
def test_cer_relabel_invariance(truth, p1, p2):
    est = [(t + 1) % 4 if i % 3 == 0 else t for i, t in enumerate(truth)]
    base = cer(truth, est).cer
    assert cer(truth, [p1[e] for e in est]).cer == base
    assert cer([p2[t] for t in truth], est).cer == base


def test_count_singletons():
    assert count_singletons([0, 0, 1]) == 1
    assert count_singletons([0, 1, 2]) == 3
    assert count_singletons([0, 0, 1, 1]) == 0

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fairmit.core import (
    FEMALE,
    MALE,
    ConfusionCounts,
    ScoreRecord,
    aggregate_folds,
    confusion_from_scores,
    kfold,
    split_dataset,
    split_sizes,
)
from fairmit.errors import InputError


def recs(pairs):
    return [ScoreRecord(str(i), MALE if lab == "M" else FEMALE, s) for i, (lab, s) in enumerate(pairs)]


def test_confusion_separated_pair():
    assert confusion_from_scores(recs([("M", 0.9), ("F", 0.1)]), 0.5) == ConfusionCounts(1, 0, 1, 0)


def test_confusion_all_below_threshold():
    assert confusion_from_scores(recs([("M", 0.4), ("F", 0.4)]), 0.5) == ConfusionCounts(0, 0, 1, 1)


def test_confusion_boundary_is_male():
    assert confusion_from_scores(recs([("M", 0.5)]), 0.5).tp == 1


def test_confusion_492_all_female():
    rng = np.random.default_rng(0)
    labels = [MALE] * 234 + [FEMALE] * 258
    records = [ScoreRecord(str(i), lab, float(s)) for i, (lab, s) in
               enumerate(zip(labels, rng.uniform(0, 0.49, 492)))]
    cc = confusion_from_scores(records, 0.5)
    # direct count oracle
    assert cc.tp == 0 and cc.fp == 0
    assert cc.tn + cc.fn == 492
    assert (cc.tn, cc.fn) == (sum(lab == FEMALE for lab in labels), sum(lab == MALE for lab in labels))


def test_confusion_empty():
    with pytest.raises(InputError, match="empty input"):
        confusion_from_scores([], 0.5)


@pytest.mark.parametrize("label,score", [(2, 0.5), (1, 1.2), (0, -0.1)])
def test_score_record_validation(label, score):
    with pytest.raises(InputError):
        ScoreRecord("x", label, score)


@given(st.lists(st.tuples(st.integers(0, 1), st.floats(0, 1)), min_size=1, max_size=60),
       st.lists(st.floats(0, 1), min_size=2, max_size=10))
def test_confusion_totals_and_monotonicity(rows, thresholds):
    records = [ScoreRecord(str(i), lab, s) for i, (lab, s) in enumerate(rows)]
    n_male = sum(lab for lab, _ in rows)
    prev = None
    for t in sorted(thresholds):
        cc = confusion_from_scores(records, t)
        assert cc.tp + cc.fn == n_male
        assert cc.tn + cc.fp == len(rows) - n_male
        assert cc.total == len(rows)
        if prev is not None:
            assert cc.predicted_male <= prev
        prev = cc.predicted_male


def test_split_exact_ratio():
    sp = split_dataset(10, seed=7)
    assert (len(sp.train), len(sp.val), len(sp.test)) == (8, 1, 1)


def test_split_face_count():
    sp = split_dataset(4897, seed=0)
    sizes = (len(sp.train), len(sp.val), len(sp.test))
    assert sum(sizes) == 4897
    assert sizes[0] in (3917, 3918) and sizes[1] in (489, 490) and sizes[2] in (489, 490)


def test_split_deterministic():
    a, b = split_dataset(100, seed=3), split_dataset(100, seed=3)
    for x, y in zip((a.train, a.val, a.test), (b.train, b.val, b.test)):
        assert np.array_equal(x, y)
    assert not np.array_equal(a.train, split_dataset(100, seed=4).train)


def test_split_too_small():
    with pytest.raises(InputError, match="dataset too small to split"):
        split_dataset(9)


@settings(max_examples=200)
@given(st.integers(10, 3000), st.integers(0, 2**32 - 1))
def test_split_partition(n, seed):
    sp = split_dataset(n, seed=seed)
    allidx = np.concatenate([sp.train, sp.val, sp.test])
    assert np.array_equal(np.sort(allidx), np.arange(n))
    for got, ratio in zip((sp.train, sp.val, sp.test), (0.8, 0.1, 0.1)):
        assert abs(len(got) - n * ratio) <= 1


def test_split_sizes_sum():
    assert split_sizes(11, (0.8, 0.1, 0.1)) == [9, 1, 1]


def test_kfold_even():
    folds = kfold(10, 5, seed=1)
    assert len(folds) == 5
    assert all(len(v) == 2 for _, v in folds)
    assert len(set(np.concatenate([v for _, v in folds]).tolist())) == 10


def test_kfold_remainder():
    folds = kfold(11, 5, seed=1)
    assert sorted(len(v) for _, v in folds) == [2, 2, 2, 2, 3]


@given(st.integers(5, 500), st.integers(2, 5), st.integers(0, 1000))
def test_kfold_partition(n, k, seed):
    folds = kfold(n, k, seed)
    vals = np.concatenate([v for _, v in folds])
    assert np.array_equal(np.sort(vals), np.arange(n))
    for tr, va in folds:
        assert np.array_equal(np.sort(np.concatenate([tr, va])), np.arange(n))
        assert not set(tr.tolist()) & set(va.tolist())


def test_kfold_too_few():
    with pytest.raises(InputError):
        kfold(4, 5)


def test_aggregate_constant():
    st_ = aggregate_folds([1, 1, 1, 1, 1])
    assert st_.mean == 1 and st_.std == 0


def test_aggregate_two_values():
    st_ = aggregate_folds([0, 2])
    assert st_.mean == 1
    assert st_.std == pytest.approx(2 ** 0.5, abs=1e-12)


def test_aggregate_table_style():
    # hand arithmetic: deviations -0.4, 0.8, -0.6, 0.3, -0.1; squares sum 1.26; /(5-1)
    st_ = aggregate_folds([78.1, 79.3, 77.9, 78.8, 78.4])
    assert st_.mean == pytest.approx(78.5, abs=1e-12)
    assert st_.std == pytest.approx((1.26 / 4) ** 0.5, abs=1e-9)


def test_aggregate_insufficient():
    with pytest.raises(InputError, match="insufficient folds"):
        aggregate_folds([1.0])


@given(st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=20))
def test_aggregate_properties(values):
    s = aggregate_folds(values)
    assert s.std >= 0
    assert min(values) <= s.mean <= max(values)

"""Threshold-change post-processing and class reweighting."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import FEMALE, MALE, ConfusionCounts, ScoreRecord
from .errors import InputError
from .metrics import MetricReport, metric_report, safe_rate


class ThresholdStrategy(enum.Enum):
    EQUAL_TRUE = "equal-true"
    EQUAL_FALSE = "equal-false"
    EQUAL_TOTAL = "equal-total"
    EQUAL_OPPORTUNITY = "equal-opportunity"

    @classmethod
    def parse(cls, name: "str | ThresholdStrategy") -> "ThresholdStrategy":
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower().replace("_", "-")
        for s in cls:
            if s.value == key:
                return s
        raise InputError(
            f"unknown threshold strategy {name!r}; expected one of "
            + ", ".join(s.value for s in cls)
        )


def threshold_objective(cc: ConfusionCounts, strategy: ThresholdStrategy) -> float:
    """Fairness gap a threshold strategy tries to drive to zero."""
    if cc.total <= 0:
        raise InputError("metrics need at least one counted sample")
    strategy = ThresholdStrategy.parse(strategy)
    if strategy is ThresholdStrategy.EQUAL_TRUE:
        return float(abs(cc.tp - cc.tn))
    if strategy is ThresholdStrategy.EQUAL_FALSE:
        return float(abs(cc.fp - cc.fn))
    if strategy is ThresholdStrategy.EQUAL_TOTAL:
        return float(abs((cc.tp + cc.fp) - (cc.tn + cc.fn)))
    return abs(safe_rate(cc.tp, cc.tp + cc.fn) - safe_rate(cc.tn, cc.tn + cc.fp))


@dataclass(frozen=True)
class ThresholdSearchResult:
    strategy: ThresholdStrategy
    t_star: float
    objective_value: float
    report: MetricReport
    counts: ConfusionCounts
    candidates_evaluated: int


def candidate_thresholds(scores) -> np.ndarray:
    """0, the midpoints between consecutive distinct scores, and 1.

    The objectives are piecewise constant between distinct scores, so this
    set reaches every achievable prediction split.
    """
    u = np.unique(np.asarray(scores, dtype=np.float64))
    mids = (u[:-1] + u[1:]) / 2.0
    return np.unique(np.concatenate([[0.0], mids, [1.0]]))


def _counts_at(labels: np.ndarray, scores: np.ndarray, ts: np.ndarray):
    """Vectorized TP/FP/TN/FN for each threshold in ``ts`` (rule: score >= t)."""
    male = np.sort(scores[labels == MALE])
    female = np.sort(scores[labels == FEMALE])
    fn = np.searchsorted(male, ts, side="left")
    tn = np.searchsorted(female, ts, side="left")
    tp = male.size - fn
    fp = female.size - tn
    return tp, fp, tn, fn


def _objectives(strategy, tp, fp, tn, fn) -> np.ndarray:
    if strategy is ThresholdStrategy.EQUAL_TRUE:
        return np.abs(tp - tn).astype(np.float64)
    if strategy is ThresholdStrategy.EQUAL_FALSE:
        return np.abs(fp - fn).astype(np.float64)
    if strategy is ThresholdStrategy.EQUAL_TOTAL:
        return np.abs((tp + fp) - (tn + fn)).astype(np.float64)
    # element-wise so each value is bit-identical to threshold_objective
    return np.array([
        abs(safe_rate(int(a), int(a + d)) - safe_rate(int(c), int(c + b)))
        for a, b, c, d in zip(tp, fp, tn, fn)
    ])


def optimize_threshold(records, strategy) -> ThresholdSearchResult:
    """Exhaustive search for the threshold minimising a strategy's objective.

    Ties go to the most accurate threshold, then the one nearest 0.5, then
    the smaller one. ``records`` is a sequence of :class:`ScoreRecord` or a
    ``(labels, scores)`` pair of arrays.
    """
    strategy = ThresholdStrategy.parse(strategy)
    if isinstance(records, tuple) and len(records) == 2 and not isinstance(records[0], ScoreRecord):
        labels = np.asarray(records[0], dtype=np.int64)
        scores = np.asarray(records[1], dtype=np.float64)
    else:
        labels = np.fromiter((r.label for r in records), dtype=np.int64)
        scores = np.fromiter((r.score for r in records), dtype=np.float64)
    if labels.size == 0:
        raise InputError("empty input")
    if np.all(labels == MALE) or np.all(labels == FEMALE):
        raise InputError("threshold optimization requires both classes")

    ts = candidate_thresholds(scores)
    tp, fp, tn, fn = _counts_at(labels, scores, ts)
    obj = _objectives(strategy, tp, fp, tn, fn)
    acc = (tp + tn) / labels.size
    # lexsort: last key is primary
    order = np.lexsort((ts, np.abs(ts - 0.5), -acc, obj))
    best = int(order[0])
    cc = ConfusionCounts(int(tp[best]), int(fp[best]), int(tn[best]), int(fn[best]))
    return ThresholdSearchResult(
        strategy=strategy,
        t_star=float(ts[best]),
        objective_value=float(obj[best]),
        report=metric_report(cc),
        counts=cc,
        candidates_evaluated=int(ts.size),
    )


@dataclass(frozen=True)
class ClassWeights:
    w_male: float
    w_female: float

    def for_labels(self, labels) -> np.ndarray:
        labels = np.asarray(labels)
        return np.where(labels == MALE, self.w_male, self.w_female)


def class_weights(n_male: int, n_female: int) -> ClassWeights:
    """Balanced weights ``N / (2 n_c)``: the rarer class weighs more."""
    if n_male <= 0 or n_female <= 0:
        raise InputError("degenerate class distribution")
    n = n_male + n_female
    return ClassWeights(w_male=n / (2 * n_male), w_female=n / (2 * n_female))

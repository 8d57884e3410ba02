"""Domain types, confusion counting, dataset splitting and fold aggregation.

All randomness goes through :func:`numpy.random.default_rng` (PCG64 seeded via
SeedSequence), so a given seed reproduces the same permutation on every
platform numpy supports.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError

FEMALE = 0
MALE = 1


@dataclass(frozen=True)
class ScoreRecord:
    """A single classifier output. ``score`` leans Male as it approaches 1."""

    id: str
    label: int
    score: float

    def __post_init__(self):
        if self.label not in (FEMALE, MALE):
            raise InputError(f"label must be 0 or 1, got {self.label!r}")
        if not (0.0 <= self.score <= 1.0):
            raise InputError(f"score must lie in [0, 1], got {self.score!r}")


@dataclass(frozen=True)
class ConfusionCounts:
    """TP/FP/TN/FN with Male as the positive class."""

    tp: int
    fp: int
    tn: int
    fn: int

    def __post_init__(self):
        for name in ("tp", "fp", "tn", "fn"):
            v = getattr(self, name)
            if int(v) != v or v < 0:
                raise InputError(f"{name} must be a non-negative integer, got {v!r}")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @property
    def predicted_male(self) -> int:
        return self.tp + self.fp

    @property
    def predicted_female(self) -> int:
        return self.tn + self.fn

    @property
    def actual_male(self) -> int:
        return self.tp + self.fn

    @property
    def actual_female(self) -> int:
        return self.tn + self.fp

    def swapped(self) -> "ConfusionCounts":
        """Counts seen with the class roles exchanged."""
        return ConfusionCounts(tp=self.tn, fp=self.fn, tn=self.tp, fn=self.fp)


def check_threshold(t: float) -> float:
    t = float(t)
    if not (0.0 <= t <= 1.0):
        raise InputError(f"threshold must lie in [0, 1], got {t!r}")
    return t


@dataclass(frozen=True)
class DatasetSplit:
    train: np.ndarray
    val: np.ndarray
    test: np.ndarray


@dataclass(frozen=True)
class FoldStats:
    mean: float
    std: float
    values: tuple = field(default_factory=tuple)


@dataclass
class Dataset:
    """Images (or flat feature rows) with binary labels.

    ``x`` has shape ``(n, H, W, C)`` for image data or ``(n, d)`` for plain
    features.
    """

    x: np.ndarray
    y: np.ndarray
    ids: list = None

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=np.float64)
        self.y = np.asarray(self.y, dtype=np.int64)
        if self.x.shape[0] != self.y.shape[0]:
            raise InputError("x and y have different lengths")
        if self.ids is None:
            self.ids = [str(i) for i in range(len(self.y))]

    def __len__(self):
        return len(self.y)

    @property
    def is_image(self) -> bool:
        return self.x.ndim == 4

    @property
    def image_shape(self):
        return self.x.shape[1:] if self.is_image else None

    def subset(self, idx) -> "Dataset":
        idx = np.asarray(idx, dtype=np.int64)
        return Dataset(self.x[idx], self.y[idx], [self.ids[i] for i in idx])

    def class_counts(self) -> tuple[int, int]:
        """(n_male, n_female)"""
        n_male = int(np.sum(self.y == MALE))
        return n_male, len(self.y) - n_male


def confusion_from_arrays(labels, scores, threshold: float) -> ConfusionCounts:
    labels = np.asarray(labels)
    scores = np.asarray(scores, dtype=np.float64)
    if labels.size == 0:
        raise InputError("empty input")
    pred = scores >= threshold
    male = labels == MALE
    return ConfusionCounts(
        tp=int(np.sum(male & pred)),
        fp=int(np.sum(~male & pred)),
        tn=int(np.sum(~male & ~pred)),
        fn=int(np.sum(male & ~pred)),
    )


def confusion_from_scores(records: Sequence[ScoreRecord], threshold: float = 0.5) -> ConfusionCounts:
    """Count outcomes, predicting Male iff ``score >= threshold``."""
    if len(records) == 0:
        raise InputError("empty input")
    t = check_threshold(threshold)
    labels = np.fromiter((r.label for r in records), dtype=np.int64, count=len(records))
    scores = np.fromiter((r.score for r in records), dtype=np.float64, count=len(records))
    return confusion_from_arrays(labels, scores, t)


def _permutation(n: int, seed: int) -> np.ndarray:
    return np.random.default_rng(seed).permutation(n)


def split_sizes(n: int, ratios: Sequence[float]) -> list[int]:
    # Largest-remainder rounding: floors, then hand out the leftover elements
    # to the largest fractional parts (earlier sets win ties).
    exact = [n * r for r in ratios]
    sizes = [math.floor(e) for e in exact]
    leftover = n - sum(sizes)
    order = sorted(range(len(ratios)), key=lambda i: (-(exact[i] - sizes[i]), i))
    for i in order[:leftover]:
        sizes[i] += 1
    return sizes


def split_dataset(n: int, ratios: Sequence[float] = (0.8, 0.1, 0.1), seed: int = 0) -> DatasetSplit:
    """Shuffle ``range(n)`` and cut it into train/val/test index arrays."""
    if n < 10:
        raise InputError("dataset too small to split")
    if len(ratios) != 3 or any(r < 0 for r in ratios) or not math.isclose(sum(ratios), 1.0, abs_tol=1e-9):
        raise InputError(f"ratios must be three non-negative numbers summing to 1, got {ratios!r}")
    n_train, n_val, _ = split_sizes(n, ratios)
    perm = _permutation(n, seed)
    return DatasetSplit(
        train=np.sort(perm[:n_train]),
        val=np.sort(perm[n_train:n_train + n_val]),
        test=np.sort(perm[n_train + n_val:]),
    )


def kfold(n: int, k: int = 5, seed: int = 0) -> list[tuple[np.ndarray, np.ndarray]]:
    """Shuffled k-fold; the first ``n % k`` folds get one extra element."""
    if k < 2:
        raise InputError("k must be at least 2")
    if n < k:
        raise InputError(f"cannot make {k} folds from {n} elements")
    perm = _permutation(n, seed)
    sizes = [n // k + (1 if i < n % k else 0) for i in range(k)]
    folds = []
    start = 0
    for size in sizes:
        val = perm[start:start + size]
        train = np.concatenate([perm[:start], perm[start + size:]])
        folds.append((np.sort(train), np.sort(val)))
        start += size
    return folds


def aggregate_folds(values: Iterable[float]) -> FoldStats:
    """Mean and sample (n-1) standard deviation of per-fold values."""
    vals = tuple(float(v) for v in values)
    if len(vals) < 2:
        raise InputError("insufficient folds")
    arr = np.asarray(vals)
    mean = float(np.mean(arr))
    # np.mean can land an ulp outside [min, max] for equal values
    mean = min(max(mean, float(arr.min())), float(arr.max()))
    std = float(np.std(arr, ddof=1))
    return FoldStats(mean=mean, std=std, values=vals)

"""Independent brute-force oracles for the threshold search."""
import numpy as np

STRATEGIES = ("equal-true", "equal-false", "equal-total", "equal-opportunity")


def objective_by_counting(labels, scores, t, strategy):
    pred = scores >= t
    tp = int(np.count_nonzero((labels == 1) & pred))
    fp = int(np.count_nonzero((labels == 0) & pred))
    tn = int(np.count_nonzero((labels == 0) & ~pred))
    fn = int(np.count_nonzero((labels == 1) & ~pred))
    if strategy == "equal-true":
        return float(abs(tp - tn))
    if strategy == "equal-false":
        return float(abs(fp - fn))
    if strategy == "equal-total":
        return float(abs((tp + fp) - (tn + fn)))
    male_rate = tp / (tp + fn) if tp + fn else 0.0
    female_rate = tn / (tn + fp) if tn + fp else 0.0
    return abs(male_rate - female_rate)


def grid_minimum(labels, scores, strategy, points=10_001):
    return min(objective_by_counting(labels, scores, t, strategy) for t in np.linspace(0.0, 1.0, points))


def distinct_score_minimum(labels, scores, strategy):
    """Every achievable split: threshold at each distinct score, plus above the max."""
    ts = list(np.unique(scores)) + [np.inf]
    return min(objective_by_counting(labels, scores, t, strategy) for t in ts)


def random_score_set(rng, n=200, quantized=True):
    labels = rng.integers(0, 2, n)
    labels[0], labels[1] = 0, 1
    # mildly informative scores, like a real classifier
    raw = np.clip(rng.normal(0.35 + 0.3 * labels, 0.2), 0, 1)
    scores = np.round(raw, 3) if quantized else raw
    return labels, scores

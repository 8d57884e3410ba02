"""Group-fairness metrics and bias-mitigation tooling for binary classifiers."""
from .core import (
    FEMALE,
    MALE,
    ConfusionCounts,
    Dataset,
    DatasetSplit,
    FoldStats,
    ScoreRecord,
    aggregate_folds,
    confusion_from_scores,
    kfold,
    split_dataset,
)
from .errors import ConfigError, FairmitError, InputError, TrainingDiverged
from .metrics import MetricReport, metric_report
from .mitigate import ClassWeights, ThresholdStrategy, class_weights, optimize_threshold, threshold_objective

__version__ = "0.1.0"

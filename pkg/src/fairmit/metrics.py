"""Accuracy and the four signed group-fairness differences.

Every difference is the Male-side quantity minus the Female-side one, so a
classifier that predicts Female for everything gets negative extremes. Rates
with a zero denominator count as 0.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

from .core import ConfusionCounts
from .errors import InputError


def _check(cc: ConfusionCounts) -> None:
    if cc.total <= 0:
        raise InputError("metrics need at least one counted sample")


def safe_rate(num: int, den: int) -> float:
    return num / den if den else 0.0


def accuracy(cc: ConfusionCounts) -> float:
    _check(cc)
    return (cc.tp + cc.tn) / cc.total


def demographic_parity_diff(cc: ConfusionCounts) -> int:
    """Predicted-Male count minus predicted-Female count (unnormalized)."""
    _check(cc)
    return (cc.tp + cc.fp) - (cc.tn + cc.fn)


def proportional_parity_diff(cc: ConfusionCounts) -> float:
    _check(cc)
    return demographic_parity_diff(cc) / cc.total


def tpr(cc: ConfusionCounts) -> float:
    return safe_rate(cc.tp, cc.tp + cc.fn)


def tnr(cc: ConfusionCounts) -> float:
    return safe_rate(cc.tn, cc.tn + cc.fp)


def ppv(cc: ConfusionCounts) -> float:
    return safe_rate(cc.tp, cc.tp + cc.fp)


def npv(cc: ConfusionCounts) -> float:
    return safe_rate(cc.tn, cc.tn + cc.fn)


def equality_of_opportunity_diff(cc: ConfusionCounts) -> float:
    _check(cc)
    return tpr(cc) - tnr(cc)


def predictive_rate_parity_diff(cc: ConfusionCounts) -> float:
    _check(cc)
    return ppv(cc) - npv(cc)


@dataclass(frozen=True)
class MetricReport:
    accuracy: float
    dpd: int
    ppd: float
    eood: float
    prpd: float
    tpr: float
    tnr: float
    ppv: float
    npv: float
    total: int

    def as_dict(self) -> dict:
        return asdict(self)


def metric_report(cc: ConfusionCounts) -> MetricReport:
    _check(cc)
    return MetricReport(
        accuracy=accuracy(cc),
        dpd=demographic_parity_diff(cc),
        ppd=proportional_parity_diff(cc),
        eood=equality_of_opportunity_diff(cc),
        prpd=predictive_rate_parity_diff(cc),
        tpr=tpr(cc),
        tnr=tnr(cc),
        ppv=ppv(cc),
        npv=npv(cc),
        total=cc.total,
    )

"""Precision-recall evaluation of ranked candidates."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PRCurve:
    recall: np.ndarray
    precision: np.ndarray
    auc_pr: float
    prevalence: float

    def as_dict(self) -> dict:
        return {"auc_pr": self.auc_pr, "prevalence": self.prevalence,
                "relative": relative_auc_pr(self) if self.prevalence > 0 else None}


def auc_pr(ranked) -> PRCurve:
    """Average precision of labels given in rank order (best first).

    Accepts a :class:`~hosim.prediction.ScoreSet` or a boolean sequence.
    The score is the mean of precision@k over the ranks k of the positives.
    """
    labels = np.asarray(getattr(ranked, "labels", ranked), dtype=bool)
    n_pos = int(labels.sum())
    if n_pos == 0 or n_pos == len(labels):
        raise ValueError("AUC-PR needs at least one positive and one negative label")
    hits = np.cumsum(labels)
    ranks = np.arange(1, len(labels) + 1)
    precision = hits / ranks
    recall = hits / n_pos
    ap = float(precision[labels].sum() / n_pos)
    return PRCurve(recall, precision, ap, n_pos / len(labels))


def relative_auc_pr(curve: PRCurve) -> float:
    """AUC-PR divided by the random baseline (the prevalence)."""
    if curve.prevalence <= 0:
        raise ValueError("prevalence is zero")
    return curve.auc_pr / curve.prevalence


def expected_random_ap(n: int, n_pos: int) -> float:
    """Exact mean average precision of a uniformly random ranking.

    Equals the prevalence only as ``n`` grows; the finite-size excess is
    about ``(H_n - 1)(1 - prevalence) / n``.
    """
    if not 0 < n_pos <= n:
        raise ValueError("need 0 < n_pos <= n")
    h = float(np.sum(1.0 / np.arange(1, n + 1)))
    if n == 1:
        return 1.0
    return (h + (n_pos - 1) / (n - 1) * (n - h)) / n

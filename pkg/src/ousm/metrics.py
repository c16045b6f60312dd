"""Accuracy and noise-detection statistics."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
from scipy.stats import rankdata

from .errors import InvalidArgument


def accuracy_at_threshold(probabilities, labels, threshold=0.5):
    """Binary accuracy: predict class 1 when P(class 1) >= threshold.

    ``probabilities`` may be the positive-class column or a full (n, 2)
    matrix. With more than two classes the prediction is the argmax and
    ``threshold`` is unused.
    """
    p = np.asarray(probabilities, dtype=np.float64)
    y = np.asarray(labels)
    if y.size == 0:
        raise InvalidArgument("accuracy of an empty set is undefined")
    if p.ndim == 2 and p.shape[1] > 2:
        pred = p.argmax(axis=1)
    else:
        pos = p[:, 1] if p.ndim == 2 else p
        pred = (pos >= threshold).astype(y.dtype)
    if pred.shape != y.shape:
        raise InvalidArgument("probabilities and labels disagree in length")
    return float(np.mean(pred == y))


def per_class_accuracy(probabilities, labels, threshold=0.5):
    y = np.asarray(labels)
    p = np.asarray(probabilities, dtype=np.float64)
    return {int(c): accuracy_at_threshold(p[y == c], y[y == c], threshold)
            for c in np.unique(y)}


@dataclass
class DetectionReport:
    auc_flip_detection: float | None
    mean_lambda_clean: float | None
    mean_lambda_flipped: float | None
    n_flipped: int
    n_clean: int

    def to_dict(self):
        return asdict(self)


def mann_whitney_auc(scores_pos, scores_neg):
    """P(score_pos > score_neg) + 0.5 P(tie), from midranks."""
    pos = np.asarray(scores_pos, dtype=np.float64)
    neg = np.asarray(scores_neg, dtype=np.float64)
    ranks = rankdata(np.concatenate([pos, neg]))
    n1, n0 = pos.size, neg.size
    u = ranks[:n1].sum() - n1 * (n1 + 1) / 2.0
    return float(u / (n1 * n0))


def flip_detection_report(lam, clean_labels, observed_labels) -> DetectionReport:
    """How well a low weight singles out mislabeled samples.

    AUC = 1 means every flipped sample has a smaller weight than every clean one.
    """
    lam = np.asarray(lam, dtype=np.float64)
    flipped = np.asarray(clean_labels) != np.asarray(observed_labels)
    n_f = int(flipped.sum())
    n_c = int((~flipped).sum())
    auc = None
    if n_f and n_c:
        # flipped are the positives; a lower lambda should rank them higher
        auc = mann_whitney_auc(-lam[flipped], -lam[~flipped])
    return DetectionReport(
        auc,
        float(lam[~flipped].mean()) if n_c else None,
        float(lam[flipped].mean()) if n_f else None,
        n_f,
        n_c,
    )

"""Per-sample loss coefficients for the joint objective

    L = alpha * mean_{kept}(CE) + beta * mean_{all}(lambda * CE) + eta * ||W||^2

where "kept" excludes the K highest-loss samples of the mini-batch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument


@dataclass(frozen=True)
class OusmParams:
    k_exclude: int = 0
    alpha: float = 0.5
    beta: float = 0.5


def default_k_exclude(batch_size):
    return math.ceil(0.1 * batch_size)


def ousm_mask(per_sample_ce, k_exclude):
    """1 for kept samples, 0 for the ``k_exclude`` largest losses.

    Among equal losses the lower index is dropped first.
    """
    ce = np.asarray(per_sample_ce, dtype=np.float64)
    n = ce.shape[0]
    if k_exclude < 0 or k_exclude >= n:
        raise InvalidArgument(f"k_exclude must lie in [0, {n}), got {k_exclude}")
    mask = np.ones(n)
    if k_exclude:
        order = np.lexsort((np.arange(n), -ce))
        mask[order[:k_exclude]] = 0.0
    return mask


def combine_coefficients(mask, lambda_batch, alpha, beta, batch_size, k_exclude):
    mask = np.asarray(mask, dtype=np.float64)
    lam = np.asarray(lambda_batch, dtype=np.float64)
    if mask.shape != lam.shape or mask.shape[0] != batch_size:
        raise InvalidArgument("mask, lambda and batch size disagree")
    if k_exclude >= batch_size:
        raise InvalidArgument("k_exclude must be smaller than the batch")
    return alpha * mask / (batch_size - k_exclude) + beta * lam / batch_size


def batch_loss_value(per_sample_ce, coefficients, model, eta):
    ce = np.asarray(per_sample_ce, dtype=np.float64)
    c = np.asarray(coefficients, dtype=np.float64)
    if ce.shape != c.shape:
        raise InvalidArgument("coefficients and losses must have equal length")
    decay = sum(float(np.sum(w * w)) for w in model.weights)
    return float(c @ ce) + eta * decay

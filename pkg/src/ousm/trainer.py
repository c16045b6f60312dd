"""Iterative noisy-label training loop.

Each mini-batch is updated with OUSM-masked, lambda-weighted cross-entropy.
After the warm-up, every ``reweight_period`` epochs the whole training set is
pushed through the model, its features are scored with pLOF, and the
per-sample weights are blended towards ``1 - pLOF``.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import asdict, dataclass, field, fields, replace

import numpy as np

from . import lof as lof_mod
from .errors import InvalidArgument, TrainingDiverged
from .metrics import accuracy_at_threshold
from .model import backward, extract_features, forward, init_model, sgd_step
from .robust_loss import combine_coefficients, default_k_exclude, ousm_mask

log = logging.getLogger(__name__)


@dataclass
class TrainConfig:
    epochs: int = 60
    batch_size: int = 32
    learning_rate: float = 1e-3
    eta: float = 1e-4
    alpha: float = 0.5
    beta: float = 0.5
    k_exclude: int | None = None  # None -> ceil(0.1 * batch_size)
    reweight: bool = True
    reweight_period: int = 5
    warmup_epochs: int = 5
    lof_k: int = 10
    lambda_momentum: float = 0.5
    feature_mode: str = "logits"
    per_class_scoring: bool = True
    hidden_dims: tuple = (32, 16)
    seed: int = 0

    def __post_init__(self):
        self.hidden_dims = tuple(int(h) for h in self.hidden_dims)
        if self.k_exclude is None:
            self.k_exclude = default_k_exclude(self.batch_size)
        for name in ("epochs", "batch_size", "warmup_epochs", "reweight_period", "lof_k"):
            if int(getattr(self, name)) < 1:
                raise InvalidArgument(f"{name} must be >= 1")
        if not (self.learning_rate > 0 and self.eta >= 0):
            raise InvalidArgument("learning_rate must be positive and eta non-negative")
        if not (0.0 <= self.alpha and 0.0 <= self.beta):
            raise InvalidArgument("alpha and beta must be non-negative")
        if not 0 <= self.k_exclude < self.batch_size:
            raise InvalidArgument("k_exclude must lie in [0, batch_size)")
        if not 0.0 <= self.lambda_momentum < 1.0:
            raise InvalidArgument("lambda_momentum must lie in [0, 1)")
        if self.feature_mode not in ("logits", "penultimate"):
            raise InvalidArgument(f"unknown feature_mode {self.feature_mode!r}")

    def to_dict(self):
        d = asdict(self)
        d["hidden_dims"] = list(self.hidden_dims)
        return d

    @classmethod
    def from_dict(cls, d):
        names = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in d.items() if k in names})


def baseline_config(config, **overrides):
    """Plain mean cross-entropy: alpha=1, beta=0, K=0, no re-weighting."""
    return replace(config, alpha=1.0, beta=0.0, k_exclude=0, reweight=False, **overrides)


def ousm_only_config(config, **overrides):
    return replace(config, reweight=False, **overrides)


@dataclass
class TrainLog:
    train_acc: list = field(default_factory=list)
    test_acc: list = field(default_factory=list)
    mean_loss: list = field(default_factory=list)
    n_downweighted: list = field(default_factory=list)
    lambda_snapshots: dict = field(default_factory=dict)  # epoch -> list

    @property
    def epochs(self):
        return len(self.train_acc)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["epoch", "train_acc", "test_acc", "mean_loss", "n_downweighted"])
            for e in range(self.epochs):
                w.writerow([e + 1, repr(self.train_acc[e]), repr(self.test_acc[e]),
                            repr(self.mean_loss[e]), self.n_downweighted[e]])

    def snapshots_to_json(self, path):
        with open(path, "w") as fh:
            json.dump({str(k): v for k, v in self.lambda_snapshots.items()}, fh)

    @classmethod
    def from_files(cls, csv_path, json_path=None):
        out = cls()
        with open(csv_path, newline="") as fh:
            for row in csv.DictReader(fh):
                out.train_acc.append(float(row["train_acc"]))
                out.test_acc.append(float(row["test_acc"]))
                out.mean_loss.append(float(row["mean_loss"]))
                out.n_downweighted.append(int(row["n_downweighted"]))
        if json_path is not None:
            with open(json_path) as fh:
                out.lambda_snapshots = {int(k): v for k, v in json.load(fh).items()}
        return out

    def __eq__(self, other):
        if not isinstance(other, TrainLog):
            return NotImplemented
        return (asdict(self) == asdict(other))


def _accuracy(model, X, y):
    return accuracy_at_threshold(forward(model, X).probabilities, y)


def evaluate(model, dataset, labels="clean"):
    """0.5-threshold accuracy against the clean (default) or observed labels."""
    if len(dataset) == 0:
        raise InvalidArgument("cannot evaluate on an empty dataset")
    y = dataset.clean_labels if labels == "clean" else dataset.observed_labels
    return _accuracy(model, dataset.features, y)


def _rescore(model, X, y, config):
    feats = extract_features(model, X, config.feature_mode)
    if config.per_class_scoring:
        scores = lof_mod.score_by_class(feats, y, config.lof_k)
    else:
        scores = lof_mod.score_global(feats, config.lof_k)
    return scores.plof


def train(dataset, test_set, config: TrainConfig, callback=None):
    """Train a fresh model; returns ``(model, TrainLog, lambda)``.

    Train accuracy is measured against the observed (possibly noisy) labels,
    test accuracy against the test set's clean labels.
    """
    X = dataset.features
    y = dataset.observed_labels
    n = len(dataset)
    dims = [dataset.dims, *config.hidden_dims, dataset.num_classes]
    model = init_model(dims, seed=[config.seed, 0])
    rng = np.random.default_rng([config.seed, 1])
    lam = np.ones(n)
    history = TrainLog()
    B = config.batch_size
    for epoch in range(1, config.epochs + 1):
        perm = rng.permutation(n)
        kept_loss = 0.0
        kept_count = 0
        for start in range(0, n, B):
            idx = perm[start:start + B]
            nb = idx.size
            xb, yb = X[idx], y[idx]
            rec = forward(model, xb, yb)
            if not np.all(np.isfinite(rec.per_sample_ce)):
                raise TrainingDiverged(f"non-finite loss in epoch {epoch}", epoch)
            k = min(config.k_exclude, nb - 1)
            mask = ousm_mask(rec.per_sample_ce, k)
            coef = combine_coefficients(mask, lam[idx], config.alpha, config.beta, nb, k)
            grads = backward(model, xb, yb, coef, config.eta, record=rec)
            try:
                sgd_step(model, grads, config.learning_rate)
            except TrainingDiverged as exc:
                raise TrainingDiverged(f"{exc} in epoch {epoch}", epoch) from None
            kept_loss += float(rec.per_sample_ce @ mask)
            kept_count += nb - k
        if (config.reweight and epoch >= config.warmup_epochs
                and epoch % config.reweight_period == 0):
            plof = _rescore(model, X, y, config)
            lam = config.lambda_momentum * lam + (1.0 - config.lambda_momentum) * (1.0 - plof)
            history.lambda_snapshots[epoch] = lam.tolist()
        history.train_acc.append(_accuracy(model, X, y))
        history.test_acc.append(
            evaluate(model, test_set) if test_set is not None else float("nan"))
        history.mean_loss.append(kept_loss / kept_count)
        history.n_downweighted.append(int(np.sum(lam < 0.5)))
        if callback is not None:
            callback(epoch, model, lam)
    return model, history, lam

"""Label corruption: stratified symmetric flips and loss-ranked (difficulty) flips."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .dataset import LabeledDataset
from .errors import InvalidArgument

MODES = ("random_symmetric", "difficulty_ranked")


@dataclass
class NoiseSpec:
    gamma: float = 0.0
    mode: str = "random_symmetric"
    aux_train_fraction: float = 0.28
    seed: int = 0

    def __post_init__(self):
        _check_gamma(self.gamma)
        if self.mode not in MODES:
            raise InvalidArgument(f"noise mode must be one of {MODES}, got {self.mode!r}")
        if not 0.0 < self.aux_train_fraction < 1.0:
            raise InvalidArgument("aux_train_fraction must lie in (0, 1)")


def _check_gamma(gamma):
    if not 0.0 <= gamma < 1.0:
        raise InvalidArgument(f"gamma must lie in [0, 1), got {gamma}")


def _flip_count(gamma, n):
    # guard against 0.1 * 30 = 3.0000000000000004 style representation error
    return int(math.floor(gamma * n + 1e-9))


def _other_class(rng, label, num_classes):
    pick = int(rng.integers(num_classes - 1))
    return pick if pick < label else pick + 1


def corrupt_random(dataset, gamma, seed=0) -> LabeledDataset:
    """Flip exactly floor(gamma * n_c) labels in every class c.

    Targets are drawn uniformly from the other classes.
    """
    _check_gamma(gamma)
    if dataset.num_classes < 2:
        raise InvalidArgument("need at least two classes to flip labels")
    rng = np.random.default_rng(seed)
    observed = dataset.observed_labels.copy()
    for c in range(dataset.num_classes):
        members = np.flatnonzero(dataset.observed_labels == c)
        m = _flip_count(gamma, members.size)
        if m == 0:
            continue
        chosen = np.sort(rng.choice(members, size=m, replace=False))
        for i in chosen:
            observed[i] = _other_class(rng, c, dataset.num_classes)
    return dataset.with_observed(observed)


@dataclass
class DifficultyResult:
    dataset: LabeledDataset
    aux_ids: list
    flipped_ids: list


def corrupt_difficulty_ranked(dataset, gamma, aux_train_fraction=0.28, seed=0,
                              config=None) -> DifficultyResult:
    """Flip the hardest samples as judged by a model trained on a held-aside split.

    A fresh classifier is trained with plain cross-entropy on a random
    ``aux_train_fraction`` of the data. Its loss ranks the remaining samples;
    within each class the top ``floor(gamma * m_c)`` are flipped. Samples in
    the auxiliary split are never flipped.
    """
    from .trainer import TrainConfig, baseline_config, train

    _check_gamma(gamma)
    if not 0.0 < aux_train_fraction < 1.0:
        raise InvalidArgument("aux_train_fraction must lie in (0, 1)")
    n = len(dataset)
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    n_aux = int(round(aux_train_fraction * n))
    aux, rest = np.sort(perm[:n_aux]), np.sort(perm[n_aux:])
    y = dataset.observed_labels
    for c in range(dataset.num_classes):
        if np.sum(y[aux] == c) < 10 or np.sum(y[rest] == c) < 1:
            raise InvalidArgument(
                f"degenerate auxiliary split: class {c} has "
                f"{int(np.sum(y[aux] == c))} aux / {int(np.sum(y[rest] == c))} held-out samples")
    observed = y.copy()
    if gamma > 0:
        cfg = baseline_config(config if config is not None else TrainConfig(), seed=seed)
        model, _, _ = train(dataset.subset(aux), None, cfg)
        from .model import forward
        ce = forward(model, dataset.features[rest], y[rest]).per_sample_ce
        for c in range(dataset.num_classes):
            local = np.flatnonzero(y[rest] == c)
            m = _flip_count(gamma, local.size)
            if m == 0:
                continue
            order = np.lexsort((local, -ce[local]))
            hardest = rest[local[order[:m]]]
            for i in hardest:
                observed[i] = _other_class(rng, c, dataset.num_classes)
    out = dataset.with_observed(observed)
    return DifficultyResult(out,
                            [int(i) for i in dataset.sample_ids[aux]],
                            out.flipped_ids())


def corrupt(dataset, spec: NoiseSpec, config=None):
    """Apply ``spec``; returns (dataset, flipped_ids)."""
    if spec.mode == "random_symmetric":
        out = corrupt_random(dataset, spec.gamma, spec.seed)
        return out, out.flipped_ids()
    res = corrupt_difficulty_ranked(dataset, spec.gamma, spec.aux_train_fraction,
                                    spec.seed, config)
    return res.dataset, res.flipped_ids


def noise_report(dataset) -> dict:
    flips = {}
    sizes = {}
    for c in range(dataset.num_classes):
        members = dataset.clean_labels == c
        sizes[c] = int(members.sum())
        flips[c] = int(np.sum(members & dataset.flipped))
    return {
        "n_samples": len(dataset),
        "class_sizes": sizes,
        "flips_per_class": flips,
        "n_flipped": int(dataset.flipped.sum()),
        "realized_gamma": dataset.noise_ratio(),
    }


def save_flipped_ids(ids, path):
    with open(path, "w") as fh:
        json.dump(sorted(int(i) for i in ids), fh)


def load_flipped_ids(path):
    with open(path) as fh:
        return json.load(fh)

"""Labeled feature datasets and their CSV serialization."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument, InvalidData


@dataclass
class LabeledDataset:
    features: np.ndarray
    clean_labels: np.ndarray
    observed_labels: np.ndarray
    sample_ids: np.ndarray
    num_classes: int = 2

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        if self.features.ndim != 2:
            raise InvalidArgument("features must be a 2-D array")
        self.clean_labels = np.asarray(self.clean_labels, dtype=np.int64)
        self.observed_labels = np.asarray(self.observed_labels, dtype=np.int64)
        self.sample_ids = np.asarray(self.sample_ids, dtype=np.int64)
        n = self.features.shape[0]
        for name in ("clean_labels", "observed_labels", "sample_ids"):
            if getattr(self, name).shape != (n,):
                raise InvalidArgument(f"{name} must have length {n}")
        for labels in (self.clean_labels, self.observed_labels):
            if labels.size and (labels.min() < 0 or labels.max() >= self.num_classes):
                raise InvalidData(f"labels must lie in [0, {self.num_classes})")

    def __len__(self):
        return self.features.shape[0]

    @property
    def dims(self):
        return self.features.shape[1]

    @property
    def flipped(self):
        return self.observed_labels != self.clean_labels

    def flipped_ids(self):
        return [int(i) for i in self.sample_ids[self.flipped]]

    def noise_ratio(self):
        return float(self.flipped.mean()) if len(self) else 0.0

    def with_observed(self, observed):
        return LabeledDataset(self.features, self.clean_labels, observed,
                              self.sample_ids, self.num_classes)

    def subset(self, idx):
        return LabeledDataset(self.features[idx], self.clean_labels[idx],
                              self.observed_labels[idx], self.sample_ids[idx],
                              self.num_classes)

    def __eq__(self, other):
        if not isinstance(other, LabeledDataset):
            return NotImplemented
        return (self.num_classes == other.num_classes
                and np.array_equal(self.features, other.features)
                and np.array_equal(self.clean_labels, other.clean_labels)
                and np.array_equal(self.observed_labels, other.observed_labels)
                and np.array_equal(self.sample_ids, other.sample_ids))


def _fmt(x):
    return format(float(x), ".17g")


def save_csv(dataset, path):
    """Header ``id,f0..f{d-1},clean_label,observed_label``; floats at 17 digits."""
    d = dataset.dims
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", *[f"f{j}" for j in range(d)], "clean_label", "observed_label"])
        for i in range(len(dataset)):
            w.writerow([int(dataset.sample_ids[i]),
                        *[_fmt(v) for v in dataset.features[i]],
                        int(dataset.clean_labels[i]),
                        int(dataset.observed_labels[i])])


def load_csv(path, num_classes=None):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    if header[0] != "id" or header[-2:] != ["clean_label", "observed_label"]:
        raise InvalidData(f"{path}: unexpected header {header}")
    d = len(header) - 3
    ids = np.array([int(r[0]) for r in body], dtype=np.int64)
    feats = np.array([[float(v) for v in r[1:1 + d]] for r in body],
                     dtype=np.float64).reshape(len(body), d)
    clean = np.array([int(r[-2]) for r in body], dtype=np.int64)
    obs = np.array([int(r[-1]) for r in body], dtype=np.int64)
    if num_classes is None:
        num_classes = max(2, int(max(clean.max(initial=0), obs.max(initial=0))) + 1)
    return LabeledDataset(feats, clean, obs, ids, num_classes)

"""Two-Gaussian benchmark data with boundary-hugging "hard" samples."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .dataset import LabeledDataset
from .errors import InvalidArgument


@dataclass
class SyntheticSpec:
    """Class means sit at +-separation/2 on the first axis, unit within-class std.

    A ``hard_fraction`` of each class is redrawn into the overlap band: first
    coordinate |N(0, hard_spread)| on the class's own side of the midpoint.
    """

    n_per_class: tuple = (1500, 500)
    n_test: int = 600
    dims: int = 2
    class_separation: float = 4.0
    hard_fraction: float = 0.05
    hard_spread: float = 0.5
    seed: int = 0

    def __post_init__(self):
        self.n_per_class = tuple(int(c) for c in self.n_per_class)
        if len(self.n_per_class) != 2 or min(self.n_per_class) < 1:
            raise InvalidArgument("n_per_class must be two positive counts")
        if self.dims < 1 or self.n_test < 0:
            raise InvalidArgument("dims must be >= 1 and n_test >= 0")
        if not 0.0 <= self.hard_fraction < 0.5:
            raise InvalidArgument("hard_fraction must lie in [0, 0.5)")
        if self.class_separation < 0 or self.hard_spread <= 0:
            raise InvalidArgument("class_separation must be >= 0, hard_spread > 0")

    def to_dict(self):
        d = asdict(self)
        d["n_per_class"] = list(self.n_per_class)
        return d


def _test_counts(spec):
    total = sum(spec.n_per_class)
    n1 = int(round(spec.n_test * spec.n_per_class[1] / total))
    return (spec.n_test - n1, n1)


def _draw(rng, counts, spec):
    feats, labels, hard = [], [], []
    for c, m in enumerate(counts):
        side = -1.0 if c == 0 else 1.0
        x = rng.normal(size=(m, spec.dims))
        x[:, 0] += side * spec.class_separation / 2.0
        n_hard = int(round(spec.hard_fraction * m))
        which = np.zeros(m, dtype=bool)
        if n_hard:
            pick = rng.choice(m, size=n_hard, replace=False)
            which[pick] = True
            x[pick, 0] = side * np.abs(rng.normal(0.0, spec.hard_spread, size=n_hard))
        feats.append(x)
        labels.append(np.full(m, c))
        hard.append(which)
    return np.vstack(feats), np.concatenate(labels), np.concatenate(hard)


def generate_synthetic(spec: SyntheticSpec):
    """Returns ``(train, test, hard_mask_train)``; ids run 0..n_train+n_test-1."""
    rng = np.random.default_rng([spec.seed, 7])
    Xtr, ytr, htr = _draw(rng, spec.n_per_class, spec)
    Xte, yte, _ = _draw(rng, _test_counts(spec), spec)
    order = rng.permutation(len(ytr))
    Xtr, ytr, htr = Xtr[order], ytr[order], htr[order]
    order_te = rng.permutation(len(yte))
    Xte, yte = Xte[order_te], yte[order_te]
    ntr = len(ytr)
    train = LabeledDataset(Xtr, ytr, ytr.copy(), np.arange(ntr))
    test = LabeledDataset(Xte, yte, yte.copy(), np.arange(ntr, ntr + len(yte)))
    return train, test, htr

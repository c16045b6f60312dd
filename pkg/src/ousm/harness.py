"""Experiment orchestration: gamma sweeps and memorization curves.

Seed splitting rule: run ``i`` of a sweep with master seed ``m`` uses
``run_seed(m, i)`` for data generation, label corruption and training alike,
so every method at a given (gamma, i) sees the same data and the same flips,
and any single run can be repeated with ``ousm train --seed <run_seed>``.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import os
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .errors import InvalidArgument
from .metrics import flip_detection_report
from .noise import NoiseSpec, corrupt, noise_report
from .synthetic import SyntheticSpec, generate_synthetic
from .trainer import TrainConfig, baseline_config, ousm_only_config, train

log = logging.getLogger(__name__)

METHODS = {
    "baseline": baseline_config,
    "ousm_only": ousm_only_config,
    "full": lambda cfg, **kw: replace(cfg, reweight=True, **kw),
}
METHOD_LABELS = {
    "baseline": "MLP (CE)",
    "ousm_only": "MLP+OUSM",
    "full": "MLP+OUSM+pLOF",
}
DEFAULT_GAMMAS = (0.0, 0.05, 0.1, 0.2, 0.4)


def run_seed(master, index):
    return int(np.random.SeedSequence([int(master), int(index)]).generate_state(1)[0])


def method_config(method, config, seed):
    if method not in METHODS:
        raise InvalidArgument(f"unknown method {method!r}; choose from {sorted(METHODS)}")
    return METHODS[method](config, seed=seed)


def gamma_key(gamma):
    return format(float(gamma), "g")


def validate_gammas(gammas):
    for g in gammas:
        if not 0.0 <= g < 1.0:
            raise InvalidArgument(f"gamma must lie in [0, 1), got {g}")


@dataclass
class RunRecord:
    method: str
    gamma: float
    seed_index: int
    seed: int
    test_acc: float | None = None
    train_acc: float | None = None
    detection: dict | None = None
    noise: dict | None = None
    flipped_ids: list = field(default_factory=list)
    error: str | None = None


@dataclass
class ExperimentResult:
    grid: dict
    runs: list
    config: dict
    logs: dict = field(default_factory=dict)  # (method, gamma_key, seed_index) -> TrainLog

    def cell(self, method, gamma):
        return self.grid[method][gamma_key(gamma)]

    def to_dir(self, out):
        os.makedirs(out, exist_ok=True)
        write_json(os.path.join(out, "grid.json"), self.grid)
        write_json(os.path.join(out, "runs.json"), [asdict(r) for r in self.runs])
        write_json(os.path.join(out, "config.json"), self.config)
        logdir = os.path.join(out, "logs")
        os.makedirs(logdir, exist_ok=True)
        for (method, g, i), tl in sorted(self.logs.items()):
            stem = os.path.join(logdir, f"{method}_g{g}_s{i}")
            tl.to_csv(stem + ".csv")
            if tl.lambda_snapshots:
                tl.snapshots_to_json(stem + "_lambda.json")


def write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _aggregate(runs, methods, gammas, n_seeds):
    grid = {}
    for m in methods:
        grid[m] = {}
        for g in gammas:
            accs = [r.test_acc for r in runs
                    if r.method == m and r.gamma == g and r.error is None]
            cell = {"n_seeds": len(accs), "complete": len(accs) == n_seeds,
                    "accuracies": accs}
            if accs:
                cell["mean"] = float(np.mean(accs))
                cell["std"] = float(np.std(accs))
            grid[m][gamma_key(g)] = cell
    return grid


def run_one(spec, noise_mode, method, gamma, seed_index, seed, config, keep_log=True):
    rec = RunRecord(method, float(gamma), seed_index, seed)
    try:
        train_set, test_set, _ = generate_synthetic(replace(spec, seed=seed))
        noisy, flipped = corrupt(train_set, NoiseSpec(gamma, noise_mode, seed=seed),
                                 config=replace(config, seed=seed))
        cfg = method_config(method, config, seed)
        _, tlog, lam = train(noisy, test_set, cfg)
    except Exception as exc:  # noqa: BLE001 -- recorded, cell marked incomplete
        log.warning("run %s gamma=%s seed=%s failed: %s", method, gamma, seed, exc)
        rec.error = f"{type(exc).__name__}: {exc}"
        return rec, None
    rec.test_acc = tlog.test_acc[-1]
    rec.train_acc = tlog.train_acc[-1]
    rec.noise = noise_report(noisy)
    rec.flipped_ids = flipped
    if flipped:
        rec.detection = flip_detection_report(
            lam, noisy.clean_labels, noisy.observed_labels).to_dict()
    return rec, (tlog if keep_log else None)


def run_gamma_sweep(spec: SyntheticSpec, methods, gammas, n_seeds, config: TrainConfig,
                    master_seed=0, noise_mode="random_symmetric", n_jobs=1) -> ExperimentResult:
    """Train every (method, gamma, seed) and aggregate clean-test accuracy."""
    validate_gammas(gammas)
    for m in methods:
        if m not in METHODS:
            raise InvalidArgument(f"unknown method {m!r}")
    jobs = [(m, float(g), i, run_seed(master_seed, i))
            for g in gammas for i in range(n_seeds) for m in methods]
    if n_jobs == 1:
        outcomes = [run_one(spec, noise_mode, m, g, i, s, config) for m, g, i, s in jobs]
    else:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            futures = [pool.submit(run_one, spec, noise_mode, m, g, i, s, config)
                       for m, g, i, s in jobs]
            outcomes = [f.result() for f in futures]
    runs = [r for r, _ in outcomes]
    logs = {(r.method, gamma_key(r.gamma), r.seed_index): tl
            for r, tl in outcomes if tl is not None}
    snapshot = {
        "spec": spec.to_dict(),
        "train_config": config.to_dict(),
        "methods": list(methods),
        "gammas": [float(g) for g in gammas],
        "n_seeds": n_seeds,
        "master_seed": master_seed,
        "noise_mode": noise_mode,
        "seed_rule": "run_seed(master, i) = SeedSequence([master, i]).generate_state(1)[0]",
    }
    grid = _aggregate(runs, methods, [float(g) for g in gammas], n_seeds)
    return ExperimentResult(grid, runs, snapshot, logs)


@dataclass
class MemorizationResult:
    gammas: list
    curves: dict  # (gamma_key, seed_index) -> TrainLog

    def final(self, gamma, what="train_acc"):
        vals = [getattr(tl, what)[-1] for (g, _), tl in self.curves.items()
                if g == gamma_key(gamma)]
        return vals

    def mean_curve(self, gamma, what="test_acc"):
        arr = [getattr(tl, what) for (g, _), tl in sorted(self.curves.items())
               if g == gamma_key(gamma)]
        return np.mean(np.asarray(arr), axis=0)

    def to_csv(self, path):
        """Long format: one row per (gamma, seed, epoch), both panels' columns."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["gamma", "seed_index", "epoch", "train_acc", "test_acc"])
            for (g, i), tl in sorted(self.curves.items(), key=lambda kv: (float(kv[0][0]), kv[0][1])):
                for e in range(tl.epochs):
                    w.writerow([g, i, e + 1, repr(tl.train_acc[e]), repr(tl.test_acc[e])])


def run_memorization(spec: SyntheticSpec, gammas, config: TrainConfig, n_seeds=1,
                     master_seed=0, noise_mode="random_symmetric") -> MemorizationResult:
    """Plain cross-entropy training curves on corrupted data, one per gamma and seed."""
    validate_gammas(gammas)
    base = baseline_config(config)
    curves = {}
    for g in gammas:
        for i in range(n_seeds):
            seed = run_seed(master_seed, i)
            train_set, test_set, _ = generate_synthetic(replace(spec, seed=seed))
            noisy, _ = corrupt(train_set, NoiseSpec(g, noise_mode, seed=seed),
                               config=replace(base, seed=seed))
            _, tlog, _ = train(noisy, test_set, replace(base, seed=seed))
            curves[(gamma_key(g), i)] = tlog
    return MemorizationResult([float(g) for g in gammas], curves)


def format_grid(grid, methods=None, gammas=None):
    """Markdown table: methods as rows, noise ratios as columns (accuracy in %)."""
    methods = methods or list(grid)
    if gammas is None:
        keys = sorted({k for m in methods for k in grid[m]}, key=float)
    else:
        keys = [gamma_key(g) for g in gammas]
    head = "| Noise Ratio | " + " | ".join(f"{100 * float(k):g}%" for k in keys) + " |"
    sep = "|---" * (len(keys) + 1) + "|"
    lines = [head, sep]
    for m in methods:
        cells = []
        for k in keys:
            c = grid[m].get(k)
            if not c or "mean" not in c:
                cells.append("--")
            else:
                mark = "" if c.get("complete", True) else "*"
                cells.append(f"{100 * c['mean']:.1f} ± {100 * c['std']:.1f}{mark}")
        lines.append(f"| {METHOD_LABELS.get(m, m)} | " + " | ".join(cells) + " |")
    return "\n".join(lines)


def load_grid(out):
    with open(os.path.join(out, "grid.json")) as fh:
        return json.load(fh)

"""Exit criteria, one test per criterion, each printed as a PASS/FAIL line.

Slow: the experiment reproductions train a few hundred small networks.
Deselect with ``-m "not slow"``.
"""

import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from oracles import brute_lof, numeric_grad, plain_ce_train
from ousm import lof, presets
from ousm.dataset import load_csv, save_csv
from ousm.harness import run_gamma_sweep, run_memorization
from ousm.model import backward, forward, init_model, load_checkpoint, save_checkpoint
from ousm.noise import corrupt_random, load_flipped_ids, save_flipped_ids
from ousm.robust_loss import batch_loss_value, ousm_mask
from ousm.synthetic import SyntheticSpec, generate_synthetic
from ousm.trainer import TrainConfig, TrainLog, baseline_config, train

METHODS = ["baseline", "ousm_only", "full"]
N_SEEDS = 5


def report(number, name, ok, detail):
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {number}. {name}: {detail}")
    return ok


def test_c1_lof_oracle_equivalence():
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(100):
        k = int(rng.choice([3, 5, 10]))
        n = int(rng.integers(k + 1, 65))
        d = int(rng.integers(1, 9))
        X = rng.normal(size=(n, d)) * rng.uniform(0.1, 10)
        ref, _, _ = brute_lof(X, k)
        worst = max(worst, float(np.abs(lof.lof_scores(X, k) - ref).max()))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-9 and elapsed < 10
    report(1, "LOF oracle equivalence", ok,
           f"max |diff| {worst:.1e} (tol 1e-9), {elapsed:.1f}s (< 10s), backend={lof.BACKEND}")
    assert ok


def test_c2_gradient_correctness():
    rng = np.random.default_rng(7)
    t0 = time.perf_counter()
    worst = 0.0
    for case in range(20):
        n_hidden = int(rng.integers(0, 3))
        dims = [int(rng.integers(2, 6))] + [int(rng.integers(2, 7)) for _ in range(n_hidden)]
        dims.append(int(rng.integers(2, 4)))
        model = init_model(dims, seed=case)
        for b in model.biases:
            b[...] = rng.normal(size=b.shape) * 0.1
        batch = int(rng.integers(2, 9))
        X = rng.normal(size=(batch, dims[0]))
        y = rng.integers(0, dims[-1], size=batch)
        c = rng.random(batch)
        eta = float(rng.uniform(0, 0.1))
        analytic = backward(model, X, y, c, eta).parameters()

        def objective():
            return batch_loss_value(forward(model, X, y).per_sample_ce, c, model, eta)

        numeric = numeric_grad(objective, model.parameters(), step=1e-5)
        for a, nm in zip(analytic, numeric):
            rel = np.abs(a - nm) / np.maximum(np.maximum(np.abs(a), np.abs(nm)), 1e-6)
            worst = max(worst, float(rel.max()))
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-4 and elapsed < 30
    report(2, "gradient vs central differences", ok,
           f"max relative error {worst:.1e} (< 1e-4), {elapsed:.1f}s (< 30s)")
    assert ok


def test_c3_ousm_properties():
    rng = np.random.default_rng(11)
    mask_ok = True
    for _ in range(500):
        n = int(rng.integers(2, 40))
        losses = rng.integers(0, 6, size=n).astype(float)  # many ties
        k = int(rng.integers(0, n))
        mask = ousm_mask(losses, k)
        expected = np.ones(n)
        expected[sorted(range(n), key=lambda i: (-losses[i], i))[:k]] = 0
        mask_ok &= bool(np.array_equal(mask, expected))

    train_set, _, _ = generate_synthetic(SyntheticSpec(n_per_class=(120, 80), n_test=0,
                                                       dims=4, seed=5))
    noisy = corrupt_random(train_set, 0.2, seed=5)
    cfg = baseline_config(TrainConfig(epochs=15, learning_rate=0.05, hidden_dims=(16, 8),
                                      seed=13))
    model, _, _ = train(noisy, None, cfg)
    ref = plain_ce_train(noisy.features, noisy.observed_labels, 2, cfg.hidden_dims,
                         cfg.epochs, cfg.batch_size, cfg.learning_rate, cfg.eta, cfg.seed)
    traj_ok = all(np.array_equal(a, b) for a, b in zip(model.parameters(), ref.parameters()))
    ok = mask_ok and traj_ok
    report(3, "OUSM mask + baseline degeneration", ok,
           f"top-K mask with index tie-break {'exact' if mask_ok else 'WRONG'}; "
           f"alpha=1,beta=0,K=0 trajectory {'bit-identical' if traj_ok else 'DIFFERS'}")
    assert ok


@pytest.mark.slow
def test_c4_memorization():
    gammas = [0.05, 0.1, 0.2, 0.4]
    t0 = time.perf_counter()
    res = run_memorization(presets.default_spec(), gammas, presets.memorization_config(),
                           n_seeds=N_SEEDS, master_seed=0)
    elapsed = time.perf_counter() - t0
    min_train = {g: min(res.final(g, "train_acc")) for g in gammas}
    test_mean = [float(np.mean(res.final(g, "test_acc"))) for g in gammas]
    memorized = all(v >= 0.99 for v in min_train.values())
    monotone = all(b <= a + 0.01 for a, b in zip(test_mean, test_mean[1:]))
    ok = memorized and monotone and elapsed < 300
    report(4, "memorization (plain CE)", ok,
           "min final train acc " + ", ".join(f"{100 * g:g}%:{100 * v:.1f}" for g, v in min_train.items())
           + "; mean test acc " + " > ".join(f"{100 * v:.1f}" for v in test_mean)
           + f"; {elapsed:.0f}s (< 300s)")
    assert ok


@pytest.fixture(scope="module")
def noisy_sweep():
    t0 = time.perf_counter()
    res = run_gamma_sweep(presets.default_spec(), METHODS, [0.2, 0.4], N_SEEDS,
                          presets.sweep_config(), master_seed=0)
    return res, time.perf_counter() - t0


@pytest.mark.slow
def test_c5_method_ordering(noisy_sweep):
    res, elapsed = noisy_sweep
    m = {(meth, g): res.cell(meth, g)["mean"] for meth in METHODS for g in (0.2, 0.4)}
    order = all(m[("full", g)] >= m[("ousm_only", g)] >= m[("baseline", g)] for g in (0.2, 0.4))
    margin = m[("full", 0.4)] - m[("baseline", 0.4)]
    ok = order and margin >= 0.05 and elapsed < 900
    cells = "; ".join(f"{100 * g:g}%: " + "/".join(f"{100 * m[(meth, g)]:.1f}" for meth in METHODS)
                      for g in (0.2, 0.4))
    report(5, "method ordering (baseline/ousm_only/full)", ok,
           f"{cells}; full-baseline at 40% = {100 * margin:.1f} pts (>= 5); {elapsed:.0f}s (< 900s)")
    assert order, "ordering full >= ousm_only >= baseline violated"
    assert margin >= 0.05
    assert elapsed < 900


@pytest.mark.slow
def test_c6_noise_detection_auc(noisy_sweep):
    res, _ = noisy_sweep
    aucs = [r.detection["auc_flip_detection"] for r in res.runs
            if r.method == "full" and r.gamma == 0.4]
    mean_auc = float(np.mean(aucs))
    ok = len(aucs) == N_SEEDS and mean_auc >= 0.7
    report(6, "flip-detection AUC of final lambda", ok,
           f"5-seed mean AUC {mean_auc:.3f} (>= 0.7); per seed "
           + ", ".join(f"{a:.3f}" for a in aucs))
    assert ok


@pytest.mark.slow
def test_c7_determinism_and_round_trip(noisy_sweep, tmp_path):
    res, _ = noisy_sweep
    again = run_gamma_sweep(presets.default_spec(), METHODS, [0.2, 0.4], N_SEEDS,
                            presets.sweep_config(), master_seed=0)
    res.to_dir(tmp_path / "a")
    again.to_dir(tmp_path / "b")
    same = all((tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()
               for f in ("grid.json", "runs.json", "config.json"))
    logs_a = sorted((tmp_path / "a" / "logs").iterdir())
    same &= all(p.read_bytes() == (tmp_path / "b" / "logs" / p.name).read_bytes() for p in logs_a)

    trips = {}
    ds, _, _ = generate_synthetic(presets.default_spec(3))
    ds = corrupt_random(ds, 0.3, seed=3)
    save_csv(ds, tmp_path / "d.csv")
    trips["dataset"] = load_csv(tmp_path / "d.csv") == ds
    model = init_model([10, 128, 128, 2], seed=1)
    save_checkpoint(model, tmp_path / "m.json")
    back = load_checkpoint(tmp_path / "m.json")
    trips["checkpoint"] = all(np.array_equal(a, b)
                              for a, b in zip(model.parameters(), back.parameters()))
    key = next(k for k in res.logs if k[0] == "full")
    tl = res.logs[key]
    tl.to_csv(tmp_path / "t.csv")
    tl.snapshots_to_json(tmp_path / "t.json")
    trips["trainlog"] = TrainLog.from_files(tmp_path / "t.csv", tmp_path / "t.json") == tl
    import json
    trips["grid"] = json.loads((tmp_path / "a" / "grid.json").read_text()) == res.grid
    save_flipped_ids(ds.flipped_ids(), tmp_path / "f.json")
    trips["flipped_ids"] = load_flipped_ids(tmp_path / "f.json") == ds.flipped_ids()
    ok = same and all(trips.values())
    report(7, "determinism + artifact round-trip", ok,
           f"sweep re-run byte-identical: {same}; round-trips: "
           + ", ".join(f"{k}={'ok' if v else 'FAIL'}" for k, v in trips.items()))
    assert ok

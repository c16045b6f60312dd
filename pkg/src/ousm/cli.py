"""Command-line entry point: ``ousm <subcommand> [--seed N] [--config FILE] [--out DIR]``.

The config file is a flat JSON object whose keys are TrainConfig,
SyntheticSpec and NoiseSpec field names (``noise_mode`` for the noise mode),
plus ``gammas``, ``n_seeds`` and ``methods`` for sweeps.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import fields, replace

from . import presets
from .dataset import load_csv, save_csv
from .errors import InvalidArgument, InvalidData, TrainingDiverged
from .harness import (METHODS, format_grid, load_grid, method_config, run_gamma_sweep,
                      run_memorization, validate_gammas, write_json)
from .model import save_checkpoint
from .noise import NoiseSpec, corrupt, noise_report, save_flipped_ids
from .synthetic import SyntheticSpec, generate_synthetic
from .trainer import TrainConfig, train

EXIT_USAGE = 2
EXIT_FAILURE = 1


class UsageError(Exception):
    pass


def _field_names(cls):
    return {f.name for f in fields(cls)}


def load_config(path):
    if path is None:
        return {}
    with open(path) as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict) or any(isinstance(v, dict) for v in doc.values()):
        raise InvalidArgument("config must be a flat JSON object")
    known = (_field_names(TrainConfig) | _field_names(SyntheticSpec)
             | {"gamma", "noise_mode", "aux_train_fraction", "gammas", "n_seeds", "methods"})
    unknown = sorted(set(doc) - known)
    if unknown:
        raise InvalidArgument(f"unknown config keys: {unknown}")
    return doc


def _pick(cls, doc, base):
    names = _field_names(cls) - {"seed"}
    return replace(base, **{k: v for k, v in doc.items() if k in names})


def build(doc, seed, experiment="sweep"):
    spec = _pick(SyntheticSpec, doc, presets.default_spec(seed))
    base_cfg = presets.memorization_config() if experiment == "memorize" else presets.sweep_config()
    cfg = _pick(TrainConfig, doc, replace(base_cfg, seed=seed))
    noise = NoiseSpec(doc.get("gamma", 0.0), doc.get("noise_mode", "random_symmetric"),
                      doc.get("aux_train_fraction", 0.28), seed)
    return spec, cfg, noise


def _out(args):
    os.makedirs(args.out, exist_ok=True)
    return args.out


def cmd_generate(args, doc):
    spec, _, _ = build(doc, args.seed)
    train_set, test_set, hard = generate_synthetic(spec)
    out = _out(args)
    save_csv(train_set, os.path.join(out, "train.csv"))
    save_csv(test_set, os.path.join(out, "test.csv"))
    write_json(os.path.join(out, "spec.json"), spec.to_dict())
    write_json(os.path.join(out, "hard_ids.json"),
               [int(i) for i in train_set.sample_ids[hard]])
    print(f"wrote {len(train_set)} train / {len(test_set)} test samples to {out}")


def cmd_corrupt(args, doc):
    _, cfg, noise = build(doc, args.seed)
    if args.gamma is not None:
        noise = replace(noise, gamma=args.gamma)
    if args.mode is not None:
        noise = replace(noise, mode=args.mode)
    data = load_csv(args.data)
    noisy, flipped = corrupt(data, noise, config=cfg)
    out = _out(args)
    save_csv(noisy, os.path.join(out, "train_noisy.csv"))
    save_flipped_ids(flipped, os.path.join(out, "flipped_ids.json"))
    write_json(os.path.join(out, "noise_report.json"), noise_report(noisy))
    print(json.dumps(noise_report(noisy), sort_keys=True))


def cmd_train(args, doc):
    spec, cfg, noise = build(doc, args.seed)
    if args.gamma is not None:
        noise = replace(noise, gamma=args.gamma)
    if args.data:
        data = load_csv(args.data)
        test_set = load_csv(args.test) if args.test else None
    else:
        clean, test_set, _ = generate_synthetic(spec)
        data, _ = corrupt(clean, noise, config=cfg)
    cfg = method_config(args.method, cfg, args.seed)
    model, tlog, lam = train(data, test_set, cfg)
    out = _out(args)
    save_checkpoint(model, os.path.join(out, "model.json"))
    tlog.to_csv(os.path.join(out, "trainlog.csv"))
    tlog.snapshots_to_json(os.path.join(out, "lambda.json"))
    summary = {"method": args.method, "seed": args.seed,
               "train_acc": tlog.train_acc[-1], "test_acc": tlog.test_acc[-1],
               "config": cfg.to_dict()}
    write_json(os.path.join(out, "metrics.json"), summary)
    print(json.dumps({k: summary[k] for k in ("method", "train_acc", "test_acc")}))


def cmd_sweep(args, doc):
    spec, cfg, noise = build(doc, args.seed)
    gammas = args.gammas if args.gammas is not None else doc.get("gammas", list(presets.DEFAULT_GAMMAS))
    methods = args.methods or doc.get("methods", list(METHODS))
    n_seeds = args.n_seeds or doc.get("n_seeds", 5)
    validate_gammas(gammas)
    for m in methods:
        if m not in METHODS:
            raise InvalidArgument(f"unknown method {m!r}")
    res = run_gamma_sweep(spec, methods, gammas, n_seeds, cfg, master_seed=args.seed,
                          noise_mode=noise.mode)
    res.to_dir(_out(args))
    print(format_grid(res.grid, methods, gammas))


def cmd_memorize(args, doc):
    spec, cfg, noise = build(doc, args.seed, experiment="memorize")
    gammas = args.gammas if args.gammas is not None else doc.get("gammas", list(presets.DEFAULT_GAMMAS))
    n_seeds = args.n_seeds or doc.get("n_seeds", 1)
    validate_gammas(gammas)
    res = run_memorization(spec, gammas, cfg, n_seeds, args.seed, noise.mode)
    out = _out(args)
    res.to_csv(os.path.join(out, "memorization.csv"))
    summary = {gk: {"final_train_acc": float(res.mean_curve(float(gk), "train_acc")[-1]),
                    "final_test_acc": float(res.mean_curve(float(gk), "test_acc")[-1])}
               for gk in sorted({g for g, _ in res.curves}, key=float)}
    write_json(os.path.join(out, "summary.json"), summary)
    print(json.dumps(summary, sort_keys=True))


def cmd_report(args, doc):
    grid = load_grid(args.out)
    table = format_grid(grid)
    with open(os.path.join(args.out, "table.md"), "w") as fh:
        fh.write(table + "\n")
    print(table)


def _gamma_list(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")


def make_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--config", default=argparse.SUPPRESS)
    common.add_argument("--out", default=argparse.SUPPRESS)

    p = argparse.ArgumentParser(prog="ousm", description=__doc__.splitlines()[0])
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--config", default=None, help="flat JSON config file")
    p.add_argument("--out", default="out", help="output directory")
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("generate", parents=[common], help="write a synthetic train/test pair")

    c = sub.add_parser("corrupt", parents=[common], help="inject label noise into a dataset CSV")
    c.add_argument("--data", required=True)
    c.add_argument("--gamma", type=float)
    c.add_argument("--mode", choices=["random_symmetric", "difficulty_ranked"])

    t = sub.add_parser("train", parents=[common], help="train one model")
    t.add_argument("--data", help="training CSV; synthetic data is generated if omitted")
    t.add_argument("--test", help="clean test CSV")
    t.add_argument("--gamma", type=float, help="noise ratio for generated data")
    t.add_argument("--method", choices=sorted(METHODS), default="full")

    for name, helptext in (("sweep", "accuracy grid over methods and noise ratios"),
                           ("memorize", "plain-CE learning curves per noise ratio")):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("--gammas", type=_gamma_list)
        s.add_argument("--n-seeds", type=int)
        if name == "sweep":
            s.add_argument("--methods", type=lambda t: t.split(","))

    sub.add_parser("report", parents=[common], help="format grid.json in --out as a table")
    return p


COMMANDS = {"generate": cmd_generate, "corrupt": cmd_corrupt, "train": cmd_train,
            "sweep": cmd_sweep, "memorize": cmd_memorize, "report": cmd_report}


def _fail(kind, message, code):
    print("error: " + json.dumps({"type": kind, "message": message}), file=sys.stderr)
    return code


def main(argv=None):
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        doc = load_config(args.config)
        COMMANDS[args.command](args, doc)
    except (InvalidArgument, UsageError) as exc:
        return _fail(type(exc).__name__, str(exc), EXIT_USAGE)
    except (InvalidData, TrainingDiverged, OSError) as exc:
        return _fail(type(exc).__name__, str(exc), EXIT_FAILURE)
    return 0


if __name__ == "__main__":
    sys.exit(main())

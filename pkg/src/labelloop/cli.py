"""Command-line front end: single runs, sweeps, ablation matrices, inspection.

Configuration comes from a flat JSON file (``--config``) and/or flags; a flag
always overrides the file. Exit codes: 0 success, 2 invalid configuration,
3 malformed data file.
"""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import engine
from .data import (
    ConfigError,
    FormatError,
    SplitSpec,
    generate_synthetic,
    make_rng,
    read_embedding_file,
)
from .engine import AblationFlags, CealSchedule, run_al, summarize, write_record_csv
from .linear import TrainConfig
from .strategies import STRATEGY_NAMES

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_FORMAT = 3

DEFAULTS = {
    "data": None,
    "synthetic": None,
    "strategy": "mal",
    "strategies": None,
    "shots": 10,
    "seeds": [1, 2, 3],
    "jobs": 1,
    "out": "results",
    "lr": 0.0004,
    "batch": 128,
    "epochs": 200,
    "wd": 0.0005,
    "train_fraction": 0.8,
    "ablate_no_pseudo": False,
    "ablate_no_subarrays": False,
    "ablate_entropy_only": False,
    "baseline_seed": False,
    "feature_noise": 0.0,
    "ceal_delta0": None,
    "ceal_decay": None,
    "data_seed": 7,
}


def _parse_seeds(value) -> list[int]:
    if isinstance(value, list):
        return [int(v) for v in value]
    return [int(v) for v in str(value).split(",") if v.strip() != ""]


def _parse_synthetic(value) -> dict:
    """Parse "k=9,per_class=200,dim=32,sep=8" into generator arguments."""
    if isinstance(value, dict):
        spec = dict(value)
    else:
        spec = {}
        for part in str(value).split(","):
            if "=" not in part:
                raise ConfigError(f"bad synthetic spec item {part!r}, expected key=value")
            key, raw = part.split("=", 1)
            spec[key.strip()] = raw.strip()
    try:
        return {
            "k_classes": int(spec["k"]),
            "per_class": int(spec["per_class"]),
            "dim": int(spec["dim"]),
            "separation": float(spec.get("sep", 0.0)),
        }
    except KeyError as missing:
        raise ConfigError(f"synthetic spec needs k, per_class, dim (missing {missing})")


def _add_run_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file; flags override its keys")
    p.add_argument("--data", help="embedding file to load")
    p.add_argument("--synthetic", help='synthetic spec, e.g. "k=9,per_class=200,dim=32,sep=8"')
    p.add_argument("--shots", type=int)
    p.add_argument("--seeds", help="comma-separated run seeds, e.g. 1,2,3")
    p.add_argument("--jobs", type=int, help="worker threads for independent runs")
    p.add_argument("--out", help="output directory")
    p.add_argument("--lr", type=float, help="head learning rate")
    p.add_argument("--batch", type=int, help="head batch size")
    p.add_argument("--epochs", type=int, help="head training epochs")
    p.add_argument("--wd", type=float, help="head weight decay")
    p.add_argument("--train-fraction", type=float, dest="train_fraction")
    p.add_argument("--ablate-no-pseudo", action="store_true", default=None,
                   dest="ablate_no_pseudo", help="drop the pseudo-label guard")
    p.add_argument("--ablate-no-subarrays", action="store_true", default=None,
                   dest="ablate_no_subarrays", help="plain top-K instead of sub-arrays")
    p.add_argument("--ablate-entropy-only", action="store_true", default=None,
                   dest="ablate_entropy_only", help="rank by entropy instead of margin-entropy")
    p.add_argument("--baseline-seed", action="store_true", default=None, dest="baseline_seed",
                   help="give baselines a random K-sample first batch instead of k-means")
    p.add_argument("--feature-noise", type=float, dest="feature_noise",
                   help="std of Gaussian noise added to features")
    p.add_argument("--ceal-delta0", type=float, dest="ceal_delta0")
    p.add_argument("--ceal-decay", type=float, dest="ceal_decay")
    p.add_argument("--data-seed", type=int, dest="data_seed",
                   help="seed for synthetic dataset generation")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="labelloop",
        description="Active-learning runs over pre-extracted feature embeddings.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one strategy over one or more seeds")
    _add_run_options(p_run)
    p_run.add_argument("--strategy", choices=STRATEGY_NAMES)

    p_sweep = sub.add_parser("sweep", help="run several strategies over the seeds")
    _add_run_options(p_sweep)
    p_sweep.add_argument("--strategies", help="comma-separated strategy names")

    p_ablate = sub.add_parser("ablate", help="full strategy plus one-component-off variants")
    _add_run_options(p_ablate)

    p_inspect = sub.add_parser("inspect", help="print an embedding file's header")
    p_inspect.add_argument("--data", required=True)
    return parser


def _effective_config(args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        path = Path(args.config)
        if not path.exists():
            raise ConfigError(f"config file {path} does not exist")
        with open(path) as fh:
            try:
                file_cfg = json.load(fh)
            except json.JSONDecodeError as err:
                raise ConfigError(f"config file is not valid JSON: {err}")
        unknown = set(file_cfg) - set(DEFAULTS) - {"strategy", "strategies"}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(file_cfg)
    for key in list(DEFAULTS) + ["strategy", "strategies"]:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    cfg["seeds"] = _parse_seeds(cfg["seeds"])
    if not cfg["seeds"]:
        raise ConfigError("seeds must be non-empty")
    return cfg


def _load_dataset(cfg: dict):
    if cfg.get("data") and cfg.get("synthetic"):
        raise ConfigError("give either --data or --synthetic, not both")
    if cfg.get("data"):
        path = Path(cfg["data"])
        if not path.exists():
            raise ConfigError(f"data file {path} does not exist")
        return read_embedding_file(path)
    if cfg.get("synthetic"):
        params = _parse_synthetic(cfg["synthetic"])
        return generate_synthetic(rng=make_rng(cfg["data_seed"]), **params)
    raise ConfigError("one of --data or --synthetic is required")


def _run_matrix(dataset, cfg: dict, jobs: list[tuple[str, int, AblationFlags, str]], out_dir: Path) -> int:
    """Execute (strategy, seed) runs, possibly in parallel, then write all
    CSVs and the summary from a single thread."""
    train_config = TrainConfig(
        learning_rate=cfg["lr"],
        batch_size=cfg["batch"],
        epochs=cfg["epochs"],
        weight_decay=cfg["wd"],
    )
    ceal = CealSchedule(cfg["ceal_delta0"], cfg["ceal_decay"])

    def one(job):
        strategy, seed, ablation, label = job
        record = run_al(
            dataset,
            SplitSpec(cfg["train_fraction"], seed),
            strategy,
            cfg["shots"],
            train_config,
            seed,
            ablation=ablation,
            baseline_seed=cfg["baseline_seed"],
            ceal_schedule=ceal,
        )
        record.strategy = label  # distinguishes ablation variants in outputs
        return record

    workers = max(1, int(cfg["jobs"]))
    if workers == 1:
        records = [one(job) for job in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(one, jobs))

    out_dir.mkdir(parents=True, exist_ok=True)
    records.sort(key=lambda r: (r.strategy, r.seed))
    for record in records:
        write_record_csv(record, out_dir / f"results_{record.strategy}_{record.seed}.csv")
    summary = summarize(records)
    summary["shots"] = cfg["shots"]
    with open(out_dir / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    for name, block in summary["strategies"].items():
        last = block["cycles"][-1]
        print(
            f"{name}: accuracy {last['accuracy_mean']:.4f} +- {last['accuracy_std']:.4f}, "
            f"macro F1 {last['macro_f1_mean']:.4f} +- {last['macro_f1_std']:.4f} "
            f"at {last['labels_used']} labels over {len(block['seeds'])} seed(s)"
        )
    return EXIT_OK


def _base_ablation(cfg: dict) -> AblationFlags:
    return AblationFlags(
        no_pseudo_guard=bool(cfg["ablate_no_pseudo"]),
        no_subarrays=bool(cfg["ablate_no_subarrays"]),
        entropy_only=bool(cfg["ablate_entropy_only"]),
        feature_noise=float(cfg["feature_noise"]),
    )


def cmd_run(args) -> int:
    cfg = _effective_config(args)
    dataset = _load_dataset(cfg)
    strategy = cfg.get("strategy") or "mal"
    if strategy not in STRATEGY_NAMES:
        raise ConfigError(f"unknown strategy {strategy!r}")
    ablation = _base_ablation(cfg)
    jobs = [(strategy, seed, ablation, strategy) for seed in cfg["seeds"]]
    return _run_matrix(dataset, cfg, jobs, Path(cfg["out"]))


def cmd_sweep(args) -> int:
    cfg = _effective_config(args)
    dataset = _load_dataset(cfg)
    names = cfg.get("strategies") or ",".join(STRATEGY_NAMES)
    if isinstance(names, str):
        names = [s.strip() for s in names.split(",") if s.strip()]
    for name in names:
        if name not in STRATEGY_NAMES:
            raise ConfigError(f"unknown strategy {name!r}")
    ablation = _base_ablation(cfg)
    jobs = [(name, seed, ablation, name) for name in names for seed in cfg["seeds"]]
    return _run_matrix(dataset, cfg, jobs, Path(cfg["out"]))


def cmd_ablate(args) -> int:
    """Full flagship strategy plus each single-component ablation."""
    cfg = _effective_config(args)
    dataset = _load_dataset(cfg)
    noise = float(cfg["feature_noise"])
    variants = [
        ("mal", AblationFlags()),
        ("mal-noguard", AblationFlags(no_pseudo_guard=True)),
        ("mal-nosub", AblationFlags(no_subarrays=True)),
        ("mal-entropy", AblationFlags(entropy_only=True)),
    ]
    if noise > 0:
        variants.append(("mal-noisy", AblationFlags(feature_noise=noise)))
    jobs = [
        ("mal", seed, ablation, label)
        for label, ablation in variants
        for seed in cfg["seeds"]
    ]
    return _run_matrix(dataset, cfg, jobs, Path(cfg["out"]))


def cmd_inspect(args) -> int:
    if not Path(args.data).exists():
        raise ConfigError(f"data file {args.data} does not exist")
    dataset = read_embedding_file(args.data)
    known = dataset.labels >= 0
    print(f"file:      {args.data}")
    print(f"samples:   {dataset.n}")
    print(f"dimension: {dataset.dim}")
    print(f"k_classes: {dataset.k_classes}")
    print(f"labelled:  {int(known.sum())} ({int((~known).sum())} unknown)")
    if known.any():
        counts = np.bincount(dataset.labels[known], minlength=dataset.k_classes)
        print("per-class:", " ".join(f"{c}:{n}" for c, n in enumerate(counts)))
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {"run": cmd_run, "sweep": cmd_sweep, "ablate": cmd_ablate, "inspect": cmd_inspect}
    try:
        return handlers[args.command](args)
    except FormatError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_FORMAT
    except (ConfigError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG


def entrypoint() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())

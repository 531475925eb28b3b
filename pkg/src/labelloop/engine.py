"""The closed active-learning loop: cold start, retrain, refresh, query, label.

One run is sequential. All randomness flows through a single generator seeded
from the run seed, drawn in a fixed order: (1) feature noise, if any; (2) the
cycle-1 cold start (k-means init, or the random seed batch for baselines in
seed-initialized mode); then per cycle (3) strategy draws for the stochastic
baselines and (4) head initialisation and mini-batch shuffling. The train/test
split has its own seed inside :class:`SplitSpec` so every strategy sees the
same partition. Given (dataset, config, seed) the resulting record, and the
CSV written from it, are bit-identical across re-runs.
"""
from __future__ import annotations

import hashlib
import io
import json
import time
from dataclasses import dataclass, field, asdict

import numpy as np

from . import linear, strategies
from .cluster import cold_start_query, kmeans
from .data import ConfigError, EmbeddingDataset, SplitSpec, make_rng, split
from .linear import LinearHead, TrainConfig


@dataclass
class AblationFlags:
    """Switches that remove one component each from the flagship strategy."""

    no_pseudo_guard: bool = False
    no_subarrays: bool = False
    entropy_only: bool = False
    #: Std of Gaussian noise added to all features (degrades the embedding).
    feature_noise: float = 0.0


@dataclass
class CealSchedule:
    """Entropy threshold for CEAL's free pseudo-labels: delta_t = delta0 - t*decay.

    Defaults scale with ln(K) (the entropy range) and are tuned for desk-scale
    pools; both knobs are exposed in the run config.
    """

    delta0: float | None = None
    decay: float | None = None

    def threshold(self, cycle: int, k_classes: int) -> float:
        ln_k = float(np.log(k_classes))
        d0 = 0.05 * ln_k if self.delta0 is None else self.delta0
        dd = 0.0033 * ln_k if self.decay is None else self.decay
        return d0 - cycle * dd


@dataclass
class LabelledSample:
    index: int
    label: int
    #: True when the label came from the classifier, not the oracle.
    pseudo: bool = False


class Oracle:
    """Ground-truth label source with a hard budget."""

    def __init__(self, dataset: EmbeddingDataset, budget: int):
        self._labels = dataset.labels
        self.budget_remaining = int(budget)
        self.calls = 0

    def answer(self, index: int) -> int:
        if self.budget_remaining <= 0:
            raise ConfigError("oracle budget exhausted")
        label = int(self._labels[index])
        if label < 0:
            raise ConfigError(f"sample {index} has no ground-truth label")
        self.budget_remaining -= 1
        self.calls += 1
        return label


@dataclass
class PoolState:
    """Disjoint unlabelled/labelled index sets plus current pseudo-labels."""

    unlabelled: list[int]
    labelled: list[LabelledSample] = field(default_factory=list)
    pseudo: dict[int, int] = field(default_factory=dict)
    cycle: int = 0

    def apply_query(self, indices, labels) -> None:
        moving = set(int(i) for i in indices)
        if len(moving) != len(indices):
            raise ConfigError("query indices must be distinct")
        if not moving.issubset(self.unlabelled):
            raise ConfigError("query must come from the unlabelled pool")
        self.unlabelled = [i for i in self.unlabelled if i not in moving]
        for i, y in zip(indices, labels):
            self.labelled.append(LabelledSample(int(i), int(y)))
        self.pseudo = {i: p for i, p in self.pseudo.items() if i not in moving}
        self.cycle += 1

    def labelled_indices(self) -> list[int]:
        return [s.index for s in self.labelled]


@dataclass
class CycleRecord:
    cycle: int
    labels_used: int
    accuracy: float
    macro_f1: float
    fallback: bool
    wall_time_s: float


@dataclass
class RunRecord:
    strategy: str
    seed: int
    config_hash: str
    #: "feature-based" (k-means cold start) or "seed-initialized" (random batch).
    mode: str
    rows: list[CycleRecord] = field(default_factory=list)


def confusion_matrix(y_true, y_pred, k_classes: int) -> np.ndarray:
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    cm = np.zeros((k_classes, k_classes), dtype=np.int64)
    np.add.at(cm, (y_true, y_pred), 1)
    return cm


def metrics_from_confusion(cm: np.ndarray) -> tuple[float, float]:
    """(accuracy, macro F1). Per-class F1 is 0 when precision + recall is 0;
    the macro average is unweighted over all classes."""
    cm = np.asarray(cm, dtype=np.float64)
    total = cm.sum()
    if total == 0:
        raise ConfigError("empty confusion matrix")
    accuracy = float(np.trace(cm) / total)
    f1s = []
    for c in range(cm.shape[0]):
        tp = cm[c, c]
        fp = cm[:, c].sum() - tp
        fn = cm[c, :].sum() - tp
        precision = tp / (tp + fp) if tp + fp > 0 else 0.0
        recall = tp / (tp + fn) if tp + fn > 0 else 0.0
        f1s.append(2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0)
    return accuracy, float(np.mean(f1s))


def evaluate(head: LinearHead, dataset: EmbeddingDataset, test_indices) -> tuple[float, float]:
    """Test accuracy and macro F1 of the head on the given samples."""
    idx = np.asarray(test_indices, dtype=np.int64)
    if idx.size == 0:
        raise ConfigError("empty test set")
    probs = linear.predict_proba(head, dataset.features[idx])
    preds = np.argmax(probs, axis=1)
    cm = confusion_matrix(dataset.labels[idx], preds, head.k_classes)
    return metrics_from_confusion(cm)


def ceal_augment(
    training_set: list[LabelledSample], high_confidence: list[tuple[int, int]]
) -> list[LabelledSample]:
    """Append this cycle's free pseudo-labelled samples to a copy of the
    training set; the copies carry the pseudo provenance flag."""
    augmented = list(training_set)
    for index, label in high_confidence:
        augmented.append(LabelledSample(int(index), int(label), pseudo=True))
    return augmented


def _evaluate_features(head, X_test, y_test, k_classes) -> tuple[float, float]:
    probs = linear.predict_proba(head, X_test)
    preds = np.argmax(probs, axis=1)
    return metrics_from_confusion(confusion_matrix(y_test, preds, k_classes))


def config_hash(payload: dict) -> str:
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()[:12]


def run_al(
    dataset: EmbeddingDataset,
    split_spec: SplitSpec,
    strategy: str,
    shots: int,
    train_config: TrainConfig,
    seed: int,
    ablation: AblationFlags | None = None,
    baseline_seed: bool = False,
    ceal_schedule: CealSchedule | None = None,
    audit=None,
) -> RunRecord:
    """Run ``shots`` active-learning cycles and record per-cycle test metrics.

    Each cycle queries exactly K = dataset.k_classes samples, so the total
    label budget is shots * K. Cycle 1 has no trained model: the query comes
    from k-means prototypes over the training features (or, for baselines in
    seed-initialized mode, a uniform random batch). Every later cycle scores
    the pool with the current head, selects with the strategy, pays the
    oracle, then retrains a fresh Xavier-initialised head on everything
    labelled so far and evaluates it on the held-out test split.

    ``audit``, if given, is called as ``audit(pool, oracle)`` after each
    cycle's bookkeeping; it must not mutate either (observer for tests).
    """
    if strategy not in strategies.STRATEGY_NAMES:
        raise ConfigError(f"unknown strategy {strategy!r}")
    if shots < 1:
        raise ConfigError(f"shots must be >= 1, got {shots}")
    ablation = ablation or AblationFlags()
    ceal_schedule = ceal_schedule or CealSchedule()
    k = dataset.k_classes
    budget = shots * k

    train_idx, test_idx = split(dataset, split_spec)
    if len(train_idx) < budget:
        raise ConfigError(
            f"budget {budget} exceeds the training pool of {len(train_idx)} samples"
        )
    if len(test_idx) == 0:
        raise ConfigError("test split is empty; lower train_fraction")

    rng = make_rng(seed)
    features = dataset.features.astype(np.float64)
    if ablation.feature_noise > 0:
        features = features + ablation.feature_noise * rng.standard_normal(features.shape)

    hash_payload = {
        "strategy": strategy,
        "shots": shots,
        "seed": seed,
        "split": [split_spec.train_fraction, split_spec.seed],
        "train": asdict(train_config),
        "ablation": asdict(ablation),
        "baseline_seed": baseline_seed,
        "k_classes": k,
        "n": dataset.n,
        "dim": dataset.dim,
    }

    oracle = Oracle(dataset, budget)
    pool = PoolState(unlabelled=[int(i) for i in train_idx])
    seeded = baseline_seed and strategy != "mal"
    record = RunRecord(
        strategy=strategy,
        seed=seed,
        config_hash=config_hash(hash_payload),
        mode="seed-initialized" if seeded else "feature-based",
    )

    head = None
    pool_probas = None  # probabilities over pool.unlabelled, row-aligned
    for cycle in range(1, shots + 1):
        t0 = time.perf_counter()
        if cycle == 1:
            if seeded:
                q_idx = rng.choice(train_idx, size=k, replace=False).tolist()
            else:
                km = kmeans(features[train_idx], k, rng)
                q_idx = train_idx[cold_start_query(km, features[train_idx])].tolist()
            plan = strategies.QueryPlan([int(i) for i in q_idx])
        else:
            plan = _select(
                strategy, pool, pool_probas, features, k, rng, cycle, ablation, ceal_schedule
            )
        answers = [oracle.answer(i) for i in plan.query]
        pool.apply_query(plan.query, answers)

        training_set = pool.labelled
        if strategy == "ceal" and plan.confident:
            still_unlabelled = set(pool.unlabelled)
            fresh = [(i, p) for i, p in plan.confident if i in still_unlabelled]
            training_set = ceal_augment(pool.labelled, fresh)

        tr_idx = np.array([s.index for s in training_set], dtype=np.int64)
        tr_y = np.array([s.label for s in training_set], dtype=np.int64)
        head = linear.train(
            linear.init_xavier(dataset.dim, k, rng),
            features[tr_idx],
            tr_y,
            train_config,
            rng,
        )
        accuracy, f1 = _evaluate_features(
            head, features[test_idx], dataset.labels[test_idx], k
        )

        pool_arr = np.asarray(pool.unlabelled, dtype=np.int64)
        pool_probas = linear.predict_proba(head, features[pool_arr])
        pool.pseudo = {
            int(i): int(c) for i, c in zip(pool_arr, np.argmax(pool_probas, axis=1))
        }
        record.rows.append(
            CycleRecord(
                cycle=cycle,
                labels_used=cycle * k,
                accuracy=accuracy,
                macro_f1=f1,
                fallback=plan.fallback_triggered,
                wall_time_s=time.perf_counter() - t0,
            )
        )
        if audit is not None:
            audit(pool, oracle)
    return record


def _select(strategy, pool, pool_probas, features, k, rng, cycle, ablation, ceal_schedule):
    pool_arr = np.asarray(pool.unlabelled, dtype=np.int64)
    if strategy == "mal":
        score = "entropy" if ablation.entropy_only else "margin_entropy"
        ranked = strategies.rank_pool(pool_probas, k, score=score)
        if ablation.no_subarrays:
            return strategies.top_k_select(ranked, k, pool_indices=pool_arr)
        pseudo = np.array([pool.pseudo[int(i)] for i in pool_arr])
        return strategies.mal_select(
            ranked, pseudo, k, pool_indices=pool_arr, use_guard=not ablation.no_pseudo_guard
        )
    threshold = None
    if strategy == "ceal":
        threshold = ceal_schedule.threshold(cycle, pool_probas.shape[1])
    return strategies.baseline_select(
        strategy,
        pool_probas,
        k,
        rng,
        pool_indices=pool_arr,
        features=features[pool_arr] if strategy == "kmeans" else None,
        ceal_threshold=threshold,
    )


CSV_COLUMNS = ("cycle", "labels_used", "accuracy", "macro_f1", "fallback")


def record_to_csv(record: RunRecord) -> str:
    """CSV payload for one run, one row per cycle.

    Floats are written with ``repr`` (shortest round-trip form) and wall time
    is left out, so re-running an identical config reproduces the file
    byte-for-byte.
    """
    buf = io.StringIO()
    buf.write(",".join(CSV_COLUMNS) + "\n")
    for row in record.rows:
        buf.write(
            f"{row.cycle},{row.labels_used},{row.accuracy!r},{row.macro_f1!r},{int(row.fallback)}\n"
        )
    return buf.getvalue()


def write_record_csv(record: RunRecord, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(record_to_csv(record))


def summarize(records: list[RunRecord]) -> dict:
    """Cross-seed summary: per strategy and cycle, the mean and sample
    standard deviation (n-1 denominator; 0.0 for a single seed) of accuracy
    and macro F1. Everything is recomputable from the per-run CSVs."""
    by_strategy: dict[str, list[RunRecord]] = {}
    for rec in records:
        by_strategy.setdefault(rec.strategy, []).append(rec)
    out: dict = {"strategies": {}}
    for name, recs in sorted(by_strategy.items()):
        recs = sorted(recs, key=lambda r: r.seed)
        n_cycles = len(recs[0].rows)
        cycles = []
        for ci in range(n_cycles):
            acc = np.array([r.rows[ci].accuracy for r in recs])
            f1 = np.array([r.rows[ci].macro_f1 for r in recs])
            cycles.append(
                {
                    "cycle": recs[0].rows[ci].cycle,
                    "labels_used": recs[0].rows[ci].labels_used,
                    "accuracy_mean": float(acc.mean()),
                    "accuracy_std": float(acc.std(ddof=1)) if len(acc) > 1 else 0.0,
                    "macro_f1_mean": float(f1.mean()),
                    "macro_f1_std": float(f1.std(ddof=1)) if len(f1) > 1 else 0.0,
                }
            )
        out["strategies"][name] = {
            "seeds": [r.seed for r in recs],
            "mode": recs[0].mode,
            "config_hash": recs[0].config_hash,
            "cycles": cycles,
        }
    return out

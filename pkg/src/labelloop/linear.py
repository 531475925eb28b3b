"""One-layer softmax classifier trained with Adam on the labelled set.

The head is deliberately shallow: with a handful of labels per class anything
deeper overfits. Weights are float64 throughout and every training run is a
pure function of ``(initial head, data, config, rng state)``, so retraining
with the same seed reproduces bit-identical weights.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, replace

import numpy as np

from .data import ConfigError

#: Log-probabilities are clamped here when evaluating the loss.
LOGP_FLOOR = -50.0

WEIGHTS_MAGIC = b"MALW"
_W_HEADER = struct.Struct("<4sIII")  # magic, version, k_classes, d


class ColdStartRequired(RuntimeError):
    """Raised when training is requested with an empty labelled set."""


@dataclass
class TrainConfig:
    learning_rate: float = 0.0004
    batch_size: int = 128
    epochs: int = 200
    weight_decay: float = 0.0005
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ConfigError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.epochs < 1:
            raise ConfigError(f"epochs must be >= 1, got {self.epochs}")
        if self.weight_decay < 0:
            raise ConfigError(f"weight_decay must be >= 0, got {self.weight_decay}")


@dataclass
class AdamState:
    """First/second moment estimates for W and b, plus the step counter."""

    m_w: np.ndarray
    v_w: np.ndarray
    m_b: np.ndarray
    v_b: np.ndarray
    step: int = 0

    @classmethod
    def zeros(cls, k_classes: int, dim: int) -> "AdamState":
        return cls(
            m_w=np.zeros((k_classes, dim)),
            v_w=np.zeros((k_classes, dim)),
            m_b=np.zeros(k_classes),
            v_b=np.zeros(k_classes),
        )


@dataclass
class LinearHead:
    """Softmax classifier: probabilities = softmax(W @ f + b)."""

    W: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        self.W = np.asarray(self.W, dtype=np.float64)
        self.b = np.asarray(self.b, dtype=np.float64)
        if self.W.ndim != 2 or self.b.shape != (self.W.shape[0],):
            raise ConfigError("W must be (k_classes, d) and b length k_classes")

    @property
    def k_classes(self) -> int:
        return self.W.shape[0]

    @property
    def dim(self) -> int:
        return self.W.shape[1]

    def copy(self) -> "LinearHead":
        return LinearHead(self.W.copy(), self.b.copy())


def init_xavier(dim: int, k_classes: int, rng: np.random.Generator) -> LinearHead:
    """Fresh head: W ~ Uniform(+-sqrt(6/(d + k_classes))), b = 0."""
    if dim < 1 or k_classes < 1:
        raise ConfigError("dim and k_classes must be >= 1")
    bound = np.sqrt(6.0 / (dim + k_classes))
    W = rng.uniform(-bound, bound, size=(k_classes, dim))
    return LinearHead(W, np.zeros(k_classes))


def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def predict_proba(head: LinearHead, features) -> np.ndarray:
    """Class probabilities for one feature row or a matrix of rows.

    Computed with max-logit subtraction; each output row sums to 1.
    """
    X = np.asarray(features, dtype=np.float64)
    single = X.ndim == 1
    if single:
        X = X[None, :]
    if X.shape[1] != head.dim:
        raise ConfigError(f"feature dimension {X.shape[1]} != head dimension {head.dim}")
    probs = _softmax(X @ head.W.T + head.b)
    return probs[0] if single else probs


def loss_and_grads(
    head: LinearHead, X: np.ndarray, y: np.ndarray, weight_decay: float
) -> tuple[float, np.ndarray, np.ndarray]:
    """Mean cross-entropy + weight_decay * ||W||^2, with analytic gradients.

    The L2 penalty applies to W only, never to the bias. Log-probabilities are
    clamped at ``LOGP_FLOOR`` in the loss value.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    n = X.shape[0]
    logits = X @ head.W.T + head.b
    logp = logits - logits.max(axis=1, keepdims=True)
    logp = logp - np.log(np.exp(logp).sum(axis=1, keepdims=True))
    probs = np.exp(logp)
    ce = -np.maximum(logp[np.arange(n), y], LOGP_FLOOR).mean()
    loss = ce + weight_decay * float((head.W**2).sum())

    dlogits = probs
    dlogits[np.arange(n), y] -= 1.0
    dlogits /= n
    dW = dlogits.T @ X + 2.0 * weight_decay * head.W
    db = dlogits.sum(axis=0)
    return float(loss), dW, db


def _adam_step(head: LinearHead, state: AdamState, dW, db, cfg: TrainConfig) -> None:
    state.step += 1
    b1, b2 = cfg.beta1, cfg.beta2
    state.m_w = b1 * state.m_w + (1 - b1) * dW
    state.v_w = b2 * state.v_w + (1 - b2) * dW**2
    state.m_b = b1 * state.m_b + (1 - b1) * db
    state.v_b = b2 * state.v_b + (1 - b2) * db**2
    c1 = 1 - b1**state.step
    c2 = 1 - b2**state.step
    head.W -= cfg.learning_rate * (state.m_w / c1) / (np.sqrt(state.v_w / c2) + cfg.eps)
    head.b -= cfg.learning_rate * (state.m_b / c1) / (np.sqrt(state.v_b / c2) + cfg.eps)


def train(
    head: LinearHead,
    X,
    y,
    config: TrainConfig,
    rng: np.random.Generator,
    loss_history: list | None = None,
) -> LinearHead:
    """Optimise a copy of ``head`` on the labelled set, and return it.

    Runs ``config.epochs`` passes of shuffled mini-batches. When the labelled
    set is smaller than the batch size, each epoch is a single full batch (the
    common case in the first few cycles). If ``loss_history`` is given, the
    full-set loss after each epoch is appended to it.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    n = X.shape[0]
    if n == 0:
        raise ColdStartRequired("labelled set is empty; run the clustering cold start instead")
    if X.shape[1] != head.dim:
        raise ConfigError(f"feature dimension {X.shape[1]} != head dimension {head.dim}")
    if np.any(y < 0) or np.any(y >= head.k_classes):
        raise ConfigError("labels must lie in [0, k_classes)")

    out = head.copy()
    state = AdamState.zeros(head.k_classes, head.dim)
    full_batch = n <= config.batch_size
    for _ in range(config.epochs):
        if full_batch:
            _, dW, db = loss_and_grads(out, X, y, config.weight_decay)
            _adam_step(out, state, dW, db, config)
        else:
            order = rng.permutation(n)
            for start in range(0, n, config.batch_size):
                idx = order[start : start + config.batch_size]
                _, dW, db = loss_and_grads(out, X[idx], y[idx], config.weight_decay)
                _adam_step(out, state, dW, db, config)
        if loss_history is not None:
            loss_history.append(loss_and_grads(out, X, y, config.weight_decay)[0])
    return out


def pseudo_labels(head: LinearHead, dataset, unlabelled_indices) -> dict[int, int]:
    """Most likely class for every listed sample; exact ties go to the lower class id."""
    idx = np.asarray(unlabelled_indices, dtype=np.int64)
    if idx.size == 0:
        return {}
    probs = predict_proba(head, dataset.features[idx])
    picks = np.argmax(probs, axis=1)
    return {int(i): int(c) for i, c in zip(idx, picks)}


def save_head(head: LinearHead, path) -> None:
    """Debug dump of the weights: magic "MALW", then float32 W row-major and b."""
    with open(path, "wb") as fh:
        fh.write(_W_HEADER.pack(WEIGHTS_MAGIC, 1, head.k_classes, head.dim))
        fh.write(head.W.astype("<f4").tobytes())
        fh.write(head.b.astype("<f4").tobytes())


def load_head(path) -> LinearHead:
    with open(path, "rb") as fh:
        blob = fh.read()
    magic, version, k, d = _W_HEADER.unpack_from(blob, 0)
    if magic != WEIGHTS_MAGIC or version != 1:
        raise ConfigError(f"not a weight dump: magic={magic!r} version={version}")
    off = _W_HEADER.size
    W = np.frombuffer(blob, dtype="<f4", count=k * d, offset=off).reshape(k, d)
    b = np.frombuffer(blob, dtype="<f4", count=k, offset=off + 4 * k * d)
    return LinearHead(W.astype(np.float64), b.astype(np.float64))

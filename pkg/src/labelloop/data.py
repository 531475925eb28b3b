"""Datasets, train/test splitting, the binary embedding file format, synthetic data.

Everything stochastic in the package draws from a ``numpy.random.Generator``
created by :func:`make_rng`, so a run is fully determined by its seed.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

MAGIC = b"MALE"
FORMAT_VERSION = 1
UNKNOWN_LABEL = -1

_HEADER = struct.Struct("<4sIQII")  # magic, version, N, d, k_classes


class ConfigError(ValueError):
    """Invalid configuration value (bad fraction, budget, shape, ...)."""


class FormatError(ValueError):
    """Malformed embedding file. ``offset`` is the byte position of the problem."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


def make_rng(seed: int) -> np.random.Generator:
    """Deterministic generator: identical seed gives identical draw sequence.

    PCG64 streams are platform independent, so results reproduce bit-for-bit
    across machines.
    """
    return np.random.Generator(np.random.PCG64(int(seed)))


@dataclass
class EmbeddingDataset:
    """N feature vectors of dimension d with optional ground-truth labels.

    Labels are class ids in [0, k_classes); ``UNKNOWN_LABEL`` (-1) marks an
    unlabelled sample. ``ids`` are stable per-sample identifiers (row numbers
    by default). Treat instances as immutable once built: concurrent runs
    share them by reference.
    """

    features: np.ndarray
    labels: np.ndarray
    k_classes: int
    ids: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        self.features = np.ascontiguousarray(self.features, dtype=np.float32)
        if self.features.ndim != 2:
            raise ConfigError("features must be a 2-D (N, d) array")
        n, d = self.features.shape
        if n < 1 or d < 1:
            raise ConfigError(f"need N >= 1 and d >= 1, got N={n}, d={d}")
        if self.k_classes < 1:
            raise ConfigError(f"k_classes must be positive, got {self.k_classes}")
        self.labels = np.asarray(self.labels, dtype=np.int32)
        if self.labels.shape != (n,):
            raise ConfigError("labels must be a length-N vector")
        known = self.labels != UNKNOWN_LABEL
        if np.any(self.labels[known] < 0) or np.any(self.labels[known] >= self.k_classes):
            raise ConfigError("every known label must lie in [0, k_classes)")
        if self.ids is None:
            self.ids = np.arange(n, dtype=np.int64)
        else:
            self.ids = np.asarray(self.ids, dtype=np.int64)
            if self.ids.shape != (n,):
                raise ConfigError("ids must be a length-N vector")
            if len(np.unique(self.ids)) != n:
                raise ConfigError("ids must be unique")

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]


@dataclass(frozen=True)
class SplitSpec:
    """Train/test split request; the partition is a function of ``seed`` only."""

    train_fraction: float
    seed: int


def split(dataset: EmbeddingDataset, spec: SplitSpec) -> tuple[np.ndarray, np.ndarray]:
    """Random disjoint train/test partition of all sample indices.

    ``|train| = round(train_fraction * N)``. Label balance is ignored: the
    split is done blind, as if no label information existed yet. Splitting is
    per-sample; if samples share an origin (e.g. patches from one slide or
    patient), related samples can land on both sides.
    """
    if not (0.0 < spec.train_fraction <= 1.0):
        raise ConfigError(f"train_fraction must be in (0, 1], got {spec.train_fraction}")
    rng = make_rng(spec.seed)
    perm = rng.permutation(dataset.n)
    n_train = round(spec.train_fraction * dataset.n)
    train = np.sort(perm[:n_train])
    test = np.sort(perm[n_train:])
    return train, test


def generate_synthetic(
    k_classes: int,
    per_class: int,
    dim: int,
    separation: float,
    rng: np.random.Generator,
) -> EmbeddingDataset:
    """Gaussian class blobs with controlled pairwise centre distance.

    Class c is an isotropic unit-variance Gaussian centred at
    ``separation/sqrt(2) * e_c``, so every pair of centres is exactly
    ``separation`` apart. Requires ``dim >= k_classes`` unless separation is 0
    (all centres collapse to the origin).
    """
    if k_classes < 2:
        raise ConfigError(f"k_classes must be >= 2, got {k_classes}")
    if per_class < 1:
        raise ConfigError(f"per_class must be >= 1, got {per_class}")
    if dim < 1:
        raise ConfigError(f"dim must be >= 1, got {dim}")
    if separation < 0:
        raise ConfigError(f"separation must be >= 0, got {separation}")
    if separation > 0 and dim < k_classes:
        raise ConfigError(
            f"axis-aligned centres need dim >= k_classes when separation > 0 "
            f"(got dim={dim}, k_classes={k_classes})"
        )
    centres = np.zeros((k_classes, dim))
    if separation > 0:
        scale = separation / np.sqrt(2.0)
        centres[np.arange(k_classes), np.arange(k_classes)] = scale
    labels = np.repeat(np.arange(k_classes, dtype=np.int32), per_class)
    features = centres[labels] + rng.standard_normal((k_classes * per_class, dim))
    return EmbeddingDataset(features.astype(np.float32), labels, k_classes)


def write_embedding_file(dataset: EmbeddingDataset, path) -> None:
    """Write the little-endian binary embedding format.

    Layout: magic "MALE", u32 version=1, u64 N, u32 d, u32 k_classes, then
    N*d float32 features row-major, then N int32 labels (-1 = unknown).
    """
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, FORMAT_VERSION, dataset.n, dataset.dim, dataset.k_classes))
        fh.write(np.ascontiguousarray(dataset.features, dtype="<f4").tobytes())
        fh.write(np.ascontiguousarray(dataset.labels, dtype="<i4").tobytes())


def read_embedding_file(path) -> EmbeddingDataset:
    """Parse a file written by :func:`write_embedding_file`.

    Raises :class:`FormatError` naming the byte offset of the first problem.
    Reading back a written dataset reproduces the features bit-exactly.
    """
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < _HEADER.size:
        raise FormatError("truncated header", len(blob))
    magic, version, n, d, k_classes = _HEADER.unpack_from(blob, 0)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {MAGIC!r}", 0)
    if version != FORMAT_VERSION:
        raise FormatError(f"unsupported version {version}", 4)
    if n < 1:
        raise FormatError("N must be >= 1", 8)
    if d < 1:
        raise FormatError("d must be >= 1", 16)
    if k_classes < 1:
        raise FormatError("k_classes must be >= 1", 20)
    feat_off = _HEADER.size
    label_off = feat_off + 4 * n * d
    end = label_off + 4 * n
    if len(blob) < end:
        raise FormatError(f"truncated payload, expected {end} bytes", len(blob))
    features = np.frombuffer(blob, dtype="<f4", count=n * d, offset=feat_off).reshape(n, d)
    labels = np.frombuffer(blob, dtype="<i4", count=n, offset=label_off)
    bad = np.flatnonzero((labels != UNKNOWN_LABEL) & ((labels < 0) | (labels >= k_classes)))
    if bad.size:
        i = int(bad[0])
        raise FormatError(
            f"label {int(labels[i])} out of range for k_classes={k_classes}",
            label_off + 4 * i,
        )
    return EmbeddingDataset(features.copy(), labels.copy(), int(k_classes))

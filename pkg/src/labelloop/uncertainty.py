"""Uncertainty scores computed from predicted class probabilities.

All functions accept a single probability vector or a matrix with one vector
per row, and return a scalar or a vector of scores accordingly. They are pure
and thread-safe.

Conventions: ``margin`` is the gap between the two largest probabilities, so a
LOWER margin means MORE uncertainty; every other score maps larger values to
larger uncertainty. Entropy uses the natural logarithm, consistent with the
cross-entropy loss of the linear head.
"""
from __future__ import annotations

import numpy as np

#: Margin is clamped to this floor before inversion so an exact top-two tie
#: yields a huge but finite combined score.
MARGIN_EPS = 1e-12


def _as_rows(p) -> tuple[np.ndarray, bool]:
    """Validate probabilities; return a float64 (rows, K) view and a scalar flag."""
    arr = np.asarray(p, dtype=np.float64)
    scalar = arr.ndim == 1
    if scalar:
        arr = arr[None, :]
    if arr.ndim != 2:
        raise ValueError("expected a probability vector or a matrix of row vectors")
    if arr.shape[1] < 2:
        raise ValueError(f"need at least 2 classes, got {arr.shape[1]}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("probabilities must be finite")
    if np.any(arr < 0):
        raise ValueError("probabilities must be non-negative")
    sums = arr.sum(axis=1)
    if np.any(np.abs(sums - 1.0) > 1e-6):
        worst = float(sums[np.argmax(np.abs(sums - 1.0))])
        raise ValueError(f"probabilities must sum to 1 within 1e-6, got {worst}")
    return arr, scalar


def _ret(values: np.ndarray, scalar: bool):
    return float(values[0]) if scalar else values


def margin(p):
    """Gap between the most and second most likely class probabilities."""
    arr, scalar = _as_rows(p)
    top2 = -np.partition(-arr, 1, axis=1)[:, :2]
    return _ret(top2[:, 0] - top2[:, 1], scalar)


def entropy(p):
    """Shannon entropy -sum(p * ln p), with 0 * ln 0 taken as 0."""
    arr, scalar = _as_rows(p)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(arr > 0, arr * np.log(arr), 0.0)
    return _ret(-terms.sum(axis=1), scalar)


def varratio(p):
    """Variation ratio 1 - max(p)."""
    arr, scalar = _as_rows(p)
    return _ret(1.0 - arr.max(axis=1), scalar)


def margin_entropy(p):
    """Combined score 1/margin + entropy; larger means more uncertain.

    The inverted margin dominates the ranking except among near-tied samples,
    where the entropy term discriminates. The margin is clamped at
    ``MARGIN_EPS`` so exact ties stay finite yet rank above everything else.
    """
    arr, scalar = _as_rows(p)
    top2 = -np.partition(-arr, 1, axis=1)[:, :2]
    m = top2[:, 0] - top2[:, 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(arr > 0, arr * np.log(arr), 0.0)
    h = -terms.sum(axis=1)
    return _ret(1.0 / np.maximum(m, MARGIN_EPS) + h, scalar)

"""K-means over frozen features: the cycle-one cold start and a diversity baseline.

Lloyd's algorithm with k-means++ seeding. Implemented here rather than pulled
from a library because the engine depends on two documented behaviours that
off-the-shelf versions leave unspecified: the deterministic empty-cluster
re-seed rule and the exact tie-breaking (lowest index wins everywhere).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .data import ConfigError


@dataclass
class KMeansResult:
    centroids: np.ndarray
    assignment: np.ndarray
    inertia: float
    n_iter: int
    #: Inertia recorded after each assignment step; non-increasing.
    history: list = field(default_factory=list)


def _sq_dists(features: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    """(N, k) squared Euclidean distances."""
    diff = features[:, None, :] - centroids[None, :, :]
    return np.einsum("nkd,nkd->nk", diff, diff)


def _plus_plus_init(features: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = features.shape[0]
    centroids = np.empty((k, features.shape[1]))
    first = int(rng.integers(n))
    centroids[0] = features[first]
    d2 = ((features - centroids[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = d2.sum()
        if total > 0:
            probs = d2 / total
            pick = int(rng.choice(n, p=probs))
        else:
            # All remaining distances are zero (duplicate points): pick uniformly.
            pick = int(rng.integers(n))
        centroids[j] = features[pick]
        d2 = np.minimum(d2, ((features - centroids[j]) ** 2).sum(axis=1))
    return centroids


def kmeans(
    features,
    k: int,
    rng: np.random.Generator,
    max_iter: int = 100,
    tol: float = 1e-6,
) -> KMeansResult:
    """Cluster into k groups; stops on stable assignment, small relative
    inertia improvement (< tol), or max_iter.

    An empty cluster is re-seeded at the point farthest from its nearest
    centroid, which keeps the recorded inertia sequence non-increasing.
    """
    X = np.asarray(features, dtype=np.float64)
    if X.ndim != 2:
        raise ConfigError("features must be a 2-D array")
    n = X.shape[0]
    if k < 1:
        raise ConfigError(f"k must be >= 1, got {k}")
    if n < k:
        raise ConfigError(f"need at least k={k} samples, got {n}")

    centroids = _plus_plus_init(X, k, rng)
    assignment = np.full(n, -1, dtype=np.int64)
    history: list[float] = []
    n_iter = 0
    converged = False
    for n_iter in range(1, max_iter + 1):
        d2 = _sq_dists(X, centroids)
        new_assignment = np.argmin(d2, axis=1)  # ties -> lowest cluster id
        inertia = float(d2[np.arange(n), new_assignment].sum())
        history.append(inertia)
        if np.array_equal(new_assignment, assignment):
            converged = True
            break
        assignment = new_assignment
        if len(history) >= 2:
            prev = history[-2]
            if prev == 0 or (prev - inertia) / prev < tol:
                converged = True
                break
        # Update step: means of non-empty clusters, re-seed empty ones.
        counts = np.bincount(assignment, minlength=k)
        for c in range(k):
            if counts[c] > 0:
                centroids[c] = X[assignment == c].mean(axis=0)
        if np.any(counts == 0):
            nearest = _sq_dists(X, centroids).min(axis=1)
            for c in np.flatnonzero(counts == 0):
                far = int(np.argmax(nearest))
                centroids[c] = X[far]
                nearest[far] = 0.0

    d2 = _sq_dists(X, centroids)
    assignment = np.argmin(d2, axis=1)
    inertia = float(d2[np.arange(n), assignment].sum())
    if not converged:
        history.append(inertia)  # account for the final assignment pass
    return KMeansResult(centroids, assignment, inertia, n_iter, history)


def cold_start_query(result: KMeansResult, features, k: int | None = None) -> np.ndarray:
    """One prototypical sample per cluster: the point nearest its centroid.

    Ties break to the lowest sample index. Returns k distinct indices, one per
    cluster, in cluster order. Raises if any cluster is empty.
    """
    X = np.asarray(features, dtype=np.float64)
    if k is None:
        k = result.centroids.shape[0]
    picks = np.empty(k, dtype=np.int64)
    for c in range(k):
        members = np.flatnonzero(result.assignment == c)
        if members.size == 0:
            raise ConfigError(f"cluster {c} is empty")
        d2 = ((X[members] - result.centroids[c]) ** 2).sum(axis=1)
        picks[c] = members[int(np.argmin(d2))]
    return picks

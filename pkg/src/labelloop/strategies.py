"""Query selection strategies.

The flagship strategy (``mal``) ranks the whole unlabelled pool by the
margin-entropy score, splits the descending ranking into k near-equal
sub-arrays, and walks them round-robin, taking from each sub-array the most
uncertain sample whose pseudo-label has not been used yet this cycle. The top
slices contribute boundary samples, the bottom slices confident anchors, and
the pseudo-label guard keeps the batch spread across predicted classes.

Baselines: random, margin, entropy, varratio, ceal (entropy plus a
high-confidence side channel) and kmeans (one random member per cluster).

Tie-breaking everywhere is "lower original index wins", so selection is a pure
function of its inputs plus the rng.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import uncertainty
from .cluster import kmeans
from .data import ConfigError

BASELINE_KINDS = ("random", "margin", "entropy", "varratio", "ceal", "kmeans")
STRATEGY_NAMES = ("mal",) + BASELINE_KINDS


@dataclass
class QueryPlan:
    """One cycle's selection: sample indices, the pseudo-label guard consumed,
    and whether the guard had to be reset to finish the batch."""

    query: list[int]
    guard: list[int] = field(default_factory=list)
    fallback_triggered: bool = False
    #: Sub-array each accepted sample came from (mal only).
    sources: list[int] = field(default_factory=list)
    #: CEAL side channel: (index, pseudo_label) pairs below the entropy threshold.
    confident: list[tuple[int, int]] = field(default_factory=list)


@dataclass
class RankedPool:
    """Pool positions argsorted by uncertainty, cut into k contiguous slices."""

    alpha: np.ndarray
    beta: np.ndarray
    bounds: list[tuple[int, int]]

    @property
    def subarrays(self) -> list[np.ndarray]:
        return [self.beta[a:b] for a, b in self.bounds]


def subarray_sizes(n: int, k: int) -> list[int]:
    """Split n items into k nearly equal parts: the first n % k parts get
    ceil(n/k), the rest floor(n/k); sizes differ by at most 1."""
    base, extra = divmod(n, k)
    return [base + 1 if i < extra else base for i in range(k)]


def rank_pool(unlabelled_probas, k: int, score: str = "margin_entropy") -> RankedPool:
    """Score each pool sample, argsort descending (stable: ties keep pool
    order), and cut the ranking into k sub-arrays."""
    probas = np.asarray(unlabelled_probas, dtype=np.float64)
    if probas.ndim != 2 or probas.shape[0] == 0:
        raise ConfigError("need a non-empty matrix of probability rows")
    if k < 1:
        raise ConfigError(f"k must be >= 1, got {k}")
    if score == "margin_entropy":
        alpha = uncertainty.margin_entropy(probas)
    elif score == "entropy":
        alpha = uncertainty.entropy(probas)
    else:
        raise ConfigError(f"unknown ranking score {score!r}")
    beta = np.argsort(-alpha, kind="stable")
    bounds = []
    start = 0
    for size in subarray_sizes(len(alpha), k):
        bounds.append((start, start + size))
        start += size
    return RankedPool(alpha, beta, bounds)


def mal_select(
    ranked: RankedPool,
    pseudo,
    k: int,
    pool_indices=None,
    use_guard: bool = True,
) -> QueryPlan:
    """Round-robin over the sub-arrays, one acceptance per visit.

    From sub-array n, take the most uncertain not-yet-selected sample whose
    pseudo-label is not in the guard list S, append the label to S, and move
    to the next sub-array. If a full round over all sub-arrays accepts
    nothing, S is reset (the pool has fewer fresh pseudo-labels than slots)
    and ``fallback_triggered`` is set; selection then continues until k
    samples are gathered.

    ``pseudo`` holds one pseudo-label per pool position. ``pool_indices``
    maps pool positions to dataset indices (identity when omitted).
    """
    pseudo = np.asarray(pseudo)
    n_pool = len(ranked.beta)
    if len(pseudo) != n_pool:
        raise ConfigError("pseudo-labels must cover the ranked pool exactly")
    if pool_indices is None:
        pool_indices = np.arange(n_pool)
    else:
        pool_indices = np.asarray(pool_indices)

    subarrays = ranked.subarrays
    n_sub = len(subarrays)
    target = min(k, n_pool)
    selected = np.zeros(n_pool, dtype=bool)
    query: list[int] = []
    guard: list[int] = []
    sources: list[int] = []
    fallback = False
    misses = 0
    n = 0
    while len(query) < target:
        accepted = False
        for pos in subarrays[n]:
            if selected[pos]:
                continue
            label = pseudo[pos]
            if use_guard and label in guard:
                continue
            selected[pos] = True
            query.append(int(pool_indices[pos]))
            guard.append(label)
            sources.append(n)
            accepted = True
            break
        if accepted:
            misses = 0
        else:
            misses += 1
            if misses >= n_sub:
                # A full round found nothing fresh: drop the guard and go on.
                guard = []
                fallback = True
                misses = 0
        n = 0 if n >= n_sub - 1 else n + 1
    return QueryPlan(query, guard, fallback, sources)


def top_k_select(ranked: RankedPool, k: int, pool_indices=None) -> QueryPlan:
    """Plain top-k of the ranking; the sub-array machinery and guard disabled."""
    if pool_indices is None:
        pool_indices = np.arange(len(ranked.beta))
    else:
        pool_indices = np.asarray(pool_indices)
    picks = ranked.beta[: min(k, len(ranked.beta))]
    return QueryPlan([int(pool_indices[p]) for p in picks])


def baseline_select(
    kind: str,
    probas,
    k: int,
    rng: np.random.Generator,
    pool_indices=None,
    features=None,
    ceal_threshold: float | None = None,
) -> QueryPlan:
    """Select k pool samples with one of the reference strategies.

    random    k uniform draws without replacement
    margin    k smallest top-two gaps
    entropy   k largest entropies
    varratio  k largest variation ratios
    ceal      entropy selection, plus every sample with entropy below
              ``ceal_threshold`` reported on the side channel with its
              pseudo-label (argmax class)
    kmeans    cluster the pool features into k groups and draw one random
              member per cluster (requires ``features``)
    """
    probas = np.asarray(probas, dtype=np.float64)
    n_pool = probas.shape[0]
    if pool_indices is None:
        pool_indices = np.arange(n_pool)
    else:
        pool_indices = np.asarray(pool_indices)
    k_eff = min(k, n_pool)

    if kind == "random":
        picks = rng.choice(n_pool, size=k_eff, replace=False)
    elif kind == "margin":
        picks = np.argsort(uncertainty.margin(probas), kind="stable")[:k_eff]
    elif kind in ("entropy", "ceal"):
        picks = np.argsort(-uncertainty.entropy(probas), kind="stable")[:k_eff]
    elif kind == "varratio":
        picks = np.argsort(-uncertainty.varratio(probas), kind="stable")[:k_eff]
    elif kind == "kmeans":
        if features is None:
            raise ConfigError("kmeans baseline needs pool features")
        result = kmeans(np.asarray(features), k_eff, rng)
        picks = []
        taken = np.zeros(n_pool, dtype=bool)
        for c in range(k_eff):
            members = np.flatnonzero((result.assignment == c) & ~taken)
            if members.size == 0:
                members = np.flatnonzero(~taken)
            pick = int(members[rng.integers(members.size)])
            picks.append(pick)
            taken[pick] = True
        picks = np.asarray(picks)
    else:
        raise ConfigError(f"unknown strategy kind {kind!r}")

    plan = QueryPlan([int(pool_indices[p]) for p in picks])
    if kind == "ceal":
        if ceal_threshold is None:
            raise ConfigError("ceal needs an entropy threshold")
        ent = uncertainty.entropy(probas)
        pseudo = np.argmax(probas, axis=1)
        for pos in np.flatnonzero(ent < ceal_threshold):
            plan.confident.append((int(pool_indices[pos]), int(pseudo[pos])))
    return plan

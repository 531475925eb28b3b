"""Cycle one has no labels at all: k-means prototypes replace the classifier.

Run:  python demos/04_cold_start_clustering.py
"""
import numpy as np

from labelloop import cold_start_query, generate_synthetic, kmeans, make_rng

rng = make_rng(3)
dataset = generate_synthetic(k_classes=6, per_class=80, dim=12, separation=9.0, rng=rng)

# Lloyd's algorithm with k-means++ seeding over the raw features.
result = kmeans(dataset.features, k=6, rng=rng)
print(f"kmeans:  converged in {result.n_iter} iterations, inertia {result.inertia:.1f}")
print(f"         inertia non-increasing: "
      f"{all(b <= a for a, b in zip(result.history, result.history[1:]))}")

# The first query takes the sample nearest each centroid: one prototypical
# example per cluster, no randomness, no label knowledge.
picks = cold_start_query(result, dataset.features)
print(f"query:   prototypes {picks.tolist()}")
print(f"         true classes covered: {sorted(set(dataset.labels[picks].tolist()))}")

# On well-clustered features the prototypes hit every class, which is the
# whole point of the cold start: the first K labels already span the problem.
per_cluster = np.bincount(result.assignment, minlength=6)
print(f"         cluster sizes {per_cluster.tolist()}")

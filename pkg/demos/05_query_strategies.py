"""How the sub-array strategy walks the ranked pool, next to the baselines.

Run:  python demos/05_query_strategies.py
"""
import numpy as np

from labelloop import make_rng
from labelloop.strategies import baseline_select, mal_select, rank_pool

rng = make_rng(5)

# A 12-sample pool of predicted class probabilities. Sample 0 is a dead heat,
# sample 11 is near-certain, the rest fall in between.
margins = np.linspace(0.02, 0.9, 12)
p1 = (1 + margins) / 2
probas = np.column_stack([p1, 1 - p1])
pseudo = np.array([0, 0, 0, 1, 1, 1, 0, 2, 1, 2, 0, 2])

# Rank by the combined margin-entropy score and cut into k=3 sub-arrays:
# beta[0] is the most uncertain sample overall.
ranked = rank_pool(probas, k=3)
print("ranking (most uncertain first):", ranked.beta.tolist())
print("sub-arrays:", [sub.tolist() for sub in ranked.subarrays])

# Walk the sub-arrays round-robin, at most one pick per slice per pass, and
# never repeat a pseudo-label within the cycle. The result spreads across the
# whole uncertainty spectrum: a boundary sample, a middling one, an anchor.
plan = mal_select(ranked, pseudo, k=3)
print(f"\nsub-array query: {plan.query} "
      f"(pseudo-labels {[int(pseudo[i]) for i in plan.query]}, "
      f"fallback {plan.fallback_triggered})")

# Baselines for contrast. Pure uncertainty concentrates at the top of the
# ranking; random ignores it entirely.
for kind in ("margin", "entropy", "random"):
    plan = baseline_select(kind, probas, 3, make_rng(1))
    print(f"{kind:8s} query: {plan.query}")

# CEAL rides on entropy selection but also reports every sample confident
# enough to train on for free this cycle.
plan = baseline_select("ceal", probas, 3, make_rng(1), ceal_threshold=0.25)
print(f"ceal     query: {plan.query}, free pseudo-labels: {plan.confident}")

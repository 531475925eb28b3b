"""The four uncertainty measures, and why the combined score is shaped as it is.

Run:  python demos/03_uncertainty_scores.py
"""
import numpy as np

from labelloop import entropy, margin, margin_entropy, varratio

examples = {
    "confident      ": [0.97, 0.02, 0.01],
    "boundary (2-way)": [0.49, 0.48, 0.03],
    "diffuse (3-way) ": [0.40, 0.32, 0.28],
    "uniform         ": [1 / 3, 1 / 3, 1 / 3],
}

print(f"{'distribution':18s} {'margin':>8s} {'entropy':>8s} {'varratio':>9s} {'combined':>10s}")
for name, p in examples.items():
    print(f"{name:18s} {margin(p):8.4f} {entropy(p):8.4f} {varratio(p):9.4f} "
          f"{margin_entropy(p):10.4f}")

# margin: gap between the top two classes -- LOW means uncertain.
# entropy/varratio: HIGH means uncertain.
# combined: 1/margin + entropy, so both channels point the same way and the
# inverted margin dominates except among near-ties. A clean prediction scores
# about 1; a two-way tie is clamped to a huge (but finite) value.
tied = margin_entropy([0.5, 0.5, 0.0])
print(f"\nexact tie scores {tied:.3e} (finite, ranks above everything else)")

# Rankings disagree: entropy prefers many-way confusion, the combined score
# prefers the tightest two-way race.
p_a = [0.47, 0.46, 0.07]   # tight two-way race
p_b = [0.40, 0.32, 0.28]   # diffuse three-way confusion
print(f"\nentropy  prefers the diffuse sample:  {entropy(p_b) > entropy(p_a)}")
print(f"combined prefers the two-way race:    {margin_entropy(p_a) > margin_entropy(p_b)}")

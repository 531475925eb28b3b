"""Train the one-layer softmax head on a handful of labels.

Run:  python demos/02_head_training.py
"""
import numpy as np

from labelloop import TrainConfig, generate_synthetic, init_xavier, make_rng, predict_proba, train

rng = make_rng(0)
dataset = generate_synthetic(k_classes=5, per_class=100, dim=16, separation=7.0, rng=rng)

# Xavier-uniform init: W entries within +-sqrt(6/(d+K)), bias zero.
head = init_xavier(dataset.dim, dataset.k_classes, rng)
print(f"init:    |W| <= {np.abs(head.W).max():.3f} "
      f"(bound {np.sqrt(6 / (dataset.dim + dataset.k_classes)):.3f})")

# Ten labels per class is already a "10-shot" budget.
few = np.concatenate([np.flatnonzero(dataset.labels == c)[:10] for c in range(5)])
config = TrainConfig(learning_rate=0.02, batch_size=128, epochs=200, weight_decay=0.0005)
losses = []
trained = train(head, dataset.features[few], dataset.labels[few], config, rng, loss_history=losses)
print(f"train:   loss {losses[0]:.4f} -> {losses[-1]:.4f} over {config.epochs} epochs")

probs = predict_proba(trained, dataset.features)
accuracy = (np.argmax(probs, axis=1) == dataset.labels).mean()
print(f"predict: every row sums to one: {np.allclose(probs.sum(axis=1), 1.0)}")
print(f"         accuracy on the full pool with 50 labels: {accuracy:.3f}")

# The head the engine retrains every cycle is exactly this object.
print(f"         pseudo-label of sample 0: {int(np.argmax(probs[0]))} "
      f"(true {int(dataset.labels[0])})")

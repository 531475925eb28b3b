"""The full production path: image folders -> extractor -> engine.

Needs the companion package built first:
    cd extractor && npm install && npm run build

Run:  python demos/07_image_pipeline.py
"""
import subprocess
import sys
import tempfile
from pathlib import Path

import numpy as np

from labelloop import SplitSpec, TrainConfig, read_embedding_file, run_al

ROOT = Path(__file__).resolve().parent.parent
CLI = ROOT / "extractor" / "dist" / "src" / "cli.js"

if not CLI.exists():
    sys.exit("extractor not built yet: cd extractor && npm install && npm run build")

try:
    from PIL import Image
except ImportError:
    sys.exit("this demo writes its sample images with Pillow: pip install pillow")

with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    # Two synthetic "tissue" classes: dark-ish and bright-ish noise patches.
    gen = np.random.default_rng(0)
    for cls, base in (("dark", 40), ("bright", 180)):
        (tmp / "images" / cls).mkdir(parents=True)
        for i in range(12):
            arr = np.clip(base + gen.integers(-40, 40, (32, 32, 3)), 0, 255).astype(np.uint8)
            Image.fromarray(arr).save(tmp / "images" / cls / f"{cls}_{i:02d}.png")

    # A frozen fallback encoder: seeded random projection, 24-dim output.
    ckpt = tmp / "encoder.ckpt"
    subprocess.run(
        ["node", str(CLI), "make-checkpoint", "--dim", "24", "--seed", "1", "--out", str(ckpt)],
        check=True, capture_output=True,
    )
    emb = tmp / "patches.emb"
    out = subprocess.run(
        ["node", str(CLI), "extract", "--images", str(tmp / "images"),
         "--checkpoint", str(ckpt), "--out", str(emb)],
        check=True, capture_output=True, text=True,
    )
    print("extractor:", out.stdout.strip())

    # The engine consumes the file exactly as it would real embeddings.
    dataset = read_embedding_file(emb)
    print(f"engine:    parsed {dataset.n} samples, dim {dataset.dim}, "
          f"{dataset.k_classes} classes")
    record = run_al(dataset, SplitSpec(0.8, 1), "mal", shots=3,
                    train_config=TrainConfig(learning_rate=0.05, epochs=80), seed=1)
    for row in record.rows:
        print(f"           cycle {row.cycle}: {row.labels_used} labels, "
              f"accuracy {row.accuracy:.3f}")

/**
 * Directory walk: class-labelled (one subdirectory per class) or flat
 * unlabelled image folders become one embedding file plus a JSON manifest.
 * Unreadable images are skipped with a warning and a manifest entry; the
 * output file is written atomically (temp file + rename).
 */
import * as fs from "fs";
import * as path from "path";

import { EncoderCheckpoint } from "./checkpoint";
import { encodeImage } from "./encoder";
import { SUPPORTED_EXTENSIONS, decodeImage } from "./image";
import { UNKNOWN_LABEL, encodeEmbeddingFile } from "./male";

export interface ExtractOptions {
  imagesDir: string;
  checkpoint: EncoderCheckpoint;
  checkpointPath: string;
  outPath: string;
  normalize: boolean;
  log?: (line: string) => void;
}

export interface ExtractResult {
  written: number;
  skipped: { file: string; reason: string }[];
  kClasses: number;
  manifestPath: string;
}

interface Entry {
  file: string;
  label: number;
}

function isImage(name: string): boolean {
  return SUPPORTED_EXTENSIONS.includes(path.extname(name).toLowerCase());
}

/** Sorted class subdirectories become labels 0..k-1; loose files are unlabelled. */
function collectEntries(dir: string): { entries: Entry[]; classes: string[] } {
  const names = fs.readdirSync(dir, { withFileTypes: true });
  const classes = names
    .filter((d) => d.isDirectory())
    .map((d) => d.name)
    .sort();
  const entries: Entry[] = [];
  for (const item of names) {
    if (item.isFile() && isImage(item.name)) {
      entries.push({ file: path.join(dir, item.name), label: UNKNOWN_LABEL });
    }
  }
  classes.forEach((cls, label) => {
    const sub = path.join(dir, cls);
    for (const name of fs.readdirSync(sub).sort()) {
      if (isImage(name)) entries.push({ file: path.join(sub, name), label });
    }
  });
  entries.sort((a, b) => (a.file < b.file ? -1 : a.file > b.file ? 1 : 0));
  return { entries, classes };
}

export function extractDirectory(options: ExtractOptions): ExtractResult {
  const { imagesDir, checkpoint, outPath, normalize } = options;
  const log = options.log ?? ((line) => process.stderr.write(line + "\n"));
  const { entries, classes } = collectEntries(imagesDir);
  if (entries.length === 0) {
    throw new Error(`no ${SUPPORTED_EXTENSIONS.join("/")} images under ${imagesDir}`);
  }

  const rows: Float32Array[] = [];
  const labels: number[] = [];
  const skipped: { file: string; reason: string }[] = [];
  for (const entry of entries) {
    try {
      const image = decodeImage(fs.readFileSync(entry.file), entry.file);
      rows.push(encodeImage(checkpoint, image, normalize));
      labels.push(entry.label);
    } catch (err) {
      const reason = err instanceof Error ? err.message : String(err);
      skipped.push({ file: entry.file, reason });
      log(`warning: skipping ${entry.file}: ${reason}`);
    }
  }
  if (rows.length === 0) throw new Error(`every image under ${imagesDir} was unreadable`);

  const n = rows.length;
  const dim = checkpoint.outDim;
  const features = new Float32Array(n * dim);
  rows.forEach((row, i) => features.set(row, i * dim));
  const payload = encodeEmbeddingFile({
    n,
    dim,
    kClasses: Math.max(1, classes.length),
    features,
    labels: Int32Array.from(labels),
  });

  const tmpPath = `${outPath}.tmp-${process.pid}`;
  fs.writeFileSync(tmpPath, payload);
  fs.renameSync(tmpPath, outPath);

  const manifestPath = `${outPath}.manifest.json`;
  const counts: Record<string, number> = {};
  classes.forEach((cls, label) => {
    counts[cls] = labels.filter((l) => l === label).length;
  });
  fs.writeFileSync(
    manifestPath,
    JSON.stringify(
      {
        images: imagesDir,
        checkpoint: options.checkpointPath,
        encoder: {
          inputSize: checkpoint.inputSize,
          outDim: checkpoint.outDim,
          tap: checkpoint.tap,
          normalized: normalize,
        },
        classes,
        counts,
        written: n,
        skipped,
      },
      null,
      2,
    ) + "\n",
  );
  return { written: n, skipped, kClasses: Math.max(1, classes.length), manifestPath };
}

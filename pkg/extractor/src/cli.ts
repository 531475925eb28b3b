#!/usr/bin/env node
/**
 * extract         --images DIR --checkpoint PATH --out FILE [--no-normalize]
 * make-checkpoint --dim N --out FILE [--input-size S] [--seed N] [--tap linear|relu]
 *
 * Exit codes: 0 success, 1 runtime failure, 2 bad usage.
 */
import { loadCheckpoint, makeCheckpoint, saveCheckpoint, Tap } from "./checkpoint";
import { extractDirectory } from "./extract";

function parseFlags(argv: string[]): Map<string, string | boolean> {
  const flags = new Map<string, string | boolean>();
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (!arg.startsWith("--")) throw new Error(`unexpected argument ${arg}`);
    const key = arg.slice(2);
    if (i + 1 < argv.length && !argv[i + 1].startsWith("--")) {
      flags.set(key, argv[++i]);
    } else {
      flags.set(key, true);
    }
  }
  return flags;
}

function need(flags: Map<string, string | boolean>, key: string): string {
  const value = flags.get(key);
  if (typeof value !== "string") throw new Error(`--${key} is required`);
  return value;
}

function cmdExtract(argv: string[]): number {
  const flags = parseFlags(argv);
  const checkpointPath = need(flags, "checkpoint");
  const checkpoint = loadCheckpoint(checkpointPath);
  const result = extractDirectory({
    imagesDir: need(flags, "images"),
    checkpoint,
    checkpointPath,
    outPath: need(flags, "out"),
    normalize: flags.get("no-normalize") !== true,
  });
  console.log(
    `wrote ${result.written} embeddings (dim ${checkpoint.outDim}, ` +
      `${result.kClasses} classes, ${result.skipped.length} skipped) -> ${need(flags, "out")}`,
  );
  return 0;
}

function cmdMakeCheckpoint(argv: string[]): number {
  const flags = parseFlags(argv);
  const dim = parseInt(need(flags, "dim"), 10);
  const inputSize = parseInt((flags.get("input-size") as string) ?? "32", 10);
  const seed = parseInt((flags.get("seed") as string) ?? "0", 10);
  const tap = ((flags.get("tap") as string) ?? "linear") as Tap;
  if (tap !== "linear" && tap !== "relu") throw new Error(`bad --tap ${tap}`);
  const out = need(flags, "out");
  saveCheckpoint(makeCheckpoint(dim, inputSize, seed, tap), out);
  console.log(`wrote ${tap} checkpoint (patch ${inputSize}x${inputSize}, dim ${dim}) -> ${out}`);
  return 0;
}

export function main(argv: string[]): number {
  const [command, ...rest] = argv;
  try {
    if (command === "extract") return cmdExtract(rest);
    if (command === "make-checkpoint") return cmdMakeCheckpoint(rest);
    process.stderr.write(
      "usage: extract --images DIR --checkpoint PATH --out FILE [--no-normalize]\n" +
        "       make-checkpoint --dim N --out FILE [--input-size S] [--seed N] [--tap linear|relu]\n",
    );
    return 2;
  } catch (err) {
    process.stderr.write(`error: ${err instanceof Error ? err.message : err}\n`);
    return 1;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}

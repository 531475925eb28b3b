/**
 * Small deterministic PRNG (mulberry32) so checkpoints generated from a seed
 * are identical on every platform. Not cryptographic, not meant to be.
 */
export function mulberry32(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x6d2b79f5) >>> 0;
    let t = state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

/** Uniform draw in [-bound, bound). */
export function uniform(next: () => number, bound: number): number {
  return (next() * 2 - 1) * bound;
}

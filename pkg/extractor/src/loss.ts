/**
 * Contrastive (InfoNCE-style) loss for one query against a positive key and a
 * set of negative keys, with a temperature. Computed in log-space so large
 * similarity/temperature ratios cannot overflow.
 */

export interface ContrastiveBatch {
  /** Query representation (unit norm by convention). */
  query: number[];
  /** Positive key: the other augmented view of the same sample. */
  positive: number[];
  /** Negative keys from other samples; may be empty. */
  negatives: number[][];
  /** Temperature, strictly positive. */
  temperature: number;
}

function dot(a: number[], b: number[]): number {
  if (a.length !== b.length) {
    throw new Error(`dimension mismatch: ${a.length} vs ${b.length}`);
  }
  let total = 0;
  for (let i = 0; i < a.length; i++) total += a[i] * b[i];
  return total;
}

function logSumExp(values: number[]): number {
  const m = Math.max(...values);
  let total = 0;
  for (const v of values) total += Math.exp(v - m);
  return m + Math.log(total);
}

/**
 * -log( exp(q.k+ / t) / (exp(q.k+ / t) + sum_i exp(q.k-_i / t)) ).
 *
 * With no negatives the ratio is exactly 1 and the loss is 0.
 */
export function mocoLoss(batch: ContrastiveBatch): number {
  const { query, positive, negatives, temperature } = batch;
  if (!(temperature > 0)) {
    throw new Error(`temperature must be > 0, got ${temperature}`);
  }
  const logits = [dot(query, positive) / temperature];
  for (const negative of negatives) {
    logits.push(dot(query, negative) / temperature);
  }
  return logSumExp(logits) - logits[0];
}

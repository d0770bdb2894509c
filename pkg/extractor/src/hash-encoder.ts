/**
 * Deterministic built-in encoder for running the extraction pipeline
 * without model downloads.
 *
 * Tokens get fixed pseudo-random unit vectors derived from a hash of
 * the token string; successive layers mix each vector with its
 * neighbors, so the same token in different contexts gets different
 * embeddings from layer 1 upward. The embeddings carry no semantics:
 * use this encoder for pipeline validation and tests, not for real
 * evaluation.
 */

import { Encoder, EncodedLine } from "./encoder.js";

const CLS = "[CLS]";
const SEP = "[SEP]";
const SUBWORD_LEN = 4;

function fnv1a(text: string): number {
  let hash = 0x811c9dc5;
  for (let i = 0; i < text.length; i++) {
    hash ^= text.charCodeAt(i);
    hash = Math.imul(hash, 0x01000193) >>> 0;
  }
  return hash >>> 0;
}

function xorshift32(state: number): number {
  let x = state >>> 0;
  x ^= x << 13;
  x >>>= 0;
  x ^= x >>> 17;
  x ^= x << 5;
  return x >>> 0;
}

/** Greedy fixed-width subword split: "barking" -> ["bark", "##ing"]. */
export function subwordSplit(word: string): string[] {
  if (word.length <= SUBWORD_LEN + 1) {
    return [word];
  }
  const pieces = [word.slice(0, SUBWORD_LEN)];
  for (let i = SUBWORD_LEN; i < word.length; i += SUBWORD_LEN) {
    pieces.push("##" + word.slice(i, i + SUBWORD_LEN));
  }
  return pieces;
}

export function hashTokenize(line: string): string[] {
  const words = line.split(/\s+/u).filter((w) => w.length > 0);
  return [CLS, ...words.flatMap(subwordSplit), SEP];
}

function tokenVector(token: string, dim: number): Float64Array {
  let state = fnv1a(token) || 0x9e3779b9;
  const vec = new Float64Array(dim);
  let norm2 = 0;
  for (let d = 0; d < dim; d++) {
    state = xorshift32(state);
    const u = state / 0xffffffff; // [0, 1]
    vec[d] = 2 * u - 1;
    norm2 += vec[d] * vec[d];
  }
  if (norm2 < 1e-12) {
    vec[0] = 1;
    norm2 = 1;
  }
  const inv = 1 / Math.sqrt(norm2);
  for (let d = 0; d < dim; d++) {
    vec[d] *= inv;
  }
  return vec;
}

function mixNeighbors(rows: Float64Array[], dim: number): Float64Array[] {
  const mixed: Float64Array[] = [];
  for (let i = 0; i < rows.length; i++) {
    const left = rows[Math.max(i - 1, 0)];
    const right = rows[Math.min(i + 1, rows.length - 1)];
    const out = new Float64Array(dim);
    let norm2 = 0;
    for (let d = 0; d < dim; d++) {
      out[d] = 0.6 * rows[i][d] + 0.2 * left[d] + 0.2 * right[d];
      norm2 += out[d] * out[d];
    }
    const inv = norm2 < 1e-12 ? 1 : 1 / Math.sqrt(norm2);
    for (let d = 0; d < dim; d++) {
      out[d] *= inv;
    }
    mixed.push(out);
  }
  return mixed;
}

export class HashEncoder implements Encoder {
  readonly name: string;
  readonly dim: number;
  readonly layerCount: number;
  readonly specialTokens = new Set([CLS, SEP]);

  constructor(dim = 64, layerCount = 5) {
    this.name = `hash-d${dim}`;
    this.dim = dim;
    this.layerCount = layerCount;
  }

  async encode(line: string, layer: number): Promise<EncodedLine> {
    const tokens = hashTokenize(line);
    let rows = tokens.map((t) => tokenVector(t, this.dim));
    for (let l = 0; l < layer; l++) {
      rows = mixNeighbors(rows, this.dim);
    }
    const values = new Float32Array(tokens.length * this.dim);
    rows.forEach((row, i) => values.set(row, i * this.dim));
    return { tokens, values };
  }

  keepMask(_line: string, tokens: string[]): boolean[] {
    return tokens.map((t) => !this.specialTokens.has(t));
  }
}

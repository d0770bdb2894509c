/**
 * Extraction pipeline: text lines in, one EMB1 record per line out.
 *
 * Records keep the encoder's subword token strings; sequence delimiters
 * are stripped together with their embedding rows. A line whose token
 * sequence exceeds the maximum length is a hard error naming the line:
 * silent truncation would leave tail tokens unscorable downstream.
 */

import { readFileSync, writeFileSync } from "node:fs";

import { Emb1File, Emb1Record, encodeEmb1 } from "./emb1.js";
import { Encoder, ExtractError, resolveLayer } from "./encoder.js";
import { HashEncoder } from "./hash-encoder.js";
import { TransformersEncoder } from "./transformers-encoder.js";

// delimiters the scoring side rejects outright; never emit them
const RESERVED_TOKENS = new Set(["[CLS]", "[SEP]"]);

export interface ExtractionConfig {
  model: string;
  layer: number;
  input: string;
  output: string;
  maxLen: number;
  batch: number;
}

export async function createEncoder(model: string): Promise<Encoder> {
  const hashSpec = /^hash(?:-d(\d+))?$/.exec(model);
  if (hashSpec) {
    const dim = hashSpec[1] ? Number(hashSpec[1]) : 64;
    if (dim < 1) {
      throw new ExtractError(`hash encoder dimension must be >= 1, got ${dim}`);
    }
    return new HashEncoder(dim);
  }
  return TransformersEncoder.load(model);
}

export function readLines(path: string): string[] {
  const text = readFileSync(path, "utf8");
  if (text === "") {
    return [];
  }
  const lines = text.split("\n");
  if (lines[lines.length - 1] === "") {
    lines.pop();
  }
  return lines;
}

function snippet(line: string): string {
  return line.length > 40 ? `${line.slice(0, 40)}...` : line;
}

export async function extract(config: ExtractionConfig): Promise<Emb1File> {
  if (config.maxLen < 2) {
    throw new ExtractError(`--max-len must be at least 2, got ${config.maxLen}`);
  }
  if (config.batch < 1) {
    throw new ExtractError(`--batch must be at least 1, got ${config.batch}`);
  }
  const encoder = await createEncoder(config.model);
  const layer = resolveLayer(encoder, config.layer);
  const lines = readLines(config.input);
  const records: Emb1Record[] = [];
  for (let start = 0; start < lines.length; start += config.batch) {
    const chunk = lines.slice(start, start + config.batch);
    const encoded = await Promise.all(
      chunk.map((line) => encoder.encode(line, layer)),
    );
    encoded.forEach(({ tokens, values }, offset) => {
      const index = start + offset;
      if (tokens.length > config.maxLen) {
        throw new ExtractError(
          `line ${index + 1} produces ${tokens.length} tokens, over the ` +
            `maximum of ${config.maxLen}: "${snippet(lines[index])}"`,
        );
      }
      const keep = encoder.keepMask(lines[index], tokens);
      const keptTokens: string[] = [];
      const keptRows: number[] = [];
      tokens.forEach((token, t) => {
        if (keep[t]) {
          keptTokens.push(token);
          keptRows.push(t);
        }
      });
      const reserved = keptTokens.find((t) => RESERVED_TOKENS.has(t));
      if (reserved !== undefined) {
        throw new ExtractError(
          `line ${index + 1}: delimiter token ${reserved} survived stripping; ` +
            `refusing to write an invalid embedding file`,
        );
      }
      const out = new Float32Array(keptTokens.length * encoder.dim);
      keptRows.forEach((row, i) => {
        out.set(
          values.subarray(row * encoder.dim, (row + 1) * encoder.dim),
          i * encoder.dim,
        );
      });
      records.push({ segmentIndex: index, tokens: keptTokens, values: out });
    });
  }
  return { dim: encoder.dim, records };
}

export async function extractToFile(config: ExtractionConfig): Promise<void> {
  const file = await extract(config);
  writeFileSync(config.output, encodeEmb1(file));
}

/**
 * Real pretrained encoder backed by @huggingface/transformers (ONNX
 * runtime). Requires the model to be resolvable through the Hugging
 * Face hub or a local cache; failures surface as ExtractError with the
 * underlying reason.
 *
 * ONNX exports ship the final hidden state only, so this backend
 * reports layerCount null and accepts --layer -1 exclusively.
 */

import { Encoder, EncodedLine, ExtractError } from "./encoder.js";

function firstLine(err: unknown): string {
  return String(err instanceof Error ? err.message : err).split("\n")[0];
}

/** Positions of tokens added as sequence delimiters: those not matched
 * when the specials-free tokenization is aligned as a subsequence. */
export function delimiterMask(withSpecials: string[], without: string[]): boolean[] {
  const keep = new Array<boolean>(withSpecials.length).fill(false);
  let j = 0;
  for (let i = 0; i < withSpecials.length && j < without.length; i++) {
    if (withSpecials[i] === without[j]) {
      keep[i] = true;
      j++;
    }
  }
  if (j !== without.length) {
    // alignment failed; caller falls back to special-token membership
    return [];
  }
  return keep;
}

export class TransformersEncoder implements Encoder {
  readonly name: string;
  readonly dim: number;
  readonly layerCount = null;
  readonly specialTokens: ReadonlySet<string>;
  private readonly tokenizer: any;
  private readonly model: any;

  private constructor(name: string, tokenizer: any, model: any, dim: number) {
    this.name = name;
    this.tokenizer = tokenizer;
    this.model = model;
    this.dim = dim;
    this.specialTokens = new Set<string>(tokenizer.all_special_tokens ?? []);
  }

  static async load(modelId: string): Promise<TransformersEncoder> {
    let hub: any;
    try {
      hub = await import("@huggingface/transformers");
    } catch (err) {
      throw new ExtractError(
        `transformers backend unavailable: ${firstLine(err)}`,
      );
    }
    let tokenizer: any;
    let model: any;
    try {
      tokenizer = await hub.AutoTokenizer.from_pretrained(modelId);
      model = await hub.AutoModel.from_pretrained(modelId, { dtype: "fp32" });
    } catch (err) {
      throw new ExtractError(
        `cannot load model '${modelId}' (check the model id and that the ` +
          `Hugging Face hub or a local cache is reachable): ${firstLine(err)}`,
      );
    }
    const dim = model.config?.hidden_size;
    if (!Number.isInteger(dim) || dim < 1) {
      throw new ExtractError(
        `model '${modelId}' does not declare hidden_size; cannot size EMB1 records`,
      );
    }
    return new TransformersEncoder(modelId, tokenizer, model, dim);
  }

  async encode(line: string, _layer: number): Promise<EncodedLine> {
    const tokens: string[] = this.tokenizer.tokenize(line, {
      add_special_tokens: true,
    });
    const inputs = this.tokenizer(line);
    const output = await this.model(inputs);
    const hidden = output.last_hidden_state;
    if (!hidden) {
      throw new ExtractError(
        `model '${this.name}' returned no hidden state; ` +
          `it is not a plain encoder export`,
      );
    }
    const [batch, seq, dim] = hidden.dims as number[];
    if (batch !== 1 || seq !== tokens.length || dim !== this.dim) {
      throw new ExtractError(
        `tokenizer produced ${tokens.length} tokens but the model emitted ` +
          `a [${hidden.dims}] hidden state`,
      );
    }
    const values = Float32Array.from(hidden.data as ArrayLike<number>);
    return { tokens, values };
  }

  /** true for content positions, false for delimiters to strip */
  keepMask(line: string, tokens: string[]): boolean[] {
    const bare: string[] = this.tokenizer.tokenize(line, {
      add_special_tokens: false,
    });
    const aligned = delimiterMask(tokens, bare);
    if (aligned.length === tokens.length) {
      return aligned;
    }
    return tokens.map((t) => !this.specialTokens.has(t));
  }
}

/** Encoder abstraction: turn a text line into subword tokens plus one
 * contextual embedding row per token, at a chosen hidden layer. */

export interface EncodedLine {
  /** subword tokens, including any sequence delimiters the model adds */
  tokens: string[];
  /** tokens.length * dim values, row-major */
  values: Float32Array;
}

export interface Encoder {
  readonly name: string;
  readonly dim: number;
  /** number of selectable hidden layers, or null when only the final
   * layer is available (layer must then be -1) */
  readonly layerCount: number | null;
  /** delimiter tokens this encoder emits that must be stripped */
  readonly specialTokens: ReadonlySet<string>;
  encode(line: string, layer: number): Promise<EncodedLine>;
  /** true for content positions, false for delimiter positions */
  keepMask(line: string, tokens: string[]): boolean[];
}

export class ExtractError extends Error {}

export function resolveLayer(encoder: Encoder, layer: number): number {
  if (encoder.layerCount === null) {
    if (layer !== -1) {
      throw new ExtractError(
        `model '${encoder.name}' exposes only its final hidden layer; ` +
          `pass --layer -1 to select it`,
      );
    }
    return -1;
  }
  const resolved = layer === -1 ? encoder.layerCount - 1 : layer;
  if (resolved < 0 || resolved >= encoder.layerCount) {
    throw new ExtractError(
      `layer ${layer} outside the model's ${encoder.layerCount} hidden layers`,
    );
  }
  return resolved;
}

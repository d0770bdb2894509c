/**
 * EMB1 binary embedding files (little-endian).
 *
 * Layout:
 *   header:  magic "EMB1" | version u16 = 1 | dim u32 | record count u32
 *   record:  segment index u32 | token count L u32
 *            | L x (byte length u16, UTF-8 bytes)
 *            | L * dim float32, row-major
 */

export const EMB1_MAGIC = "EMB1";
export const EMB1_VERSION = 1;

export interface Emb1Record {
  segmentIndex: number;
  tokens: string[];
  /** length tokens.length * dim, row-major */
  values: Float32Array;
}

export interface Emb1File {
  dim: number;
  records: Emb1Record[];
}

export class Emb1FormatError extends Error {}

export function encodeEmb1(file: Emb1File): Buffer {
  const chunks: Buffer[] = [];
  const header = Buffer.alloc(4 + 2 + 4 + 4);
  header.write(EMB1_MAGIC, 0, "ascii");
  header.writeUInt16LE(EMB1_VERSION, 4);
  header.writeUInt32LE(file.dim, 6);
  header.writeUInt32LE(file.records.length, 10);
  chunks.push(header);
  for (const record of file.records) {
    const n = record.tokens.length;
    if (record.values.length !== n * file.dim) {
      throw new Emb1FormatError(
        `record ${record.segmentIndex}: ${record.values.length} values ` +
          `for ${n} tokens x dim ${file.dim}`,
      );
    }
    const head = Buffer.alloc(8);
    head.writeUInt32LE(record.segmentIndex, 0);
    head.writeUInt32LE(n, 4);
    chunks.push(head);
    for (const token of record.tokens) {
      const raw = Buffer.from(token, "utf8");
      if (raw.length > 0xffff) {
        throw new Emb1FormatError(
          `record ${record.segmentIndex}: token longer than 65535 bytes`,
        );
      }
      const len = Buffer.alloc(2);
      len.writeUInt16LE(raw.length, 0);
      chunks.push(len, raw);
    }
    const floats = Buffer.alloc(record.values.length * 4);
    for (let i = 0; i < record.values.length; i++) {
      floats.writeFloatLE(record.values[i], i * 4);
    }
    chunks.push(floats);
  }
  return Buffer.concat(chunks);
}

export function decodeEmb1(data: Buffer): Emb1File {
  let pos = 0;
  const take = (n: number): Buffer => {
    if (pos + n > data.length) {
      throw new Emb1FormatError(
        `truncated payload at byte offset ${pos} (needed ${n} more bytes)`,
      );
    }
    const slice = data.subarray(pos, pos + n);
    pos += n;
    return slice;
  };
  if (take(4).toString("ascii") !== EMB1_MAGIC) {
    throw new Emb1FormatError("not an EMB1 file");
  }
  const version = take(2).readUInt16LE(0);
  if (version !== EMB1_VERSION) {
    throw new Emb1FormatError(`unsupported EMB1 version ${version}`);
  }
  const dim = take(4).readUInt32LE(0);
  if (dim < 1) {
    throw new Emb1FormatError(`embedding dimension must be >= 1, got ${dim}`);
  }
  const count = take(4).readUInt32LE(0);
  const records: Emb1Record[] = [];
  let prevIndex = -1;
  for (let r = 0; r < count; r++) {
    const segmentIndex = take(4).readUInt32LE(0);
    if (r === 0 && segmentIndex !== 0) {
      throw new Emb1FormatError(
        `first record has segment index ${segmentIndex}, expected 0`,
      );
    }
    if (segmentIndex <= prevIndex) {
      throw new Emb1FormatError("segment indices not strictly increasing");
    }
    prevIndex = segmentIndex;
    const n = take(4).readUInt32LE(0);
    const tokens: string[] = [];
    for (let t = 0; t < n; t++) {
      const len = take(2).readUInt16LE(0);
      tokens.push(take(len).toString("utf8"));
    }
    const floats = take(n * dim * 4);
    const values = new Float32Array(n * dim);
    for (let i = 0; i < values.length; i++) {
      values[i] = floats.readFloatLE(i * 4);
    }
    records.push({ segmentIndex, tokens, values });
  }
  if (pos !== data.length) {
    throw new Emb1FormatError(`${data.length - pos} trailing bytes at offset ${pos}`);
  }
  return { dim, records };
}

#!/usr/bin/env node
/** Command-line entry: extract contextual token embeddings to EMB1. */

import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { Emb1FormatError } from "./emb1.js";
import { ExtractError } from "./encoder.js";
import { extractToFile } from "./extract.js";

async function main(): Promise<number> {
  const argv = await yargs(hideBin(process.argv))
    .scriptName("damteval-extract")
    .usage(
      "$0 --model ID --layer N --input PATH --output PATH [--max-len L] [--batch B]",
    )
    .option("model", {
      type: "string",
      demandOption: true,
      describe:
        "encoder id: a Hugging Face model id (e.g. Xenova/bert-base-multilingual-cased), " +
        "or hash[-dN] for the built-in deterministic test encoder",
    })
    .option("layer", {
      type: "number",
      demandOption: true,
      describe:
        "hidden layer to export; -1 selects the model's final layer " +
        "(the only choice for ONNX hub models)",
    })
    .option("input", {
      type: "string",
      demandOption: true,
      describe: "UTF-8 text file, one segment per line",
    })
    .option("output", {
      type: "string",
      demandOption: true,
      describe: "EMB1 file to write",
    })
    .option("max-len", {
      type: "number",
      default: 512,
      describe: "hard cap on tokens per segment (delimiters included)",
    })
    .option("batch", {
      type: "number",
      default: 16,
      describe: "segments encoded per batch",
    })
    .strict()
    .help()
    .parse();

  try {
    await extractToFile({
      model: argv.model,
      layer: argv.layer,
      input: argv.input,
      output: argv.output,
      maxLen: argv["max-len"],
      batch: argv.batch,
    });
    return 0;
  } catch (err) {
    if (err instanceof ExtractError || err instanceof Emb1FormatError) {
      console.error(`error: ${err.message}`);
      return 1;
    }
    if (err instanceof Error && (err as NodeJS.ErrnoException).code) {
      console.error(`error: ${err.message}`);
      return 1;
    }
    throw err;
  }
}

main().then((code) => {
  process.exitCode = code;
});

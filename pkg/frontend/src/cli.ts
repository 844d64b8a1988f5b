#!/usr/bin/env node
/**
 * plot <figure-name> --in <csv> --out <svg>
 *
 * Consumes the cavitygates sweep CSV schema and writes a deterministic
 * SVG; exit code 0 only when an image was written.
 */

import { readFileSync, writeFileSync } from "fs";
import { NoDataError, SchemaError, parseSweepCsv } from "./csv";
import { RECIPES, renderFigure } from "./recipes";

function usage(): string {
  const names = Object.keys(RECIPES).sort().join(", ");
  return `usage: cavitygates-plot <figure> --in <csv> --out <svg>\n  figures: ${names}`;
}

export function main(argv: string[]): number {
  const args = [...argv];
  const positional: string[] = [];
  const options = new Map<string, string>();
  while (args.length > 0) {
    const a = args.shift() as string;
    if (a === "--in" || a === "--out") {
      const v = args.shift();
      if (v === undefined) {
        process.stderr.write(`missing value for ${a}\n${usage()}\n`);
        return 2;
      }
      options.set(a, v);
    } else if (a === "--help" || a === "-h") {
      process.stdout.write(usage() + "\n");
      return 0;
    } else {
      positional.push(a);
    }
  }
  const name = positional[0];
  const input = options.get("--in");
  const output = options.get("--out");
  if (!name || !input || !output) {
    process.stderr.write(usage() + "\n");
    return 2;
  }
  const recipe = RECIPES[name];
  if (!recipe) {
    process.stderr.write(`unknown figure ${JSON.stringify(name)}\n${usage()}\n`);
    return 2;
  }
  let text: string;
  try {
    text = readFileSync(input, "utf8");
  } catch (err) {
    process.stderr.write(`cannot read ${input}: ${(err as Error).message}\n`);
    return 1;
  }
  try {
    const rows = parseSweepCsv(text);
    const svg = renderFigure(recipe(rows));
    writeFileSync(output, svg);
  } catch (err) {
    if (err instanceof NoDataError || err instanceof SchemaError) {
      process.stderr.write(err.message + "\n");
      return 1;
    }
    throw err;
  }
  process.stdout.write(`wrote ${output}\n`);
  return 0;
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}

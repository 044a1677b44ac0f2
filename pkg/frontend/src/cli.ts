/**
 * CLI: alsim-plot --results <csv> --kind by-retention|by-strategy|both --out <dir>
 *
 * Accepts either the raw results CSV or the aggregate CSV produced by the
 * simulator and writes one SVG per strategy and/or retention level.
 */

import { readFileSync } from "node:fs";
import { readSummaries } from "./csv.js";
import { FigureKind, plot } from "./plot.js";

interface Args {
  results: string;
  kind: FigureKind | "both";
  out: string;
}

function parseArgs(argv: string[]): Args {
  const values = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    const flag = argv[i];
    const value = argv[i + 1];
    if (!flag.startsWith("--") || value === undefined) {
      throw new Error(`usage: alsim-plot --results <csv> --kind <by-retention|by-strategy|both> --out <dir>`);
    }
    values.set(flag.slice(2), value);
  }
  const results = values.get("results");
  const out = values.get("out");
  const kind = values.get("kind") ?? "both";
  if (!results || !out) {
    throw new Error("both --results and --out are required");
  }
  if (kind !== "by-retention" && kind !== "by-strategy" && kind !== "both") {
    throw new Error(`unknown --kind ${JSON.stringify(kind)}; valid: by-retention, by-strategy, both`);
  }
  return { results, kind, out };
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error((err as Error).message);
    return 1;
  }
  try {
    const cells = readSummaries(readFileSync(args.results, "utf-8"));
    const kinds: FigureKind[] =
      args.kind === "both" ? ["by-retention", "by-strategy"] : [args.kind];
    for (const kind of kinds) {
      for (const figure of plot(cells, kind, args.out)) {
        console.log(`${figure.path} (${figure.seriesCount} series)`);
      }
    }
    return 0;
  } catch (err) {
    console.error(`alsim-plot: ${(err as Error).message}`);
    return 2;
  }
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
  process.exit(main(process.argv.slice(2)));
}

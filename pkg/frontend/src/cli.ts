/**
 * Render figure sets from a simulation trace CSV.
 *
 * Usage:
 *   npx tsx src/cli.ts --input fixtures/case1.csv --set case1_panels --outdir out/
 */

import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { FIGURE_SETS, FigureSet, render } from "./figures.js";
import { SchemaMismatch } from "./trace.js";

async function main(): Promise<void> {
  const argv = await yargs(hideBin(process.argv))
    .option("input", {
      type: "string",
      demandOption: true,
      describe: "trace CSV path",
    })
    .option("set", {
      type: "string",
      demandOption: true,
      choices: FIGURE_SETS,
      describe: "figure set to render",
    })
    .option("outdir", {
      type: "string",
      demandOption: true,
      describe: "output directory for SVG files",
    })
    .strict()
    .parse();

  const written = await render({
    input: argv.input,
    set: argv.set as FigureSet,
    outdir: argv.outdir,
  });
  for (const f of written) console.log(`wrote ${f}`);
}

main().catch((err) => {
  if (err instanceof SchemaMismatch) {
    console.error(`schema mismatch: ${err.message}`);
  } else {
    console.error(String(err?.message ?? err));
  }
  process.exit(1);
});

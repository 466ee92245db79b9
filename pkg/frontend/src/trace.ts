/**
 * Reader for the versioned simulation trace CSV contract.
 *
 * A trace file starts with a `# schema_version=1` comment line, then a
 * 41-column header, then one row per logged step. All numeric values are
 * written with 17 significant digits, so parsing is lossless.
 */

import Papa from "papaparse";

export const SCHEMA_VERSION = 1;

export const COLUMNS = [
  "t",
  "x1", "x2", "x3",
  "v1", "v2", "v3",
  "R11", "R12", "R13", "R21", "R22", "R23", "R31", "R32", "R33",
  "W1", "W2", "W3",
  "f",
  "M1", "M2", "M3",
  "f1", "f2", "f3", "f4",
  "mode",
  "Psi",
  "eR1", "eR2", "eR3",
  "eW1", "eW2", "eW3",
  "ex1", "ex2", "ex3",
  "ev1", "ev2", "ev3",
] as const;

export type ColumnName = (typeof COLUMNS)[number];

export class SchemaMismatch extends Error {
  constructor(message: string) {
    super(message);
    this.name = "SchemaMismatch";
  }
}

export interface Trace {
  /** Number of data rows. */
  rows: number;
  /** Controller mode per row. */
  mode: string[];
  /** Numeric column by name; throws on unknown names. */
  column(name: ColumnName): number[];
}

/** Parse trace CSV text, validating the schema line and header exactly. */
export function parseTrace(text: string): Trace {
  const lines = text.split(/\r?\n/);
  if (lines[0] !== `# schema_version=${SCHEMA_VERSION}`) {
    throw new SchemaMismatch(
      `expected first line '# schema_version=${SCHEMA_VERSION}', got '${lines[0] ?? ""}'`,
    );
  }
  const body = lines.slice(1).join("\n");
  const parsed = Papa.parse<string[]>(body.trim(), { delimiter: "," });
  if (parsed.errors.length > 0) {
    throw new SchemaMismatch(`CSV parse error: ${parsed.errors[0].message}`);
  }
  const records = parsed.data;
  const header = records[0] ?? [];
  if (header.join(",") !== COLUMNS.join(",")) {
    const missing = COLUMNS.filter((c) => !header.includes(c));
    throw new SchemaMismatch(
      missing.length > 0
        ? `missing columns: ${missing.join(", ")}`
        : "header does not match the trace contract",
    );
  }
  const dataRows = records.slice(1);
  if (dataRows.length === 0) {
    throw new SchemaMismatch("no data rows");
  }

  const modeIdx = COLUMNS.indexOf("mode");
  const numeric = new Map<string, number[]>();
  for (const [j, name] of COLUMNS.entries()) {
    if (j === modeIdx) continue;
    const vals = dataRows.map((row, i) => {
      const v = Number(row[j]);
      if (row.length !== COLUMNS.length || Number.isNaN(v)) {
        throw new SchemaMismatch(`bad value for '${name}' at data row ${i + 1}`);
      }
      return v;
    });
    numeric.set(name, vals);
  }
  const mode = dataRows.map((row) => row[modeIdx]);

  return {
    rows: dataRows.length,
    mode,
    column(name: ColumnName): number[] {
      const vals = numeric.get(name);
      if (vals === undefined) {
        throw new SchemaMismatch(`missing column: ${name}`);
      }
      return vals;
    },
  };
}

import { readFileSync } from "node:fs";
import { basename } from "node:path";

export interface Table {
  path: string;
  header: string[];
  rows: string[][];
}

/** Schema violations carry the offending column so the CLI can name it. */
export class SchemaError extends Error {
  column: string;
  constructor(column: string, file: string) {
    super(`schema mismatch in ${basename(file)}: missing column "${column}"`);
    this.name = "SchemaError";
    this.column = column;
  }
}

export function parseCsv(text: string, path = "<string>"): Table {
  // simulator CSVs are machine-written: no quoting, LF line ends
  const lines = text.split("\n").map(l => l.replace(/\r$/, ""));
  while (lines.length > 0 && lines[lines.length - 1] === "") lines.pop();
  if (lines.length === 0) {
    throw new Error(`empty CSV: ${path}`);
  }
  const header = lines[0].split(",");
  const rows = lines.slice(1).map(l => l.split(","));
  return { path, header, rows };
}

export function readTable(path: string): Table {
  return parseCsv(readFileSync(path, "utf-8"), path);
}

/**
 * Map required column names to indices, failing loudly on the first
 * one the header does not contain.
 */
export function requireColumns(t: Table, names: string[]): Record<string, number> {
  const idx: Record<string, number> = {};
  for (const name of names) {
    const i = t.header.indexOf(name);
    if (i < 0) throw new SchemaError(name, t.path);
    idx[name] = i;
  }
  return idx;
}

export function numericColumn(t: Table, name: string): number[] {
  const idx = requireColumns(t, [name])[name];
  return t.rows.map(r => {
    const v = Number(r[idx]);
    if (Number.isNaN(v)) {
      throw new Error(`non-numeric value "${r[idx]}" in column ${name} of ${basename(t.path)}`);
    }
    return v;
  });
}

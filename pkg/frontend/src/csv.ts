import { readFileSync } from "node:fs";

/** Raised when a report file is missing a column or carries the wrong header. */
export class SchemaError extends Error {
  readonly file: string;
  readonly column: string;

  constructor(file: string, column: string, detail: string) {
    super(`${file}: column ${column}: ${detail}`);
    this.name = "SchemaError";
    this.file = file;
    this.column = column;
  }
}

export interface Table {
  readonly header: readonly string[];
  readonly rows: readonly (readonly string[])[];
}

/**
 * Load a comma-separated table and check its header verbatim.
 *
 * Report files never quote fields, so a plain split is exact.  The first
 * header mismatch is reported by file and column name so a misassembled
 * bundle points straight at the offending field.
 */
export function readTable(path: string, expected: readonly string[]): Table {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch {
    throw new SchemaError(path, expected[0] ?? "?", "file is missing or unreadable");
  }
  const lines = text.split("\n").map((s) => (s.endsWith("\r") ? s.slice(0, -1) : s));
  while (lines.length > 0 && lines[lines.length - 1] === "") lines.pop();
  if (lines.length === 0) {
    throw new SchemaError(path, expected[0] ?? "?", "file is empty");
  }
  const header = lines[0].split(",");
  for (let i = 0; i < expected.length; i += 1) {
    if (header[i] !== expected[i]) {
      throw new SchemaError(path, expected[i], `expected at position ${i}, found ${header[i] ?? "nothing"}`);
    }
  }
  if (header.length !== expected.length) {
    throw new SchemaError(path, header[expected.length], "unexpected extra column");
  }
  const rows: string[][] = [];
  for (let li = 1; li < lines.length; li += 1) {
    const parts = lines[li].split(",");
    if (parts.length !== expected.length) {
      throw new SchemaError(path, expected[Math.min(parts.length, expected.length) - 1], `row ${li} has ${parts.length} fields, expected ${expected.length}`);
    }
    rows.push(parts);
  }
  return { header, rows };
}

export function numColumn(table: Table, path: string, name: string): number[] {
  const idx = table.header.indexOf(name);
  if (idx < 0) throw new SchemaError(path, name, "column not present");
  return table.rows.map((r, ri) => {
    const v = Number(r[idx]);
    if (Number.isNaN(v) && r[idx] !== "nan") {
      throw new SchemaError(path, name, `row ${ri + 1} value ${r[idx]} is not numeric`);
    }
    return v;
  });
}

export function strColumn(table: Table, path: string, name: string): string[] {
  const idx = table.header.indexOf(name);
  if (idx < 0) throw new SchemaError(path, name, "column not present");
  return table.rows.map((r) => r[idx]);
}

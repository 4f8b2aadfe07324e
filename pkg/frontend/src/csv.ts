/** Strict reader for the harness CSV files (no quoting, comma-separated). */

export interface Table {
  columns: string[];
  rows: Record<string, string>[];
}

export class FiggenError extends Error {}

export function parseCsv(text: string): Table {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new FiggenError("empty CSV file");
  }
  const columns = lines[0].split(",");
  const rows = lines.slice(1).map((line, i) => {
    const cells = line.split(",");
    if (cells.length !== columns.length) {
      throw new FiggenError(`row ${i + 2} has ${cells.length} cells, expected ${columns.length}`);
    }
    const row: Record<string, string> = {};
    columns.forEach((name, j) => (row[name] = cells[j]));
    return row;
  });
  return { columns, rows };
}

export function requireColumns(table: Table, names: string[]): void {
  for (const name of names) {
    if (!table.columns.includes(name)) {
      throw new FiggenError(`missing column "${name}" (have: ${table.columns.join(", ")})`);
    }
  }
}

/** Numeric cell access; NA maps to null. */
export function num(row: Record<string, string>, column: string): number | null {
  const raw = row[column];
  if (raw === undefined) throw new FiggenError(`missing column "${column}"`);
  if (raw === "NA") return null;
  const value = Number(raw);
  if (!Number.isFinite(value)) {
    throw new FiggenError(`non-numeric value "${raw}" in column "${column}"`);
  }
  return value;
}

/** Distinct values in first-appearance order (deterministic legends/facets). */
export function distinct(rows: Record<string, string>[], column: string): string[] {
  const seen: string[] = [];
  for (const row of rows) {
    const value = row[column];
    if (!seen.includes(value)) seen.push(value);
  }
  return seen;
}

/**
 * Parser for the ra-sim sweep CSV schema.
 *
 * One file is one sweep: every row shares protocol/distribution/n_slots and
 * carries the per-load-point statistics. The distribution field holds the
 * `d1:p1,d2:p2,...` literal and is therefore quoted in the file.
 */

export const CSV_COLUMNS = [
  "protocol",
  "distribution",
  "n_slots",
  "load",
  "trials",
  "throughput_mean",
  "throughput_ci95",
  "plr_mean",
  "plr_ci95_low",
  "plr_ci95_high",
  "packets_total",
] as const;

export interface SweepRow {
  protocol: string;
  distribution: string;
  nSlots: number;
  load: number;
  trials: number;
  throughputMean: number;
  throughputCi95: number;
  plrMean: number;
  plrCi95Low: number;
  plrCi95High: number;
  packetsTotal: number;
}

export class SchemaError extends Error {}

/** Split one CSV record, honoring double-quoted fields. */
function splitRecord(line: string, source: string, lineNo: number): string[] {
  const fields: string[] = [];
  let field = "";
  let quoted = false;
  for (let i = 0; i < line.length; i++) {
    const ch = line[i];
    if (quoted) {
      if (ch === '"') {
        if (line[i + 1] === '"') {
          field += '"';
          i++;
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
    } else if (ch === '"') {
      quoted = true;
    } else if (ch === ",") {
      fields.push(field);
      field = "";
    } else {
      field += ch;
    }
  }
  if (quoted) {
    throw new SchemaError(`${source}: line ${lineNo}: unterminated quote`);
  }
  fields.push(field);
  return fields;
}

function numberAt(
  fields: string[],
  column: (typeof CSV_COLUMNS)[number],
  source: string,
  lineNo: number,
): number {
  const idx = CSV_COLUMNS.indexOf(column);
  const raw = fields[idx];
  const value = Number(raw);
  if (raw.trim() === "" || Number.isNaN(value)) {
    throw new SchemaError(
      `${source}: line ${lineNo}: column '${column}': cannot parse '${raw}'`,
    );
  }
  return value;
}

export function parseSweepCsv(text: string, source = "<csv>"): SweepRow[] {
  const lines = text.split("\n");
  while (lines.length && lines[lines.length - 1].trim() === "") {
    lines.pop();
  }
  if (lines.length === 0) {
    throw new SchemaError(`${source}: line 1: empty file, expected header`);
  }
  const header = splitRecord(lines[0].replace(/\r$/, ""), source, 1);
  if (
    header.length !== CSV_COLUMNS.length ||
    header.some((h, i) => h !== CSV_COLUMNS[i])
  ) {
    throw new SchemaError(
      `${source}: line 1: header does not match the sweep schema ` +
        `(${CSV_COLUMNS.join(",")})`,
    );
  }
  if (lines.length === 1) {
    throw new SchemaError(`${source}: empty CSV body, nothing to plot`);
  }
  const rows: SweepRow[] = [];
  for (let n = 1; n < lines.length; n++) {
    const lineNo = n + 1;
    const fields = splitRecord(lines[n].replace(/\r$/, ""), source, lineNo);
    if (fields.length !== CSV_COLUMNS.length) {
      throw new SchemaError(
        `${source}: line ${lineNo}: expected ${CSV_COLUMNS.length} fields, got ${fields.length}`,
      );
    }
    rows.push({
      protocol: fields[0],
      distribution: fields[1],
      nSlots: numberAt(fields, "n_slots", source, lineNo),
      load: numberAt(fields, "load", source, lineNo),
      trials: numberAt(fields, "trials", source, lineNo),
      throughputMean: numberAt(fields, "throughput_mean", source, lineNo),
      throughputCi95: numberAt(fields, "throughput_ci95", source, lineNo),
      plrMean: numberAt(fields, "plr_mean", source, lineNo),
      plrCi95Low: numberAt(fields, "plr_ci95_low", source, lineNo),
      plrCi95High: numberAt(fields, "plr_ci95_high", source, lineNo),
      packetsTotal: numberAt(fields, "packets_total", source, lineNo),
    });
  }
  const first = rows[0];
  for (const row of rows) {
    if (
      row.protocol !== first.protocol ||
      row.distribution !== first.distribution ||
      row.nSlots !== first.nSlots
    ) {
      throw new SchemaError(
        `${source}: mixed protocol/distribution/n_slots in one file`,
      );
    }
  }
  rows.sort((a, b) => a.load - b.load);
  return rows;
}

/**
 * Largest measured load whose mean PLR stays at or below the target, with
 * its throughput; null when no point qualifies. Recomputed from raw rows so
 * figures stay consistent with hand-edited sweep files.
 */
export function loadAtTargetPlr(
  rows: SweepRow[],
  target: number,
): { load: number; throughput: number } | null {
  let best: { load: number; throughput: number } | null = null;
  for (const row of rows) {
    if (row.plrMean <= target) {
      best = { load: row.load, throughput: row.throughputMean };
    }
  }
  return best;
}

/**
 * Parser for the sweep CSV contract of the cavitygates CLI.
 *
 * Fixed header:
 *   protocol,N,C,gamma_over_kappa,Tg,delta,Delta,
 *   infidelity_analytic,infidelity_simulated
 */

export const CSV_COLUMNS = [
  "protocol",
  "N",
  "C",
  "gamma_over_kappa",
  "Tg",
  "delta",
  "Delta",
  "infidelity_analytic",
  "infidelity_simulated",
] as const;

export interface SweepRow {
  protocol: string;
  n: number;
  cooperativity: number;
  gammaOverKappa: number;
  tg: number;
  delta: number;
  bigDelta: number;
  infidelityAnalytic: number;
  infidelitySimulated: number;
}

export class SchemaError extends Error {}
export class NoDataError extends Error {}

function parseNumber(field: string): number {
  if (field === "" || field === "nan") return NaN;
  if (field === "inf") return Infinity;
  if (field === "-inf") return -Infinity;
  const value = Number(field);
  if (Number.isNaN(value) && field !== "nan") {
    throw new SchemaError(`unparseable numeric field ${JSON.stringify(field)}`);
  }
  return value;
}

export function parseSweepCsv(text: string): SweepRow[] {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new NoDataError("no data: the CSV file is empty");
  }
  const header = lines[0].split(",");
  const expected = CSV_COLUMNS.join(",");
  if (header.join(",") !== expected) {
    throw new SchemaError(
      `CSV header mismatch:\n  expected: ${expected}\n  found:    ${header.join(",")}`,
    );
  }
  const rows: SweepRow[] = [];
  for (const line of lines.slice(1)) {
    const fields = line.split(",");
    if (fields.length !== CSV_COLUMNS.length) {
      throw new SchemaError(
        `row has ${fields.length} fields, expected ${CSV_COLUMNS.length}: ${line}`,
      );
    }
    rows.push({
      protocol: fields[0],
      n: parseNumber(fields[1]),
      cooperativity: parseNumber(fields[2]),
      gammaOverKappa: parseNumber(fields[3]),
      tg: parseNumber(fields[4]),
      delta: parseNumber(fields[5]),
      bigDelta: parseNumber(fields[6]),
      infidelityAnalytic: parseNumber(fields[7]),
      infidelitySimulated: parseNumber(fields[8]),
    });
  }
  if (rows.length === 0) {
    throw new NoDataError("no data: the CSV contains a header but no rows");
  }
  return rows;
}

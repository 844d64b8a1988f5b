import assert from "node:assert/strict";
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import test from "node:test";

import { NoDataError, SchemaError, parseSweepCsv } from "../csv";
import { fig2b, fig3c, renderFigure } from "../recipes";
import { main } from "../cli";
import { STYLE_VERSION } from "../style";

const HEADER =
  "protocol,N,C,gamma_over_kappa,Tg,delta,Delta,infidelity_analytic,infidelity_simulated";

function fig2bCsv(): string {
  const rows = [
    ["A", "2", "500", "0.1", "2000", "1.1", "nan", "0.0888", "0.0853"],
    ["A", "2", "500", "1", "2000", "0.63", "nan", "0.0888", "0.0852"],
    ["A", "2", "500", "10", "2000", "0.2", "nan", "0.0888", "0.0851"],
    ["A", "2", "5000", "0.1", "2000", "1.1", "nan", "0.0281", "0.0277"],
    ["A", "2", "5000", "1", "2000", "0.63", "nan", "0.0281", "0.0277"],
    ["A", "2", "5000", "10", "2000", "0.2", "nan", "0.0281", "0.0276"],
  ];
  return [HEADER, ...rows.map((r) => r.join(","))].join("\n") + "\n";
}

test("csv parser enforces the schema", () => {
  assert.throws(() => parseSweepCsv("protocol,N\nA,2\n"), SchemaError);
  assert.throws(() => parseSweepCsv(""), NoDataError);
  assert.throws(() => parseSweepCsv(HEADER + "\n"), NoDataError);
  const rows = parseSweepCsv(fig2bCsv());
  assert.equal(rows.length, 6);
  assert.equal(rows[0].cooperativity, 500);
  assert.ok(Number.isNaN(rows[0].bigDelta));
});

test("fig2b render has a dashed reference and one marker group per ratio", () => {
  const svg = renderFigure(fig2b(parseSweepCsv(fig2bCsv())));
  assert.match(svg, /class="reference"/);
  assert.match(svg, /stroke-dasharray="7 4"/);
  const groups = svg.match(/class="simulated-markers"/g) ?? [];
  assert.equal(groups.length, 3); // one series per gamma/kappa value
  assert.ok(svg.includes(STYLE_VERSION));
  assert.match(svg, /1\.99\/sqrt\(C\)/);
});

test("reference line follows the closed form", () => {
  const svg = renderFigure(fig2b(parseSweepCsv(fig2bCsv())));
  // the reference path spans the full C range; spot-check its label
  assert.match(svg, /data-label="g\/k=0.1"/);
  assert.match(svg, /data-label="g\/k=10"/);
});

test("byte-stable output under a fixed style version", () => {
  const a = renderFigure(fig2b(parseSweepCsv(fig2bCsv())));
  const b = renderFigure(fig2b(parseSweepCsv(fig2bCsv())));
  assert.equal(a, b);
});

test("fig3c draws synthesis and baseline series", () => {
  const rows = [
    ["B", "3", "1000000", "1", "nan", "nan", "nan", "8.1e-06", "nan"],
    ["B", "4", "1000000", "1", "nan", "nan", "nan", "1.6e-05", "nan"],
    ["B-baseline", "3", "1000000", "1", "nan", "nan", "nan", "1.07e-05", "nan"],
    ["B-baseline", "4", "1000000", "1", "nan", "nan", "nan", "2.5e-05", "nan"],
  ];
  const csv = [HEADER, ...rows.map((r) => r.join(","))].join("\n") + "\n";
  const svg = renderFigure(fig3c(parseSweepCsv(csv)));
  assert.match(svg, /pulse synthesis/);
  assert.match(svg, /CZ decomposition/);
  assert.match(svg, /stroke-dasharray="3 3"/);
});

test("cli writes an image and round-trips bytes", () => {
  const dir = mkdtempSync(join(tmpdir(), "cgplot-"));
  const input = join(dir, "fig2b.csv");
  writeFileSync(input, fig2bCsv());
  const out1 = join(dir, "a.svg");
  const out2 = join(dir, "b.svg");
  assert.equal(main(["fig2b", "--in", input, "--out", out1]), 0);
  assert.equal(main(["fig2b", "--in", input, "--out", out2]), 0);
  assert.deepEqual(readFileSync(out1), readFileSync(out2));
});

test("cli fails with a usage error on unknown figures", () => {
  assert.equal(main(["fig9z", "--in", "x.csv", "--out", "y.svg"]), 2);
  assert.equal(main([]), 2);
});

test("cli reports empty csv as no data with nonzero exit", () => {
  const dir = mkdtempSync(join(tmpdir(), "cgplot-"));
  const input = join(dir, "empty.csv");
  writeFileSync(input, HEADER + "\n");
  assert.equal(main(["fig2b", "--in", input, "--out", join(dir, "z.svg")]), 1);
});

test("cli reports schema mismatches with column diagnostics", () => {
  const dir = mkdtempSync(join(tmpdir(), "cgplot-"));
  const input = join(dir, "bad.csv");
  writeFileSync(input, "a,b,c\n1,2,3\n");
  assert.equal(main(["fig2b", "--in", input, "--out", join(dir, "z.svg")]), 1);
});

/**
 * Figure recipes: how the sweep rows of each figure map onto series,
 * axes, and closed-form reference lines.
 */

import { NoDataError, SweepRow } from "./csv";
import { FIGURE, seriesColor, seriesMarker } from "./style";
import {
  AxisSpec,
  Scale,
  axes,
  document as svgDocument,
  markerElement,
  polyline,
  project,
} from "./svg";

export interface Series {
  label: string;
  points: Array<[number, number]>; // data coordinates
  kind: "markers" | "line" | "markers+line";
  dash: string | null;
  cssClass: string;
}

export interface FigureData {
  title: string;
  xLabel: string;
  yLabel: string;
  xKind: "linear" | "log";
  series: Series[];
}

const finite = (v: number) => Number.isFinite(v);

function groupKeyed<T>(rows: SweepRow[], key: (r: SweepRow) => string): Map<string, SweepRow[]> {
  const out = new Map<string, SweepRow[]>();
  for (const row of rows) {
    const k = key(row);
    const bucket = out.get(k);
    if (bucket) bucket.push(row);
    else out.set(k, [row]);
  }
  return out;
}

function sortedUnique(values: number[]): number[] {
  return [...new Set(values)].sort((a, b) => a - b);
}

/** Dashed closed-form reference 1.99 / sqrt(C) across the C range. */
export function referenceLine(cValues: number[]): Series {
  const coefficient = Math.PI / Math.sqrt(2.5); // N theta / sqrt(2(1+2^-N)) at N=2, theta=pi/2
  const [lo, hi] = [Math.min(...cValues), Math.max(...cValues)];
  const points: Array<[number, number]> = [];
  for (let i = 0; i <= 64; i += 1) {
    const c = lo * Math.pow(hi / lo, i / 64);
    points.push([c, coefficient / Math.sqrt(c)]);
  }
  return {
    label: "1.99/sqrt(C)",
    points,
    kind: "line",
    dash: FIGURE.referenceDash,
    cssClass: "reference",
  };
}

export function fig2a(rows: SweepRow[]): FigureData {
  const series: Series[] = [];
  for (const [key, group] of groupKeyed(
    rows,
    (r) => `C=${r.cooperativity}, g/k=${r.gammaOverKappa}`,
  )) {
    const sorted = [...group].sort((a, b) => a.tg - b.tg);
    series.push({
      label: `${key} analytic`,
      points: sorted.filter((r) => finite(r.infidelityAnalytic)).map((r) => [r.tg, r.infidelityAnalytic]),
      kind: "line",
      dash: null,
      cssClass: "analytic",
    });
    const sim = sorted.filter((r) => finite(r.infidelitySimulated));
    if (sim.length > 0) {
      series.push({
        label: `${key} simulated`,
        points: sim.map((r) => [r.tg, r.infidelitySimulated]),
        kind: "markers",
        dash: null,
        cssClass: "simulated",
      });
    }
  }
  return {
    title: "Geometric CZ infidelity vs pulse duration",
    xLabel: "T g",
    yLabel: "1 - F",
    xKind: "log",
    series,
  };
}

export function fig2b(rows: SweepRow[]): FigureData {
  const series: Series[] = [referenceLine(rows.map((r) => r.cooperativity))];
  for (const [key, group] of groupKeyed(rows, (r) => `g/k=${r.gammaOverKappa}`)) {
    const sorted = [...group].sort((a, b) => a.cooperativity - b.cooperativity);
    series.push({
      label: key,
      points: sorted
        .filter((r) => finite(r.infidelitySimulated))
        .map((r) => [r.cooperativity, r.infidelitySimulated]),
      kind: "markers",
      dash: null,
      cssClass: "simulated",
    });
  }
  return {
    title: "Long-pulse infidelity vs cooperativity",
    xLabel: "C",
    yLabel: "1 - F",
    xKind: "log",
    series,
  };
}

export function fig3a(rows: SweepRow[]): FigureData {
  const series: Series[] = [];
  for (const [key, group] of groupKeyed(
    rows,
    (r) => `C=${r.cooperativity}, g/k=${r.gammaOverKappa}`,
  )) {
    const sorted = [...group].sort((a, b) => a.tg - b.tg);
    series.push({
      label: `${key} asymptote`,
      points: sorted.map((r) => [r.tg, r.infidelityAnalytic]),
      kind: "line",
      dash: FIGURE.referenceDash,
      cssClass: "reference",
    });
    series.push({
      label: `${key} simulated`,
      points: sorted
        .filter((r) => finite(r.infidelitySimulated))
        .map((r) => [r.tg, r.infidelitySimulated]),
      kind: "markers+line",
      dash: null,
      cssClass: "simulated",
    });
  }
  return {
    title: "Adiabatic CZ infidelity vs pulse duration",
    xLabel: "T g",
    yLabel: "1 - F",
    xKind: "log",
    series,
  };
}

function fig3Synth(rows: SweepRow[], title: string): FigureData {
  const series: Series[] = [];
  const synth = rows.filter((r) => r.protocol === "B");
  const base = rows.filter((r) => r.protocol === "B-baseline");
  if (synth.length > 0) {
    series.push({
      label: "pulse synthesis",
      points: synth
        .sort((a, b) => a.n - b.n)
        .map((r) => [r.n, r.infidelityAnalytic]),
      kind: "markers+line",
      dash: null,
      cssClass: "simulated",
    });
  }
  if (base.length > 0) {
    series.push({
      label: "CZ decomposition",
      points: base.sort((a, b) => a.n - b.n).map((r) => [r.n, r.infidelityAnalytic]),
      kind: "markers+line",
      dash: FIGURE.baselineDash,
      cssClass: "baseline",
    });
  }
  return {
    title,
    xLabel: "N",
    yLabel: "1 - F",
    xKind: "linear",
    series,
  };
}

export function fig3b(rows: SweepRow[]): FigureData {
  return fig3Synth(rows, "Phase-rotation gate infidelity vs register size");
}

export function fig3c(rows: SweepRow[]): FigureData {
  return fig3Synth(rows, "Multi-controlled-Z worst-case infidelity vs register size");
}

export const RECIPES: Record<string, (rows: SweepRow[]) => FigureData> = {
  fig2a,
  fig2b,
  fig3a,
  fig3b,
  fig3c,
};

export function renderFigure(data: FigureData): string {
  const all = data.series.flatMap((s) => s.points);
  if (all.length === 0) {
    throw new NoDataError("no data: every series is empty after filtering");
  }
  const xs = all.map((p) => p[0]);
  const ys = all.map((p) => p[1]).filter((v) => v > 0 && Number.isFinite(v));
  if (ys.length === 0) {
    throw new NoDataError("no data: no positive infidelity values to plot");
  }
  const pad = (lo: number, hi: number, kind: "linear" | "log"): [number, number] => {
    if (kind === "log") {
      const f = Math.pow(hi / lo, 0.06) || 1.05;
      return [lo / f, hi * f];
    }
    const m = 0.06 * (hi - lo || 1);
    return [lo - m, hi + m];
  };
  const { width, height, marginLeft, marginRight, marginTop, marginBottom } = FIGURE;
  const xDomain = pad(Math.min(...xs), Math.max(...xs), data.xKind);
  const yDomain = pad(Math.min(...ys), Math.max(...ys), "log");
  const xScale: Scale = {
    kind: data.xKind,
    domain: xDomain,
    range: [marginLeft, width - marginRight],
  };
  const yScale: Scale = {
    kind: "log",
    domain: yDomain,
    range: [height - marginBottom, marginTop],
  };
  const xAxis: AxisSpec = { scale: xScale, label: data.xLabel };
  const yAxis: AxisSpec = { scale: yScale, label: data.yLabel };
  const parts: string[] = [axes(xAxis, yAxis)];
  let markerIndex = 0;
  data.series.forEach((s, i) => {
    const color = s.cssClass === "reference" ? "#444444" : seriesColor(i);
    const projected = s.points
      .filter(([, y]) => y > 0 && Number.isFinite(y))
      .map(([x, y]): [number, number] => [project(xScale, x), project(yScale, y)]);
    if (projected.length === 0) return;
    if (s.kind !== "markers") {
      parts.push(polyline(projected, color, s.dash, s.cssClass));
    }
    if (s.kind !== "line") {
      const shape = seriesMarker(markerIndex);
      markerIndex += 1;
      const markers = projected
        .map(([px, py]) => markerElement(shape, px, py, FIGURE.markerSize, color))
        .join("");
      parts.push(`<g class="${s.cssClass}-markers" data-label="${s.label}">${markers}</g>`);
    }
  });
  // legend
  const legendX = width - marginRight - 200;
  let legendY = marginTop + 10;
  for (const [i, s] of data.series.entries()) {
    const color = s.cssClass === "reference" ? "#444444" : seriesColor(i);
    parts.push(
      `<text x="${legendX}" y="${legendY}" font-size="${FIGURE.fontSize - 2}" fill="${color}">${s.label}</text>`,
    );
    legendY += FIGURE.fontSize + 2;
  }
  return svgDocument(parts.join("\n"), data.title);
}

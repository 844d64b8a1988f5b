/**
 * Minimal deterministic SVG scene builder with log/linear axes.
 * Coordinates are formatted with fixed precision so re-renders of the
 * same data under the same style version are byte-identical.
 */

import { FIGURE, MarkerShape, STYLE_VERSION } from "./style";

export type ScaleKind = "linear" | "log";

export interface Scale {
  kind: ScaleKind;
  domain: [number, number];
  range: [number, number];
}

export function fmt(x: number): string {
  if (!Number.isFinite(x)) return "0";
  const s = x.toFixed(2);
  return s === "-0.00" ? "0.00" : s;
}

export function project(scale: Scale, value: number): number {
  const [d0, d1] = scale.domain;
  const [r0, r1] = scale.range;
  let t: number;
  if (scale.kind === "log") {
    t = (Math.log10(value) - Math.log10(d0)) / (Math.log10(d1) - Math.log10(d0));
  } else {
    t = (value - d0) / (d1 - d0);
  }
  return r0 + t * (r1 - r0);
}

export function niceLogTicks(domain: [number, number]): number[] {
  const lo = Math.floor(Math.log10(domain[0]));
  const hi = Math.ceil(Math.log10(domain[1]));
  const ticks: number[] = [];
  for (let e = lo; e <= hi; e += 1) {
    const value = Math.pow(10, e);
    if (value >= domain[0] * 0.999 && value <= domain[1] * 1.001) {
      ticks.push(value);
    }
  }
  if (ticks.length < 2) {
    return [domain[0], domain[1]];
  }
  return ticks;
}

export function niceLinearTicks(domain: [number, number], count = 6): number[] {
  const span = domain[1] - domain[0];
  const step = Math.pow(10, Math.floor(Math.log10(span / count)));
  const candidates = [step, 2 * step, 5 * step, 10 * step];
  const chosen = candidates.find((s) => span / s <= count) ?? 10 * step;
  const ticks: number[] = [];
  let v = Math.ceil(domain[0] / chosen) * chosen;
  for (; v <= domain[1] + 1e-12; v += chosen) {
    ticks.push(Number(v.toPrecision(12)));
  }
  return ticks;
}

export function tickLabel(value: number, kind: ScaleKind): string {
  if (kind === "log") {
    const e = Math.round(Math.log10(value));
    if (Math.abs(value - Math.pow(10, e)) < 1e-9 * value) {
      return `1e${e}`;
    }
  }
  if (Number.isInteger(value)) return String(value);
  return String(Number(value.toPrecision(4)));
}

export function markerElement(
  shape: MarkerShape,
  cx: number,
  cy: number,
  size: number,
  color: string,
): string {
  const s = size;
  switch (shape) {
    case "circle":
      return `<circle cx="${fmt(cx)}" cy="${fmt(cy)}" r="${fmt(s)}" fill="${color}"/>`;
    case "square":
      return `<rect x="${fmt(cx - s)}" y="${fmt(cy - s)}" width="${fmt(2 * s)}" height="${fmt(2 * s)}" fill="${color}"/>`;
    case "diamond":
      return `<path d="M ${fmt(cx)} ${fmt(cy - 1.3 * s)} L ${fmt(cx + 1.3 * s)} ${fmt(cy)} L ${fmt(cx)} ${fmt(cy + 1.3 * s)} L ${fmt(cx - 1.3 * s)} ${fmt(cy)} Z" fill="${color}"/>`;
    case "triangle":
      return `<path d="M ${fmt(cx)} ${fmt(cy - 1.3 * s)} L ${fmt(cx + 1.2 * s)} ${fmt(cy + s)} L ${fmt(cx - 1.2 * s)} ${fmt(cy + s)} Z" fill="${color}"/>`;
  }
}

export function polyline(
  points: Array<[number, number]>,
  color: string,
  dash: string | null,
  cssClass: string,
): string {
  const path = points
    .map(([x, y], i) => `${i === 0 ? "M" : "L"} ${fmt(x)} ${fmt(y)}`)
    .join(" ");
  const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
  return `<path class="${cssClass}" d="${path}" fill="none" stroke="${color}" stroke-width="${FIGURE.lineWidth}"${dashAttr}/>`;
}

export interface AxisSpec {
  scale: Scale;
  label: string;
}

export function axes(x: AxisSpec, y: AxisSpec): string {
  const parts: string[] = [];
  const { marginLeft, marginTop, tickLength, fontSize } = FIGURE;
  const x0 = x.scale.range[0];
  const x1 = x.scale.range[1];
  const yBottom = y.scale.range[0];
  const yTop = y.scale.range[1];
  parts.push(
    `<rect x="${fmt(x0)}" y="${fmt(yTop)}" width="${fmt(x1 - x0)}" height="${fmt(yBottom - yTop)}" fill="none" stroke="#000" stroke-width="1"/>`,
  );
  const xticks =
    x.scale.kind === "log" ? niceLogTicks(x.scale.domain) : niceLinearTicks(x.scale.domain);
  for (const t of xticks) {
    const px = project(x.scale, t);
    parts.push(
      `<line x1="${fmt(px)}" y1="${fmt(yBottom)}" x2="${fmt(px)}" y2="${fmt(yBottom - tickLength)}" stroke="#000" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${fmt(px)}" y="${fmt(yBottom + fontSize + 6)}" text-anchor="middle" font-size="${fontSize}">${tickLabel(t, x.scale.kind)}</text>`,
    );
  }
  const yticks =
    y.scale.kind === "log" ? niceLogTicks(y.scale.domain) : niceLinearTicks(y.scale.domain);
  for (const t of yticks) {
    const py = project(y.scale, t);
    parts.push(
      `<line x1="${fmt(x0)}" y1="${fmt(py)}" x2="${fmt(x0 + tickLength)}" y2="${fmt(py)}" stroke="#000" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${fmt(x0 - 8)}" y="${fmt(py + 4)}" text-anchor="end" font-size="${fontSize}">${tickLabel(t, y.scale.kind)}</text>`,
    );
  }
  const xc = (x0 + x1) / 2;
  parts.push(
    `<text x="${fmt(xc)}" y="${fmt(yBottom + 2 * fontSize + 14)}" text-anchor="middle" font-size="${fontSize}">${x.label}</text>`,
  );
  const ym = (yBottom + yTop) / 2;
  parts.push(
    `<text x="${fmt(marginLeft - 52)}" y="${fmt(ym)}" text-anchor="middle" font-size="${fontSize}" transform="rotate(-90 ${fmt(marginLeft - 52)} ${fmt(ym)})">${y.label}</text>`,
  );
  void marginTop;
  return parts.join("\n");
}

export function document(body: string, title: string): string {
  const { width, height, fontFamily } = FIGURE;
  return [
    `<?xml version="1.0" encoding="UTF-8"?>`,
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}" font-family="${fontFamily}" data-style-version="${STYLE_VERSION}">`,
    `<!-- ${STYLE_VERSION} -->`,
    `<rect width="${width}" height="${height}" fill="#ffffff"/>`,
    `<text x="${fmt(width / 2)}" y="22" text-anchor="middle" font-size="${FIGURE.fontSize + 2}" font-weight="bold">${title}</text>`,
    body,
    `</svg>`,
    ``,
  ].join("\n");
}

/**
 * Versioned figure style. The version string is embedded in every SVG so
 * image-regression baselines only move when the style moves.
 */

export const STYLE_VERSION = "cavitygates-style-1";

export const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#17becf",
  "#7f7f7f",
];

export const MARKERS = ["circle", "square", "diamond", "triangle"] as const;
export type MarkerShape = (typeof MARKERS)[number];

export const FIGURE = {
  width: 640,
  height: 440,
  marginLeft: 74,
  marginRight: 20,
  marginTop: 34,
  marginBottom: 58,
  fontFamily: "Helvetica, Arial, sans-serif",
  fontSize: 13,
  tickLength: 6,
  markerSize: 4.5,
  lineWidth: 1.6,
  referenceDash: "7 4",
  baselineDash: "3 3",
};

export function seriesColor(index: number): string {
  return PALETTE[index % PALETTE.length];
}

export function seriesMarker(index: number): MarkerShape {
  return MARKERS[index % MARKERS.length];
}

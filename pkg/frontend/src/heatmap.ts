// Heatmap render model: color-binned lat/lon cells with a legend.  Colors
// are monotone in value (cold blue -> warm red on the HSL hue axis).

import { HeatmapCell } from "./types.js";

export interface ColoredCell extends HeatmapCell {
  color: string;
  tNorm: number; // normalized position in [0, 1] within the value range
  tooltip: string;
}

export interface HeatmapModel {
  cells: ColoredCell[];
  min: number;
  max: number;
  legend: { value: number; color: string }[];
  latMin: number;
  latMax: number;
  lonMin: number;
  lonMax: number;
}

export function colorFor(tNorm: number): string {
  const t = Math.min(1, Math.max(0, tNorm));
  const hue = 240 - 240 * t; // blue (240) -> red (0), monotone in value
  return `hsl(${hue.toFixed(1)}, 85%, 50%)`;
}

export function buildHeatmapModel(cells: HeatmapCell[]): HeatmapModel | null {
  if (cells.length === 0) return null;
  const values = cells.map((c) => c.mean);
  const min = Math.min(...values);
  const max = Math.max(...values);
  const span = max - min;
  const colored = cells.map((c) => {
    const tNorm = span > 0 ? (c.mean - min) / span : 0.5;
    return {
      ...c,
      tNorm,
      color: colorFor(tNorm),
      tooltip: `${c.parameter}: mean ${c.mean.toFixed(3)} (n=${c.count})`,
    };
  });
  const legend = [0, 0.25, 0.5, 0.75, 1].map((t) => ({
    value: min + t * span,
    color: colorFor(t),
  }));
  return {
    cells: colored,
    min,
    max,
    legend,
    latMin: Math.min(...cells.map((c) => c.lat_min)),
    latMax: Math.max(...cells.map((c) => c.lat_max)),
    lonMin: Math.min(...cells.map((c) => c.lon_min)),
    lonMax: Math.max(...cells.map((c) => c.lon_max)),
  };
}

// Occupancy-grid tile rendering and world->canvas projection.  The grid
// arrives as run-length JSON from the bridge, so the console works fully
// offline (no external tile service).

import { GridDoc } from "./types.js";

export function decodeCells(doc: GridDoc): Uint8Array {
  const total = doc.width * doc.height;
  const out = new Uint8Array(total);
  let pos = 0;
  for (const [value, count] of doc.cells) {
    out.fill(value, pos, pos + count);
    pos += count;
  }
  if (pos !== total) throw new Error("run-length data does not cover the grid");
  return out;
}

const CELL_COLORS: Record<number, [number, number, number]> = {
  0: [222, 235, 247], // free water
  1: [55, 71, 79], // occupied / shoreline
  2: [144, 164, 174], // unknown
};

export function gridToRgba(doc: GridDoc): Uint8ClampedArray<ArrayBuffer> {
  const cells = decodeCells(doc);
  const out = new Uint8ClampedArray(new ArrayBuffer(doc.width * doc.height * 4));
  for (let row = 0; row < doc.height; row++) {
    for (let col = 0; col < doc.width; col++) {
      const v = cells[row * doc.width + col];
      const [r, g, b] = CELL_COLORS[v] ?? [255, 0, 255];
      // canvas row 0 is the top; grid row 0 is the bottom (y grows north)
      const px = ((doc.height - 1 - row) * doc.width + col) * 4;
      out[px] = r;
      out[px + 1] = g;
      out[px + 2] = b;
      out[px + 3] = 255;
    }
  }
  return out;
}

export interface Projector {
  toPx(x: number, y: number): [number, number];
  scale: number;
}

export function makeProjector(
  doc: GridDoc,
  canvasW: number,
  canvasH: number,
): Projector {
  const worldW = doc.width * doc.resolution;
  const worldH = doc.height * doc.resolution;
  const scale = Math.min(canvasW / worldW, canvasH / worldH);
  return {
    scale,
    toPx(x: number, y: number): [number, number] {
      const px = (x - doc.origin.x) * scale;
      const py = canvasH - (y - doc.origin.y) * scale;
      return [px, py];
    },
  };
}

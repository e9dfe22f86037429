// 6x12 sampler grid view model: modules A-F, each 4 motors x 3 syringes.
// Cell state follows the stream: a motor bit raised in the telemetry bitmap
// marks its three syringes Filling; a received sample record seals the cell
// (or faults it when the sample came back empty).

import { SampleRecordMsg } from "./types.js";

export type CellState = "empty" | "filling" | "sealed" | "fault";

export interface SamplerCell {
  label: string; // e.g. A3_S1
  module: number;
  motor: number;
  syringe: number;
  state: CellState;
  volume_ml: number | null;
}

export const MODULES = 6;
export const MOTORS_PER_MODULE = 4;
export const SYRINGES_PER_MOTOR = 3;
const LETTERS = "ABCDEF";

export function cellLabel(module: number, motor: number, syringe: number): string {
  return `${LETTERS[module]}${motor + 1}_S${syringe + 1}`;
}

export function motorBit(module: number, motor: number): number {
  return module * MOTORS_PER_MODULE + motor;
}

export function buildSamplerGrid(
  motorBitmap: number,
  samples: SampleRecordMsg[],
): SamplerCell[] {
  const byLabel = new Map<string, SampleRecordMsg>();
  for (const s of samples) byLabel.set(s.label, s);
  const cells: SamplerCell[] = [];
  for (let module = 0; module < MODULES; module++) {
    for (let motor = 0; motor < MOTORS_PER_MODULE; motor++) {
      const active = (motorBitmap & (1 << motorBit(module, motor))) !== 0;
      for (let syringe = 0; syringe < SYRINGES_PER_MOTOR; syringe++) {
        const label = cellLabel(module, motor, syringe);
        const record = byLabel.get(label);
        let state: CellState = "empty";
        let volume: number | null = null;
        if (record) {
          volume = record.volume_ml;
          state = record.volume_ml > 0 ? "sealed" : "fault";
        } else if (active) {
          state = "filling";
        }
        cells.push({ label, module, motor, syringe, state, volume_ml: volume });
      }
    }
  }
  return cells;
}

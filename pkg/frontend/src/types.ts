// Wire mirrors of the ground-station JSON surface (fields 1:1 with the
// bridge's telemetry stream and REST payloads).

export interface TelemetryMsg {
  type: "telemetry";
  seq: number;
  t: number;
  latency_s: number;
  x: number;
  y: number;
  theta: number;
  v: number;
  i: number;
  soc: number;
  mission_state: number;
  motor_bitmap: number;
}

export interface SampleRecordMsg {
  type: "sample_record";
  seq: number;
  t: number;
  latency_s: number;
  label: string;
  volume_ml: number;
  t_start: number;
  t_end: number;
  lat: number;
  lon: number;
}

export type CommandBody =
  | { type: "command"; mode: number; v_x: number; w_z: number }
  | { type: "estop"; engage: boolean }
  | { type: "motor_command"; module: number; motor: number; action: number };

export interface CommandAck {
  type: "command_ack";
  seq?: number;
  distance_m?: number;
  delivered?: boolean;
  latency_s?: number | null;
  command?: CommandBody;
  error?: string;
}

export type StreamMsg = TelemetryMsg | SampleRecordMsg | CommandAck;

export interface SessionInfo {
  id: string;
  state: "running" | "paused" | "finished";
  mission: string;
  scenario: string;
  t: number;
  exit_reason: string | null;
  tx: { sent: number; delivered: number; dropped: number };
  seed: number;
  origin_geo: { lat: number; lon: number };
}

export interface SampleRecord {
  mission?: string;
  label: string;
  volume_ml?: number;
  t_start?: number;
  t_end?: number;
  lat?: number;
  lon?: number;
  temperature_c?: number | null;
  ph?: number | null;
  tds_mg_l?: number | null;
  ec_us_cm?: number | null;
}

export interface HeatmapCell {
  lat_min: number;
  lat_max: number;
  lon_min: number;
  lon_max: number;
  parameter: string;
  mean: number;
  count: number;
}

export interface GridDoc {
  width: number;
  height: number;
  resolution: number;
  origin: { x: number; y: number; theta: number };
  cells: [number, number][]; // run-length pairs of [value, count]
}

export const MODE_MANUAL = 0;
export const MODE_AUTO = 1;

// Session view-state reducer.  The UI is a pure projection of bridge
// messages: nothing here invents vehicle state, and the rendered mode only
// moves on an acknowledged (delivered) command, never on the optimistic
// local one.

import {
  CommandAck,
  SampleRecordMsg,
  StreamMsg,
  TelemetryMsg,
  MODE_AUTO,
} from "./types.js";

export type ConnectionState = "connecting" | "live" | "lost";
export type RenderedMode = "unknown" | "auto" | "manual" | "estop";

export interface LinkStatus {
  delivered: number;
  dropped: number;
  lastLatencyS: number | null;
  lastDropped: string | null; // description of the last dropped command
  lastError: string | null;
}

export interface TrackPoint {
  t: number;
  x: number;
  y: number;
  theta: number;
}

const TRACK_CAP = 5000;

export class SessionStore {
  connection: ConnectionState = "connecting";
  latest: TelemetryMsg | null = null;
  mode: RenderedMode = "unknown";
  estopLatched = false;
  estopPending = false;
  track: TrackPoint[] = [];
  samples: SampleRecordMsg[] = [];
  link: LinkStatus = {
    delivered: 0,
    dropped: 0,
    lastLatencyS: null,
    lastDropped: null,
    lastError: null,
  };

  setConnection(state: ConnectionState): void {
    this.connection = state;
  }

  noteEstopSent(): void {
    this.estopPending = true;
  }

  apply(msg: StreamMsg): void {
    switch (msg.type) {
      case "telemetry":
        this.applyTelemetry(msg);
        break;
      case "sample_record":
        this.samples.push(msg);
        break;
      case "command_ack":
        this.applyAck(msg);
        break;
    }
  }

  private applyTelemetry(msg: TelemetryMsg): void {
    this.latest = msg;
    this.track.push({ t: msg.t, x: msg.x, y: msg.y, theta: msg.theta });
    if (this.track.length > TRACK_CAP) {
      this.track.splice(0, this.track.length - TRACK_CAP);
    }
  }

  private applyAck(ack: CommandAck): void {
    if (ack.error) {
      this.link.lastError = ack.error;
      return;
    }
    if (ack.delivered) {
      this.link.delivered += 1;
      this.link.lastLatencyS = ack.latency_s ?? null;
      this.confirm(ack);
    } else {
      // dropped frames are surfaced, never silently retried
      this.link.dropped += 1;
      this.link.lastDropped = ack.command ? ack.command.type : "command";
      if (ack.command?.type === "estop") this.estopPending = false;
    }
  }

  private confirm(ack: CommandAck): void {
    const cmd = ack.command;
    if (!cmd) return;
    if (cmd.type === "estop") {
      this.estopLatched = cmd.engage;
      this.estopPending = false;
      this.mode = cmd.engage ? "estop" : "manual";
    } else if (cmd.type === "command") {
      if (!this.estopLatched) {
        this.mode = cmd.mode === MODE_AUTO ? "auto" : "manual";
      }
    }
  }
}

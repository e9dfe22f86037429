// Ground-station transport: REST calls plus the telemetry websocket with
// reconnect backoff.  Socket and fetch factories are injectable so the
// logic runs identically in the browser and under node tests.

import {
  CommandBody,
  GridDoc,
  HeatmapCell,
  SampleRecord,
  SessionInfo,
  StreamMsg,
} from "./types.js";

export interface SocketLike {
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
  send(data: string): void;
  close(): void;
}

export type SocketFactory = (url: string) => SocketLike;
export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export interface StreamHandlers {
  onMessage: (msg: StreamMsg) => void;
  onState: (state: "connecting" | "live" | "lost") => void;
}

export class TelemetryStream {
  private socket: SocketLike | null = null;
  private closed = false;
  private attempt = 0;

  constructor(
    private readonly url: string,
    private readonly factory: SocketFactory,
    private readonly handlers: StreamHandlers,
    private readonly baseBackoffMs = 500,
    private readonly maxBackoffMs = 8000,
  ) {}

  connect(): void {
    if (this.closed) return;
    this.handlers.onState("connecting");
    const socket = this.factory(this.url);
    this.socket = socket;
    socket.onopen = () => {
      this.attempt = 0;
      this.handlers.onState("live");
    };
    socket.onmessage = (ev) => {
      try {
        this.handlers.onMessage(JSON.parse(String(ev.data)) as StreamMsg);
      } catch {
        // tolerate malformed frames; the stream carries on
      }
    };
    socket.onerror = () => undefined;
    socket.onclose = () => {
      this.socket = null;
      if (this.closed) return;
      this.handlers.onState("lost");
      const delay = Math.min(
        this.baseBackoffMs * 2 ** this.attempt,
        this.maxBackoffMs,
      );
      this.attempt += 1;
      setTimeout(() => this.connect(), delay);
    };
  }

  send(cmd: CommandBody): boolean {
    if (!this.socket) return false;
    this.socket.send(JSON.stringify(cmd));
    return true;
  }

  close(): void {
    this.closed = true;
    this.socket?.close();
  }
}

export class StationClient {
  constructor(
    private readonly base: string,
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
    private readonly socketFactory: SocketFactory = (url) =>
      new WebSocket(url) as unknown as SocketLike,
  ) {}

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await this.fetchFn(`${this.base}${path}`, init);
    if (!res.ok) {
      const text = await res.text();
      throw new Error(`${init?.method ?? "GET"} ${path}: ${res.status} ${text}`);
    }
    return (await res.json()) as T;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.json<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  startSession(body: Record<string, unknown> = {}): Promise<SessionInfo> {
    return this.post("/api/sessions", body);
  }

  stopSession(id: string): Promise<SessionInfo> {
    return this.json(`/api/sessions/${id}`, { method: "DELETE" });
  }

  sessions(): Promise<SessionInfo[]> {
    return this.json("/api/sessions");
  }

  sessionInfo(id: string): Promise<SessionInfo> {
    return this.json(`/api/sessions/${id}`);
  }

  metrics(id: string): Promise<Record<string, unknown>> {
    return this.json(`/api/sessions/${id}/metrics`);
  }

  grid(id: string): Promise<GridDoc> {
    return this.json(`/api/sessions/${id}/grid`);
  }

  command(id: string, body: CommandBody): Promise<Record<string, unknown>> {
    return this.post(`/api/sessions/${id}/command`, body);
  }

  samples(params: { mission?: string; parameter?: string } = {}): Promise<SampleRecord[]> {
    const qs = new URLSearchParams(
      Object.entries(params).filter(([, v]) => v != null) as [string, string][],
    ).toString();
    return this.json(`/api/samples${qs ? `?${qs}` : ""}`);
  }

  postSample(record: SampleRecord): Promise<SampleRecord> {
    return this.post("/api/samples", record);
  }

  heatmap(param: string, bin: number): Promise<HeatmapCell[]> {
    return this.json(`/api/heatmap?param=${encodeURIComponent(param)}&bin=${bin}`);
  }

  stream(sessionId: string, handlers: StreamHandlers): TelemetryStream {
    const wsBase = this.base.replace(/^http/, "ws");
    const stream = new TelemetryStream(
      `${wsBase}/ws/telemetry?session=${sessionId}`,
      this.socketFactory,
      handlers,
    );
    stream.connect();
    return stream;
  }
}

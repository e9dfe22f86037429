// Manual commands are throttled to the telemetry command rate; the e-stop
// bypasses the limiter entirely.

export class CommandRateLimiter {
  private lastMs = -Infinity;

  constructor(private readonly minIntervalMs: number) {}

  allow(kind: string, nowMs: number): boolean {
    if (kind === "estop") return true;
    if (nowMs - this.lastMs >= this.minIntervalMs) {
      this.lastMs = nowMs;
      return true;
    }
    return false;
  }
}

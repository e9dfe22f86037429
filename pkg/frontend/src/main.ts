// Operator console wiring: map canvas with the vehicle track, telemetry
// gauges, mode toggle, e-stop, virtual joystick, sampler grid, sample
// table, and the heatmap overlay panel.

import { StationClient } from "./client.js";
import { buildHeatmapModel } from "./heatmap.js";
import { joystickToCommand } from "./joystick.js";
import { GridDoc, MODE_AUTO, MODE_MANUAL, SessionInfo } from "./types.js";
import { gridToRgba, makeProjector } from "./map.js";
import { CommandRateLimiter } from "./ratelimit.js";
import { buildSamplerGrid, MODULES, MOTORS_PER_MODULE } from "./samplergrid.js";
import { SessionStore } from "./store.js";

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

const client = new StationClient(window.location.origin);
const store = new SessionStore();
const limiter = new CommandRateLimiter(1000);

let session: SessionInfo | null = null;
let grid: GridDoc | null = null;
let gridImage: ImageData | null = null;
let joyVec: { dx: number; dy: number } | null = null;

function setBanner(text: string, kind: "ok" | "warn" | "err"): void {
  const banner = $("banner");
  banner.textContent = text;
  banner.className = `banner ${kind}`;
}

function sendCommand(body: Parameters<typeof client.command>[1]): void {
  if (!session) return;
  if (!limiter.allow(body.type, performance.now())) return;
  if (body.type === "estop") store.noteEstopSent();
  client
    .command(session.id, body)
    .then((ack) => store.apply({ type: "command_ack", ...ack } as never))
    .catch((err) => setBanner(String(err), "err"));
  render();
}

function drawMap(): void {
  const canvas = $<HTMLCanvasElement>("map");
  const ctx = canvas.getContext("2d");
  if (!ctx || !grid) return;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const proj = makeProjector(grid, canvas.width, canvas.height);
  if (gridImage) {
    const off = document.createElement("canvas");
    off.width = grid.width;
    off.height = grid.height;
    off.getContext("2d")!.putImageData(gridImage, 0, 0);
    ctx.imageSmoothingEnabled = false;
    ctx.drawImage(
      off, 0, 0,
      grid.width * grid.resolution * proj.scale,
      grid.height * grid.resolution * proj.scale,
    );
  }
  if (store.track.length > 1) {
    ctx.beginPath();
    ctx.strokeStyle = "#ff6f00";
    ctx.lineWidth = 2;
    store.track.forEach((p, i) => {
      const [px, py] = proj.toPx(p.x, p.y);
      if (i === 0) ctx.moveTo(px, py);
      else ctx.lineTo(px, py);
    });
    ctx.stroke();
  }
  const latest = store.latest;
  if (latest) {
    const [px, py] = proj.toPx(latest.x, latest.y);
    ctx.save();
    ctx.translate(px, py);
    ctx.rotate(-latest.theta);
    ctx.fillStyle = "#d50000";
    ctx.beginPath();
    ctx.moveTo(9, 0);
    ctx.lineTo(-6, 5);
    ctx.lineTo(-6, -5);
    ctx.closePath();
    ctx.fill();
    ctx.restore();
  }
}

function drawSamplerGrid(): void {
  const host = $("sampler-grid");
  const bitmap = store.latest?.motor_bitmap ?? 0;
  const cells = buildSamplerGrid(bitmap, store.samples);
  host.innerHTML = "";
  for (let module = 0; module < MODULES; module++) {
    const column = document.createElement("div");
    column.className = "sampler-module";
    const title = document.createElement("div");
    title.className = "sampler-title";
    title.textContent = "ABCDEF"[module];
    column.appendChild(title);
    cells
      .filter((c) => c.module === module)
      .forEach((cell) => {
        const el = document.createElement("div");
        el.className = `syringe ${cell.state}`;
        el.title = `${cell.label}${cell.volume_ml != null ? ` ${cell.volume_ml.toFixed(1)} mL` : ""}`;
        el.dataset.label = cell.label;
        column.appendChild(el);
      });
    host.appendChild(column);
  }
}

function renderGauges(): void {
  const t = store.latest;
  $("gauge-pose").textContent = t
    ? `${t.x.toFixed(1)}, ${t.y.toFixed(1)} m @ ${((t.theta * 180) / Math.PI).toFixed(0)}deg`
    : "-";
  $("gauge-power").textContent = t
    ? `${t.v.toFixed(1)} V  ${t.i.toFixed(1)} A  ${t.soc.toFixed(0)} Wh`
    : "-";
  $("gauge-link").textContent =
    `${store.link.delivered} ok / ${store.link.dropped} dropped` +
    (store.link.lastLatencyS != null ? ` (${(store.link.lastLatencyS * 1000).toFixed(0)} ms)` : "");
  if (store.link.lastDropped) {
    $("gauge-link").textContent += ` - last DROPPED: ${store.link.lastDropped}`;
  }
  $("gauge-mode").textContent = store.mode.toUpperCase();
  const estop = $("estop");
  estop.classList.toggle("latched", store.estopLatched);
  estop.classList.toggle("pending", store.estopPending);
  estop.textContent = store.estopLatched ? "E-STOP LATCHED (click to release)" : "E-STOP";
}

function renderSamples(): void {
  const tbody = $("samples-body");
  tbody.innerHTML = "";
  for (const s of store.samples.slice(-24)) {
    const tr = document.createElement("tr");
    tr.innerHTML =
      `<td>${s.label}</td><td>${s.volume_ml.toFixed(1)}</td>` +
      `<td>${s.t_end.toFixed(0)}</td><td>${s.lat.toFixed(5)}, ${s.lon.toFixed(5)}</td>`;
    tbody.appendChild(tr);
  }
}

function render(): void {
  drawMap();
  drawSamplerGrid();
  renderGauges();
  renderSamples();
}

async function drawHeatmap(): Promise<void> {
  const param = ($<HTMLSelectElement>("heatmap-param")).value;
  const status = $("heatmap-status");
  const canvas = $<HTMLCanvasElement>("heatmap");
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const cells = await client.heatmap(param, 0.0002).catch((err) => {
    status.textContent = String(err);
    return [];
  });
  const model = buildHeatmapModel(cells);
  if (!model) {
    status.textContent = "no samples recorded yet";
    return;
  }
  status.textContent = `${model.cells.length} cells, ${model.min.toFixed(2)} to ${model.max.toFixed(2)}`;
  const spanLat = Math.max(model.latMax - model.latMin, 1e-9);
  const spanLon = Math.max(model.lonMax - model.lonMin, 1e-9);
  for (const cell of model.cells) {
    const x = ((cell.lon_min - model.lonMin) / spanLon) * (canvas.width - 30);
    const y = canvas.height - 20 - ((cell.lat_max - model.latMin) / spanLat) * (canvas.height - 30);
    const w = Math.max(((cell.lon_max - cell.lon_min) / spanLon) * (canvas.width - 30), 6);
    const h = Math.max(((cell.lat_max - cell.lat_min) / spanLat) * (canvas.height - 30), 6);
    ctx.fillStyle = cell.color;
    ctx.fillRect(x + 10, y, w, h);
  }
  const legend = $("heatmap-legend");
  legend.innerHTML = "";
  for (const tick of model.legend) {
    const chip = document.createElement("span");
    chip.className = "legend-chip";
    chip.style.background = tick.color;
    chip.textContent = tick.value.toFixed(2);
    legend.appendChild(chip);
  }
}

function bindJoystick(): void {
  const pad = $<HTMLCanvasElement>("joystick");
  const ctx = pad.getContext("2d")!;
  const radius = pad.width / 2;

  const draw = () => {
    ctx.clearRect(0, 0, pad.width, pad.height);
    ctx.strokeStyle = "#90a4ae";
    ctx.beginPath();
    ctx.arc(radius, radius, radius - 2, 0, Math.PI * 2);
    ctx.stroke();
    const v = joyVec ?? { dx: 0, dy: 0 };
    ctx.fillStyle = "#1565c0";
    ctx.beginPath();
    ctx.arc(radius + v.dx, radius + v.dy, 10, 0, Math.PI * 2);
    ctx.fill();
  };

  const update = (ev: PointerEvent | null) => {
    if (ev) {
      const rect = pad.getBoundingClientRect();
      joyVec = {
        dx: Math.max(-radius, Math.min(radius, ev.clientX - rect.left - radius)),
        dy: Math.max(-radius, Math.min(radius, ev.clientY - rect.top - radius)),
      };
    } else {
      joyVec = null;
    }
    draw();
  };

  let active = false;
  pad.addEventListener("pointerdown", (ev) => {
    active = true;
    update(ev);
  });
  pad.addEventListener("pointermove", (ev) => active && update(ev));
  window.addEventListener("pointerup", () => {
    active = false;
    update(null);
  });

  setInterval(() => {
    if (store.mode !== "manual") return;
    const v = joyVec ?? { dx: 0, dy: 0 };
    const cmd = joystickToCommand(v.dx, v.dy, radius, { vMax: 2.0, wMax: 1.5 });
    sendCommand({ type: "command", mode: MODE_MANUAL, ...cmd });
  }, 1000);
  draw();
}

async function boot(): Promise<void> {
  try {
    const sessions = await client.sessions();
    session = sessions.find((s) => s.state === "running") ?? null;
    if (!session) {
      session = await client.startSession({});
    }
  } catch (err) {
    setBanner(`bridge unreachable: ${err}`, "err");
    setTimeout(boot, 2000);
    return;
  }
  setBanner(`session ${session.id} (${session.scenario})`, "ok");
  grid = await client.grid(session.id);
  gridImage = new ImageData(gridToRgba(grid), grid.width, grid.height);

  client.stream(session.id, {
    onMessage: (msg) => {
      store.apply(msg);
      render();
    },
    onState: (state) => {
      store.setConnection(state);
      if (state === "live") setBanner(`session ${session!.id} live`, "ok");
      else setBanner(`telemetry ${state} - retrying`, state === "lost" ? "err" : "warn");
    },
  });

  $("mode-auto").onclick = () =>
    sendCommand({ type: "command", mode: MODE_AUTO, v_x: 0, w_z: 0 });
  $("mode-manual").onclick = () =>
    sendCommand({ type: "command", mode: MODE_MANUAL, v_x: 0, w_z: 0 });
  $("estop").onclick = () =>
    sendCommand({ type: "estop", engage: !store.estopLatched });
  $("sample-a3").onclick = () =>
    sendCommand({ type: "motor_command", module: 0, motor: 2, action: 1 });
  $("heatmap-refresh").onclick = () => void drawHeatmap();
  bindJoystick();
  render();
}

void boot();

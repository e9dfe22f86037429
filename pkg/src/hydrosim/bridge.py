"""Ground-station service: hosts live simulated missions, streams telemetry,
relays operator commands through the lossy link, and keeps the sample
journal with heatmap aggregation and offline export/import sync.

All sim-bound commands funnel through the single-threaded simulation task;
reads serve immutable snapshots, so no client observes torn state.  The
journal is an append-only JSONL file reduced in memory by
(mission, label) with last-writer-wins on t_end.
"""

from __future__ import annotations

import asyncio
import json
import math
import os
import uuid
from pathlib import Path

import numpy as np
from fastapi import Body, FastAPI, HTTPException, Query, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse, Response

from . import engine
from . import telemetry as tm
from .errors import (
    ArchiveCorrupt,
    ConfigInvalid,
    DuplicateLabel,
    HydrosimError,
    MapLoadFailed,
    UnknownParameter,
)
from .sampler import MotorAction, MotorCommand

HEATMAP_PARAMS = {
    "temperature": "temperature_c",
    "ph": "ph",
    "tds": "tds_mg_l",
    "ec": "ec_us_cm",
    "volume": "volume_ml",
}

QUALITY_KEYS = ("temperature_c", "ph", "tds_mg_l", "ec_us_cm")


# ---------------------------------------------------------------------------
# sample journal
# ---------------------------------------------------------------------------


class SampleJournal:
    def __init__(self, path: Path):
        self.path = path
        self._records: dict[tuple[str, str], dict] = {}
        if path.exists():
            for line in path.read_text().splitlines():
                if line.strip():
                    self._reduce(json.loads(line))

    def _key(self, rec: dict) -> tuple[str, str]:
        return (rec.get("mission", ""), rec["label"])

    def _reduce(self, rec: dict) -> str:
        key = self._key(rec)
        current = self._records.get(key)
        if current is None:
            self._records[key] = rec
            return "added"
        if (rec.get("t_end") or 0) >= (current.get("t_end") or 0):
            if rec == current:
                return "unchanged"
            self._records[key] = rec
            return "updated"
        return "unchanged"

    def _append_line(self, rec: dict) -> None:
        with open(self.path, "a") as fh:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")

    def add(self, rec: dict) -> None:
        """Insert a new record; duplicates by (mission, label) are errors."""
        if "label" not in rec or not rec["label"]:
            raise ValueError("record requires a label")
        if self._key(rec) in self._records:
            raise DuplicateLabel(f"sample {self._key(rec)} already recorded")
        self._append_line(rec)
        self._reduce(rec)

    def merge(self, rec: dict) -> str:
        """Import-style upsert with last-writer-wins on t_end."""
        outcome = self._reduce(rec)
        if outcome != "unchanged":
            self._append_line(rec)
        return outcome

    def list(self, mission: str | None = None, parameter: str | None = None) -> list[dict]:
        records = list(self._records.values())
        if mission:
            records = [r for r in records if r.get("mission") == mission]
        if parameter:
            field = HEATMAP_PARAMS.get(parameter, parameter)
            records = [r for r in records if r.get(field) is not None]
        return sorted(records, key=lambda r: (r.get("mission", ""), r["label"]))

    def heatmap(self, parameter: str, bin_deg: float) -> list[dict]:
        field = HEATMAP_PARAMS.get(parameter)
        if field is None:
            raise UnknownParameter(f"no heatmap parameter {parameter!r}")
        if bin_deg <= 0:
            raise ValueError("bin size must be > 0")
        cells: dict[tuple[int, int], list[float]] = {}
        for rec in self._records.values():
            value = rec.get(field)
            if value is None or rec.get("lat") is None or rec.get("lon") is None:
                continue
            key = (math.floor(rec["lat"] / bin_deg), math.floor(rec["lon"] / bin_deg))
            cells.setdefault(key, []).append(float(value))
        out = []
        for (li, lo), values in sorted(cells.items()):
            out.append(
                {
                    "lat_min": li * bin_deg, "lat_max": (li + 1) * bin_deg,
                    "lon_min": lo * bin_deg, "lon_max": (lo + 1) * bin_deg,
                    "parameter": parameter,
                    "mean": float(np.mean(values)),
                    "count": len(values),
                }
            )
        return out

    def export_archive(self) -> dict:
        return {"format": "hydrosim-journal", "version": 1,
                "records": self.list()}

    def import_archive(self, doc) -> dict:
        if (
            not isinstance(doc, dict)
            or doc.get("format") != "hydrosim-journal"
            or not isinstance(doc.get("records"), list)
        ):
            raise ArchiveCorrupt("not a journal archive")
        report = {"added": 0, "updated": 0, "unchanged": 0}
        for rec in doc["records"]:
            if not isinstance(rec, dict) or "label" not in rec:
                raise ArchiveCorrupt("archive record missing label")
            report[self.merge(rec)] += 1
        return report


# ---------------------------------------------------------------------------
# live session
# ---------------------------------------------------------------------------


class Session:
    def __init__(self, scenario: engine.Scenario, seed: int | None, rate: float,
                 journal: SampleJournal):
        self.id = uuid.uuid4().hex[:12]
        self.sim = engine.Simulation(scenario, seed=seed)
        self.rate = rate
        self.state = "running"
        self.journal = journal
        self.mission_id = f"{scenario.name}-{self.id[:6]}"
        self.subscribers: set[asyncio.Queue] = set()
        self.link_rng = np.random.default_rng()
        self.uplink = tm.Channel()
        self._task: asyncio.Task | None = None
        self.tx_log: list[dict] = []

    def start(self) -> None:
        self._task = asyncio.create_task(self._loop())

    async def stop(self) -> None:
        if self.state == "running":
            self.state = "finished"
        if self._task is not None:
            self._task.cancel()
            try:
                await self._task
            except asyncio.CancelledError:
                pass
            self._task = None

    async def _loop(self) -> None:
        chunk = 1.0 / self.sim.scenario.rates["telemetry_hz"]
        try:
            while self.state in ("running", "paused"):
                if self.state == "paused":
                    await asyncio.sleep(0.05)
                    continue
                target = self.sim.t + chunk
                alive = True
                while alive and self.sim.t < target:
                    alive = self.sim.step()
                self._drain_outbox()
                if not alive:
                    self.state = "finished"
                    break
                if self.rate > 0:
                    await asyncio.sleep(chunk / self.rate)
                else:
                    await asyncio.sleep(0)
        except asyncio.CancelledError:
            raise

    def _drain_outbox(self) -> None:
        items, self.sim.outbox = self.sim.outbox, []
        for _, payload in items:
            if payload.get("type") == "sample_record":
                rec = {k: v for k, v in payload.items()
                       if k in ("label", "volume_ml", "t_start", "t_end", "lat", "lon")}
                rec["mission"] = self.mission_id
                try:
                    self.journal.add(rec)
                except DuplicateLabel:
                    pass  # replays of the same mission stream
            for q in list(self.subscribers):
                if q.full():
                    continue  # slow consumer: drop rather than stall the sim
                q.put_nowait(payload)

    def ingest(self, body: dict) -> dict:
        """Frame an operator command, pass it through the link at the current
        vehicle-station distance, and schedule it on delivery."""
        if self.state != "running":
            raise HTTPException(409, "session is not running")
        msg = _parse_command(body)
        seq = self.uplink.next_seq()
        frame = tm.encode_frame(msg, seq)
        distance = self.sim.station_distance()
        result = tm.link_transmit(frame, distance, self.sim.scenario.link, self.link_rng)
        entry = {
            "seq": seq,
            "distance_m": round(distance, 3),
            "delivered": result.delivered,
            "latency_s": result.latency_s,
            "command": tm.message_to_dict(msg),
        }
        self.tx_log.append(entry)
        if result.delivered:
            self.sim.submit(msg, seq, deliver_at=self.sim.t + result.latency_s)
        return entry

    def info(self) -> dict:
        origin = self.sim.scenario.origin_geo
        return {
            "id": self.id,
            "state": self.state,
            "mission": self.mission_id,
            "scenario": self.sim.scenario.name,
            "t": round(self.sim.t, 3),
            "exit_reason": self.sim.exit_reason,
            "tx": dict(self.sim.tx_stats),
            "seed": self.sim.seed,
            "origin_geo": {"lat": origin.lat, "lon": origin.lon},
        }


def _parse_command(body: dict) -> tm.Message:
    kind = body.get("type")
    try:
        if kind == "command":
            mode = body.get("mode", tm.MODE_MANUAL)
            if isinstance(mode, str):
                mode = {"manual": tm.MODE_MANUAL, "auto": tm.MODE_AUTO}[mode]
            return tm.Command(mode=int(mode), v_x=float(body.get("v_x", 0.0)),
                              w_z=float(body.get("w_z", 0.0)))
        if kind == "estop":
            return tm.EStop(engage=bool(body["engage"]))
        if kind == "motor_command":
            return MotorCommand(
                module=int(body["module"]), motor=int(body["motor"]),
                action=MotorAction(int(body["action"])),
            )
    except (KeyError, ValueError, TypeError) as exc:
        raise HTTPException(400, f"bad command: {exc}") from exc
    raise HTTPException(400, f"bad command type {kind!r}")


# ---------------------------------------------------------------------------
# application
# ---------------------------------------------------------------------------


def create_app(
    data_dir: str | Path | None = None,
    default_scenario: str | Path | None = None,
    max_sessions: int = 1,
    default_rate: float = 1.0,
    frontend_dir: str | Path | None = None,
) -> FastAPI:
    data_dir = Path(data_dir or os.environ.get("HYDROSIM_DATA", "./hydrosim-data"))
    data_dir.mkdir(parents=True, exist_ok=True)
    journal = SampleJournal(data_dir / "samples.jsonl")
    sessions: dict[str, Session] = {}

    app = FastAPI(title="hydrosim ground station", version="0.1.0")
    app.state.journal = journal
    app.state.sessions = sessions

    def _session(session_id: str) -> Session:
        session = sessions.get(session_id)
        if session is None:
            raise HTTPException(404, f"no session {session_id}")
        return session

    @app.get("/healthz")
    def healthz():
        return {"ok": True}

    @app.post("/api/sessions", status_code=201)
    async def start_session(body: dict = Body(default={})):
        running = [s for s in sessions.values() if s.state in ("running", "paused")]
        if len(running) >= max_sessions:
            raise HTTPException(409, "a session is already running")
        scenario_doc = body.get("scenario")
        try:
            if scenario_doc is None:
                if default_scenario is None:
                    raise ConfigInvalid("no scenario supplied and no default configured")
                scenario = engine.Scenario.from_file(default_scenario)
            elif isinstance(scenario_doc, str):
                scenario = engine.Scenario.from_file(scenario_doc)
            else:
                scenario = engine.Scenario.from_dict(scenario_doc)
        except (ConfigInvalid, MapLoadFailed, HydrosimError) as exc:
            raise HTTPException(400, f"invalid scenario: {exc}") from exc
        session = Session(
            scenario, seed=body.get("seed"),
            rate=float(body.get("rate", default_rate)), journal=journal,
        )
        sessions[session.id] = session
        session.start()
        return session.info()

    @app.get("/api/sessions")
    def list_sessions():
        return [s.info() for s in sessions.values()]

    @app.get("/api/sessions/{session_id}")
    def session_info(session_id: str):
        return _session(session_id).info()

    @app.patch("/api/sessions/{session_id}")
    def set_session_state(session_id: str, body: dict = Body(...)):
        session = _session(session_id)
        state = body.get("state")
        if state not in ("running", "paused"):
            raise HTTPException(400, "state must be 'running' or 'paused'")
        if session.state == "finished":
            raise HTTPException(409, "session already finished")
        session.state = state
        return session.info()

    @app.delete("/api/sessions/{session_id}")
    async def stop_session(session_id: str):
        session = _session(session_id)
        await session.stop()
        return session.info()

    @app.get("/api/sessions/{session_id}/metrics")
    def session_metrics(session_id: str):
        session = _session(session_id)
        if session.sim.finished:
            return engine.compute_metrics(session.sim.log)
        return {
            "exit_reason": None,
            "t": session.sim.t,
            "telemetry": dict(session.sim.tx_stats),
            "n_samples": len(session.sim.bb.sample_records),
        }

    @app.get("/api/sessions/{session_id}/grid")
    def session_grid(session_id: str):
        grid = _session(session_id).sim.scenario.grid
        return Response(content=grid.to_json(), media_type="application/json")

    @app.post("/api/sessions/{session_id}/command")
    def ingest_command(session_id: str, body: dict = Body(...)):
        return _session(session_id).ingest(body)

    @app.post("/api/samples", status_code=201)
    def record_sample(body: dict = Body(...)):
        try:
            journal.add(body)
        except DuplicateLabel as exc:
            raise HTTPException(409, str(exc)) from exc
        except ValueError as exc:
            raise HTTPException(400, str(exc)) from exc
        return body

    @app.get("/api/samples")
    def list_samples(mission: str | None = None, parameter: str | None = None):
        return journal.list(mission=mission, parameter=parameter)

    @app.get("/api/heatmap")
    def heatmap(param: str = Query(...), bin: float = Query(0.0005)):
        try:
            return journal.heatmap(param, bin)
        except UnknownParameter as exc:
            raise HTTPException(400, str(exc)) from exc
        except ValueError as exc:
            raise HTTPException(400, str(exc)) from exc

    @app.get("/api/sync/export")
    def sync_export():
        return journal.export_archive()

    @app.post("/api/sync/import")
    def sync_import(body: dict = Body(...)):
        try:
            return journal.import_archive(body)
        except ArchiveCorrupt as exc:
            raise HTTPException(400, str(exc)) from exc

    @app.websocket("/ws/telemetry")
    async def ws_telemetry(ws: WebSocket, session: str | None = None):
        await ws.accept()
        target = sessions.get(session) if session else next(
            (s for s in sessions.values() if s.state == "running"), None
        )
        if target is None:
            await ws.close(code=4004, reason="no session")
            return
        queue: asyncio.Queue = asyncio.Queue(maxsize=256)
        target.subscribers.add(queue)

        async def pump():
            while True:
                payload = await queue.get()
                await ws.send_json(payload)

        sender = asyncio.create_task(pump())
        try:
            while True:
                body = await ws.receive_json()
                try:
                    ack = target.ingest(body)
                except HTTPException as exc:
                    ack = {"error": exc.detail}
                await ws.send_json({"type": "command_ack", **ack})
        except WebSocketDisconnect:
            pass
        finally:
            sender.cancel()
            target.subscribers.discard(queue)

    if frontend_dir and Path(frontend_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(frontend_dir), html=True), name="ui")

    return app

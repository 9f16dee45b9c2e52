"""Local HTTP service: sessions over the engine plus a live frame stream.

Each session owns one engine advanced by a dedicated worker thread; the API
layer talks to it through a command queue and reads frames under a lock, so
no simulation state is shared across sessions. Parameter patches are applied
only between steps: a step always sees entirely-old or entirely-new
parameters.
"""

from __future__ import annotations

import asyncio
import json
import queue
import threading
import uuid
from typing import Dict, List, Optional

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse, PlainTextResponse

from . import analysis, experiments
from .engine import Engine, NetworkSpec, errors_of, validate
from .exceptions import ConfigurationError, NumericalDivergenceError
from .recording import Recording, write_ndjson

DEFAULT_DECIMATION = 10


class Session:
    """One engine, one worker thread, an append-only frame log."""

    def __init__(self, sid: str, spec: NetworkSpec):
        self.id = sid
        self.engine = Engine(spec)
        self.status = "idle"
        self.error: Optional[str] = None
        self.decimation = DEFAULT_DECIMATION
        self.frames: List[dict] = []
        self.closed = False
        self._cond = threading.Condition()
        self._engine_lock = threading.Lock()  # stepping vs snapshot reads
        self._commands: "queue.Queue[tuple]" = queue.Queue()
        self._pending_spikes: Dict[str, list] = {
            pop: [] for pop in self.engine._spike_records
        }
        self._thread = threading.Thread(target=self._loop, daemon=True)
        self._thread.start()

    # -- API-side entry points ------------------------------------------------

    def command(self, *cmd):
        self._commands.put(cmd)

    def set_status(self, status: str):
        with self._cond:
            self.status = status
            self._cond.notify_all()

    def frames_since(self, cursor: int, timeout: float = 0.2) -> tuple[List[dict], bool]:
        """Frames after `cursor`, waiting briefly if none are ready yet."""
        with self._cond:
            if len(self.frames) <= cursor and not self.closed:
                self._cond.wait(timeout)
            return list(self.frames[cursor:]), self.closed

    def snapshot(self) -> Recording:
        with self._engine_lock:
            return self.engine.snapshot_recording()

    def info(self) -> dict:
        with self._cond:
            return {
                "id": self.id,
                "status": self.status,
                "step": self.engine.current_step,
                "t_ms": self.engine.current_step * self.engine.dt,
                "n_steps": self.engine.n_steps,
                "dt_ms": self.engine.dt,
                "decimation": self.decimation,
                "error": self.error,
                "frame_count": len(self.frames),
            }

    # -- worker side ------------------------------------------------------------

    def _emit_frame(self):
        eng = self.engine
        step = eng.current_step - 1
        frame = {
            "type": "frame",
            "seq": len(self.frames),
            "step": step,
            "t_ms": step * eng.dt,
            "spikes": {pop: rows for pop, rows in self._pending_spikes.items()},
            "traces": {},
        }
        for pop, what in eng._trace_records:
            frame["traces"].setdefault(pop, {})[what] = [
                float(v) for v in eng.neuron_pops[pop].trace_value(what)
            ]
        self._pending_spikes = {pop: [] for pop in eng._spike_records}
        with self._cond:
            self.frames.append(frame)
            self._cond.notify_all()

    def _run_until(self, until_step: int):
        eng = self.engine
        self.set_status("running")
        steps_since_frame = 0
        while eng.current_step < until_step:
            # drain control traffic so pause/patch land on a step boundary
            try:
                cmd = self._commands.get_nowait()
            except queue.Empty:
                cmd = None
            if cmd is not None:
                kind = cmd[0]
                if kind == "patch":
                    with self._engine_lock:
                        for path, value in cmd[1]:
                            eng.apply_patch(path, value)
                elif kind == "pause":
                    break
                elif kind == "close":
                    self._commands.put(cmd)  # outer loop handles teardown
                    break
                elif kind == "run":
                    until_step = max(until_step, cmd[1])
                elif kind == "decimation":
                    self.decimation = max(1, int(cmd[1]))
            try:
                with self._engine_lock:
                    spikes = eng.step()
            except NumericalDivergenceError as exc:
                self.error = str(exc)
                self.set_status("failed")
                self._emit_frame()
                return
            for pop in self._pending_spikes:
                idx = spikes[pop].nonzero()[0]
                step = eng.current_step - 1
                self._pending_spikes[pop].extend([step, int(i)] for i in idx)
            steps_since_frame += 1
            if steps_since_frame >= self.decimation or eng.current_step >= until_step:
                self._emit_frame()
                steps_since_frame = 0
        if self.status != "failed":
            self.set_status("done" if eng.current_step >= eng.n_steps else "paused")

    def _loop(self):
        while True:
            cmd = self._commands.get()
            kind = cmd[0]
            if kind == "close":
                with self._cond:
                    self.closed = True
                    self.frames.append({"type": "end", "reason": "deleted",
                                        "seq": len(self.frames)})
                    self._cond.notify_all()
                return
            if kind == "run":
                self._run_until(cmd[1])
                if self.status == "done":
                    with self._cond:
                        self.frames.append({"type": "end", "reason": "done",
                                            "seq": len(self.frames)})
                        self._cond.notify_all()
            elif kind == "patch":
                with self._engine_lock:
                    for path, value in cmd[1]:
                        self.engine.apply_patch(path, value)
            elif kind == "decimation":
                self.decimation = max(1, int(cmd[1]))


def create_app() -> FastAPI:
    app = FastAPI(title="snn-tune service")
    sessions: Dict[str, Session] = {}

    def get_session(sid: str) -> Session:
        if sid not in sessions or sessions[sid].closed:
            raise ConfigurationError(f"unknown session '{sid}'")
        return sessions[sid]

    @app.exception_handler(ConfigurationError)
    async def config_error(request, exc):
        status = 404 if str(exc).startswith("unknown session") else 400
        return JSONResponse(status_code=status, content={"detail": str(exc)})

    @app.get("/presets")
    def list_presets():
        out = []
        for name in experiments.catalog_names():
            p = experiments.preset(name)
            out.append(p.to_dict())
        return {"presets": out}

    @app.post("/sessions", status_code=201)
    def create_session(body: dict):
        if "spec" not in body:
            return JSONResponse(status_code=400, content={"detail": "body needs a 'spec' key"})
        spec = NetworkSpec.from_dict(body["spec"])
        diags = validate(spec)
        if errors_of(diags):
            return JSONResponse(
                status_code=400,
                content={"detail": "invalid spec",
                         "diagnostics": [str(d) for d in diags]},
            )
        sid = uuid.uuid4().hex[:12]
        sessions[sid] = Session(sid, spec)
        return {"id": sid, "diagnostics": [str(d) for d in diags],
                "session": sessions[sid].info()}

    @app.get("/sessions/{sid}")
    def session_info(sid: str):
        return get_session(sid).info()

    @app.post("/sessions/{sid}/run", status_code=202)
    def run_session(sid: str, body: Optional[dict] = None):
        session = get_session(sid)
        if session.status in ("done", "failed"):
            return JSONResponse(status_code=409,
                                content={"detail": f"session is {session.status}"})
        until_ms = (body or {}).get("until_ms")
        until_step = (
            session.engine.n_steps
            if until_ms is None
            else min(session.engine.n_steps, int(round(until_ms / session.engine.dt)))
        )
        session.set_status("running")
        session.command("run", until_step)
        return session.info()

    @app.post("/sessions/{sid}/pause")
    def pause_session(sid: str):
        session = get_session(sid)
        if session.status not in ("running", "paused"):
            return JSONResponse(status_code=409,
                                content={"detail": f"cannot pause a {session.status} session"})
        session.command("pause")
        # wait for the worker to land on a step boundary
        for _ in range(500):
            if session.status != "running":
                break
            threading.Event().wait(0.002)
        return session.info()

    @app.patch("/sessions/{sid}/params")
    def patch_params(sid: str, body: dict):
        session = get_session(sid)
        if session.status in ("done", "failed"):
            return JSONResponse(status_code=409,
                                content={"detail": f"session is {session.status}"})
        if not body:
            return JSONResponse(status_code=400, content={"detail": "no parameters given"})
        patches = []
        for path, value in body.items():
            try:
                session.engine.apply_patch(path, value, dry_run=True)
            except ConfigurationError as exc:
                return JSONResponse(status_code=400, content={"detail": str(exc)})
            patches.append((path, float(value)))
        session.command("patch", patches)
        return {"applied": {p: v for p, v in patches}, "at_step_boundary": True}

    @app.get("/sessions/{sid}/stats")
    def session_stats(sid: str, window_ms: float = 1000.0):
        session = get_session(sid)
        rec = session.snapshot()
        stats = {}
        for pop in sorted(rec.events):
            if rec.duration_ms <= 0:
                stats[pop] = None
                continue
            stats[pop] = analysis.compute_statistics(rec, pop, window_ms=window_ms).as_report()
        return {"t_ms": session.engine.current_step * session.engine.dt, "stats": stats}

    @app.get("/sessions/{sid}/recording")
    def session_recording(sid: str, format: str = "ndjson"):
        session = get_session(sid)
        if format != "ndjson":
            return JSONResponse(status_code=400,
                                content={"detail": f"unsupported format '{format}'"})
        rec = session.snapshot()
        import io
        import tempfile
        from pathlib import Path

        with tempfile.TemporaryDirectory() as tmp:
            path = write_ndjson(rec, Path(tmp) / "events.ndjson")
            text = path.read_text()
        return PlainTextResponse(text, media_type="application/x-ndjson")

    @app.delete("/sessions/{sid}", status_code=204)
    def delete_session(sid: str):
        session = get_session(sid)
        session.command("close")
        session._thread.join(timeout=5)
        sessions.pop(sid, None)
        return None

    @app.websocket("/sessions/{sid}/stream")
    async def stream(websocket: WebSocket, sid: str):
        await websocket.accept()
        if sid not in sessions:
            await websocket.send_json({"type": "end", "reason": "unknown session"})
            await websocket.close()
            return
        session = sessions[sid]
        cursor = 0

        async def receiver():
            try:
                while True:
                    msg = await websocket.receive_text()
                    try:
                        doc = json.loads(msg)
                    except json.JSONDecodeError:
                        continue
                    if "decimation" in doc:
                        session.command("decimation", int(doc["decimation"]))
                    if "cursor" in doc:
                        nonlocal cursor
                        cursor = int(doc["cursor"])
            except WebSocketDisconnect:
                pass

        recv_task = asyncio.create_task(receiver())
        try:
            while True:
                frames, closed = await asyncio.to_thread(session.frames_since, cursor, 0.1)
                for frame in frames:
                    await websocket.send_json(frame)
                cursor += len(frames)
                if closed and not frames:
                    break
                if frames and frames[-1].get("type") == "end":
                    break
        except (WebSocketDisconnect, RuntimeError):
            pass
        finally:
            recv_task.cancel()
            try:
                await websocket.close()
            except RuntimeError:
                pass

    return app

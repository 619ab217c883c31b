"""HTTP service wiring replay -> monitor -> explainer.

One monitoring thread owns the replayer and alarm state and publishes
typed events (sample, t2, alarm, report) to subscriber queues consumed
by the SSE endpoint; explanation generation runs on a worker pool so the
alarm display never waits for the language model.
"""

from __future__ import annotations

import json
import os
import pathlib
import queue
import threading
import time
import uuid
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from fastapi import FastAPI, HTTPException
from fastapi.responses import StreamingResponse
from pydantic import BaseModel

from . import catalog, explainer, monitor, pca
from .errors import BackendUnavailable, MissingDataset, TepmonError, UnknownFault
from .llm import AuditLog, LlmBackend, StubBackend
from .monitor import AlarmState, AlarmStatus
from .replay import EndOfSeries, Replayer, ReplayConfig
from .timeseries import SampleVector


@dataclass
class ServiceConfig:
    data_dir: str = "data"
    host: str = "127.0.0.1"
    port: int = 8000
    model_path: str | None = None
    fit_on_start: bool = True
    alpha: float = 0.01
    variance_target: float = 0.90
    top_k: int = 6
    consecutive_required: int = 6
    tick_interval: float = 0.5
    history_len: int = 500
    loop_at_end: bool = True
    store_dir: str | None = None  # JSON-lines report/chat persistence
    backend_base_url: str | None = None
    backend_model: str | None = None

    def __post_init__(self):
        if self.top_k < 1:
            raise ValueError("top_k must be >= 1")
        if self.consecutive_required < 1:
            raise ValueError("consecutive_required must be >= 1")

    @classmethod
    def from_file(cls, path: str | os.PathLike) -> "ServiceConfig":
        with open(path) as fh:
            return cls(**json.load(fh))


class _Subscriber:
    """Bounded event queue; the oldest event is dropped when full so a
    slow consumer never stalls the monitoring loop."""

    def __init__(self, maxsize: int = 512):
        self.q: queue.Queue = queue.Queue(maxsize=maxsize)

    def publish(self, event: dict) -> None:
        while True:
            try:
                self.q.put_nowait(event)
                return
            except queue.Full:
                try:
                    self.q.get_nowait()
                except queue.Empty:
                    pass


@dataclass
class MonitorSnapshot:
    sample: SampleVector | None
    point: monitor.T2Point | None
    alarm: AlarmState
    history: list[monitor.T2Point] = field(default_factory=list)


class MonitorService:
    def __init__(self, config: ServiceConfig, backend: LlmBackend | None = None,
                 model: pca.PcaModel | None = None):
        self.config = config
        self.backend = backend if backend is not None else StubBackend(
            "No language-model backend is configured."
        )
        if model is not None:
            self.model = model
        elif config.model_path and os.path.exists(config.model_path) and not config.fit_on_start:
            self.model = pca.load_model(config.model_path)
        else:
            from .timeseries import load_timeseries

            normal = load_timeseries(
                pathlib.Path(config.data_dir) / "fault_0.csv", 0
            )
            self.model = pca.fit_from_timeseries(
                normal, config.variance_target, config.alpha
            )
            if config.model_path:
                pca.save_model(self.model, config.model_path)
        self.replayer = Replayer(
            ReplayConfig(
                data_dir=config.data_dir,
                tick_interval=config.tick_interval,
                loop_at_end=config.loop_at_end,
            )
        )
        store_dir = pathlib.Path(config.store_dir) if config.store_dir else None
        if store_dir:
            store_dir.mkdir(parents=True, exist_ok=True)
        self._report_path = store_dir / "reports.jsonl" if store_dir else None
        self._chat_path = store_dir / "chat.jsonl" if store_dir else None
        self.audit = AuditLog(store_dir / "llm_audit.jsonl" if store_dir else None)

        self._lock = threading.Lock()
        self._alarm = AlarmState(required=config.consecutive_required)
        self._latest_sample: SampleVector | None = None
        self._latest_point: monitor.T2Point | None = None
        self._history: deque = deque(maxlen=config.history_len)
        self._subscribers: list[_Subscriber] = []
        self._reports: dict[str, explainer.FaultReport] = {}
        self._report_order: list[str] = []
        self._sessions: dict[str, explainer.ChatSession] = {}
        self._session_locks: dict[str, threading.Lock] = {}
        self._stop = threading.Event()
        self._thread: threading.Thread | None = None
        self._pool = ThreadPoolExecutor(max_workers=2)

    # ------------------------------------------------------------------ loop

    def start(self) -> None:
        self._thread = threading.Thread(target=self._run_loop, daemon=True)
        self._thread.start()

    def stop(self) -> None:
        self._stop.set()
        self._publish(None)  # end-of-stream sentinel for SSE consumers
        if self._thread:
            self._thread.join(timeout=5)
        self._pool.shutdown(wait=False)

    def _run_loop(self) -> None:
        while not self._stop.is_set():
            item = self.replayer.next_sample()
            if isinstance(item, EndOfSeries):
                self._publish({"type": "end_of_series", "payload": {"t": item.t}})
                return
            self.step(item)
            if self._stop.wait(self.config.tick_interval):
                return

    def step(self, sample: SampleVector) -> monitor.T2Point:
        """Process one sample: statistic, alarm update, event fan-out."""
        t2 = monitor.t2_statistic(self.model, sample)
        with self._lock:
            previously_alarmed = self._alarm.status is AlarmStatus.ALARMED
            self._alarm = monitor.alarm_update(
                self._alarm, sample.t, t2 > self.model.t2_threshold
            )
            point = monitor.make_point(self.model, sample.t, t2, self._alarm)
            confirmed = (
                not previously_alarmed
                and self._alarm.status is AlarmStatus.ALARMED
            )
            self._latest_sample = sample
            self._latest_point = point
            self._history.append(point)
        self._publish(
            {
                "type": "sample",
                "payload": {"t": sample.t, "values": [float(v) for v in sample.values]},
            }
        )
        self._publish({"type": "t2", "payload": _point_json(point)})
        if confirmed:
            self._on_alarm(sample, point)
        return point

    def _on_alarm(self, sample: SampleVector, point: monitor.T2Point) -> None:
        cont = monitor.contributions(self.model, sample)
        deviations = monitor.top_k_deviations(
            self.model, sample, cont, self.config.top_k
        )
        self._publish(
            {
                "type": "alarm",
                "payload": {
                    "alarm_t": sample.t,
                    "t2": point.t2,
                    "threshold": point.threshold,
                    "deviations": [_deviation_json(d) for d in deviations],
                },
            }
        )
        self._pool.submit(self._explain, sample, point, deviations)

    def _explain(self, sample, point, deviations) -> None:
        try:
            bundle = explainer.build_fault_prompt(
                deviations, explainer.PromptMode.ROOT_CAUSES_INCLUDED
            )
            report = explainer.generate_explanation(
                bundle,
                self.backend,
                alarm_t=sample.t,
                t2_at_alarm=point.t2,
                threshold=point.threshold,
                deviations=deviations,
                audit=self.audit,
            )
        except (BackendUnavailable, TepmonError) as exc:
            report = explainer.FaultReport(
                id=f"report-failed-{uuid.uuid4().hex[:8]}",
                alarm_t=sample.t,
                t2_at_alarm=point.t2,
                threshold=point.threshold,
                deviations=deviations,
                mode=explainer.PromptMode.ROOT_CAUSES_INCLUDED,
                raw_response=str(exc),
                candidates=[],
                model_name=getattr(self.backend, "model_name", "unknown"),
                created_at=time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
                status="explanation_failed",
            )
        self.add_report(report)

    def add_report(self, report: explainer.FaultReport) -> None:
        with self._lock:
            self._reports[report.id] = report
            self._report_order.append(report.id)
        if self._report_path:
            with open(self._report_path, "a") as fh:
                fh.write(json.dumps(report.to_json()) + "\n")
        self._publish({"type": "report", "payload": report.to_json()})

    # ------------------------------------------------------------- accessors

    def subscribe(self) -> _Subscriber:
        sub = _Subscriber()
        with self._lock:
            self._subscribers.append(sub)
        return sub

    def unsubscribe(self, sub: _Subscriber) -> None:
        with self._lock:
            if sub in self._subscribers:
                self._subscribers.remove(sub)

    def _publish(self, event: dict | None) -> None:
        with self._lock:
            subs = list(self._subscribers)
        for sub in subs:
            sub.publish(event)

    def snapshot(self) -> MonitorSnapshot:
        with self._lock:
            return MonitorSnapshot(
                sample=self._latest_sample,
                point=self._latest_point,
                alarm=self._alarm,
                history=list(self._history),
            )

    def history(self, limit: int | None = None) -> list[monitor.T2Point]:
        with self._lock:
            points = list(self._history)
        points.reverse()  # descending t
        if limit is not None:
            points = points[:limit]
        return points

    def inject_fault(self, fault_id: int) -> None:
        """Switch the replayed series and re-arm the alarm machine."""
        self.replayer.inject_fault(fault_id)
        with self._lock:
            last_t = self._alarm.last_t
            self._alarm = AlarmState(
                required=self.config.consecutive_required, last_t=last_t
            )

    def reports(self) -> list[explainer.FaultReport]:
        with self._lock:
            return [self._reports[i] for i in self._report_order]

    def report(self, report_id: str) -> explainer.FaultReport | None:
        with self._lock:
            return self._reports.get(report_id)

    def chat(self, session_id: str | None, text: str) -> tuple[str, str]:
        with self._lock:
            if session_id is None or session_id not in self._sessions:
                session_id = session_id or f"session-{uuid.uuid4().hex[:8]}"
                self._sessions[session_id] = explainer.ChatSession.create(
                    session_id, explainer.load_process_description()
                )
                self._session_locks[session_id] = threading.Lock()
            session = self._sessions[session_id]
            session_lock = self._session_locks[session_id]
            reports = [self._reports[i] for i in self._report_order]
        with session_lock:  # one turn at a time per session
            reply = explainer.chat_turn(
                session, text, self.backend, reports=reports, audit=self.audit
            )
        if self._chat_path:
            with open(self._chat_path, "a") as fh:
                fh.write(
                    json.dumps(
                        {"session": session_id, "user": text, "assistant": reply}
                    )
                    + "\n"
                )
        return session_id, reply


def _point_json(p: monitor.T2Point) -> dict:
    return {
        "t": p.t,
        "t2": p.t2,
        "threshold": p.threshold,
        "exceeds": p.exceeds,
        "alarm": p.alarm,
    }


def _deviation_json(d: monitor.FeatureDeviation) -> dict:
    return {
        "variable": d.variable.name,
        "tag": d.variable.tag,
        "current_value": d.current_value,
        "normal_mean": d.normal_mean,
        "percent_change": d.percent_change,
        "contribution": d.contribution,
    }


class FaultRequest(BaseModel):
    fault_id: int


class ChatRequest(BaseModel):
    session_id: str | None = None
    text: str
    mode: str | None = None


def create_app(service: MonitorService) -> FastAPI:
    app = FastAPI(title="tepmon")

    @app.get("/healthz")
    def healthz():
        return {"status": "ready"}

    @app.get("/api/catalog")
    def get_catalog():
        return catalog.catalog_json()

    @app.get("/api/fault")
    def get_fault():
        return {"fault_id": self_service.replayer.active_fault}

    @app.post("/api/fault")
    def post_fault(req: FaultRequest):
        try:
            self_service.inject_fault(req.fault_id)
        except UnknownFault as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except MissingDataset as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        return {"fault_id": self_service.replayer.active_fault}

    @app.get("/api/t2/history")
    def t2_history(limit: int = 100):
        if limit < 1:
            raise HTTPException(status_code=400, detail="limit must be >= 1")
        return [_point_json(p) for p in self_service.history(limit)]

    @app.get("/api/reports")
    def list_reports():
        return [r.to_json() for r in self_service.reports()]

    @app.get("/api/reports/{report_id}")
    def get_report(report_id: str):
        report = self_service.report(report_id)
        if report is None:
            raise HTTPException(status_code=404, detail="unknown report id")
        return report.to_json()

    @app.post("/api/chat")
    def post_chat(req: ChatRequest):
        try:
            session_id, reply = self_service.chat(req.session_id, req.text)
        except BackendUnavailable as exc:
            raise HTTPException(status_code=503, detail=str(exc))
        return {"session_id": session_id, "reply": reply}

    @app.get("/api/events")
    def events():
        sub = self_service.subscribe()

        def gen():
            try:
                while True:
                    try:
                        event = sub.q.get(timeout=15.0)
                    except queue.Empty:
                        yield ": keepalive\n\n"
                        continue
                    if event is None:
                        return
                    yield f"data: {json.dumps(event)}\n\n"
            finally:
                self_service.unsubscribe(sub)

        return StreamingResponse(gen(), media_type="text/event-stream")

    self_service = service
    return app


def run(config: ServiceConfig, backend: LlmBackend | None = None) -> None:
    """Start the pipeline and serve HTTP until interrupted."""
    import uvicorn

    service = MonitorService(config, backend=backend)
    service.start()
    app = create_app(service)
    try:
        uvicorn.run(app, host=config.host, port=config.port, log_level="info")
    finally:
        service.stop()

import json
import shutil
import socket
import threading
import time

import httpx
import pytest
from fastapi.testclient import TestClient

from tepmon.errors import BackendUnavailable
from tepmon.llm import StubBackend
from tepmon.monitor import AlarmStatus
from tepmon.service import MonitorService, ServiceConfig, _Subscriber, create_app
from tepmon.timeseries import SampleVector


class _DownBackend:
    model_name = "down"

    def complete(self, system, messages):
        raise BackendUnavailable("backend offline")


@pytest.fixture()
def service(data_dir, model):
    cfg = ServiceConfig(data_dir=str(data_dir), tick_interval=0.01)
    svc = MonitorService(
        cfg,
        backend=StubBackend("IDV(7) explains 6 out of the 6 features."),
        model=model,
    )
    yield svc
    svc.stop()


@pytest.fixture()
def client(service):
    return TestClient(create_app(service))


def _feed(service, data, start=0, stop=None):
    stop = stop if stop is not None else data.shape[0]
    for t in range(start, stop):
        service.step(SampleVector(t, data[t]))


# -------------------------------------------------------------------- config


def test_config_validation():
    with pytest.raises(ValueError):
        ServiceConfig(top_k=0)
    with pytest.raises(ValueError):
        ServiceConfig(consecutive_required=0)


def test_config_from_file(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"data_dir": "/x", "port": 9001, "top_k": 4}))
    cfg = ServiceConfig.from_file(path)
    assert cfg.data_dir == "/x"
    assert cfg.port == 9001
    assert cfg.top_k == 4
    assert cfg.alpha == 0.01


def test_subscriber_drops_oldest_when_full():
    sub = _Subscriber(maxsize=3)
    for i in range(5):
        sub.publish({"n": i})
    got = [sub.q.get_nowait()["n"] for _ in range(3)]
    assert got == [2, 3, 4]


# ----------------------------------------------------------------- endpoints


def test_healthz(client):
    resp = client.get("/healthz")
    assert resp.status_code == 200
    assert resp.json() == {"status": "ready"}


def test_catalog_endpoint(client):
    doc = client.get("/api/catalog").json()
    assert len(doc) == 52
    assert doc[6]["name"] == "Reactor Pressure"


def test_fault_get_and_post(client):
    assert client.get("/api/fault").json() == {"fault_id": 0}
    resp = client.post("/api/fault", json={"fault_id": 5})
    assert resp.status_code == 200
    assert resp.json() == {"fault_id": 5}
    assert client.get("/api/fault").json() == {"fault_id": 5}


def test_fault_post_unknown_409(client):
    assert client.post("/api/fault", json={"fault_id": 16}).status_code == 409
    assert client.post("/api/fault", json={"fault_id": -1}).status_code == 409


def test_fault_post_missing_dataset_409(tmp_path, data_dir, model):
    shutil.copy(data_dir / "fault_0.csv", tmp_path / "fault_0.csv")
    svc = MonitorService(
        ServiceConfig(data_dir=str(tmp_path)), backend=StubBackend(""), model=model
    )
    try:
        client = TestClient(create_app(svc))
        assert client.post("/api/fault", json={"fault_id": 3}).status_code == 409
        # the active fault is unchanged after the failure
        assert client.get("/api/fault").json() == {"fault_id": 0}
    finally:
        svc.stop()


def test_t2_history_descending_and_limited(service, client, normal_series):
    _feed(service, normal_series.data, stop=30)
    points = client.get("/api/t2/history", params={"limit": 10}).json()
    assert len(points) == 10
    assert [p["t"] for p in points] == list(range(29, 19, -1))
    assert all(set(p) == {"t", "t2", "threshold", "exceeds", "alarm"} for p in points)


def test_t2_history_bad_limit(client):
    assert client.get("/api/t2/history", params={"limit": 0}).status_code == 400


def test_unknown_report_404(client):
    assert client.get("/api/reports/nope").status_code == 404


def test_chat_roundtrip(client):
    resp = client.post("/api/chat", json={"text": "what is the reactor doing?"})
    assert resp.status_code == 200
    body = resp.json()
    assert body["reply"].startswith("IDV(7)")
    # same session id continues the conversation
    again = client.post(
        "/api/chat", json={"session_id": body["session_id"], "text": "more"}
    ).json()
    assert again["session_id"] == body["session_id"]


def test_chat_backend_down_503(data_dir, model):
    svc = MonitorService(
        ServiceConfig(data_dir=str(data_dir)), backend=_DownBackend(), model=model
    )
    try:
        client = TestClient(create_app(svc))
        resp = client.post("/api/chat", json={"text": "hello"})
        assert resp.status_code == 503
    finally:
        svc.stop()


# ------------------------------------------------------------ alarm pipeline


def test_end_to_end_alarm_and_report(service, client, fault_series):
    """Feeding the recorded fault series confirms an alarm and produces a
    parsed explanation report without the caller waiting on the backend."""
    sub = service.subscribe()
    data = fault_series(7).data
    _feed(service, data, stop=200)
    snap = service.snapshot()
    assert snap.alarm.status is AlarmStatus.ALARMED
    assert snap.alarm.alarm_t is not None and snap.alarm.alarm_t >= 160

    deadline = time.monotonic() + 10
    while time.monotonic() < deadline and not service.reports():
        time.sleep(0.02)
    reports = client.get("/api/reports").json()
    assert len(reports) == 1
    report = reports[0]
    assert report["status"] == "ok"
    assert report["alarm_t"] == snap.alarm.alarm_t
    assert len(report["deviations"]) == 6
    assert report["candidates"][0]["label"] == 7
    assert client.get(f"/api/reports/{report['id']}").status_code == 200

    # the event stream carried sample, t2, alarm and report events
    types = set()
    while not sub.q.empty():
        types.add(sub.q.get_nowait()["type"])
    assert {"sample", "t2", "alarm", "report"} <= types


def test_alarm_degrades_gracefully_when_backend_down(data_dir, model, fault_series):
    svc = MonitorService(
        ServiceConfig(data_dir=str(data_dir)), backend=_DownBackend(), model=model
    )
    try:
        _feed(svc, fault_series(7).data, stop=200)
        assert svc.snapshot().alarm.status is AlarmStatus.ALARMED
        deadline = time.monotonic() + 10
        while time.monotonic() < deadline and not svc.reports():
            time.sleep(0.02)
        report = svc.reports()[0]
        assert report.status == "explanation_failed"
        assert report.candidates == []
    finally:
        svc.stop()


def test_inject_rearms_alarm(service, fault_series, normal_series):
    _feed(service, fault_series(7).data, stop=200)
    assert service.snapshot().alarm.status is AlarmStatus.ALARMED
    service.inject_fault(0)
    assert service.snapshot().alarm.status is AlarmStatus.NORMAL
    # time keeps advancing monotonically after the reset
    service.step(SampleVector(200, normal_series.data[200]))
    assert service.snapshot().point.t == 200


def test_report_persistence(tmp_path, data_dir, model, fault_series):
    store = tmp_path / "store"
    svc = MonitorService(
        ServiceConfig(data_dir=str(data_dir), store_dir=str(store)),
        backend=StubBackend("IDV(7) explains 6 out of the 6 features."),
        model=model,
    )
    try:
        _feed(svc, fault_series(7).data, stop=200)
        deadline = time.monotonic() + 10
        while time.monotonic() < deadline and not svc.reports():
            time.sleep(0.02)
        lines = (store / "reports.jsonl").read_text().splitlines()
        assert len(lines) == 1
        assert json.loads(lines[0])["status"] == "ok"
        audit = (store / "llm_audit.jsonl").read_text()
        assert "request" in audit and "response" in audit
    finally:
        svc.stop()


def _free_port():
    s = socket.socket()
    s.bind(("127.0.0.1", 0))
    port = s.getsockname()[1]
    s.close()
    return port


def test_sse_stream_emits_events(service, normal_series):
    """Server-sent events over a real HTTP connection."""
    import uvicorn

    port = _free_port()
    server = uvicorn.Server(
        uvicorn.Config(
            create_app(service), host="127.0.0.1", port=port, log_level="warning"
        )
    )
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.monotonic() + 10
    while time.monotonic() < deadline and not server.started:
        time.sleep(0.02)
    assert server.started
    try:
        url = f"http://127.0.0.1:{port}/api/events"
        with httpx.stream("GET", url, timeout=10) as resp:
            assert resp.headers["content-type"].startswith("text/event-stream")
            time.sleep(0.1)  # let the endpoint register its subscriber
            _feed(service, normal_series.data, stop=3)
            service._publish(None)  # terminate the stream after the fed events
            events = []
            for line in resp.iter_lines():
                if line.startswith("data: "):
                    events.append(json.loads(line[len("data: "):]))
        types = [e["type"] for e in events]
        assert types == ["sample", "t2"] * 3
        assert events[0]["payload"]["t"] == 0
        assert len(events[0]["payload"]["values"]) == 52
    finally:
        server.should_exit = True
        thread.join(timeout=10)


def test_monitor_loop_thread(data_dir, model):
    svc = MonitorService(
        ServiceConfig(data_dir=str(data_dir), tick_interval=0.001),
        backend=StubBackend(""),
        model=model,
    )
    try:
        svc.start()
        deadline = time.monotonic() + 5
        while time.monotonic() < deadline and svc.replayer.emitted < 10:
            time.sleep(0.01)
        assert svc.replayer.emitted >= 10
        snap = svc.snapshot()
        assert snap.point is not None
        assert snap.alarm.status is AlarmStatus.NORMAL
    finally:
        svc.stop()

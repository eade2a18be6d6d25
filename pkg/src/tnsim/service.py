"""HTTP run service: store scenarios, execute them, serve trajectories.

Endpoints:
    POST /runs                     submit a scenario document, returns run id
    GET  /runs/{id}                run record with status
    GET  /runs/{id}/trajectory     exported bytes, ?format=csv|json
    GET  /health                   liveness probe

Runs are persisted append-only under TN_DATA_DIR (one directory per run id,
record.json plus both trajectory exports written on completion). Execution
is synchronous: the POST response already carries the final status. The
trajectory bytes are produced by the same exporter the CLI uses, so the two
surfaces are byte-identical for the same scenario and seed.
"""

from __future__ import annotations

import datetime
import json
import os
import threading
import uuid
from pathlib import Path

from fastapi import FastAPI
from fastapi.responses import JSONResponse, Response

from .engine import run_simulation, trajectory_to_csv_bytes, trajectory_to_json_bytes
from .scenario import ScenarioValidationError, scenario_from_json_dict

DEFAULT_PORT = 8080


def _now() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat()


class RunStore:
    """Append-only on-disk store, one directory per run id."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def _run_dir(self, run_id: str) -> Path:
        return self.root / run_id

    def _write_record(self, run_id: str, record: dict) -> None:
        # status transitions are atomic: write-then-rename
        path = self._run_dir(run_id) / "record.json"
        tmp = path.with_suffix(".json.tmp")
        tmp.write_text(json.dumps(record, sort_keys=True, indent=2))
        os.replace(tmp, path)

    def create_run(self, scenario_doc: dict) -> dict:
        """Validate, persist and synchronously execute a scenario."""
        scenario = scenario_from_json_dict(scenario_doc)  # may raise
        run_id = uuid.uuid4().hex
        with self._lock:
            run_dir = self._run_dir(run_id)
            run_dir.mkdir(parents=True)
        record = {
            "id": run_id,
            "status": "running",
            "created": _now(),
            "completed": None,
            "scenario": scenario_doc,
            "trajectory": None,
            "error": None,
        }
        self._write_record(run_id, record)
        try:
            records = run_simulation(scenario)
            run_dir = self._run_dir(run_id)
            if records:
                (run_dir / "trajectory.csv").write_bytes(
                    trajectory_to_csv_bytes(records)
                )
            else:
                (run_dir / "trajectory.csv").write_bytes(b"")
            (run_dir / "trajectory.json").write_bytes(
                trajectory_to_json_bytes(records)
            )
            record["status"] = "done"
            record["completed"] = _now()
            record["trajectory"] = {
                "csv": f"/runs/{run_id}/trajectory?format=csv",
                "json": f"/runs/{run_id}/trajectory?format=json",
            }
        except Exception as exc:  # run failed; record the report
            record["status"] = "failed"
            record["completed"] = _now()
            record["error"] = {"type": type(exc).__name__, "message": str(exc)}
        self._write_record(run_id, record)
        return record

    def get_run(self, run_id: str) -> dict | None:
        path = self._run_dir(run_id) / "record.json"
        if not path.exists():
            return None
        return json.loads(path.read_text())

    def trajectory_bytes(self, run_id: str, format: str) -> bytes:
        return (self._run_dir(run_id) / f"trajectory.{format}").read_bytes()


def create_app(data_dir: str | Path | None = None) -> FastAPI:
    """Build the service; data_dir defaults to $TN_DATA_DIR or ./tn-data."""
    root = Path(data_dir or os.environ.get("TN_DATA_DIR", "tn-data"))
    store = RunStore(root)
    app = FastAPI(title="tnsim run service")
    app.state.store = store

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.post("/runs", status_code=201)
    def create_run(payload: dict):
        try:
            record = store.create_run(payload)
        except ScenarioValidationError as exc:
            return JSONResponse(status_code=422, content={"errors": exc.errors})
        return record

    @app.get("/runs/{run_id}")
    def get_run(run_id: str):
        record = store.get_run(run_id)
        if record is None:
            return JSONResponse(status_code=404, content={"error": "unknown run id"})
        return record

    @app.get("/runs/{run_id}/trajectory")
    def get_trajectory(run_id: str, format: str = "csv"):
        if format not in ("csv", "json"):
            return JSONResponse(
                status_code=400, content={"error": "format must be csv or json"}
            )
        record = store.get_run(run_id)
        if record is None:
            return JSONResponse(status_code=404, content={"error": "unknown run id"})
        if record["status"] != "done":
            return JSONResponse(
                status_code=409,
                content={"error": f"run status is {record['status']}, not done"},
            )
        payload = store.trajectory_bytes(run_id, format)
        media = "text/csv" if format == "csv" else "application/json"
        return Response(content=payload, media_type=media)

    return app


def serve(port: int | None = None, data_dir: str | Path | None = None) -> None:
    """Run the service under uvicorn (blocking)."""
    import uvicorn

    if port is None:
        port = int(os.environ.get("TN_PORT", DEFAULT_PORT))
    uvicorn.run(create_app(data_dir), host="0.0.0.0", port=port)

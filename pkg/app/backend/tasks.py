"""Background sweep jobs: validation at submission, one worker loop, JSON history."""
from __future__ import annotations

import asyncio
import json
import logging
import threading
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple
from uuid import uuid4

from pydantic import BaseModel, Field, field_serializer

from ..metrics.aggregate import AggregateReport
from ..netsim.scenario import make_scenario
from ..utils.scenario_file import parse_scenario_text
from .pipeline import RunSpec, make_run_spec, run_sweep

logger = logging.getLogger(__name__)

TIMESTAMP_FORMAT = "%Y-%m-%dT%H:%M:%S.%fZ"


def _utcnow() -> datetime:
    return datetime.now(timezone.utc)


class SweepStatus:
    QUEUED = "queued"
    PROCESSING = "processing"
    COMPLETED = "completed"
    FAILED = "failed"

    FINISHED = (COMPLETED, FAILED)


class ProtocolSummary(BaseModel):
    """Seed-averaged metrics of one protocol over all pause times of a sweep."""

    protocol: str
    pdf: Optional[float] = None
    aeed: Optional[float] = None
    ro: float = 0.0
    tp: float = 0.0


class SweepState(BaseModel):
    """What ``GET /sweeps/{id}`` reports."""

    id: str
    status: str = Field(default=SweepStatus.QUEUED)
    progress: float = Field(default=0.0, ge=0.0, le=1.0)
    runs: int = 0
    runs_done: int = 0
    protocols: Tuple[str, ...] = ()
    log: List[str] = Field(default_factory=list)
    created_at: datetime = Field(default_factory=_utcnow)
    updated_at: datetime = Field(default_factory=_utcnow)
    result_path: Optional[str] = None
    aggregate_path: Optional[str] = None
    summary: List[ProtocolSummary] = Field(default_factory=list)
    error: Optional[str] = None

    @field_serializer("created_at", "updated_at")
    def _format_time(self, value: datetime) -> str:
        return value.strftime(TIMESTAMP_FORMAT)


class SweepRequest(BaseModel):
    """JSON body of a sweep submission; ``scenario`` holds Scenario field values."""

    protocols: Tuple[str, ...] = ("dymo", "aodv", "dsdv", "dsr")
    pause_times: Tuple[float, ...] = ()
    seeds: Tuple[int, ...] = (1,)
    scenario: Dict[str, Any] = Field(default_factory=dict)


@dataclass(slots=True)
class SweepJob:
    sweep_id: str
    run_spec: RunSpec
    scenario_file: Optional[Path] = None


def summarize(aggregates: Sequence[AggregateReport]) -> List[ProtocolSummary]:
    """Average the per-point means of each protocol, in first-seen order."""

    grouped: Dict[str, List[AggregateReport]] = {}
    for agg in aggregates:
        grouped.setdefault(agg.protocol, []).append(agg)

    def mean(values: List[float]) -> Optional[float]:
        return sum(values) / len(values) if values else None

    return [
        ProtocolSummary(
            protocol=protocol,
            pdf=mean([a.pdf.mean for a in points if a.pdf is not None]),
            aeed=mean([a.aeed.mean for a in points if a.aeed is not None]),
            ro=mean([a.ro.mean for a in points]) or 0.0,
            tp=mean([a.tp.mean for a in points]) or 0.0,
        )
        for protocol, points in grouped.items()
    ]


class SweepHistory:
    """Finished sweeps, newest last, stored as one JSON list."""

    def __init__(self, path: Path) -> None:
        self._path = path
        self._lock = threading.Lock()
        path.parent.mkdir(parents=True, exist_ok=True)
        if not path.exists():
            self._save([])

    def _load(self) -> List[Dict[str, Any]]:
        return json.loads(self._path.read_text(encoding="utf-8"))

    def _save(self, entries: List[Dict[str, Any]]) -> None:
        self._path.write_text(json.dumps(entries, indent=2), encoding="utf-8")

    def record(self, state: SweepState) -> None:
        entry = state.model_dump(mode="json", exclude={"log"})
        with self._lock:
            entries = [e for e in self._load() if e.get("id") != state.id]
            entries.append(entry)
            self._save(entries)

    def forget(self, sweep_ids: Sequence[str]) -> None:
        dropped = set(sweep_ids)
        with self._lock:
            self._save([e for e in self._load() if e.get("id") not in dropped])

    def entries(self) -> List[Dict[str, Any]]:
        with self._lock:
            return self._load()


class SweepManager:
    """Run submitted sweeps one after another on a private event loop.

    Requests are validated when the sweep is created, so a bad scenario never
    reaches the worker.
    """

    def __init__(
        self,
        *,
        base_dir: Optional[Path] = None,
        retention: timedelta = timedelta(days=7),
        cleanup_interval: timedelta = timedelta(hours=6),
        jobs: int = 1,
    ) -> None:
        root = (base_dir or Path.cwd()) / "data"
        self.scenario_dir = root / "scenarios"
        self.results_dir = root / "results"
        self.logs_dir = root / "logs"
        for directory in (self.scenario_dir, self.results_dir, self.logs_dir):
            directory.mkdir(parents=True, exist_ok=True)

        self.retention = retention
        self.cleanup_interval = cleanup_interval
        self.jobs = jobs

        self._sweeps: Dict[str, SweepState] = {}
        self._lock = threading.Lock()
        self._history = SweepHistory(root / "history.json")

        self._loop = asyncio.new_event_loop()
        self._pending: Optional[asyncio.Queue[SweepJob]] = None
        ready = threading.Event()
        self._loop_thread = threading.Thread(
            target=self._serve, args=(ready,), name="sweep-worker", daemon=True
        )
        self._loop_thread.start()
        ready.wait()

        self._stopping = threading.Event()
        self._janitor = threading.Thread(
            target=self._janitor_loop, name="sweep-janitor", daemon=True
        )
        self._janitor.start()

    # ------------------------------------------------------------------
    # Submission
    # ------------------------------------------------------------------
    def submit(self, request: SweepRequest) -> str:
        """Queue a sweep described by a JSON request; raises ``ConfigError`` when invalid."""

        spec = self._run_spec(make_scenario(**request.scenario), request)
        return self._queue(spec)

    def submit_file(
        self,
        filename: str,
        data: bytes,
        *,
        protocols: Tuple[str, ...],
        pause_times: Tuple[float, ...] = (),
        seeds: Tuple[int, ...] = (1,),
    ) -> str:
        """Queue a sweep over an uploaded scenario file (UTF-8 ``key = value`` text)."""

        scenario = parse_scenario_text(data.decode("utf-8"))
        request = SweepRequest(protocols=protocols, pause_times=pause_times, seeds=seeds)
        return self._queue(self._run_spec(scenario, request), keep_file=(filename, data))

    def _run_spec(self, scenario: Any, request: SweepRequest) -> RunSpec:
        return make_run_spec(
            scenario=scenario,
            protocols=request.protocols,
            pause_times=request.pause_times,
            seeds=request.seeds,
            jobs=self.jobs,
        )

    def _queue(self, spec: RunSpec, keep_file: Optional[Tuple[str, bytes]] = None) -> str:
        sweep_id = uuid4().hex
        scenario_file = None
        if keep_file is not None:
            filename, data = keep_file
            scenario_file = self.scenario_dir / f"{sweep_id}_{Path(filename).name}"
            scenario_file.write_bytes(data)
        with self._lock:
            self._sweeps[sweep_id] = SweepState(
                id=sweep_id, runs=len(spec.points()), protocols=spec.protocols
            )
        job = SweepJob(sweep_id=sweep_id, run_spec=spec, scenario_file=scenario_file)
        asyncio.run_coroutine_threadsafe(self._put(job), self._loop)
        logger.info("Queued sweep %s (%d runs)", sweep_id, len(spec.points()))
        return sweep_id

    # ------------------------------------------------------------------
    # Queries
    # ------------------------------------------------------------------
    def state(self, sweep_id: str) -> Optional[SweepState]:
        with self._lock:
            current = self._sweeps.get(sweep_id)
            return current.model_copy(deep=True) if current else None

    def result_file(self, sweep_id: str, *, aggregate: bool = False) -> Optional[Path]:
        current = self.state(sweep_id)
        if current is None:
            return None
        name = current.aggregate_path if aggregate else current.result_path
        if not name or not Path(name).exists():
            return None
        return Path(name)

    def history(self) -> List[Dict[str, Any]]:
        return self._history.entries()

    # ------------------------------------------------------------------
    # Lifecycle
    # ------------------------------------------------------------------
    def purge_expired(self, now: Optional[datetime] = None) -> List[str]:
        """Delete files and state of finished sweeps older than the retention window."""

        cutoff = (now or _utcnow()) - self.retention
        with self._lock:
            expired = [
                sweep_id
                for sweep_id, current in self._sweeps.items()
                if current.status in SweepStatus.FINISHED and current.updated_at < cutoff
            ]
            for sweep_id in expired:
                self._delete_files(self._sweeps.pop(sweep_id))
        if expired:
            self._history.forget(expired)
            logger.info("Purged %d expired sweeps", len(expired))
        return expired

    def shutdown(self) -> None:
        self._stopping.set()
        if self._loop.is_running():
            self._loop.call_soon_threadsafe(self._loop.stop)
        for thread in (self._loop_thread, self._janitor):
            if thread.is_alive():
                thread.join(timeout=1)

    # ------------------------------------------------------------------
    # Worker
    # ------------------------------------------------------------------
    def _serve(self, ready: threading.Event) -> None:
        asyncio.set_event_loop(self._loop)
        self._pending = asyncio.Queue()
        self._loop.create_task(self._drain())
        ready.set()
        self._loop.run_forever()

    async def _put(self, job: SweepJob) -> None:
        assert self._pending is not None
        await self._pending.put(job)

    async def _drain(self) -> None:
        assert self._pending is not None
        while True:
            job = await self._pending.get()
            try:
                await asyncio.to_thread(self._run, job)
            finally:
                self._pending.task_done()

    def _run(self, job: SweepJob) -> None:
        sweep_id = job.sweep_id
        runs_csv = self.results_dir / f"{sweep_id}.csv"
        agg_csv = self.results_dir / f"{sweep_id}_agg.csv"
        self._set(sweep_id, status=SweepStatus.PROCESSING)
        self._note(sweep_id, "Sweep picked up by worker")
        spec = job.run_spec.model_copy(update={"csv_out": runs_csv, "agg_out": agg_csv})

        def progress(fraction: float) -> None:
            with self._lock:
                current = self._sweeps[sweep_id]
                current.progress = max(0.0, min(fraction, 1.0))
                current.runs_done = round(current.progress * current.runs)
                current.updated_at = _utcnow()

        try:
            _, aggregates = run_sweep(
                spec, progress_callback=progress, log_callback=lambda m: self._note(sweep_id, m)
            )
        except Exception as exc:
            logger.exception("Sweep %s failed", sweep_id)
            self._note(sweep_id, f"Sweep failed: {exc}")
            self._finish(sweep_id, status=SweepStatus.FAILED, error=str(exc))
        else:
            self._note(sweep_id, "Sweep completed")
            self._finish(
                sweep_id,
                status=SweepStatus.COMPLETED,
                progress=1.0,
                result_path=str(runs_csv),
                aggregate_path=str(agg_csv),
                summary=summarize(aggregates),
            )

    def _set(self, sweep_id: str, **changes: Any) -> None:
        with self._lock:
            current = self._sweeps[sweep_id]
            for name, value in changes.items():
                setattr(current, name, value)
            current.updated_at = _utcnow()

    def _finish(self, sweep_id: str, **changes: Any) -> None:
        # History is written before the final status becomes visible.
        with self._lock:
            final = self._sweeps[sweep_id].model_copy(deep=True, update=changes)
            if final.status == SweepStatus.COMPLETED:
                final.runs_done = final.runs
            final.updated_at = _utcnow()
            self._history.record(final)
            self._sweeps[sweep_id] = final

    def _note(self, sweep_id: str, message: str) -> None:
        stamp = _utcnow().strftime(TIMESTAMP_FORMAT)
        with self._lock:
            self._sweeps[sweep_id].log.append(f"[{stamp}] {message}")
        with (self.logs_dir / f"{sweep_id}.log").open("a", encoding="utf-8") as handle:
            handle.write(f"{stamp} {message}\n")

    def _delete_files(self, state: SweepState) -> None:
        for name in (state.result_path, state.aggregate_path):
            if name:
                Path(name).unlink(missing_ok=True)
        for path in self.scenario_dir.glob(f"{state.id}_*"):
            path.unlink(missing_ok=True)
        (self.logs_dir / f"{state.id}.log").unlink(missing_ok=True)

    def _janitor_loop(self) -> None:
        while not self._stopping.wait(self.cleanup_interval.total_seconds()):
            try:
                self.purge_expired()
            except OSError:
                logger.warning("Purging expired sweeps failed", exc_info=True)


__all__ = [
    "ProtocolSummary",
    "SweepHistory",
    "SweepManager",
    "SweepRequest",
    "SweepState",
    "SweepStatus",
    "summarize",
]

"""Sweep pipeline: run the cartesian product of protocols, pause times and seeds."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor, as_completed
from pathlib import Path
from typing import Any, Callable, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..core.errors import ConfigError
from ..metrics.aggregate import AggregateReport, aggregate_groups
from ..metrics.compute import MetricsReport, build_report
from ..metrics.csvio import write_aggregate_csv, write_runs_csv
from ..netsim.engine import SimulationResult, run
from ..netsim.scenario import ProtocolName, Scenario

logger = logging.getLogger(__name__)

ProgressCallback = Callable[[float], None]
LogCallback = Callable[[str], None]


class RunSpec(BaseModel):
    """What to simulate and where to put the results.

    An empty ``pause_times`` means the scenario's own pause time.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    scenario: Scenario = Field(default_factory=Scenario)
    protocols: Tuple[ProtocolName, ...] = ("dymo",)
    pause_times: Tuple[float, ...] = ()
    seeds: Tuple[int, ...] = (1,)
    jobs: int = Field(default=1, ge=1)
    csv_out: Optional[Path] = None
    agg_out: Optional[Path] = None

    @model_validator(mode="after")
    def _check_lists(self) -> "RunSpec":
        if not self.protocols:
            raise ConfigError("at least one protocol is required", field="protocols")
        if not self.seeds:
            raise ConfigError("at least one seed is required", field="seeds")
        if any(value < 0 for value in self.pause_times):
            raise ConfigError("pause times must be >= 0", field="pause_times")
        if any(seed < 0 for seed in self.seeds):
            raise ConfigError("seeds must be >= 0", field="seeds")
        return self

    def points(self) -> List[Scenario]:
        """Scenarios in (protocol, pause time, seed) order."""

        pauses = self.pause_times or (self.scenario.pause_time,)
        return [
            self.scenario.with_overrides(protocol=protocol, pause_time=pause, seed=seed)
            for protocol in self.protocols
            for pause in pauses
            for seed in self.seeds
        ]


def make_run_spec(**values: Any) -> RunSpec:
    """Build a :class:`RunSpec`, reporting pydantic failures as :class:`ConfigError`."""

    try:
        return RunSpec(**values)
    except ValidationError as exc:
        first = exc.errors()[0] if exc.errors() else {}
        field = ".".join(str(part) for part in first.get("loc", ())) or None
        raise ConfigError(first.get("msg", str(exc)), field=field) from exc


def report_for(result: SimulationResult) -> MetricsReport:
    scenario = result.scenario
    return build_report(
        result.trace,
        protocol=scenario.protocol,
        nodes=scenario.node_count,
        pause_time=scenario.pause_time,
        seed=scenario.seed,
        duration=scenario.duration,
    )


def run_point(scenario: Scenario) -> MetricsReport:
    """Simulate one scenario and reduce it to its metrics (picklable for workers)."""

    return report_for(run(scenario))


class SweepPipeline:
    """Runs sweeps sequentially or on a process pool; results keep sweep order."""

    def __init__(self, jobs: int = 1) -> None:
        if jobs < 1:
            raise ConfigError("must be >= 1", field="jobs")
        self.jobs = jobs

    def run(
        self,
        points: Sequence[Scenario],
        *,
        progress_callback: Optional[ProgressCallback] = None,
        log_callback: Optional[LogCallback] = None,
    ) -> List[MetricsReport]:
        total = len(points)
        if log_callback:
            log_callback(f"Starting sweep of {total} runs with {self.jobs} worker(s)")
        results: List[Optional[MetricsReport]] = [None] * total

        def finished(index: int, report: MetricsReport) -> None:
            results[index] = report
            done = sum(1 for item in results if item is not None)
            logger.debug(
                "Run %d/%d done: %s pause=%s seed=%d",
                done,
                total,
                report.protocol,
                report.pause_time,
                report.seed,
            )
            if progress_callback:
                progress_callback(done / total)

        if self.jobs == 1 or total <= 1:
            for index, scenario in enumerate(points):
                finished(index, run_point(scenario))
        else:
            with ProcessPoolExecutor(max_workers=self.jobs) as pool:
                futures = {pool.submit(run_point, scenario): i for i, scenario in enumerate(points)}
                for future in as_completed(futures):
                    finished(futures[future], future.result())

        if log_callback:
            log_callback("Sweep finished")
        return [report for report in results if report is not None]


def run_sweep(
    spec: RunSpec,
    *,
    progress_callback: Optional[ProgressCallback] = None,
    log_callback: Optional[LogCallback] = None,
) -> Tuple[List[MetricsReport], List[AggregateReport]]:
    """Run *spec*'s sweep and write the CSV outputs it names."""

    pipeline = SweepPipeline(spec.jobs)
    reports = pipeline.run(
        spec.points(), progress_callback=progress_callback, log_callback=log_callback
    )
    aggregates = aggregate_groups(reports)
    if spec.csv_out is not None:
        write_runs_csv(reports, spec.csv_out)
        logger.info("Wrote %d rows to %s", len(reports), spec.csv_out)
    if spec.agg_out is not None:
        write_aggregate_csv(aggregates, spec.agg_out)
        logger.info("Wrote %d aggregate rows to %s", len(aggregates), spec.agg_out)
    return reports, aggregates


__all__ = ["RunSpec", "SweepPipeline", "make_run_spec", "report_for", "run_point", "run_sweep"]

"""Full-scale four-protocol comparison; run with ``pytest -m slow``."""

from __future__ import annotations

from pathlib import Path

import pytest

from app.backend.pipeline import make_run_spec, run_sweep
from app.metrics.csvio import read_sweep_csv
from app.metrics.ranking import points_satisfying
from app.netsim.scenario import Scenario

PAUSE_TIMES = (0.0, 20.0, 40.0, 60.0, 80.0, 100.0)

ORDERINGS = [
    ("ro", ["dymo", "aodv", "dsdv"], ["<", "<"]),
    ("tp_bps", ["dymo", "aodv"], [">"]),
    ("aeed_s", ["dymo", "aodv", "dsdv"], ["<", "<"]),
    ("pdf", ["dymo", "aodv", "dsdv"], [">=", ">"]),
]


@pytest.mark.slow
def test_protocol_ordering_holds_at_most_pause_times(tmp_path: Path) -> None:
    csv_out = tmp_path / "sweep.csv"
    spec = make_run_spec(
        scenario=Scenario(),
        protocols=("dymo", "aodv", "dsdv", "dsr"),
        pause_times=PAUSE_TIMES,
        seeds=tuple(range(1, 11)),
        jobs=4,
        csv_out=csv_out,
    )
    run_sweep(spec)
    frame = read_sweep_csv(csv_out)
    assert len(frame) == 240

    for metric, chain, relations in ORDERINGS:
        held = points_satisfying(frame, metric, chain, relations)
        assert held >= 4, f"{metric}: {' '.join(chain)} held at {held} of 6 pause times"

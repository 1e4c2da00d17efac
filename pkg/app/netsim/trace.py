"""Ground-truth packet trace: records, the tab-separated file format, and checksums.

One record per line::

    event_char  time  node  msg_id  kind  size  src  dst  [drop_reason]

``event_char`` is ``s``/``r``/``f``/``d`` and ``time`` has six decimals.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator, List, Optional, TextIO, Union

from ..core.errors import MalformedTrace
from ..core.messages import MessageKind
from ..routing.actions import DropReason


class TraceEvent(str, Enum):
    SEND = "s"
    RECV = "r"
    FORWARD = "f"
    DROP = "d"


@dataclass(frozen=True, slots=True)
class TraceRecord:
    time: float
    event: TraceEvent
    node: int
    msg_id: int
    kind: MessageKind
    size: int
    src: int
    dst: int
    drop_reason: Optional[DropReason] = None

    def to_line(self) -> str:
        fields = [
            self.event.value,
            f"{self.time:.6f}",
            str(self.node),
            str(self.msg_id),
            self.kind.name,
            str(self.size),
            str(self.src),
            str(self.dst),
        ]
        if self.drop_reason is not None:
            fields.append(self.drop_reason.value)
        return "\t".join(fields)


def parse_line(line: str, line_no: int) -> TraceRecord:
    parts = line.rstrip("\n").split("\t")
    if len(parts) not in (8, 9):
        raise MalformedTrace(f"expected 8 or 9 fields, got {len(parts)}", line=line_no)
    try:
        event = TraceEvent(parts[0])
        kind = MessageKind[parts[4]]
        reason = DropReason(parts[8]) if len(parts) == 9 else None
        record = TraceRecord(
            time=float(parts[1]),
            event=event,
            node=int(parts[2]),
            msg_id=int(parts[3]),
            kind=kind,
            size=int(parts[5]),
            src=int(parts[6]),
            dst=int(parts[7]),
            drop_reason=reason,
        )
    except (KeyError, ValueError) as exc:
        raise MalformedTrace(f"unparseable field: {exc}", line=line_no) from exc
    if (record.event is TraceEvent.DROP) != (reason is not None):
        raise MalformedTrace("drop reason must accompany exactly the drop records", line=line_no)
    return record


def format_trace(records: Iterable[TraceRecord]) -> str:
    return "".join(record.to_line() + "\n" for record in records)


def write_trace(records: Iterable[TraceRecord], target: Union[str, Path, TextIO]) -> None:
    text = format_trace(records)
    if isinstance(target, (str, Path)):
        Path(target).write_text(text, encoding="utf-8")
    else:
        target.write(text)


def iter_trace(lines: Iterable[str]) -> Iterator[TraceRecord]:
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        yield parse_line(line, line_no)


def read_trace(path: Union[str, Path]) -> List[TraceRecord]:
    with Path(path).open(encoding="utf-8") as handle:
        return list(iter_trace(handle))


def trace_digest(records: Iterable[TraceRecord]) -> str:
    digest = hashlib.sha256()
    for record in records:
        digest.update(record.to_line().encode("utf-8"))
        digest.update(b"\n")
    return digest.hexdigest()


__all__ = [
    "TraceEvent",
    "TraceRecord",
    "format_trace",
    "iter_trace",
    "parse_line",
    "read_trace",
    "trace_digest",
    "write_trace",
]

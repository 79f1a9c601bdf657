"""Line-oriented frame-log format and ingestion of external captures.

One record per line, comma separated, '.' radix, no locale dependence:

    capture_id,timestamp,stage,rows,cols,v0,v1,...,vN

Values are written with Python's shortest round-trip float repr, so a
write/read cycle preserves them exactly. Malformed lines are reported with
their line number and the rest of the file still parses.
"""

from __future__ import annotations

import io as _io
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence, Union

from .circuit import Frame, VOLTS
from .pipeline import StagedOutput

STAGES = ("raw_volts", "adc", "sum", "sn", "blur", "binary")

Sink = Union[str, Path, _io.TextIOBase]


@dataclass(frozen=True)
class FrameLogRecord:
    capture_id: int
    timestamp: float
    stage: str
    rows: int
    cols: int
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.stage not in STAGES:
            raise ValueError(f"stage must be one of {STAGES}")
        if self.rows < 1 or self.cols < 1:
            raise ValueError("record dimensions must be positive")
        if len(self.values) != self.rows * self.cols:
            raise ValueError(
                f"expected {self.rows * self.cols} values, got {len(self.values)}"
            )
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))


@dataclass(frozen=True)
class LogError:
    line_no: int
    reason: str


def record_line(record: FrameLogRecord) -> str:
    head = [
        str(record.capture_id),
        repr(record.timestamp),
        record.stage,
        str(record.rows),
        str(record.cols),
    ]
    return ",".join(head + [repr(v) for v in record.values])


def _parse_line(line: str) -> FrameLogRecord:
    parts = line.split(",")
    if len(parts) < 6:
        raise ValueError("too few fields")
    capture_id = int(parts[0])
    timestamp = float(parts[1])
    stage = parts[2]
    rows = int(parts[3])
    cols = int(parts[4])
    values = tuple(float(v) for v in parts[5:])
    return FrameLogRecord(capture_id, timestamp, stage, rows, cols, values)


def write_frame_log(records: Iterable[FrameLogRecord], sink: Sink) -> None:
    if isinstance(sink, (str, Path)):
        with open(sink, "w", encoding="ascii", newline="\n") as fh:
            write_frame_log(records, fh)
        return
    for record in records:
        sink.write(record_line(record) + "\n")


def read_frame_log(source: Sink) -> tuple[list[FrameLogRecord], list[LogError]]:
    """Parse a frame log; malformed lines become LogError entries."""
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="ascii") as fh:
            return read_frame_log(fh)
    records: list[FrameLogRecord] = []
    errors: list[LogError] = []
    for line_no, line in enumerate(source, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            records.append(_parse_line(stripped))
        except (ValueError, IndexError) as exc:
            errors.append(LogError(line_no=line_no, reason=str(exc)))
    return records, errors


def frame_to_record(
    frame: Frame,
    capture_id: int,
    timestamp: float,
    stage: str,
) -> FrameLogRecord:
    rows, cols = frame.shape
    return FrameLogRecord(
        capture_id=capture_id,
        timestamp=timestamp,
        stage=stage,
        rows=rows,
        cols=cols,
        values=tuple(frame.values.reshape(-1).tolist()),
    )


def record_to_frame(record: FrameLogRecord, unit: str = VOLTS, provenance: str = "log") -> Frame:
    import numpy as np

    values = np.asarray(record.values, dtype=float).reshape(record.rows, record.cols)
    return Frame(values, unit, provenance=provenance)


def staged_records(
    staged: StagedOutput,
    capture_id: int,
    timestamp: float,
) -> list[FrameLogRecord]:
    """Records for the four pipeline stages of one capture."""
    pairs = (
        ("sum", staged.raw),
        ("sn", staged.squared_normalized),
        ("blur", staged.blurred),
        ("binary", staged.binary),
    )
    return [frame_to_record(f, capture_id, timestamp, stage) for stage, f in pairs]


def ingest_external(source: Sink) -> tuple[list[Frame], list[LogError]]:
    """Read externally recorded frames (hardware captures) from a log.

    The values are treated as raw readings (volts unit) and the frames are
    tagged with provenance "external" so downstream code can tell them from
    simulated data.
    """
    records, errors = read_frame_log(source)
    frames = [record_to_frame(r, unit=VOLTS, provenance="external") for r in records]
    return frames, errors

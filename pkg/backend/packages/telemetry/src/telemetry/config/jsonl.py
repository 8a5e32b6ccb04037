"""JSONL span and log exporters sharing one session file."""

import contextlib
import logging
import threading
from collections.abc import Sequence
from pathlib import Path
from typing import TextIO

from opentelemetry.sdk._logs import LogData
from opentelemetry.sdk._logs.export import LogExporter, LogExportResult
from opentelemetry.sdk.trace import ReadableSpan
from opentelemetry.sdk.trace.export import SpanExporter, SpanExportResult
from pydantic import BaseModel

from .models import LogRecordData, SpanContext, SpanEvent, SpanRecord


class JSONLSessionFile:
    """Thread-safe append-only JSON Lines file for one telemetry session.

    Spans and log records of a session go to ``<log_path>/<session_id>.jsonl``.
    """

    def __init__(self, session_id: str, log_path: str | Path = "./logs") -> None:
        if not session_id:
            raise ValueError("session_id cannot be empty")
        self.session_id = session_id
        directory = Path(log_path).resolve()
        directory.mkdir(parents=True, exist_ok=True)
        self.path = directory / f"{session_id}.jsonl"
        self._handle: TextIO = self.path.open("a", encoding="utf-8")
        self._lock = threading.Lock()
        self.closed = False

    def write(self, records: Sequence[BaseModel]) -> bool:
        if self.closed:
            return False
        try:
            with self._lock:
                for record in records:
                    self._handle.write(record.model_dump_json() + "\n")
                self._handle.flush()
        except Exception as e:
            logging.warning("Failed to write telemetry records: %s", e)
            return False
        return True

    def flush(self) -> bool:
        if self.closed:
            return False
        with self._lock:
            self._handle.flush()
        return True

    def close(self) -> None:
        self.closed = True
        with contextlib.suppress(Exception):
            self._handle.close()


def _span_record(span: ReadableSpan, session_id: str) -> SpanRecord:
    duration = None
    if span.end_time is not None and span.start_time is not None:
        duration = (span.end_time - span.start_time) / 1e6
    return SpanRecord(
        session_id=session_id,
        name=span.name,
        context=SpanContext(
            trace_id=format(span.context.trace_id, "032x"),
            span_id=format(span.context.span_id, "016x"),
        ),
        parent_span_id=format(span.parent.span_id, "016x") if span.parent else None,
        start_time=span.start_time or 0,
        end_time=span.end_time,
        duration_ms=duration,
        status_code=span.status.status_code.value if span.status else None,
        status_description=span.status.description if span.status else None,
        attributes=dict(span.attributes) if span.attributes else {},
        events=[
            SpanEvent(
                name=event.name,
                timestamp=event.timestamp,
                attributes=dict(event.attributes) if event.attributes else {},
            )
            for event in span.events
        ],
    )


class JSONLSpanExporter(SpanExporter):
    """Writes finished spans to the session file."""

    def __init__(self, session_file: JSONLSessionFile) -> None:
        self._file = session_file

    def export(self, spans: Sequence[ReadableSpan]) -> SpanExportResult:
        if not spans:
            return SpanExportResult.SUCCESS if not self._file.closed else SpanExportResult.FAILURE
        records = [_span_record(span, self._file.session_id) for span in spans]
        return SpanExportResult.SUCCESS if self._file.write(records) else SpanExportResult.FAILURE

    def shutdown(self) -> None:
        self._file.close()

    def force_flush(self, timeout_millis: int = 30000) -> bool:  # noqa: ARG002
        return self._file.flush()


class JSONLLogExporter(LogExporter):
    """Writes log records to the session file next to the spans."""

    def __init__(self, session_file: JSONLSessionFile) -> None:
        self._file = session_file

    def export(self, batch: Sequence[LogData]) -> LogExportResult:
        records = []
        for data in batch:
            log_record = data.log_record
            records.append(
                LogRecordData(
                    session_id=self._file.session_id,
                    timestamp=log_record.timestamp or log_record.observed_timestamp or 0,
                    trace_id=format(log_record.trace_id, "032x") if log_record.trace_id else None,
                    span_id=format(log_record.span_id, "016x") if log_record.span_id else None,
                    severity_text=log_record.severity_text,
                    severity_number=(
                        log_record.severity_number.value if log_record.severity_number else None
                    ),
                    body=log_record.body,
                    attributes=dict(log_record.attributes) if log_record.attributes else {},
                    scope=data.instrumentation_scope.name if data.instrumentation_scope else None,
                ),
            )
        return LogExportResult.SUCCESS if self._file.write(records) else LogExportResult.FAILURE

    def shutdown(self) -> None:
        self._file.close()

    def force_flush(self, timeout_millis: int = 30000) -> bool:  # noqa: ARG002
        return self._file.flush()

"""Pydantic models for span and log records written to JSONL.

Attribute values coming from numeric code may be numpy scalars, tuples or paths; the serializers
coerce them to plain JSON types so a record is always one valid JSON line.
"""

from datetime import datetime
from enum import Enum
from pathlib import Path
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, field_serializer


def to_json_value(value: Any) -> Any:
    """Coerce one attribute value to a JSON-compatible type."""
    if isinstance(value, datetime):
        return value.isoformat()
    if isinstance(value, bytes):
        return value.hex()
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, tuple | list):
        return [to_json_value(v) for v in value]
    # numpy scalars expose .item() without importing numpy here
    item = getattr(value, "item", None)
    if callable(item) and not isinstance(value, str | int | float | bool):
        return item()
    return value


def _serialize_mapping(value: dict[str, Any]) -> dict[str, Any]:
    return {k: to_json_value(v) for k, v in value.items()}


class SpanContext(BaseModel):
    """Trace and span identifiers, hex encoded."""

    trace_id: str
    span_id: str

    model_config = ConfigDict(frozen=True)


class SpanEvent(BaseModel):
    name: str
    timestamp: int  # nanoseconds since epoch
    attributes: dict[str, Any] = Field(default_factory=dict)

    model_config = ConfigDict(frozen=True)

    @field_serializer("attributes")
    def serialize_attributes(self, value: dict[str, Any]) -> dict[str, Any]:
        return _serialize_mapping(value)


class SpanRecord(BaseModel):
    """One finished span, as written to the session file."""

    record_type: str = "span"
    session_id: str
    name: str
    context: SpanContext
    parent_span_id: str | None = None
    start_time: int
    end_time: int | None = None
    duration_ms: float | None = None
    status_code: int | None = None
    status_description: str | None = None
    attributes: dict[str, Any] = Field(default_factory=dict)
    events: list[SpanEvent] = Field(default_factory=list)

    model_config = ConfigDict(frozen=True)

    @field_serializer("attributes")
    def serialize_attributes(self, value: dict[str, Any]) -> dict[str, Any]:
        return _serialize_mapping(value)


class LogRecordData(BaseModel):
    """One log record, correlated to the active span when there is one."""

    record_type: str = "log"
    session_id: str
    timestamp: int
    trace_id: str | None = None
    span_id: str | None = None
    severity_text: str | None = None
    severity_number: int | None = None
    body: Any = None
    attributes: dict[str, Any] = Field(default_factory=dict)
    scope: str | None = None

    model_config = ConfigDict(frozen=True)

    @field_serializer("attributes")
    def serialize_attributes(self, value: dict[str, Any]) -> dict[str, Any]:
        return _serialize_mapping(value)

    @field_serializer("body")
    def serialize_body(self, value: Any) -> Any:
        return to_json_value(value)

"""Spans around long-running numeric work."""

from collections.abc import Iterator, Mapping
from contextlib import contextmanager
from typing import Any

from opentelemetry import trace as trace_api
from opentelemetry.trace import Span, Status, StatusCode

from telemetry.config.models import to_json_value


TRACER_NAME = "nlrm"

AttributeValue = str | bool | int | float


def _attribute(value: Any) -> AttributeValue | list[Any] | None:
    """Span attributes accept primitives and homogeneous lists only."""
    coerced = to_json_value(value)
    if coerced is None or isinstance(coerced, str | bool | int | float):
        return coerced
    if isinstance(coerced, list) and all(isinstance(v, str | bool | int | float) for v in coerced):
        return coerced
    return str(coerced)


def record_metrics(span: Span, metrics: Mapping[str, Any]) -> None:
    """Attach numeric results to a span; numpy scalars become plain numbers."""
    for key, value in metrics.items():
        attribute = _attribute(value)
        if attribute is not None:
            span.set_attribute(key, attribute)


@contextmanager
def run_span(name: str, **attributes: Any) -> Iterator[Span]:
    """Open a span named ``name`` for the duration of the block.

    Exceptions are recorded on the span and re-raised. Without a configured backend the span is
    a no-op.
    """
    tracer = trace_api.get_tracer(TRACER_NAME)
    with tracer.start_as_current_span(name, record_exception=True) as span:
        record_metrics(span, attributes)
        try:
            yield span
        except Exception as e:
            span.set_status(Status(StatusCode.ERROR, str(e)))
            raise

"""OpenTelemetry spans and structured logs for nonlinearity-removal runs.

Quick Start:
    >>> from telemetry import configure_telemetry, run_span, shutdown_telemetry
    >>>
    >>> context = configure_telemetry(backend="jsonl")
    >>> with run_span("dataset.generate", count=2000) as span:
    ...     ...
    >>> shutdown_telemetry(context)

Environment Variables:
    TELEMETRY: Backend type (console|jsonl|disabled) - overrides backend parameter
    LOG_PATH: Directory for JSONL files (default: ./logs)
    LOG_LEVEL: Python log level (default: INFO)
"""

from telemetry.config.telemetry import (
    TelemetryBackend,
    TelemetryContext,
    configure_telemetry,
    current_context,
    shutdown_telemetry,
)
from telemetry.spans import record_metrics, run_span


__all__ = [
    "TelemetryBackend",
    "TelemetryContext",
    "configure_telemetry",
    "current_context",
    "record_metrics",
    "run_span",
    "shutdown_telemetry",
]

__version__ = "0.1.0"

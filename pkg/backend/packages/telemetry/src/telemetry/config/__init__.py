"""Telemetry configuration subpackage - exporters and configuration utilities.

Most callers use the top-level ``telemetry`` module instead of importing from here.
"""

from telemetry.config.jsonl import JSONLLogExporter, JSONLSessionFile, JSONLSpanExporter
from telemetry.config.telemetry import (
    TelemetryBackend,
    TelemetryContext,
    configure_telemetry,
    shutdown_telemetry,
)


__all__ = [
    "JSONLLogExporter",
    "JSONLSessionFile",
    "JSONLSpanExporter",
    "TelemetryBackend",
    "TelemetryContext",
    "configure_telemetry",
    "shutdown_telemetry",
]

"""
OpenTelemetry configuration for command-line runs.

Providers (TracerProvider, LoggerProvider) are process singletons created on first use; each
``configure_telemetry`` call attaches fresh processors and exporters to them and
``shutdown_telemetry`` flushes and shuts those processors down again. Tests can therefore
configure and shut down repeatedly inside one process.

Supported backends:
- console: spans printed to stdout as they finish
- jsonl: spans and log records appended to ``<LOG_PATH>/<session_id>.jsonl``
- disabled: no providers touched, zero overhead (default)
"""

import atexit
import contextlib
import logging
import os
from dataclasses import dataclass
from datetime import UTC, datetime
from pathlib import Path
from typing import Literal, get_args

from opentelemetry import _logs as logs_api
from opentelemetry import trace as trace_api
from opentelemetry.instrumentation.logging import LoggingInstrumentor
from opentelemetry.sdk import trace as trace_sdk
from opentelemetry.sdk._logs import LoggerProvider, LoggingHandler
from opentelemetry.sdk._logs._internal import LogRecordProcessor
from opentelemetry.sdk._logs.export import BatchLogRecordProcessor
from opentelemetry.sdk.trace import SpanProcessor
from opentelemetry.sdk.trace.export import (
    BatchSpanProcessor,
    ConsoleSpanExporter,
    SimpleSpanProcessor,
    SpanExporter,
)

from telemetry.config.jsonl import JSONLLogExporter, JSONLSessionFile, JSONLSpanExporter


TelemetryBackend = Literal["console", "jsonl", "disabled"]


@dataclass
class TelemetryContext:
    """Handles of one telemetry session, needed again at shutdown."""

    session_id: str
    log_file_path: Path | None
    span_exporter: SpanExporter | None
    backend: TelemetryBackend
    span_processor: SpanProcessor | None = None
    log_processor: LogRecordProcessor | None = None


_current_telemetry_context: TelemetryContext | None = None

_global_tracer_provider: trace_sdk.TracerProvider | None = None
_global_logger_provider: LoggerProvider | None = None
_provider_process_id: int | None = None  # fork detection
_instrumentation_initialized: bool = False


def current_context() -> TelemetryContext | None:
    return _current_telemetry_context


def configure_telemetry(
    backend: TelemetryBackend = "disabled",
    verbose: bool = False,
    session_id: str | None = None,
) -> TelemetryContext:
    """
    Configure the telemetry backend for this process.

    Args:
        backend: "console", "jsonl" or "disabled"; the TELEMETRY environment variable wins
        verbose: Log the session setup at INFO level
        session_id: Session name for the JSONL file (default: timestamped)

    Returns:
        TelemetryContext to pass to shutdown_telemetry()

    Environment Variables:
        - TELEMETRY: Backend type (overrides backend parameter)
        - LOG_PATH: Directory for JSONL files (default: ./logs)
        - LOG_LEVEL: Python log level (default: INFO)
    """
    global _current_telemetry_context  # noqa: PLW0603

    env_backend = os.getenv("TELEMETRY")
    if env_backend:
        if env_backend not in get_args(TelemetryBackend):
            raise ValueError(
                f"Invalid TELEMETRY environment variable: {env_backend!r}. "
                f"Valid options: {', '.join(get_args(TelemetryBackend))}"
            )
        backend = env_backend  # type: ignore[assignment]

    if _current_telemetry_context is not None and _current_telemetry_context.backend != "disabled":
        logging.getLogger(__name__).debug(
            "Reconfiguring telemetry from %s to %s without shutdown",
            _current_telemetry_context.backend,
            backend,
        )

    if backend == "disabled":
        context = TelemetryContext(
            session_id="disabled",
            log_file_path=None,
            span_exporter=None,
            backend="disabled",
        )
    elif backend == "console":
        context = _configure_console(verbose=verbose)
    elif backend == "jsonl":
        context = _configure_jsonl(verbose=verbose, session_id=session_id)
    else:
        raise ValueError(f"Unsupported telemetry backend: {backend}")

    _current_telemetry_context = context
    return context


def shutdown_telemetry(context: TelemetryContext) -> None:
    """
    Flush and shut down the session's processors.

    Providers stay alive for the next session; the LoggingHandler is detached and logging
    instrumentation removed so a later session can install its own.
    """
    global _current_telemetry_context, _instrumentation_initialized  # noqa: PLW0603

    _current_telemetry_context = None
    if context.backend == "disabled":
        return

    for processor in (context.span_processor, context.log_processor):
        if processor is not None:
            with contextlib.suppress(Exception):
                processor.force_flush(timeout_millis=5000)
            with contextlib.suppress(Exception):
                processor.shutdown()

    root_logger = logging.getLogger()
    for handler in root_logger.handlers[:]:
        if isinstance(handler, LoggingHandler):
            root_logger.removeHandler(handler)

    if _instrumentation_initialized:
        with contextlib.suppress(RuntimeError):
            LoggingInstrumentor().uninstrument()
        _instrumentation_initialized = False


def _get_or_create_providers() -> tuple[trace_sdk.TracerProvider, LoggerProvider]:
    """Process-wide providers, recreated after a fork."""
    global _global_tracer_provider, _global_logger_provider, _provider_process_id  # noqa: PLW0603

    current_pid = os.getpid()
    if (
        _global_tracer_provider is not None
        and _global_logger_provider is not None
        and _provider_process_id == current_pid
    ):
        return _global_tracer_provider, _global_logger_provider

    _global_tracer_provider = trace_sdk.TracerProvider()
    _global_logger_provider = LoggerProvider()
    _provider_process_id = current_pid
    trace_api.set_tracer_provider(_global_tracer_provider)
    logs_api.set_logger_provider(_global_logger_provider)
    return _global_tracer_provider, _global_logger_provider


def _new_session_id(prefix: str) -> str:
    return f"{prefix}_{datetime.now(UTC).strftime('%Y%m%d_%H%M%S_%f')}"


def _apply_log_level() -> None:
    level = logging.getLevelNamesMapping().get(os.getenv("LOG_LEVEL", "INFO").upper())
    logging.root.setLevel(level if level is not None else logging.INFO)


def _register_flush_handler(*processors: SpanProcessor | LogRecordProcessor | None) -> None:
    def _flush_telemetry() -> None:
        for processor in processors:
            if processor is not None:
                with contextlib.suppress(Exception):
                    processor.force_flush(timeout_millis=1000)

    atexit.register(_flush_telemetry)


def _configure_console(verbose: bool = False) -> TelemetryContext:
    tracer_provider, _ = _get_or_create_providers()
    exporter = ConsoleSpanExporter()
    processor = SimpleSpanProcessor(exporter)
    tracer_provider.add_span_processor(processor)
    session_id = _new_session_id("console")
    if verbose:
        logging.getLogger(__name__).info("Console tracing enabled: session %s", session_id)
    return TelemetryContext(
        session_id=session_id,
        log_file_path=None,
        span_exporter=exporter,
        backend="console",
        span_processor=processor,
    )


def _configure_jsonl(verbose: bool = False, session_id: str | None = None) -> TelemetryContext:
    global _instrumentation_initialized  # noqa: PLW0603

    tracer_provider, logger_provider = _get_or_create_providers()

    if not _instrumentation_initialized:
        instrumentor = LoggingInstrumentor()
        if instrumentor.is_instrumented_by_opentelemetry:
            instrumentor.uninstrument()
        instrumentor.instrument(set_logging_format=True)
        _instrumentation_initialized = True

    _apply_log_level()

    session_id = session_id or _new_session_id("session")
    session_file = JSONLSessionFile(session_id, os.getenv("LOG_PATH", "./logs"))
    span_exporter = JSONLSpanExporter(session_file)
    log_exporter = JSONLLogExporter(session_file)

    # Batched export keeps tight numeric loops free of file I/O.
    span_processor = BatchSpanProcessor(span_exporter)
    log_processor = BatchLogRecordProcessor(
        log_exporter,
        max_export_batch_size=100,
        schedule_delay_millis=5000,
    )
    tracer_provider.add_span_processor(span_processor)
    logger_provider.add_log_record_processor(log_processor)

    root_logger = logging.getLogger()
    for existing_handler in root_logger.handlers[:]:
        if isinstance(existing_handler, LoggingHandler):
            root_logger.removeHandler(existing_handler)
    root_logger.addHandler(LoggingHandler(level=logging.NOTSET, logger_provider=logger_provider))

    _register_flush_handler(span_processor, log_processor)

    if verbose:
        logging.getLogger(__name__).info(
            "JSONL telemetry enabled: session %s -> %s", session_id, session_file.path
        )

    return TelemetryContext(
        session_id=session_id,
        log_file_path=session_file.path,
        span_exporter=span_exporter,
        backend="jsonl",
        span_processor=span_processor,
        log_processor=log_processor,
    )

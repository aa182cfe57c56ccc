"""
OpenTelemetry setup for the command line.

Constructions open spans through the API at all times; they are only exported
once setup_tracing installs a provider.
"""
import logging
from typing import Optional

from opentelemetry import trace
from opentelemetry.exporter.otlp.proto.http.trace_exporter import OTLPSpanExporter
from opentelemetry.sdk.resources import Resource
from opentelemetry.sdk.trace import TracerProvider
from opentelemetry.sdk.trace.export import BatchSpanProcessor, ConsoleSpanExporter, SimpleSpanProcessor

from .settings import RuntimeSettings

logger = logging.getLogger(__name__)

_tracer_provider: Optional[TracerProvider] = None


def setup_tracing(settings: RuntimeSettings) -> Optional[TracerProvider]:
    """Install a tracer provider according to settings.trace; no-op for 'none'."""
    global _tracer_provider

    if _tracer_provider is not None or settings.trace == "none":
        return _tracer_provider

    resource = Resource.create({"service.name": settings.service_name})
    provider = TracerProvider(resource=resource)
    if settings.trace == "console":
        provider.add_span_processor(SimpleSpanProcessor(ConsoleSpanExporter()))
    else:
        exporter_kwargs = {}
        if settings.otlp_endpoint:
            exporter_kwargs["endpoint"] = settings.otlp_endpoint.rstrip("/") + "/v1/traces"
        provider.add_span_processor(BatchSpanProcessor(OTLPSpanExporter(**exporter_kwargs)))
        logger.debug("OTLP endpoint=%s", exporter_kwargs.get("endpoint", "<sdk default>"))

    trace.set_tracer_provider(provider)
    _tracer_provider = provider
    return provider


def shutdown_tracing() -> None:
    """Flush and shut down the provider installed by setup_tracing."""
    global _tracer_provider
    if _tracer_provider:
        try:
            _tracer_provider.shutdown()
        except Exception:
            logger.exception("Tracer provider shutdown failed")
        _tracer_provider = None

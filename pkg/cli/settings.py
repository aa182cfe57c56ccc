"""
Runtime settings built from environment variables.

Supported variables:
- DESSYNC_SEED: seed for the random instance generator (default 0)
- DESSYNC_LOG_LEVEL: logging level name (default WARNING)
- DESSYNC_TRACE: none | console | otlp (default none)
- DESSYNC_MAX_OBSERVER_STATES: cap on subset constructions (default 1000000)
- OTEL_EXPORTER_OTLP_ENDPOINT: collector endpoint used when DESSYNC_TRACE=otlp
- OTEL_SERVICE_NAME: service.name resource attribute (default dessync)
"""
import logging
import os
from typing import Literal, Mapping, Optional

from pydantic import BaseModel, Field, ValidationError, field_validator

from core.errors import ConfigError

logger = logging.getLogger(__name__)

_LEVELS = {"CRITICAL", "ERROR", "WARNING", "INFO", "DEBUG"}


class RuntimeSettings(BaseModel):
    """Settings shared by every command."""
    seed: int = Field(0, description="Random instance seed")
    log_level: str = Field("WARNING", description="Logging level name")
    trace: Literal["none", "console", "otlp"] = Field("none", description="Span exporter")
    otlp_endpoint: Optional[str] = Field(None, description="OTLP/HTTP traces endpoint")
    service_name: str = Field("dessync", description="OpenTelemetry service name")
    max_observer_states: int = Field(1_000_000, description="Cap on observer states")

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v):
        level = (v or "WARNING").strip().upper()
        if level not in _LEVELS:
            raise ValueError(f"Unknown log level '{v}'")
        return level

    @field_validator("trace", mode="before")
    @classmethod
    def normalize_trace(cls, v):
        return (v or "none").strip().lower()

    @field_validator("max_observer_states")
    @classmethod
    def validate_cap(cls, v):
        if v < 1:
            raise ValueError("DESSYNC_MAX_OBSERVER_STATES must be >= 1")
        return v

    @classmethod
    def from_env(cls, environ: Optional[Mapping[str, str]] = None) -> "RuntimeSettings":
        """Build settings from the environment; invalid values raise ConfigError."""
        env = os.environ if environ is None else environ
        raw = {
            "seed": env.get("DESSYNC_SEED"),
            "log_level": env.get("DESSYNC_LOG_LEVEL"),
            "trace": env.get("DESSYNC_TRACE"),
            "otlp_endpoint": env.get("OTEL_EXPORTER_OTLP_ENDPOINT"),
            "service_name": env.get("OTEL_SERVICE_NAME"),
            "max_observer_states": env.get("DESSYNC_MAX_OBSERVER_STATES"),
        }
        try:
            return cls(**{k: v for k, v in raw.items() if v not in (None, "")})
        except ValidationError as e:
            raise ConfigError(f"Invalid runtime settings: {e}") from e

"""Configuration of the verification service and of the external candidate generator.

Settings come from environment variables (ServiceSettings.from_env), with command-line flags passed as overrides:

    DDR_INDEX_PATH             saved index file to serve (required)
    DDR_BIND_ADDR              host:port to listen on (default 127.0.0.1:8080)
    DDR_GENERATOR_URL          endpoint of an HTTP candidate generator
    DDR_GENERATOR_API_KEY_ENV  name of the env var holding the generator's API key
    DDR_GENERATOR_STUB         JSON file mapping statements (or their SHA-256) to candidate lists
    DDR_TIMEOUT_MS             generator request timeout, in milliseconds
    DDR_MAX_CONCURRENCY        cap on concurrent generator calls
    DDR_BEARER_TOKEN           if set, required as "Authorization: Bearer <token>" on every endpoint but /v1/healthz
"""
import enum
import os
from pathlib import Path
from typing import Mapping, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

DEFAULT_BIND_ADDR = "127.0.0.1:8080"
DEFAULT_TIMEOUT_SECONDS = 30.0
DEFAULT_MAX_CONCURRENCY = 8


class GeneratorKind(str, enum.Enum):
    FILE_STUB = "file_stub"
    EXTERNAL_HTTP = "external_http"


class GeneratorConfig(BaseModel):
    """Where candidate dependencies come from.

    Attributes:
        kind: FILE_STUB reads a fixed mapping; EXTERNAL_HTTP posts a rendered prompt to an endpoint.
        endpoint: URL of the HTTP generator. Required for EXTERNAL_HTTP.
        api_key_env: Name of the environment variable holding a bearer key for the endpoint.
        prompt_template_path: Text file with an {informal} placeholder. A built-in template is used if absent.
        stub_path: JSON mapping file. Required for FILE_STUB.
        timeout: Seconds to wait for one generator response.
        max_retries: Additional attempts after a timeout or a 5xx response.
    """
    model_config = ConfigDict(frozen=True)

    kind: GeneratorKind
    endpoint: Optional[str] = None
    api_key_env: Optional[str] = None
    prompt_template_path: Optional[Path] = None
    stub_path: Optional[Path] = None
    timeout: float = Field(DEFAULT_TIMEOUT_SECONDS, gt=0)
    max_retries: int = Field(2, ge=0)

    @model_validator(mode="after")
    def _check_kind(self) -> "GeneratorConfig":
        if self.kind == GeneratorKind.EXTERNAL_HTTP and not self.endpoint:
            raise ValueError("external_http generator requires an endpoint")
        if self.kind == GeneratorKind.FILE_STUB and self.stub_path is None:
            raise ValueError("file_stub generator requires a stub mapping path")
        return self


def parse_bind_addr(addr: str) -> Tuple[str, int]:
    """Splits "host:port" (or "[v6 host]:port") into its parts."""
    host, sep, port = addr.rpartition(":")
    if not sep or not host or not port.isdigit() or not 0 <= int(port) <= 65535:
        raise ValueError(f"Bind address must be host:port, got {addr!r}")
    return host.strip("[]"), int(port)


class ServiceSettings(BaseModel):
    """Everything the HTTP service needs to start."""
    model_config = ConfigDict(frozen=True)

    index_path: Path
    bind_addr: str = DEFAULT_BIND_ADDR
    generator: Optional[GeneratorConfig] = None
    max_concurrency: int = Field(DEFAULT_MAX_CONCURRENCY, ge=1)
    bearer_token: Optional[str] = None

    @field_validator("bind_addr")
    @classmethod
    def _check_bind_addr(cls, value: str) -> str:
        parse_bind_addr(value)
        return value

    @property
    def host(self) -> str:
        return parse_bind_addr(self.bind_addr)[0]

    @property
    def port(self) -> int:
        return parse_bind_addr(self.bind_addr)[1]

    @staticmethod
    def from_env(environ: Optional[Mapping[str, str]] = None, **overrides) -> "ServiceSettings":
        """Builds settings from DDR_* environment variables. Overrides that are not None take precedence."""
        env = os.environ if environ is None else environ
        timeout = (int(env["DDR_TIMEOUT_MS"]) / 1000.0) if env.get("DDR_TIMEOUT_MS") else DEFAULT_TIMEOUT_SECONDS

        generator = None
        if env.get("DDR_GENERATOR_URL"):
            generator = GeneratorConfig(
                kind=GeneratorKind.EXTERNAL_HTTP,
                endpoint=env["DDR_GENERATOR_URL"],
                api_key_env=env.get("DDR_GENERATOR_API_KEY_ENV") or None,
                timeout=timeout,
            )
        elif env.get("DDR_GENERATOR_STUB"):
            generator = GeneratorConfig(kind=GeneratorKind.FILE_STUB, stub_path=env["DDR_GENERATOR_STUB"],
                                        timeout=timeout)

        values = {
            "index_path": env.get("DDR_INDEX_PATH"),
            "bind_addr": env.get("DDR_BIND_ADDR") or DEFAULT_BIND_ADDR,
            "generator": generator,
            "max_concurrency": int(env.get("DDR_MAX_CONCURRENCY") or DEFAULT_MAX_CONCURRENCY),
            "bearer_token": env.get("DDR_BEARER_TOKEN") or None,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return ServiceSettings(**values)

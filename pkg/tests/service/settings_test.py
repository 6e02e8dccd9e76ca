"""Tests for ddr.service.settings."""
import pytest
from pydantic import ValidationError

from ddr.service.settings import GeneratorConfig, GeneratorKind, ServiceSettings, parse_bind_addr


class TestGeneratorConfig:
    def test_Http(self):
        gen = GeneratorConfig(kind=GeneratorKind.EXTERNAL_HTTP, endpoint="http://gen.local/v1")
        assert gen.timeout == 30.0
        assert gen.max_retries == 2

    def test_HttpNeedsEndpoint(self):
        with pytest.raises(ValidationError):
            GeneratorConfig(kind=GeneratorKind.EXTERNAL_HTTP)

    def test_StubNeedsPath(self):
        with pytest.raises(ValidationError):
            GeneratorConfig(kind="file_stub")

    def test_PositiveTimeout(self):
        with pytest.raises(ValidationError):
            GeneratorConfig(kind="file_stub", stub_path="stub.json", timeout=0)


class TestBindAddr:
    def test_Parse(self):
        assert parse_bind_addr("127.0.0.1:8080") == ("127.0.0.1", 8080)
        assert parse_bind_addr("[::1]:9000") == ("::1", 9000)

    @pytest.mark.parametrize("bad", ["localhost", ":80", "host:port", "host:70000"])
    def test_Invalid(self, bad):
        with pytest.raises(ValueError):
            parse_bind_addr(bad)


class TestServiceSettings:
    def test_FromEnv(self):
        settings = ServiceSettings.from_env({
            "DDR_INDEX_PATH": "/data/mathlib.ddrix",
            "DDR_BIND_ADDR": "0.0.0.0:9090",
            "DDR_GENERATOR_URL": "http://gen.local/v1",
            "DDR_TIMEOUT_MS": "2500",
            "DDR_MAX_CONCURRENCY": "3",
            "DDR_BEARER_TOKEN": "s3cret",
        })
        assert str(settings.index_path) == "/data/mathlib.ddrix"
        assert (settings.host, settings.port) == ("0.0.0.0", 9090)
        assert settings.generator.kind == GeneratorKind.EXTERNAL_HTTP
        assert settings.generator.timeout == 2.5
        assert settings.max_concurrency == 3
        assert settings.bearer_token == "s3cret"

    def test_Defaults(self):
        settings = ServiceSettings.from_env({"DDR_INDEX_PATH": "x.ddrix"})
        assert settings.bind_addr == "127.0.0.1:8080"
        assert settings.generator is None
        assert settings.max_concurrency == 8
        assert settings.bearer_token is None

    def test_Stub(self):
        settings = ServiceSettings.from_env({"DDR_INDEX_PATH": "x.ddrix", "DDR_GENERATOR_STUB": "stub.json"})
        assert settings.generator.kind == GeneratorKind.FILE_STUB

    def test_Overrides(self):
        """Explicit values win over the environment; None leaves the environment value."""
        settings = ServiceSettings.from_env({"DDR_INDEX_PATH": "env.ddrix", "DDR_MAX_CONCURRENCY": "4"},
                                            index_path="flag.ddrix", max_concurrency=None)
        assert str(settings.index_path) == "flag.ddrix"
        assert settings.max_concurrency == 4

    def test_MissingIndex(self):
        with pytest.raises(ValidationError):
            ServiceSettings.from_env({})

    def test_BadBindAddr(self):
        with pytest.raises(ValidationError):
            ServiceSettings.from_env({"DDR_INDEX_PATH": "x", "DDR_BIND_ADDR": "nowhere"})

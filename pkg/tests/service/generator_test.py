"""Tests for ddr.service.generator."""
import json

import httpx
import pytest

from ddr.errors import GeneratorError, GeneratorHttpError, GeneratorTimeout, MissingStubEntryWarning, UnparseableResponse
from ddr.service.generator import generate_candidates, parse_candidates, render_prompt, statement_key
from ddr.service.settings import GeneratorConfig, GeneratorKind

ENDPOINT = "http://generator.test/v1/complete"


def _http(max_retries=2, **kwargs):
    return GeneratorConfig(kind=GeneratorKind.EXTERNAL_HTTP, endpoint=ENDPOINT, max_retries=max_retries,
                           timeout=0.5, **kwargs)


def _client(handler):
    return httpx.Client(transport=httpx.MockTransport(handler))


@pytest.fixture
def stub(tmp_path):
    path = tmp_path / "stub.json"
    path.write_text(json.dumps({
        "s1": ["Nat.sqrt"],
        statement_key("hashed statement"): ["Fin"],
    }), encoding="utf-8")
    return GeneratorConfig(kind=GeneratorKind.FILE_STUB, stub_path=path)


class TestStub:
    def test_Lookup(self, stub):
        assert generate_candidates(stub, "s1") == ["Nat.sqrt"]

    def test_HashKey(self, stub):
        assert generate_candidates(stub, "hashed statement") == ["Fin"]

    def test_Missing(self, stub):
        with pytest.warns(MissingStubEntryWarning):
            assert generate_candidates(stub, "unknown") == []

    def test_BadFile(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"s1": "Nat.sqrt"}', encoding="utf-8")
        with pytest.raises(ValueError):
            generate_candidates(GeneratorConfig(kind="file_stub", stub_path=path), "s1")


class TestParseCandidates:
    def test_JsonArray(self):
        assert parse_candidates('["Nat.sqrt", " `Fin` ", ""]') == ["Nat.sqrt", "Fin"]

    def test_Lines(self):
        assert parse_candidates("Nat.factorization\nNat.factorial\n\n") == ["Nat.factorization", "Nat.factorial"]

    def test_Commas(self):
        assert parse_candidates("Nat.sqrt, Real.sqrt") == ["Nat.sqrt", "Real.sqrt"]

    def test_Fenced(self):
        assert parse_candidates("```\nNat.sqrt\nFin\n```") == ["Nat.sqrt", "Fin"]

    def test_BadArray(self):
        with pytest.raises(UnparseableResponse):
            parse_candidates('["Nat.sqrt", 3]')
        with pytest.raises(UnparseableResponse):
            parse_candidates('["Nat.sqrt"')


class TestExternal:
    def test_Answer(self):
        seen = {}

        def handler(request):
            seen["body"] = json.loads(request.content)
            return httpx.Response(200, json={"candidates": ["Nat.factorization", "Nat.factorial"]})

        with _client(handler) as client:
            assert generate_candidates(_http(), "n! factors", client) == ["Nat.factorization", "Nat.factorial"]
        assert "n! factors" in seen["body"]["prompt"]

    def test_PlainText(self):
        with _client(lambda request: httpx.Response(200, text="Nat.sqrt\nFin")) as client:
            assert generate_candidates(_http(), "s", client) == ["Nat.sqrt", "Fin"]

    def test_ApiKey(self, monkeypatch):
        monkeypatch.setenv("DDR_TEST_KEY", "k123")
        seen = {}

        def handler(request):
            seen["auth"] = request.headers.get("authorization")
            return httpx.Response(200, json=[])

        with _client(handler) as client:
            assert generate_candidates(_http(api_key_env="DDR_TEST_KEY"), "s", client) == []
        assert seen["auth"] == "Bearer k123"

    def test_Timeout(self):
        """Every attempt timing out ends in GeneratorTimeout after max_retries retries."""
        calls = []

        def handler(request):
            calls.append(request)
            raise httpx.ReadTimeout("slow", request=request)

        with _client(handler) as client:
            with pytest.raises(GeneratorTimeout):
                generate_candidates(_http(max_retries=2), "s", client)
        assert len(calls) == 3

    def test_RetryServerError(self):
        responses = iter([httpx.Response(503), httpx.Response(200, json=["Fin"])])
        with _client(lambda request: next(responses)) as client:
            assert generate_candidates(_http(), "s", client) == ["Fin"]

    def test_ClientError(self):
        with _client(lambda request: httpx.Response(404, text="no such model")) as client:
            with pytest.raises(GeneratorHttpError) as e:
                generate_candidates(_http(), "s", client)
        assert e.value.status == 404

    def test_Unreachable(self):
        def handler(request):
            raise httpx.ConnectError("refused", request=request)

        with _client(handler) as client:
            with pytest.raises(GeneratorError):
                generate_candidates(_http(max_retries=0), "s", client)

    def test_PromptTemplate(self, tmp_path):
        path = tmp_path / "prompt.txt"
        path.write_text("Deps for: {informal}", encoding="utf-8")
        assert render_prompt(_http(prompt_template_path=path), "x > 0") == "Deps for: x > 0"

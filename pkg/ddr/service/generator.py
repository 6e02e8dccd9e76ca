"""Client side of the candidate generator contract.

The generator proposes dependency names for an informal statement; it is always external to this package. Two
kinds are supported: a JSON stub file mapping statements to fixed candidate lists (for tests and offline runs), and
an HTTP endpoint that receives a rendered prompt and answers with identifiers.
"""
import functools
import hashlib
import json
import os
import time
import warnings
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import httpx
import structlog

from ddr.errors import GeneratorError, GeneratorHttpError, GeneratorTimeout, MissingStubEntryWarning, UnparseableResponse
from ddr.service.settings import GeneratorConfig, GeneratorKind

logger = structlog.get_logger(__name__)

DEFAULT_PROMPT_TEMPLATE = (
    "List the Lean 4 Mathlib definitions and theorems needed to formalize the following statement.\n"
    "Answer with fully-qualified names only, one per line.\n\n"
    "{informal}\n"
)


@functools.lru_cache(maxsize=8)
def _read_stub(path: str, mtime: float) -> Dict[str, List[str]]:
    with open(path, encoding="utf-8") as f:
        mapping = json.load(f)
    if not isinstance(mapping, dict) or not all(
            isinstance(v, list) and all(isinstance(c, str) for c in v) for v in mapping.values()):
        raise ValueError(f"Stub file {path} must map keys to lists of strings")
    return mapping


def load_stub(path: Path) -> Dict[str, List[str]]:
    """Reads a stub mapping file, re-reading it only when it changes."""
    return _read_stub(str(path), os.path.getmtime(path))


def statement_key(informal: str) -> str:
    """The hash key under which a stub may list a statement: hex SHA-256 of its UTF-8 bytes."""
    return hashlib.sha256(informal.encode("utf-8")).hexdigest()


def render_prompt(gen: GeneratorConfig, informal: str) -> str:
    template = DEFAULT_PROMPT_TEMPLATE
    if gen.prompt_template_path is not None:
        template = Path(gen.prompt_template_path).read_text(encoding="utf-8")
    return template.replace("{informal}", informal)


def _clean(candidate: str) -> str:
    return candidate.strip().strip("`").strip()


def parse_candidates(text: str) -> List[str]:
    """Parses a generator answer into identifiers.

    Accepts a JSON array of strings, newline-separated names, or comma-separated names. Backticks and surrounding
    whitespace are stripped and empty entries dropped.

    Raises:
        UnparseableResponse if the answer looks like JSON but is not an array of strings.
    """
    text = text.strip()
    if text.startswith("```"):
        text = "\n".join(line for line in text.splitlines() if not line.strip().startswith("```"))
    if text.startswith("["):
        try:
            items = json.loads(text)
        except json.JSONDecodeError as e:
            raise UnparseableResponse(f"Malformed JSON array in generator response: {e.msg}") from None
        if not isinstance(items, list) or not all(isinstance(item, str) for item in items):
            raise UnparseableResponse("Generator response array must contain only strings")
    elif "\n" in text:
        items = text.splitlines()
    else:
        items = text.split(",")
    return [c for c in (_clean(item) for item in items) if c]


def _response_text(response: httpx.Response) -> str:
    """Extracts the answer from a response body: raw text, a JSON string or array, or an object with a known field."""
    try:
        doc = response.json()
    except (json.JSONDecodeError, UnicodeDecodeError):
        return response.text
    if isinstance(doc, str):
        return doc
    if isinstance(doc, list):
        return json.dumps(doc)
    if isinstance(doc, dict):
        for key in ("candidates", "dependencies", "text", "output", "content"):
            if key in doc:
                value = doc[key]
                return value if isinstance(value, str) else json.dumps(value)
    raise UnparseableResponse(f"Unrecognized generator response: {response.text[:200]!r}")


def _post(gen: GeneratorConfig, client: httpx.Client, prompt: str) -> Tuple[httpx.Response, int]:
    headers = {}
    if gen.api_key_env and os.environ.get(gen.api_key_env):
        headers["Authorization"] = f"Bearer {os.environ[gen.api_key_env]}"

    attempts = gen.max_retries + 1
    for attempt in range(1, attempts + 1):
        try:
            response = client.post(gen.endpoint, json={"prompt": prompt}, headers=headers, timeout=gen.timeout)
        except httpx.TimeoutException:
            logger.warning("generator timeout", endpoint=gen.endpoint, attempt=attempt, attempts=attempts)
            if attempt == attempts:
                raise GeneratorTimeout(f"Generator did not answer within {gen.timeout}s after {attempts} attempts")
            continue
        except httpx.TransportError as e:
            logger.warning("generator unreachable", endpoint=gen.endpoint, attempt=attempt, error=str(e))
            if attempt == attempts:
                raise GeneratorError(f"Generator unreachable: {e}") from e
            continue
        if response.status_code >= 500 and attempt < attempts:
            logger.warning("generator error", endpoint=gen.endpoint, status=response.status_code, attempt=attempt)
            continue
        if response.status_code >= 400:
            raise GeneratorHttpError(response.status_code, response.text[:200] or None)
        return response, attempt
    raise AssertionError("unreachable")


def generate_candidates(gen: GeneratorConfig, informal: str, client: Optional[httpx.Client] = None) -> List[str]:
    """Asks the configured generator for candidate dependencies of an informal statement.

    Args:
        gen: Generator configuration.
        informal: The informal statement. For a stub, also the lookup key (or its SHA-256).
        client: HTTP client to use for external generators; a fresh one is created per call if omitted.

    Returns:
        Candidate names, in generator order.

    Raises:
        GeneratorTimeout, GeneratorHttpError, UnparseableResponse, or GeneratorError for transport failures.
    """
    if gen.kind == GeneratorKind.FILE_STUB:
        mapping = load_stub(gen.stub_path)
        for key in (informal, statement_key(informal)):
            if key in mapping:
                return list(mapping[key])
        warnings.warn(f"Stub has no entry for statement {informal[:60]!r}", MissingStubEntryWarning)
        return []

    start = time.perf_counter()
    if client is None:
        with httpx.Client() as own_client:
            response, attempts = _post(gen, own_client, render_prompt(gen, informal))
    else:
        response, attempts = _post(gen, client, render_prompt(gen, informal))
    candidates = parse_candidates(_response_text(response))
    logger.debug("generator answered", candidates=len(candidates), attempts=attempts,
                 seconds=round(time.perf_counter() - start, 3))
    return candidates

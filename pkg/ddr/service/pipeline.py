"""Generation plus verification: candidates from the generator, filtered through the library index."""
import time
from dataclasses import dataclass
from typing import Iterable, List, Optional, Tuple

import httpx

from ddr.calc.dependency_index import DependencyIndex
from ddr.knowledge.codecs import AS_IS, CODECS, STRINGS, ListCodec, ObjectCodec, PairCodec
from ddr.model import LibraryItem
from ddr.service.generator import generate_candidates
from ddr.service.settings import GeneratorConfig

INVALID = "invalid"


@dataclass(frozen=True)
class VerifiedDependencies:
    """Generator output after verification.

    Attributes:
        informal: The statement dependencies were requested for.
        dependencies: Library fqns the candidates resolved to, in first-resolution order.
        dropped: (candidate, status) for each candidate that resolved to nothing; status is "none", "partial" or
            "invalid".
        generator_latency: Seconds spent waiting for the generator.
        verify_latency: Seconds spent verifying.
    """
    informal: str
    dependencies: Tuple[str, ...]
    dropped: Tuple[Tuple[str, str], ...] = ()
    generator_latency: float = 0.0
    verify_latency: float = 0.0


CODECS[VerifiedDependencies] = ObjectCodec(
    VerifiedDependencies,
    codec_map={
        'informal': AS_IS,
        'dependencies': STRINGS,
        'dropped': ListCodec(item_codec=PairCodec('candidate', 'status')),
        'generator_latency': AS_IS,
        'verify_latency': AS_IS,
    })

# Downstream records carry the resolved name only; every other metadata field is explicitly null.
PROMPT_CODEC = ObjectCodec(LibraryItem, codec_map=CODECS[LibraryItem].codec_map, rename={'fqn': 'name'},
                           keep_none=True)


def normalize_candidates(candidates: Iterable[str]) -> List[str]:
    """Strips whitespace and backticks, drops empty entries and repeats, keeping generator order."""
    cleaned = (c.strip().strip("`").strip() for c in candidates if isinstance(c, str))
    return list(dict.fromkeys(c for c in cleaned if c))


def verify_candidates(index: DependencyIndex,
                      informal: str,
                      candidates: Iterable[str],
                      generator_latency: float = 0.0) -> VerifiedDependencies:
    """Verifies candidates in one batch and keeps only what resolves to library items."""
    start = time.perf_counter()
    candidates = normalize_candidates(candidates)
    dependencies = {}
    dropped = []
    for result in index.verify_batch(candidates):
        if result.resolves:
            dependencies.update(dict.fromkeys(result.resolved))
        else:
            dropped.append((result.query, INVALID if result.error else result.status.value))
    return VerifiedDependencies(
        informal=informal,
        dependencies=tuple(dependencies),
        dropped=tuple(dropped),
        generator_latency=generator_latency,
        verify_latency=time.perf_counter() - start,
    )


def retrieve_dependencies(index: DependencyIndex,
                          gen: GeneratorConfig,
                          informal: str,
                          client: Optional[httpx.Client] = None) -> VerifiedDependencies:
    """Generates candidate dependencies for a statement and filters out everything the library does not contain.

    Raises:
        GeneratorError (or a subclass) if the generator fails.
    """
    start = time.perf_counter()
    candidates = generate_candidates(gen, informal, client)
    return verify_candidates(index, informal, candidates, generator_latency=time.perf_counter() - start)


def prompt_payload(verified: VerifiedDependencies) -> List[dict]:
    """Dependency records for an autoformalizer prompt: {name, kind: null, signature: null, doc: null} each."""
    return [PROMPT_CODEC.encode(LibraryItem(fqn)) for fqn in verified.dependencies]

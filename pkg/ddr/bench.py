"""Benchmark of index construction and batch verification, against the linear-scan matcher.

Symbols follow the usual complexity analysis of suffix-array verification: N library items of mean byte length d,
M pending queries of mean byte length s. Construction is linear in the text (about N * d bytes), and verifying a
batch costs O(s * M * log(N * d)), where the linear scan costs O((s + d) * M * N).
"""
import time
from dataclasses import dataclass
from typing import List, Optional, Sequence, Union

import numpy as np
import structlog

from ddr.calc.dependency_index import NaiveMatcher, build_index
from ddr.calc.suffix_array import DEFAULT_BUILDER
from ddr.knowledge.codecs import AS_IS, CODECS, ObjectCodec
from ddr.model import SEP, LibraryItem

logger = structlog.get_logger(__name__)

# Query mix: existing fqns, component suffixes of existing fqns, random garbage.
MIX = (0.4, 0.3, 0.3)
BRUTE_FORCE_SAMPLE = 1000
_GARBAGE_ALPHABET = np.array(list("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_.'"))


@dataclass(frozen=True)
class BenchmarkReport:
    """Sizes and measured rates of one benchmark run.

    Attributes:
        item_count: N, library items indexed.
        query_count: M, queries verified.
        mean_identifier_bytes: d.
        mean_query_bytes: s.
        build_seconds: Index construction wall time.
        queries_per_second: Suffix-array verification rate over all M queries.
        brute_force_queries_per_second: Linear-scan rate over a sample of the queries (comparison mode only).
        speedup: queries_per_second / brute_force_queries_per_second (comparison mode only).
        builder: Suffix array builder used.
    """
    item_count: int
    query_count: int
    mean_identifier_bytes: float
    mean_query_bytes: float
    build_seconds: float
    queries_per_second: float
    brute_force_queries_per_second: Optional[float] = None
    speedup: Optional[float] = None
    builder: str = DEFAULT_BUILDER


CODECS[BenchmarkReport] = ObjectCodec(
    BenchmarkReport,
    codec_map={
        'item_count': AS_IS,
        'query_count': AS_IS,
        'mean_identifier_bytes': AS_IS,
        'mean_query_bytes': AS_IS,
        'build_seconds': AS_IS,
        'queries_per_second': AS_IS,
        'brute_force_queries_per_second': AS_IS,
        'speedup': AS_IS,
        'builder': AS_IS,
    },
    rename={'item_count': 'N', 'query_count': 'M', 'mean_identifier_bytes': 'd', 'mean_query_bytes': 's'})


def bench_queries(names: Sequence[str], m: int, seed: int) -> List[str]:
    """Generates m seeded queries in the benchmark mix. The same names and seed always give the same queries."""
    rng = np.random.default_rng(seed)
    kinds = rng.choice(len(MIX), size=m, p=MIX)
    queries = []
    for kind in kinds:
        if kind == 2:
            length = int(rng.integers(3, 13))
            garbage = "".join(_GARBAGE_ALPHABET[rng.integers(0, len(_GARBAGE_ALPHABET), size=length)])
            queries.append(garbage.strip(".") or "x")
            continue
        name = names[int(rng.integers(0, len(names)))]
        if kind == 0:
            queries.append(name)
        else:
            parts = name.split(SEP)
            queries.append(SEP.join(parts[int(rng.integers(0, len(parts))):]))
    return queries


def bench(library: Sequence[Union[LibraryItem, str]],
          m: int,
          seed: int = 0,
          builder: str = DEFAULT_BUILDER,
          compare: bool = True,
          brute_force_sample: int = BRUTE_FORCE_SAMPLE) -> BenchmarkReport:
    """Builds an index over library and times verification of m seeded queries.

    Args:
        library: Library items or fqns.
        m: Number of queries, at least 1.
        seed: Query generation seed.
        builder: Suffix array builder.
        compare: Also time the linear-scan matcher, on the first brute_force_sample queries.
        brute_force_sample: Cap on queries given to the linear scan.
    """
    if m < 1:
        raise ValueError(f"Query count must be >= 1, got {m}")
    start = time.perf_counter()
    index = build_index(library, builder=builder)
    build_seconds = time.perf_counter() - start

    names = index.names
    queries = bench_queries(names, m, seed)
    start = time.perf_counter()
    index.verify_batch(queries)
    qps = m / max(time.perf_counter() - start, 1e-9)

    brute_qps = speedup = None
    if compare:
        sample = queries[:brute_force_sample]
        matcher = NaiveMatcher(names)
        start = time.perf_counter()
        matcher.verify_batch(sample)
        brute_qps = len(sample) / max(time.perf_counter() - start, 1e-9)
        speedup = qps / brute_qps

    report = BenchmarkReport(
        item_count=len(names),
        query_count=m,
        mean_identifier_bytes=float(np.mean([len(n.encode("utf-8")) for n in names])),
        mean_query_bytes=float(np.mean([len(q.encode("utf-8")) for q in queries])),
        build_seconds=build_seconds,
        queries_per_second=qps,
        brute_force_queries_per_second=brute_qps,
        speedup=speedup,
        builder=builder,
    )
    logger.info("benchmark done", N=report.item_count, M=report.query_count, build_seconds=round(build_seconds, 3),
                queries_per_second=round(qps, 1), speedup=None if speedup is None else round(speedup, 1))
    return report

"""Labels an informal/formal statement corpus with verified library dependencies.

Every sample's formal statement is run through candidate extraction and verified against the library index; the
surviving fqns become the sample's dependency label. Samples are independent, so labeling parallelizes across worker
processes, each holding its own copy of the (read-only) index. Output order always equals input order.
"""
import multiprocessing
import time
from dataclasses import dataclass
from typing import FrozenSet, Iterable, Iterator, List, Optional, TextIO

import structlog
from tqdm import tqdm

from ddr.calc.dependency_index import DependencyIndex
from ddr.calc.extraction import extract_dependencies, load_keywords
from ddr.errors import MalformedLine
from ddr.knowledge.codecs import AS_IS, CODECS, LABELED_WITH_FORMAL, ObjectCodec, iter_lines, parse_line, write_jsonl
from ddr.model import CorpusSample, LabeledSample

logger = structlog.get_logger(__name__)

MAX_DIFFICULTY = 10
MAX_LEVEL = 9
REQUIRED_FIELDS = ("id", "informal_statement", "formal_statement", "difficulty")


def _check_sample(line_no: int, doc: dict) -> CorpusSample:
    missing = [key for key in REQUIRED_FIELDS if key not in doc]
    if missing:
        raise MalformedLine(line_no, f"missing {', '.join(missing)}")
    sample_id = doc["id"]
    if isinstance(sample_id, bool) or not isinstance(sample_id, (str, int)):
        raise MalformedLine(line_no, "id must be a string or integer")
    for key in ("informal_statement", "formal_statement"):
        if not isinstance(doc[key], str) or not doc[key].strip():
            raise MalformedLine(line_no, f"{key} must be a nonempty string")
    difficulty = doc["difficulty"]
    if isinstance(difficulty, float) and difficulty.is_integer():
        difficulty = int(difficulty)
    if isinstance(difficulty, bool) or not isinstance(difficulty, int) or not 0 <= difficulty <= MAX_DIFFICULTY:
        raise MalformedLine(line_no, f"difficulty must be an integer in 0..{MAX_DIFFICULTY}, got {doc['difficulty']!r}")
    return CorpusSample(
        id=str(sample_id),
        informal_statement=doc["informal_statement"],
        formal_statement=doc["formal_statement"],
        difficulty=difficulty,
    )


def ingest_corpus(source: Iterable[str],
                  strict: bool = False,
                  errors: Optional[List[MalformedLine]] = None) -> Iterator[CorpusSample]:
    """Reads corpus samples from JSON Lines, in file order.

    Args:
        source: Lines of a corpus file with keys id, informal_statement, formal_statement, difficulty.
        strict: Raise on the first malformed line instead of skipping it.
        errors: If given, every skipped line's MalformedLine is appended here.

    Raises:
        MalformedLine, only in strict mode.
    """
    for line_no, line in iter_lines(source):
        try:
            yield _check_sample(line_no, parse_line(line_no, line))
        except MalformedLine as e:
            if strict:
                raise
            logger.warning("skipping malformed corpus line", line=e.line_no, reason=e.reason)
            if errors is not None:
                errors.append(e)


def normalize_difficulty(difficulty: int) -> int:
    """Folds the top rating into the level below it: 0..10 -> 0..9."""
    return min(difficulty, MAX_LEVEL)


def label_sample(index: DependencyIndex, sample: CorpusSample,
                 keywords: Optional[FrozenSet[str]] = None) -> LabeledSample:
    """Labels one sample with the verified dependencies of its formal statement."""
    dependencies = extract_dependencies(index, sample.formal_statement, keywords).dependencies
    return LabeledSample(
        id=sample.id,
        informal_statement=sample.informal_statement,
        formal_statement=sample.formal_statement,
        difficulty=normalize_difficulty(sample.difficulty),
        dependencies=dependencies,
    )


@dataclass(frozen=True)
class RunReport:
    """Counts and throughput of one dataset build."""
    processed: int
    errored: int
    wall_seconds: float
    samples_per_second: float


CODECS[RunReport] = ObjectCodec(
    RunReport,
    codec_map={
        "processed": AS_IS,
        "errored": AS_IS,
        "wall_seconds": AS_IS,
        "samples_per_second": AS_IS,
    })


# Per-process labeling state, installed once per worker by _init_worker.
_worker_index: Optional[DependencyIndex] = None
_worker_keywords: Optional[FrozenSet[str]] = None


def _init_worker(index: DependencyIndex, keywords: FrozenSet[str]):
    global _worker_index, _worker_keywords
    _worker_index = index
    _worker_keywords = keywords


def _label_in_worker(sample: CorpusSample) -> LabeledSample:
    return label_sample(_worker_index, sample, _worker_keywords)


def label_corpus(index: DependencyIndex,
                 samples: Iterable[CorpusSample],
                 jobs: int = 1,
                 keywords: Optional[FrozenSet[str]] = None,
                 chunksize: int = 64) -> Iterator[LabeledSample]:
    """Labels samples lazily, in input order, optionally across `jobs` worker processes."""
    keywords = load_keywords() if keywords is None else frozenset(keywords)
    if jobs <= 1:
        for sample in samples:
            yield label_sample(index, sample, keywords)
        return
    with multiprocessing.Pool(jobs, initializer=_init_worker, initargs=(index, keywords)) as pool:
        yield from pool.imap(_label_in_worker, samples, chunksize)


def build_dataset(index: DependencyIndex,
                  corpus: Iterable[str],
                  sink: TextIO,
                  jobs: int = 1,
                  keep_formal: bool = False,
                  strict: bool = False,
                  keywords: Optional[FrozenSet[str]] = None,
                  errors: Optional[List[MalformedLine]] = None,
                  progress: bool = False) -> RunReport:
    """Labels a corpus and writes one JSON line per valid input line, in input order.

    Args:
        index: The library index.
        corpus: Lines of the corpus file.
        sink: Text stream receiving the labeled JSON Lines.
        jobs: Worker processes for labeling.
        keep_formal: Retain formal_statement in the output rows.
        strict: Abort on the first malformed line.
        keywords: Keyword blacklist; defaults to the packaged Lean 4 list.
        errors: If given, receives every malformed line skipped.
        progress: Show a line counter on stderr.

    Returns:
        RunReport of samples written, lines rejected, and timing.
    """
    errors = [] if errors is None else errors
    codec = LABELED_WITH_FORMAL if keep_formal else CODECS[LabeledSample]
    start = time.perf_counter()

    samples = ingest_corpus(corpus, strict=strict, errors=errors)
    labeled = label_corpus(index, samples, jobs=jobs, keywords=keywords)
    processed = 0
    for sample in tqdm(labeled, desc="labeling", unit="sample", disable=not progress):
        write_jsonl([codec.encode(sample)], sink)
        processed += 1

    wall = time.perf_counter() - start
    report = RunReport(
        processed=processed,
        errored=len(errors),
        wall_seconds=wall,
        samples_per_second=processed / wall if wall > 0 else 0.0,
    )
    logger.info("dataset built", processed=report.processed, errored=report.errored,
                seconds=round(wall, 3), samples_per_second=round(report.samples_per_second, 1))
    return report


def read_labeled(source: Iterable[str]) -> Iterator[LabeledSample]:
    """Reads a labeled dataset written by build_dataset (with or without formal statements)."""
    codec = CODECS[LabeledSample]
    for line_no, line in iter_lines(source):
        doc = parse_line(line_no, line)
        try:
            sample = codec.decode(doc) if "formal_statement" not in doc else LABELED_WITH_FORMAL.decode(doc)
        except TypeError as e:
            raise MalformedLine(line_no, str(e)) from None
        if not isinstance(sample.difficulty, int) or not 0 <= sample.difficulty <= MAX_LEVEL:
            raise MalformedLine(line_no, f"difficulty must be an integer in 0..{MAX_LEVEL}")
        yield sample

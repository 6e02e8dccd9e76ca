"""Core value types passed between the index, the extractor, the dataset pipeline and the evaluation harness."""
import enum
import math
from dataclasses import dataclass
from datetime import datetime
from typing import Iterator, Optional, Tuple


class MatchStatus(enum.Enum):
    """Verdict for one pending item checked against the library."""
    EXACT = "exact"
    PARTIAL = "partial"
    NONE = "none"


@dataclass(frozen=True)
class MatchResult:
    """Verdict for one candidate dependency.

    Attributes:
        query: The candidate as given.
        status: EXACT if the query is a library fqn; PARTIAL if it only occurs at component boundaries; else NONE.
        resolved: Library fqns the query denotes as a usable dependency, sorted.
        partial_hits: Component-aligned hits that do not resolve (qualified prefixes, interior runs), sorted.
        error: Set only when the query itself was invalid; the result is then a NONE placeholder.
    """
    query: str
    status: MatchStatus
    resolved: Tuple[str, ...] = ()
    partial_hits: Tuple[str, ...] = ()
    error: Optional[str] = None

    @property
    def resolves(self) -> bool:
        return bool(self.resolved)


@dataclass(frozen=True)
class IndexInfo:
    """Summary of a DependencyIndex, as reported by the service."""
    item_count: int
    text_bytes: int
    built_at: datetime
    format_version: int


@dataclass(frozen=True)
class CandidateSet:
    """Identifier-like tokens extracted from formal code, deduplicated in first-occurrence order."""
    source: str
    candidates: Tuple[str, ...]


@dataclass(frozen=True)
class DependencyList:
    """Verified library dependencies, plus the candidates that failed verification and why."""
    dependencies: Tuple[str, ...]
    dropped: Tuple[Tuple[str, str], ...] = ()


@dataclass(frozen=True)
class CorpusSample:
    """One informal/formal statement pair from an autoformalization corpus.

    Attributes:
        id: Sample identifier, unique within the corpus.
        informal_statement: Natural-language statement.
        formal_statement: Lean statement, conventionally ending in ":= by sorry".
        difficulty: Corpus difficulty rating, 0..10.
    """
    id: str
    informal_statement: str
    formal_statement: str
    difficulty: int


@dataclass(frozen=True)
class LabeledSample(CorpusSample):
    """A corpus sample labeled with its verified library dependencies; difficulty folded into 0..9."""
    dependencies: Tuple[str, ...] = ()

    @property
    def dependent(self) -> bool:
        return bool(self.dependencies)


@dataclass(frozen=True)
class LevelStats:
    """Dependency statistics for one normalized difficulty level.

    Attributes:
        level: Normalized difficulty, 0..9.
        num: Number of samples.
        depend_rate: Fraction of samples with at least one dependency.
        depend_length: Mean number of dependencies over all samples of the level.
        empty: True when num == 0; rate and length are then reported as 0.
    """
    level: int
    num: int
    depend_rate: float
    depend_length: float
    empty: bool = False


@dataclass(frozen=True)
class DatasetStats:
    """Per-level statistics for a labeled dataset, ordered by level."""
    levels: Tuple[LevelStats, ...]

    def __getitem__(self, level: int) -> LevelStats:
        return self.levels[level]

    def __iter__(self) -> Iterator[LevelStats]:
        return iter(self.levels)


@dataclass(frozen=True)
class RetrievalScore:
    """Precision, recall and F1 for one sample, or one metric row of an aggregate."""
    precision: float
    recall: float
    f1: float

    @staticmethod
    def from_pr(precision: float, recall: float) -> "RetrievalScore":
        """Completes a score with the harmonic mean of precision and recall (0 when both are 0)."""
        total = precision + recall
        f1 = 0.0 if total == 0 else 2 * precision * recall / total
        return RetrievalScore(precision, recall, f1)

    def as_tuple(self) -> Tuple[float, float, float]:
        return self.precision, self.recall, self.f1

    def isclose(self, other: "RetrievalScore", abs_tol: float = 1e-12) -> bool:
        return all(math.isclose(a, b, rel_tol=0, abs_tol=abs_tol) for a, b in zip(self.as_tuple(), other.as_tuple()))


@dataclass(frozen=True)
class AggregateScore:
    """Macro-averaged scores over a test set, with population standard deviation per metric."""
    mean: RetrievalScore
    std: RetrievalScore
    n: int


@dataclass(frozen=True)
class Prediction:
    """Dependencies predicted for one sample by a generator or a baseline retriever."""
    id: str
    dependencies: Tuple[str, ...] = ()

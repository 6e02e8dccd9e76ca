"""Suffix-array index over every identifier of a formal library, and verification of candidate dependencies.

All identifiers are concatenated into a single text, each one surrounded by the delimiter byte 0x01:

    \\x01Nat.sqrt\\x01Real.sqrt\\x01

Because the delimiter never occurs inside an identifier, every question about how a query lines up with library
names becomes a plain substring question with the delimiter or a dot on either side:

    \\x01 q \\x01   q is a library name (exact)
      .  q \\x01   q is a trailing run of components of some name (component suffix; resolves)
    \\x01 q  .     q is a leading run of components (qualified prefix; reported, does not resolve)
      .  q  .     q is an interior run of components (reported, does not resolve)

Each pattern is answered with two binary searches over the suffix array, so a lookup costs O(|q| log |text|)
regardless of library size, plus the size of its output. Substring occurrences that do not sit on component
boundaries (e.g. "qrt" inside "sqrt") never match.

A DependencyIndex is immutable once built, and safe to share between any number of reader threads.
"""
import bisect
import time
import warnings
from array import array
from datetime import datetime, timezone
from typing import Iterable, List, Optional, Sequence, Set, Tuple, Union

import numpy as np
import structlog

from ddr.calc.suffix_array import DEFAULT_BUILDER, suffix_array
from ddr.errors import DelimiterPosition, DuplicateIdentifierWarning, EmptyLibrary, InvalidQuery
from ddr.model import DELIM, SEP, Index, IndexInfo, LibraryItem, MatchResult, MatchStatus, check_identifier

logger = structlog.get_logger(__name__)

FORMAT_VERSION = 1

_DOT = SEP.encode()
_DELIM_BYTE = DELIM[0]


class DependencyIndex:
    """Delimiter-concatenated identifier text, its suffix array, and the offset of each item within the text.

    Attributes:
        text: DELIM + DELIM.join(fqns) + DELIM, as UTF-8 bytes, items in ingestion order.
        suffix_array: int64 positions into text, sorted by suffix.
        item_offsets: int64 start position of each item's fqn within text, strictly increasing.
        items: The library items, deduplicated, in ingestion order. The position of an item is its item id.
        built_at: When the index was built (or, for a loaded index, when its source was written).
    """

    def __init__(self,
                 text: bytes,
                 suffix_array: np.ndarray,
                 item_offsets: np.ndarray,
                 items: Sequence[LibraryItem],
                 built_at: Optional[datetime] = None):
        self.text = bytes(text)
        self.suffix_array = np.asarray(suffix_array, dtype=np.int64)
        self.item_offsets = np.asarray(item_offsets, dtype=np.int64)
        self.items: Tuple[LibraryItem, ...] = tuple(items)
        self.built_at = built_at or datetime.now(timezone.utc)
        self.suffix_array.flags.writeable = False
        self.item_offsets.flags.writeable = False

        # Binary search touches one position per step; array('q') hands those back as plain ints without
        # materializing the whole array as Python objects.
        self._positions = array("q")
        self._positions.frombytes(np.ascontiguousarray(self.suffix_array).tobytes())
        self._offsets: List[int] = self.item_offsets.tolist()
        self._names: List[str] = [item.fqn for item in self.items]
        self._ids = {name: i for i, name in enumerate(self._names)}

    @staticmethod
    def from_text(text: bytes, builder: str = DEFAULT_BUILDER) -> "DependencyIndex":
        """Indexes arbitrary bytes with no items. Supports prefix_range() only; used to test the search itself."""
        return DependencyIndex(text, suffix_array(text, builder), np.empty(0, dtype=np.int64), ())

    def __len__(self) -> int:
        return len(self.items)

    def __contains__(self, fqn: str) -> bool:
        return fqn in self._ids

    @property
    def names(self) -> List[str]:
        return list(self._names)

    def info(self) -> IndexInfo:
        return IndexInfo(
            item_count=len(self.items),
            text_bytes=len(self.text),
            built_at=self.built_at,
            format_version=FORMAT_VERSION,
        )

    def prefix_range(self, pattern: bytes) -> range:
        """Finds the block of the suffix array whose suffixes all begin with pattern.

        Returns:
            A half-open range [lo, hi) of suffix array slots; empty if the pattern does not occur. The empty pattern
            matches every suffix.
        """
        text = self.text
        width = len(pattern)

        def key(pos: int) -> bytes:
            return text[pos:pos + width]

        lo = bisect.bisect_left(self._positions, pattern, key=key)
        hi = bisect.bisect_right(self._positions, pattern, lo=lo, key=key)
        return range(lo, hi)

    def positions(self, pattern: bytes) -> List[int]:
        """Text positions of every occurrence of pattern, in suffix order."""
        found = self.prefix_range(pattern)
        return self._positions[found.start:found.stop].tolist()

    def item_of_position(self, pos: int) -> int:
        """Maps a text position back to the id of the item whose fqn covers it.

        Raises:
            IndexError if pos is outside the text.
            DelimiterPosition if pos points at a delimiter byte, which belongs to no item.
        """
        if not 0 <= pos < len(self.text):
            raise IndexError(f"Position {pos} outside text of {len(self.text)} bytes")
        if self.text[pos] == _DELIM_BYTE:
            raise DelimiterPosition(f"Position {pos} is a delimiter")
        if not self._offsets:
            raise ValueError("Index has no items (raw-text index)")
        return bisect.bisect_right(self._offsets, pos) - 1

    def lookup(self, query: str) -> MatchResult:
        """Verifies one candidate dependency against the library.

        Args:
            query: A candidate name, qualified or not.

        Returns:
            EXACT with resolved == [query] if the query is a library fqn; any other aligned hits are then reported as
            partial_hits. Otherwise PARTIAL if the query occurs aligned to component boundaries anywhere, with
            component-suffix hits resolving and prefix/interior hits reported. Otherwise NONE.

        Raises:
            InvalidQuery if the query is empty, not text, or contains the delimiter byte.
        """
        q = _encode_query(query)

        exact = self.prefix_range(DELIM + q + DELIM)
        suffix_ids = {self.item_of_position(pos) for pos in self.positions(_DOT + q + DELIM)}
        prefix_ids = {self.item_of_position(pos + 1) for pos in self.positions(DELIM + q + _DOT)}
        interior_ids = {self.item_of_position(pos) for pos in self.positions(_DOT + q + _DOT)}

        if exact:
            # DELIM-bounded text is unique per item, so there is exactly one hit.
            exact_id = self.item_of_position(self._positions[exact.start] + 1)
            others = (suffix_ids | prefix_ids | interior_ids) - {exact_id}
            return MatchResult(
                query=query,
                status=MatchStatus.EXACT,
                resolved=(self._names[exact_id],),
                partial_hits=self._sorted_names(others),
            )

        partial_ids = (prefix_ids | interior_ids) - suffix_ids
        if not suffix_ids and not partial_ids:
            return MatchResult(query=query, status=MatchStatus.NONE)
        return MatchResult(
            query=query,
            status=MatchStatus.PARTIAL,
            resolved=self._sorted_names(suffix_ids),
            partial_hits=self._sorted_names(partial_ids),
        )

    def verify_batch(self, queries: Iterable[str]) -> List[MatchResult]:
        """Looks up every query, positionally aligned with the input.

        An invalid query does not abort the batch; its slot holds a NONE result with `error` set.
        """
        return [_guarded_lookup(self, query) for query in queries]

    def _sorted_names(self, ids: Set[int]) -> Tuple[str, ...]:
        return tuple(sorted(self._names[i] for i in ids))


def _encode_query(query: str) -> bytes:
    if not isinstance(query, str) or not query:
        raise InvalidQuery("Query must be a nonempty string")
    if DELIM.decode() in query:
        raise InvalidQuery(f"Query {query!r} contains the delimiter byte 0x01")
    try:
        return query.encode("utf-8")
    except UnicodeEncodeError:
        raise InvalidQuery(f"Query {query!r} is not valid UTF-8") from None


def _guarded_lookup(matcher, query) -> MatchResult:
    try:
        return matcher.lookup(query)
    except InvalidQuery as e:
        return MatchResult(query=query if isinstance(query, str) else str(query), status=MatchStatus.NONE,
                           error=str(e))


def build_index(items: Iterable[Union[LibraryItem, str]], builder: str = DEFAULT_BUILDER) -> DependencyIndex:
    """Builds a DependencyIndex over a library.

    Args:
        items: Library items (or bare fqns) in ingestion order. Repeated fqns are dropped, keeping the first, with a
            DuplicateIdentifierWarning for each repeat.
        builder: Name of the suffix array construction algorithm.

    Raises:
        EmptyLibrary if there are no items.
        InvalidIdentifier if any fqn is malformed.
    """
    library = Index()
    seen = 0
    for item in items:
        seen += 1
        if isinstance(item, str):
            item = LibraryItem(item)
        check_identifier(item.fqn)
        if not library.add(item):
            warnings.warn(f"Duplicate identifier {item.fqn} ignored; keeping the first occurrence",
                          DuplicateIdentifierWarning)
    if not library:
        raise EmptyLibrary("Cannot build an index over an empty library")

    encoded = [item.fqn.encode("utf-8") for item in library]
    text = DELIM + DELIM.join(encoded) + DELIM
    lengths = np.fromiter((len(e) + 1 for e in encoded), dtype=np.int64, count=len(encoded))
    item_offsets = np.concatenate([[1], 1 + np.cumsum(lengths[:-1])]).astype(np.int64)

    start = time.perf_counter()
    positions = suffix_array(text, builder)
    logger.info("index built", items=len(library), duplicates=seen - len(library), text_bytes=len(text),
                builder=builder, seconds=round(time.perf_counter() - start, 3))
    return DependencyIndex(text, positions, item_offsets, list(library))


class NaiveMatcher:
    """The linear-scan verifier: compares every query against every library name.

    Implements the same contract as DependencyIndex.lookup at O(N) string comparisons per query. Serves as the
    baseline for benchmarks and the oracle for tests.
    """

    def __init__(self, items: Iterable[Union[LibraryItem, str]]):
        self.names = Index(LibraryItem(i) if isinstance(i, str) else i for i in items).names()
        self._known = set(self.names)

    def lookup(self, query: str) -> MatchResult:
        _encode_query(query)
        suffix = {name for name in self.names if name.endswith(SEP + query)}
        prefix = {name for name in self.names if name.startswith(query + SEP)}
        interior = {name for name in self.names if SEP + query + SEP in name}

        if query in self._known:
            return MatchResult(query=query, status=MatchStatus.EXACT, resolved=(query,),
                               partial_hits=tuple(sorted((suffix | prefix | interior) - {query})))
        partial = (prefix | interior) - suffix
        if not suffix and not partial:
            return MatchResult(query=query, status=MatchStatus.NONE)
        return MatchResult(query=query, status=MatchStatus.PARTIAL, resolved=tuple(sorted(suffix)),
                           partial_hits=tuple(sorted(partial)))

    def verify_batch(self, queries: Iterable[str]) -> List[MatchResult]:
        return [_guarded_lookup(self, query) for query in queries]

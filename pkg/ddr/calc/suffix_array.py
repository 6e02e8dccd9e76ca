"""Suffix array construction over byte strings.

A suffix array of a text is the permutation of its positions that sorts the suffixes starting there
byte-lexicographically, a shorter suffix sorting before any longer suffix it is a prefix of. Three builders are
registered here, all of which must produce identical output:

- `sais`: linear-time induced sorting (SA-IS). The default.
- `doubling`: prefix doubling with numpy lexsort, O(n log n) per round and a round per doubling of the longest
  repeated prefix. Fast in practice on identifier text, where repeats are short.
- `naive`: comparison sort of explicit suffixes. Quadratic memory; for tests and tiny inputs only.

The SA-IS builder works on lists of ints so it also serves the recursive reduced problem, whose alphabet is the set
of LMS-substring names rather than bytes.

References:
- Nong, Zhang & Chan (2009), Linear Suffix Array Construction by Almost Pure Induced-Sorting.
"""
from typing import Callable, Dict, List, Sequence, Union

import numpy as np

BytesLike = Union[bytes, bytearray, memoryview]
Builder = Callable[[BytesLike], np.ndarray]

# Below this length the naive sort beats the bookkeeping of induced sorting.
_NAIVE_THRESHOLD = 10


def _naive_positions(s: Sequence[int]) -> List[int]:
    return sorted(range(len(s)), key=lambda i: s[i:])


def _sa_is(s: List[int], upper: int) -> List[int]:
    """Induced sorting over a list of ints in [0, upper]."""
    n = len(s)
    if n < _NAIVE_THRESHOLD:
        return _naive_positions(s)

    # ls[i] is True for S-type positions (suffix i < suffix i+1). The virtual sentinel after s makes n-1 L-type.
    ls = [False] * n
    for i in range(n - 2, -1, -1):
        ls[i] = ls[i + 1] if s[i] == s[i + 1] else s[i] < s[i + 1]

    # Bucket boundaries: sum_l[c] is where L-type suffixes starting with c begin, sum_s[c] where S-types begin.
    sum_l = [0] * (upper + 1)
    sum_s = [0] * (upper + 1)
    for i in range(n):
        if ls[i]:
            if s[i] < upper:
                sum_l[s[i] + 1] += 1
        else:
            sum_s[s[i]] += 1
    for c in range(upper + 1):
        sum_s[c] += sum_l[c]
        if c < upper:
            sum_l[c + 1] += sum_s[c]

    sa = [-1] * n

    def induce(lms: List[int]):
        for i in range(n):
            sa[i] = -1
        buf = sum_s[:]
        for d in lms:
            if d == n:
                continue
            sa[buf[s[d]]] = d
            buf[s[d]] += 1
        buf = sum_l[:]
        sa[buf[s[n - 1]]] = n - 1
        buf[s[n - 1]] += 1
        for i in range(n):
            v = sa[i]
            if v >= 1 and not ls[v - 1]:
                c = s[v - 1]
                sa[buf[c]] = v - 1
                buf[c] += 1
        buf = sum_l[:]
        for i in range(n - 1, -1, -1):
            v = sa[i]
            if v >= 1 and ls[v - 1]:
                c = s[v - 1] + 1
                buf[c] -= 1
                sa[buf[c]] = v - 1

    lms_map = [-1] * (n + 1)
    lms = []
    for i in range(1, n):
        if not ls[i - 1] and ls[i]:
            lms_map[i] = len(lms)
            lms.append(i)
    m = len(lms)

    induce(lms)

    if m:
        sorted_lms = [v for v in sa if lms_map[v] != -1]
        # Name each LMS substring by its rank among distinct LMS substrings; equal substrings share a name.
        rec_s = [0] * m
        rec_upper = 0
        rec_s[lms_map[sorted_lms[0]]] = 0
        for i in range(1, m):
            left, right = sorted_lms[i - 1], sorted_lms[i]
            end_l = lms[lms_map[left] + 1] if lms_map[left] + 1 < m else n
            end_r = lms[lms_map[right] + 1] if lms_map[right] + 1 < m else n
            same = True
            if end_l - left != end_r - right:
                same = False
            else:
                while left < end_l:
                    if s[left] != s[right]:
                        break
                    left += 1
                    right += 1
                if left == n or right == n or s[left] != s[right]:
                    same = False
            if not same:
                rec_upper += 1
            rec_s[lms_map[sorted_lms[i]]] = rec_upper

        rec_sa = _sa_is(rec_s, rec_upper)
        for i in range(m):
            sorted_lms[i] = lms[rec_sa[i]]
        induce(sorted_lms)

    return sa


def sais_suffix_array(data: BytesLike) -> np.ndarray:
    """Linear-time suffix array by induced sorting."""
    return np.array(_sa_is(list(bytes(data)), 255), dtype=np.int64)


def doubling_suffix_array(data: BytesLike) -> np.ndarray:
    """Suffix array by prefix doubling: each round sorts by (rank of first k bytes, rank of next k bytes)."""
    text = np.frombuffer(bytes(data), dtype=np.uint8)
    n = text.size
    if n == 0:
        return np.empty(0, dtype=np.int64)

    rank = text.astype(np.int64)
    k = 1
    while True:
        # Positions past the end rank below every byte, so a suffix sorts before its own extensions.
        second = np.full(n, -1, dtype=np.int64)
        if k < n:
            second[:n - k] = rank[k:]
        order = np.lexsort((second, rank))
        first_sorted, second_sorted = rank[order], second[order]
        boundary = np.zeros(n, dtype=np.int64)
        boundary[1:] = (first_sorted[1:] != first_sorted[:-1]) | (second_sorted[1:] != second_sorted[:-1])
        rank = np.empty(n, dtype=np.int64)
        rank[order] = np.cumsum(boundary)
        if rank[order[-1]] == n - 1:
            return order.astype(np.int64)
        k *= 2


def naive_suffix_array(data: BytesLike) -> np.ndarray:
    """Suffix array by sorting explicit suffixes. The reference every other builder is checked against."""
    data = bytes(data)
    return np.array(_naive_positions(data), dtype=np.int64)


class _Registry:
    """Provides access to suffix array builders by name."""

    def __init__(self):
        self.builders: Dict[str, Builder] = {}

    def has(self, name: str) -> bool:
        return name in self.builders

    def define(self, name: str, builder: Builder) -> Builder:
        """Adds a builder to the registry."""
        if self.has(name):
            raise ValueError(f"Suffix array builder {name} is already defined")
        self.builders[name] = builder
        self.__dict__[name] = builder
        return builder

    def get(self, name: str) -> Builder:
        if not self.has(name):
            raise ValueError(f"Unknown suffix array builder {name!r}; choose from {sorted(self.builders)}")
        return self.builders[name]

    def names(self) -> List[str]:
        return sorted(self.builders)


BUILDERS = _Registry()
BUILDERS.define("sais", sais_suffix_array)
BUILDERS.define("doubling", doubling_suffix_array)
BUILDERS.define("naive", naive_suffix_array)

DEFAULT_BUILDER = "sais"


def suffix_array(data: BytesLike, builder: str = DEFAULT_BUILDER) -> np.ndarray:
    """Sorts all suffixes of data byte-lexicographically.

    Args:
        data: the text. May be empty.
        builder: name of a registered construction algorithm.

    Returns:
        int64 array of suffix start positions, a permutation of range(len(data)).
    """
    return BUILDERS.get(builder)(data)

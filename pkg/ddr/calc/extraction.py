"""Extracts candidate dependency names from Lean statement code, and resolves them against a DependencyIndex.

This is deliberately shallow: no parsing, no elaboration, no scope analysis. Anything identifier-shaped is a
candidate, minus keywords and the names a statement binds for itself. Verification against the library is what
actually filters the candidates.
"""
import functools
from importlib import resources
from pathlib import Path
from typing import FrozenSet, Iterable, Iterator, List, Optional, Set, Tuple, Union

from ddr.calc.dependency_index import DependencyIndex
from ddr.model import SEP, CandidateSet, DependencyList, MatchStatus

_SUBSCRIPTS = frozenset(chr(c) for c in range(0x2080, 0x209D)) | frozenset(chr(c) for c in range(0x1D62, 0x1D6B))
_OPENERS = "({[⦃"

DEFAULT_KEYWORDS = "lean4.txt"


def _starts_segment(ch: str) -> bool:
    return ch.isalpha() or ch == "_"


def _continues_segment(ch: str) -> bool:
    return ch.isalnum() or ch in "_'" or ch in _SUBSCRIPTS


def _scan(code: str) -> Iterator[Tuple[str, int, int]]:
    """Yields (token, start, end) for every maximal identifier run in code."""
    i, n = 0, len(code)
    while i < n:
        ch = code[i]
        if not _continues_segment(ch):
            i += 1
            continue
        if not _starts_segment(ch):
            # A word run beginning with a digit (a numeral such as 1e5) is not an identifier.
            while i < n and _continues_segment(code[i]):
                i += 1
            continue
        start = i
        while True:
            i += 1
            while i < n and _continues_segment(code[i]):
                i += 1
            if i + 1 < n and code[i] == SEP and _starts_segment(code[i + 1]):
                i += 1
                continue
            break
        yield code[start:i], start, i


def tokenize(code: str) -> List[str]:
    """Splits code into identifier-shaped tokens, in order, repeats included.

    A token is one or more segments joined by '.', where a segment is a letter or '_' followed by letters, digits,
    '_', apostrophes or subscript characters. Everything else, including '!' and '?', is punctuation.

    Examples:
        "f.Injective}.ncard = n!" -> ["f.Injective", "ncard", "n"]
    """
    return [token for token, _, _ in _scan(code)]


@functools.lru_cache(maxsize=None)
def _read_keywords(path: Optional[str]) -> FrozenSet[str]:
    if path is None:
        text = resources.files("ddr.knowledge").joinpath("keywords", DEFAULT_KEYWORDS).read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    return frozenset(line.strip() for line in text.splitlines() if line.strip() and not line.lstrip().startswith("#"))


def load_keywords(path: Union[str, Path, None] = None) -> FrozenSet[str]:
    """Loads a keyword blacklist, one keyword per line. Defaults to the Lean 4 list shipped with the package."""
    return _read_keywords(None if path is None else str(path))


def _follows_opener(code: str, pos: int) -> bool:
    pos -= 1
    while pos >= 0 and code[pos].isspace():
        pos -= 1
    return pos >= 0 and code[pos] in _OPENERS


def _colon_follows(code: str, pos: int) -> bool:
    while pos < len(code) and code[pos].isspace():
        pos += 1
    return code[pos:pos + 1] == ":" and code[pos + 1:pos + 2] not in (":", "=")


def binder_names(code: str) -> Set[str]:
    """Names a statement binds for itself: `(a b : T)`, `{x : T | ...}`, `[inst : C]`, `⦃x : T⦄`.

    A run of single-component names right after an opening bracket, separated only by whitespace, and followed by a
    type-ascribing ':'.
    """
    spans = list(_scan(code))
    binders = set()
    for i, (_, start, _) in enumerate(spans):
        if not _follows_opener(code, start):
            continue
        j = i
        while (j < len(spans) and SEP not in spans[j][0]
               and (j == i or code[spans[j - 1][2]:spans[j][1]].isspace())):
            j += 1
        if j > i and _colon_follows(code, spans[j - 1][2]):
            binders.update(token for token, _, _ in spans[i:j])
    return binders


def extract_candidates(code: str, keywords: Optional[Iterable[str]] = None) -> CandidateSet:
    """Candidate dependency names in a formal statement: tokens that are neither keywords nor binder names.

    Args:
        code: Lean statement source.
        keywords: Blacklist to apply. Defaults to load_keywords().

    Returns:
        CandidateSet of distinct candidates in first-occurrence order.
    """
    blacklist = load_keywords() if keywords is None else frozenset(keywords)
    excluded = blacklist | binder_names(code)
    candidates = dict.fromkeys(token for token in tokenize(code) if token not in excluded)
    return CandidateSet(source=code, candidates=tuple(candidates))


def resolve_dependencies(index: DependencyIndex, cs: CandidateSet) -> DependencyList:
    """Verifies candidates against the library.

    A candidate with no aligned occurrence at all (status NONE) and two or more components is retried once without
    its leading component, which turns field access like `f.Injective` into `Injective`. A PARTIAL candidate such as
    a qualified prefix is never retried.

    Returns:
        DependencyList of resolved fqns in first-resolution order (each candidate's own resolutions sorted), and the
        dropped candidates with the reason.
    """
    dependencies = {}
    dropped = []
    for candidate in cs.candidates:
        result = index.lookup(candidate)
        if result.status == MatchStatus.NONE and SEP in candidate:
            result = index.lookup(candidate.split(SEP, 1)[1])
        if result.resolves:
            dependencies.update(dict.fromkeys(result.resolved))
        elif result.status == MatchStatus.PARTIAL:
            dropped.append((candidate, "partial"))
        else:
            dropped.append((candidate, "unresolved"))
    return DependencyList(dependencies=tuple(dependencies), dropped=tuple(dropped))


def extract_dependencies(index: DependencyIndex, code: str, keywords: Optional[Iterable[str]] = None) -> DependencyList:
    """extract_candidates() followed by resolve_dependencies()."""
    return resolve_dependencies(index, extract_candidates(code, keywords))

"""Tests for ddr.calc.dependency_index."""
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ddr.calc.dependency_index import FORMAT_VERSION, DependencyIndex, NaiveMatcher, build_index
from ddr.dataset.synthetic import synthetic_library
from ddr.errors import DelimiterPosition, DuplicateIdentifierWarning, EmptyLibrary, InvalidIdentifier, InvalidQuery
from ddr.model import LibraryItem, MatchResult, MatchStatus


class TestBuildIndex:
    def test_Layout(self):
        index = build_index(["Nat.sqrt", "Real.sqrt"])
        assert index.text == b"\x01Nat.sqrt\x01Real.sqrt\x01"
        assert len(index.text) == 20
        assert index.item_offsets.tolist() == [1, 10]

    def test_SingleItem(self):
        index = build_index(["a"])
        assert index.text == b"\x01a\x01"
        assert index.suffix_array.tolist() == [2, 0, 1]

    def test_Duplicates(self):
        """Repeated fqns keep the first item, with one warning per repeat."""
        with pytest.warns(DuplicateIdentifierWarning) as record:
            index = build_index([LibraryItem("Fin", kind="structure"), LibraryItem("Fin", kind="def")])
        assert len(record) == 1
        assert index.names == ["Fin"]
        assert index.items[0].kind == "structure"

    def test_Empty(self):
        with pytest.raises(EmptyLibrary):
            build_index([])

    def test_InvalidIdentifier(self):
        with pytest.raises(InvalidIdentifier):
            build_index(["Nat.sqrt", "Nat..sqrt"])

    def test_UnicodeIdentifiers(self):
        """Offsets count UTF-8 bytes, not characters."""
        index = build_index(["ℕ.succ", "Fin"])
        assert index.item_offsets.tolist() == [1, 1 + len("ℕ.succ".encode()) + 1]
        assert index.lookup("succ").resolved == ("ℕ.succ",)

    def test_Immutable(self, toy_index):
        with pytest.raises(ValueError):
            toy_index.suffix_array[0] = 0

    def test_Info(self, toy_index):
        info = toy_index.info()
        assert info.item_count == 5
        assert info.text_bytes == len(toy_index.text)
        assert info.format_version == FORMAT_VERSION
        assert info.built_at.tzinfo is not None

    @pytest.mark.parametrize("builder", ["sais", "doubling", "naive"])
    def test_Builders(self, toy_items, builder):
        assert build_index(toy_items, builder).suffix_array.tolist() == build_index(toy_items).suffix_array.tolist()


class TestPrefixRange:
    def test_Banana(self):
        index = DependencyIndex.from_text(b"banana")
        found = index.prefix_range(b"a")
        assert sorted(index.suffix_array[found.start:found.stop].tolist()) == [1, 3, 5]
        assert index.positions(b"a") == [5, 3, 1]

    def test_Absent(self):
        assert len(DependencyIndex.from_text(b"banana").prefix_range(b"z")) == 0

    def test_EmptyPattern(self):
        assert DependencyIndex.from_text(b"banana").prefix_range(b"") == range(0, 6)

    def test_LongerThanText(self):
        assert len(DependencyIndex.from_text(b"ab").prefix_range(b"abc")) == 0

    @settings(max_examples=100, deadline=None)
    @given(text=st.binary(min_size=1, max_size=60), pattern=st.binary(max_size=4))
    def test_MatchesScan(self, text, pattern):
        index = DependencyIndex.from_text(text)
        expected = sorted(i for i in range(len(text)) if text.startswith(pattern, i))
        assert sorted(index.positions(pattern)) == expected


class TestItemOfPosition:
    def test_Offsets(self):
        index = build_index(["Nat.sqrt", "Real.sqrt"])
        assert index.item_of_position(1) == 0
        assert index.item_of_position(8) == 0
        assert index.item_of_position(14) == 1

    def test_Delimiter(self):
        index = build_index(["Nat.sqrt", "Real.sqrt"])
        for pos in (0, 9, 19):
            with pytest.raises(DelimiterPosition):
                index.item_of_position(pos)

    def test_OutOfRange(self):
        index = build_index(["Nat.sqrt"])
        with pytest.raises(IndexError):
            index.item_of_position(len(index.text))
        with pytest.raises(IndexError):
            index.item_of_position(-1)


class TestLookup:
    def test_ShortName(self, toy_index):
        """An unqualified short name resolves to every item it names."""
        result = toy_index.lookup("sqrt")
        assert result.status == MatchStatus.PARTIAL
        assert result.resolved == ("Int.sqrt", "Nat.sqrt", "Real.sqrt")
        assert result.partial_hits == ()

    def test_Exact(self, toy_index):
        result = toy_index.lookup("Nat.sqrt")
        assert result.status == MatchStatus.EXACT
        assert result.resolved == ("Nat.sqrt",)

    def test_UnalignedSubstring(self, toy_index):
        """A substring that does not sit on component boundaries never matches."""
        assert toy_index.lookup("qrt") == MatchResult("qrt", MatchStatus.NONE)
        assert toy_index.lookup("factor").status == MatchStatus.NONE

    def test_QualifiedPrefix(self, toy_index):
        result = toy_index.lookup("Nat")
        assert result.status == MatchStatus.PARTIAL
        assert result.resolved == ()
        assert result.partial_hits == ("Nat.factorial", "Nat.factorization", "Nat.sqrt")

    def test_Interior(self):
        index = build_index(["Finset.Icc.card", "Finset.sum"])
        result = index.lookup("Icc")
        assert result.status == MatchStatus.PARTIAL
        assert result.resolved == ()
        assert result.partial_hits == ("Finset.Icc.card",)

    def test_MultiComponentSuffix(self):
        index = build_index(["Finset.Icc.card", "Icc.card"])
        result = index.lookup("Icc.card")
        assert result.status == MatchStatus.EXACT
        assert result.resolved == ("Icc.card",)
        assert result.partial_hits == ("Finset.Icc.card",)

    def test_ExactShadowsSuffix(self):
        """A name that is itself a library item resolves only to that item."""
        index = build_index(["sqrt", "Nat.sqrt"])
        result = index.lookup("sqrt")
        assert result.status == MatchStatus.EXACT
        assert result.resolved == ("sqrt",)
        assert result.partial_hits == ("Nat.sqrt",)

    def test_Unknown(self, toy_index):
        assert toy_index.lookup("Nat.bogus").status == MatchStatus.NONE

    @pytest.mark.parametrize("bad", ["", "Nat\x01sqrt"])
    def test_InvalidQuery(self, toy_index, bad):
        with pytest.raises(InvalidQuery):
            toy_index.lookup(bad)

    def test_Contains(self, toy_index):
        assert "Nat.sqrt" in toy_index
        assert "sqrt" not in toy_index


class TestVerifyBatch:
    def test_Empty(self, toy_index):
        assert toy_index.verify_batch([]) == []

    def test_Positional(self, toy_index):
        results = toy_index.verify_batch(["Nat.sqrt", "Nat.bogus"])
        assert [r.status for r in results] == [MatchStatus.EXACT, MatchStatus.NONE]

    def test_NoDedup(self, toy_index):
        first, second = toy_index.verify_batch(["sqrt", "sqrt"])
        assert first == second
        assert first.status == MatchStatus.PARTIAL

    def test_InvalidEntry(self, toy_index):
        """An invalid query yields an error marker in its slot and does not abort the batch."""
        results = toy_index.verify_batch(["Nat.sqrt", "", "sqrt"])
        assert results[1].status == MatchStatus.NONE
        assert results[1].error
        assert results[0].status == MatchStatus.EXACT
        assert results[2].resolved == ("Int.sqrt", "Nat.sqrt", "Real.sqrt")


_COMPONENTS = st.sampled_from(["Nat", "Int", "sqrt", "add", "Icc", "card", "a", "b", "ℕ"])
_NAMES = st.lists(_COMPONENTS, min_size=1, max_size=4).map(".".join)


class TestAgainstLinearScan:
    @settings(max_examples=150, deadline=None)
    @given(library=st.lists(_NAMES, min_size=1, max_size=25), queries=st.lists(_NAMES, max_size=15))
    def test_SameResults(self, library, queries):
        """The suffix-array index and the linear scan agree on every query."""
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", DuplicateIdentifierWarning)
            index = build_index(library)
        matcher = NaiveMatcher(library)
        assert index.verify_batch(queries) == matcher.verify_batch(queries)

    @settings(max_examples=50, deadline=None)
    @given(library=st.lists(_NAMES, min_size=1, max_size=25, unique=True))
    def test_EveryItemExact(self, library):
        index = build_index(library)
        for name in library:
            assert index.lookup(name).resolved == (name,)

    def test_Garbage(self, toy_items):
        index = build_index(toy_items)
        matcher = NaiveMatcher(toy_items)
        queries = ["t.s", "Nat.sqrt.foo", "x", "Real", "sqrt'", "ℕ", "Nat.factorial"]
        assert index.verify_batch(queries) == matcher.verify_batch(queries)

    @pytest.mark.parametrize("size", [10, 100, 1000, 10_000])
    def test_SyntheticLibraries(self, size):
        """10,000 mixed queries per library, every answer identical to the linear scan."""
        library = synthetic_library(size, seed=size)
        index = build_index(library)
        matcher = NaiveMatcher(library)
        queries = _mixed_queries(index.names, 10_000, seed=size)
        assert index.verify_batch(queries) == matcher.verify_batch(queries)


_GARBAGE = np.array(list("abcdefgNatRealsqrt_'.₀ℕ"))


def _mixed_queries(names, m, seed):
    """Existing names, component suffixes, qualified prefixes, non-aligned substrings and garbage, in equal parts."""
    rng = np.random.default_rng(seed)
    queries = []
    for kind in rng.integers(0, 5, size=m):
        name = names[int(rng.integers(0, len(names)))]
        parts = name.split(".")
        if kind == 0:
            queries.append(name)
        elif kind == 1:
            queries.append(".".join(parts[int(rng.integers(0, len(parts))):]))
        elif kind == 2:
            queries.append(".".join(parts[:int(rng.integers(1, len(parts) + 1))]))
        elif kind == 3:
            start = int(rng.integers(0, len(name)))
            queries.append(name[start:int(rng.integers(start + 1, len(name) + 1))])
        else:
            queries.append("".join(_GARBAGE[rng.integers(0, len(_GARBAGE), size=int(rng.integers(1, 10)))]))
    return queries

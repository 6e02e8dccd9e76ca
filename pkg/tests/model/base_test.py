"""Tests for ddr.model.base."""
import pytest

from ddr.errors import InvalidIdentifier
from ddr.model.base import Index, LibraryItem, check_identifier, components


class TestIdentifier:
    def test_Valid(self):
        assert check_identifier("Nat.sqrt") == "Nat.sqrt"
        assert check_identifier("ℕ") == "ℕ"

    @pytest.mark.parametrize("bad", ["", ".sqrt", "Nat.", "Nat..sqrt", "Nat\x01sqrt"])
    def test_Invalid(self, bad):
        with pytest.raises(InvalidIdentifier):
            check_identifier(bad)

    def test_LoneSurrogate(self):
        """Text that cannot be encoded as UTF-8 is not an identifier."""
        with pytest.raises(InvalidIdentifier):
            check_identifier("Nat.\ud800")

    def test_Components(self):
        assert components("Finset.Icc.card") == ("Finset", "Icc", "card")


class TestLibraryItem:
    def test_ValueSemantics(self):
        """Items are equal by fqn alone; metadata does not participate."""
        a = LibraryItem("Nat.sqrt", kind="def", doc="square root")
        _a = LibraryItem("Nat.sqrt")
        assert a is not _a
        assert a == _a
        assert hash(a) == hash(_a)

    def test_ShortName(self):
        assert LibraryItem("Nat.sqrt").short_name == "sqrt"
        assert LibraryItem("Fin").short_name == "Fin"
        assert LibraryItem("Nat.sqrt").components == ("Nat", "sqrt")


class TestIndex:
    def test_SetSemantics(self):
        """Repeated items are ignored, and the first one is kept."""
        first = LibraryItem("Fin", kind="structure")
        index = Index([first, LibraryItem("Nat.sqrt"), LibraryItem("Fin", kind="def")])
        assert len(index) == 2
        assert index[0] is first
        assert not index.add(LibraryItem("Nat.sqrt"))

    def test_IndexOf(self):
        index = Index([LibraryItem("a"), LibraryItem("b")])
        assert index.index_of("b") == 1
        assert index.index_of(LibraryItem("a")) == 0
        assert index.index_of("c") is None

    def test_Contains(self):
        index = Index([LibraryItem("Nat.sqrt")])
        assert "Nat.sqrt" in index
        assert LibraryItem("Nat.sqrt") in index
        assert "sqrt" not in index

    def test_Names(self):
        assert Index([LibraryItem("b"), LibraryItem("a")]).names() == ["b", "a"]

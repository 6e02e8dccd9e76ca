"""Tests for ddr.calc.lexical."""
import pytest

from ddr.calc.lexical import LexicalRetriever, lexical_predictions, lexical_retrieve, words
from ddr.model import LabeledSample, LibraryItem

LIBRARY = [
    LibraryItem("Nat.sqrt", doc="square root"),
    LibraryItem("Nat.factorial", doc="factorial"),
]


class TestWords:
    def test_Lowercase(self):
        assert words("Square Root of a natural_number") == ["square", "root", "of", "a", "natural", "number"]

    def test_Camel(self):
        assert words("Finset.sumRange", camel=True) == ["finset", "sum", "range"]
        assert words("Finset.sumRange") == ["finset", "sumrange"]

    def test_None(self):
        assert words(None) == []


class TestLexicalRetrieve:
    def test_SharedTerms(self):
        assert lexical_retrieve(LIBRARY, "square root of a natural number", 1) == ["Nat.sqrt"]

    def test_ZeroK(self):
        assert lexical_retrieve(LIBRARY, "square root", 0) == []

    def test_ZeroScore(self):
        """With no overlap at all, the first k items in lexicographic order come back, flagged."""
        ranking = LexicalRetriever(["b.x", "a.y", "c.z"]).retrieve("entirely unrelated", 2)
        assert ranking.fqns == ("a.y", "b.x")
        assert ranking.zero_score

    def test_Scores(self):
        ranking = LexicalRetriever(LIBRARY).retrieve("factorial", 2)
        assert ranking.fqns == ("Nat.factorial", "Nat.sqrt")
        assert ranking.scores[0] > 0
        assert ranking.scores[1] == 0
        assert not ranking.zero_score

    def test_TieBreak(self):
        ranking = LexicalRetriever(["Real.sqrt", "Nat.sqrt"]).retrieve("sqrt", 2)
        assert ranking.fqns == ("Nat.sqrt", "Real.sqrt")

    def test_NegativeK(self):
        with pytest.raises(ValueError):
            LexicalRetriever(LIBRARY).retrieve("x", -1)

    def test_EmptyLibrary(self):
        with pytest.raises(ValueError):
            LexicalRetriever([])


class TestLexicalPredictions:
    def test_OnePerSample(self):
        samples = [
            LabeledSample(id="a", informal_statement="the factorial of n", formal_statement="", difficulty=0),
            LabeledSample(id="b", informal_statement="square root", formal_statement="", difficulty=0),
        ]
        predictions = lexical_predictions(LIBRARY, samples, 1)
        assert [(p.id, p.dependencies) for p in predictions] == [("a", ("Nat.factorial",)), ("b", ("Nat.sqrt",))]

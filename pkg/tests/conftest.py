"""Shared fixtures: the toy library used throughout the tests, and indexes over it."""
import pytest

from ddr.calc.dependency_index import build_index
from ddr.model import LibraryItem

TOY_LIBRARY = ("Nat.sqrt", "Real.sqrt", "Int.sqrt", "Nat.factorial", "Nat.factorization")
# Enough for the extraction examples: Fin, Function.Injective and Set.ncard, plus a distractor.
EXTRACTION_LIBRARY = ("Fin", "Function.Injective", "Set.ncard", "Nat.sqrt")

CARD_STATEMENT = "theorem thm_P (n : ℕ) : {f : Fin n → Fin n | f.Injective}.ncard = n! := by sorry"


@pytest.fixture
def toy_items():
    return [LibraryItem(fqn, kind="def") for fqn in TOY_LIBRARY]


@pytest.fixture
def toy_index(toy_items):
    return build_index(toy_items)


@pytest.fixture
def extraction_index():
    return build_index(EXTRACTION_LIBRARY)


@pytest.fixture
def card_statement():
    return CARD_STATEMENT

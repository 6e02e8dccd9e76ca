"""Seeded synthetic libraries and corpora, for benchmarks and for checking label recovery end to end.

Library names look like Mathlib's: one to four dot-separated components, capitalized namespaces followed by a
snake_case lemma or definition name, e.g. "Finset.Ico.card_mul_le".
"""
from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np

from ddr.model import CorpusSample, LibraryItem

NAMESPACES = (
    "Nat", "Int", "Rat", "Real", "Complex", "Finset", "Set", "List", "Multiset", "Function", "Polynomial", "Matrix",
    "Filter", "Topology", "MeasureTheory", "Module", "Submodule", "Subgroup", "Ideal", "Order", "Lattice", "Equiv",
    "Fin", "ZMod", "Prime", "Monoid", "Group", "Ring", "Field", "Algebra", "Icc", "Ico", "Ioo", "Finite", "Metric",
)
WORDS = (
    "add", "sub", "mul", "div", "pow", "neg", "inv", "zero", "one", "two", "succ", "pred", "le", "lt", "eq", "ne",
    "comm", "assoc", "cancel", "left", "right", "self", "mono", "anti", "strict", "card", "sum", "prod", "map",
    "filter", "image", "preimage", "union", "inter", "compl", "subset", "mem", "empty", "univ", "insert", "erase",
    "sqrt", "abs", "floor", "ceil", "gcd", "lcm", "dvd", "mod", "factorial", "choose", "prime", "coprime", "deg",
    "eval", "root", "norm", "dist", "limit", "cont", "deriv", "integral", "measure", "iff", "of", "cast", "nonneg",
    "pos", "max", "min", "sup", "inf", "bot", "top", "injective", "surjective", "bijective", "range", "support",
)
# Probability of a name having 1, 2, 3 or 4 components.
DEPTH_WEIGHTS = (0.05, 0.45, 0.35, 0.15)
KINDS = ("theorem", "def", "lemma", "structure", "instance")


def _leaf(rng: np.random.Generator) -> str:
    return "_".join(WORDS[i] for i in rng.integers(0, len(WORDS), size=rng.integers(1, 4)))


def synthetic_library(n: int, seed: int = 0) -> List[LibraryItem]:
    """Generates n distinct library items with Mathlib-shaped names, kinds and doc strings.

    Args:
        n: Number of items.
        seed: Seed for numpy's default_rng; the same seed gives the same library.
    """
    rng = np.random.default_rng(seed)
    names: Dict[str, LibraryItem] = {}
    while len(names) < n:
        depth = int(rng.choice(len(DEPTH_WEIGHTS), p=DEPTH_WEIGHTS)) + 1
        namespaces = [NAMESPACES[i] for i in rng.integers(0, len(NAMESPACES), size=depth - 1)]
        leaf = _leaf(rng)
        fqn = ".".join(namespaces + [leaf])
        if fqn not in names:
            names[fqn] = LibraryItem(
                fqn,
                kind=KINDS[int(rng.integers(0, len(KINDS)))],
                doc=" ".join([*(ns.lower() for ns in namespaces), *leaf.split("_")]),
            )
    return list(names.values())


@dataclass(frozen=True)
class PlantedCorpus:
    """Corpus samples whose formal statements reference known library items, and those items by sample id."""
    samples: Tuple[CorpusSample, ...]
    planted: Dict[str, Tuple[str, ...]]


def planted_corpus(library: List[LibraryItem], n: int, seed: int = 0, max_dependencies: int = 4) -> PlantedCorpus:
    """Generates n samples, each referencing 0..max_dependencies library items by fully-qualified name.

    Everything else in a generated statement is a keyword, a bound variable, or a name absent from any synthetic
    library, so labeling must recover exactly the planted dependencies, in order of first mention.
    """
    rng = np.random.default_rng(seed)
    fqns = [item.fqn for item in library]
    samples = []
    planted = {}
    for i in range(n):
        count = int(rng.integers(0, min(max_dependencies, len(fqns)) + 1))
        deps = tuple(fqns[j] for j in rng.choice(len(fqns), size=count, replace=False))
        body = " ∧ ".join(f"{dep} x" for dep in deps) if deps else "x = x"
        sample_id = f"planted-{i}"
        samples.append(CorpusSample(
            id=sample_id,
            informal_statement=f"Synthetic statement {i} about " + (", ".join(deps) if deps else "nothing"),
            formal_statement=f"theorem planted_{i} (x : α) : {body} := by sorry",
            difficulty=int(rng.integers(0, 11)),
        ))
        planted[sample_id] = deps
    return PlantedCorpus(samples=tuple(samples), planted=planted)

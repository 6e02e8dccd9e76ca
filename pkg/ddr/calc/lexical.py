"""Select-based retrieval baseline: ranks library items by lexical cosine similarity to an informal statement.

This is a transparent stand-in for embedding retrieval, not an approximation of any embedding model. Each library
item is a bag of lowercase words from its fqn (split on '.', '_' and camelCase boundaries) and its doc string; the
query is the bag of lowercase words of the statement. Similarity is the cosine of raw term counts.
"""
import re
from dataclasses import dataclass
from typing import Dict, Iterable, List, Sequence, Tuple, Union

import numpy as np
import scipy.sparse
from tqdm import tqdm

from ddr.calc.metrics import truncate_top_k
from ddr.model import Index, LabeledSample, LibraryItem, Prediction

_WORD = re.compile(r"[^\W_]+")
_CAMEL = re.compile(r"(?<=[a-z0-9])(?=[A-Z])|(?<=[A-Z])(?=[A-Z][a-z])")


def words(text: str, camel: bool = False) -> List[str]:
    """Lowercase word tokens of text. With camel=True, camelCase runs are split as well."""
    tokens = []
    for chunk in _WORD.findall(text or ""):
        parts = _CAMEL.split(chunk) if camel else [chunk]
        tokens.extend(part.lower() for part in parts if part)
    return tokens


def item_terms(item: LibraryItem) -> List[str]:
    return words(item.fqn, camel=True) + words(item.doc)


@dataclass(frozen=True)
class Ranking:
    """Top-k fqns in descending score, ties broken by fqn. zero_score is set when every returned score is 0."""
    fqns: Tuple[str, ...]
    scores: Tuple[float, ...]
    zero_score: bool


class LexicalRetriever:
    """Term-count matrix over a library, for repeated cosine queries."""

    def __init__(self, library: Iterable[Union[LibraryItem, str]]):
        items = Index(LibraryItem(i) if isinstance(i, str) else i for i in library)
        if not items:
            raise ValueError("Cannot retrieve from an empty library")
        self.fqns = items.names()
        self.vocabulary: Dict[str, int] = {}

        rows, cols = [], []
        for row, item in enumerate(items):
            for term in item_terms(item):
                rows.append(row)
                cols.append(self.vocabulary.setdefault(term, len(self.vocabulary)))
        counts = np.ones(len(rows), dtype=np.float64)
        coords = (np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64))
        # Duplicate (row, col) entries are summed on conversion, giving raw term counts.
        self.matrix = scipy.sparse.coo_matrix(
            (counts, coords), shape=(len(self.fqns), max(len(self.vocabulary), 1))).tocsr()
        self.norms = np.sqrt(np.asarray(self.matrix.multiply(self.matrix).sum(axis=1)).ravel())
        # Rank of each fqn in lexicographic order, the secondary sort key.
        self._fqn_rank = np.empty(len(self.fqns), dtype=np.int64)
        self._fqn_rank[np.argsort(np.array(self.fqns, dtype=object), kind="stable")] = np.arange(len(self.fqns))

    def similarities(self, informal: str) -> np.ndarray:
        """Cosine similarity of every library item to the statement."""
        terms = words(informal)
        query = np.zeros(self.matrix.shape[1], dtype=np.float64)
        for term in terms:
            col = self.vocabulary.get(term)
            if col is not None:
                query[col] += 1.0
        # Out-of-vocabulary terms still count toward the query's norm.
        query_norm = np.sqrt(np.sum(np.square(np.unique(terms, return_counts=True)[1]))) if terms else 0.0
        dots = self.matrix @ query
        denom = self.norms * query_norm
        return np.divide(dots, denom, out=np.zeros_like(dots), where=denom > 0)

    def retrieve(self, informal: str, k: int) -> Ranking:
        if k < 0:
            raise ValueError(f"k must be >= 0, got {k}")
        scores = self.similarities(informal)
        order = np.lexsort((self._fqn_rank, -scores))
        top = truncate_top_k(order.tolist(), k)
        top_scores = tuple(float(scores[i]) for i in top)
        return Ranking(
            fqns=tuple(self.fqns[i] for i in top),
            scores=top_scores,
            zero_score=bool(top) and not any(top_scores),
        )


def lexical_retrieve(library: Sequence[Union[LibraryItem, str]], informal: str, k: int) -> List[str]:
    """Top-k library fqns by lexical cosine similarity to the informal statement."""
    return list(LexicalRetriever(library).retrieve(informal, k).fqns)


def lexical_predictions(library: Sequence[Union[LibraryItem, str]],
                        samples: Iterable[LabeledSample],
                        k: int,
                        progress: bool = False) -> List[Prediction]:
    """Runs the lexical baseline over a test set, producing one prediction per sample."""
    retriever = LexicalRetriever(library)
    return [
        Prediction(id=sample.id, dependencies=retriever.retrieve(sample.informal_statement, k).fqns)
        for sample in tqdm(samples, desc="lexical baseline", unit="sample", disable=not progress)
    ]

"""Precision, recall and F1 of predicted dependencies against gold labels.

Two identifiers match when the dot-separated components of one are a suffix of the other's ("sqrt" matches
"Nat.sqrt"; "Real.sqrt" does not match "Nat.sqrt"). A predicted item is a true positive if it matches any gold item,
and a gold item is recalled if any predicted item matches it; neither side is consumed by a match.

Per-sample conventions for empty sets:
    predicted = {}, gold = {}   ->  P = R = F1 = 1
    predicted = {}, gold != {}  ->  P = R = F1 = 0
    predicted != {}, gold = {}  ->  P = 0, R = 1, F1 = 0

Scores are macro-averaged over samples, with population standard deviations.
"""
import csv
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Sequence, TextIO, Tuple

import numpy as np
import structlog

from ddr.errors import EmptyCorpus
from ddr.model import AggregateScore, LabeledSample, Prediction, RetrievalScore, components

logger = structlog.get_logger(__name__)


def _suffix_related(a: Tuple[str, ...], b: Tuple[str, ...]) -> bool:
    shorter, longer = (a, b) if len(a) <= len(b) else (b, a)
    return longer[len(longer) - len(shorter):] == shorter


def match_identifiers(a: str, b: str) -> bool:
    """True iff the components of a are a suffix of the components of b, or vice versa.

    Raises:
        InvalidIdentifier if either identifier is empty or has an empty component.
    """
    return _suffix_related(components(a), components(b))


def score_sample(predicted: Iterable[str], gold: Iterable[str]) -> RetrievalScore:
    """Scores one sample's predicted dependencies against its gold dependencies. Duplicates are ignored."""
    predicted = [components(p) for p in dict.fromkeys(predicted)]
    gold = [components(g) for g in dict.fromkeys(gold)]
    if not predicted and not gold:
        return RetrievalScore(1.0, 1.0, 1.0)
    if not predicted:
        return RetrievalScore(0.0, 0.0, 0.0)
    if not gold:
        return RetrievalScore(0.0, 1.0, 0.0)

    hits_p = sum(1 for p in predicted if any(_suffix_related(p, g) for g in gold))
    hits_g = sum(1 for g in gold if any(_suffix_related(p, g) for p in predicted))
    return RetrievalScore.from_pr(hits_p / len(predicted), hits_g / len(gold))


def aggregate(scores: Sequence[RetrievalScore]) -> AggregateScore:
    """Mean and population standard deviation of each metric over per-sample scores."""
    if not scores:
        raise EmptyCorpus("Cannot aggregate scores over zero samples")
    table = np.array([score.as_tuple() for score in scores], dtype=np.float64)
    return AggregateScore(
        mean=RetrievalScore(*(float(x) for x in table.mean(axis=0))),
        std=RetrievalScore(*(float(x) for x in table.std(axis=0))),
        n=len(scores),
    )


def score_corpus(pairs: Iterable[Tuple[Iterable[str], Iterable[str]]]) -> AggregateScore:
    """Macro-averages score_sample over (predicted, gold) pairs.

    Raises:
        EmptyCorpus if there are no pairs.
    """
    return aggregate([score_sample(predicted, gold) for predicted, gold in pairs])


def truncate_top_k(ranked: Sequence[str], k: int) -> List[str]:
    """The first k entries of a ranked list (all of them if there are fewer)."""
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    return list(ranked[:k])


@dataclass(frozen=True)
class EvaluationReport:
    """Per-sample scores of one test set, keyed by sample id in gold order, with their aggregate."""
    per_sample: Tuple[Tuple[str, RetrievalScore], ...]
    aggregate: AggregateScore
    missing_predictions: int = 0


def evaluate(predictions: Iterable[Prediction], gold: Iterable[LabeledSample]) -> EvaluationReport:
    """Scores predictions against a labeled test set, matching samples by id.

    Gold samples with no prediction are scored as an empty prediction. Predictions for ids outside the test set are
    ignored.

    Raises:
        EmptyCorpus if the gold set is empty.
    """
    predicted: Dict[str, Tuple[str, ...]] = {str(p.id): p.dependencies for p in predictions}
    per_sample = []
    missing = 0
    for sample in gold:
        if str(sample.id) not in predicted:
            missing += 1
        per_sample.append((sample.id, score_sample(predicted.get(str(sample.id), ()), sample.dependencies)))
    if missing:
        logger.warning("samples without predictions scored as empty", missing=missing)
    return EvaluationReport(
        per_sample=tuple(per_sample),
        aggregate=aggregate([score for _, score in per_sample]),
        missing_predictions=missing,
    )


def evaluate_sets(predictions: Iterable[Prediction],
                  gold_sets: Mapping[str, Iterable[LabeledSample]]) -> Dict[str, EvaluationReport]:
    """Scores one prediction file against several test sets (e.g. Diff01 ... Diff89), in the given set order."""
    predictions = list(predictions)
    return {name: evaluate(predictions, gold) for name, gold in gold_sets.items()}


def format_table(reports: Mapping[str, EvaluationReport]) -> str:
    """Renders mean ± std of each metric, one row per test set."""
    header = f"{'set':<10} {'n':>5}  {'precision':>15}  {'recall':>15}  {'f1':>15}"
    lines = [header, "-" * len(header)]
    for name, report in reports.items():
        agg = report.aggregate
        cells = [f"{m:.3f} ± {s:.3f}" for m, s in zip(agg.mean.as_tuple(), agg.std.as_tuple())]
        lines.append(f"{name:<10} {agg.n:>5}  {cells[0]:>15}  {cells[1]:>15}  {cells[2]:>15}")
    return "\n".join(lines)


def write_csv(report: EvaluationReport, sink: TextIO):
    """Writes per-sample scores as CSV: id, precision, recall, f1."""
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(["id", "precision", "recall", "f1"])
    for sample_id, score in report.per_sample:
        writer.writerow([sample_id, *(repr(x) for x in score.as_tuple())])

"""Per-difficulty dependency statistics of a labeled dataset.

For each normalized difficulty level:
    num            number of samples
    depend_rate    fraction of samples with at least one dependency
    depend_length  mean number of dependencies, over all samples of the level (dependent or not)

A level with no samples reports 0 for both ratios and is flagged empty.
"""
from typing import Iterable

import numpy as np

from ddr.dataset.corpus import MAX_LEVEL, normalize_difficulty
from ddr.model import DatasetStats, LabeledSample, LevelStats

NUM_LEVELS = MAX_LEVEL + 1

# Published statistics of the FineLeanCorpus-derived dataset, labeled against Mathlib.
PUBLISHED_REFERENCE = DatasetStats(levels=(
    LevelStats(0, 835, 0.20239520958083831, 0.2874251497005988),
    LevelStats(1, 120040, 0.5604215261579474, 1.0747167610796402),
    LevelStats(2, 113816, 0.7850565825542981, 1.8707387362058059),
    LevelStats(3, 49841, 0.8083304909612568, 2.088682008787946),
    LevelStats(4, 69882, 0.7959274205088578, 1.9631235511290461),
    LevelStats(5, 67547, 0.524064725302382, 1.1126919034153997),
    LevelStats(6, 41312, 0.8130325329202169, 2.251839659178931),
    LevelStats(7, 36675, 0.75626448534424, 2.1354601226993863),
    LevelStats(8, 8682, 0.8213545266067727, 2.430085233817093),
    LevelStats(9, 708, 0.8305084745762712, 2.632768361581921),
))

# Extraction details behind the published labels are not known exactly; ratios are compared within this margin.
REFERENCE_TOLERANCE = 0.05


def compute_stats(samples: Iterable[LabeledSample]) -> DatasetStats:
    """Counts samples, dependent samples and dependencies per normalized difficulty level, in one pass."""
    num = np.zeros(NUM_LEVELS, dtype=np.int64)
    dependent = np.zeros(NUM_LEVELS, dtype=np.int64)
    total = np.zeros(NUM_LEVELS, dtype=np.int64)
    for sample in samples:
        level = normalize_difficulty(sample.difficulty)
        num[level] += 1
        dependent[level] += sample.dependent
        total[level] += len(sample.dependencies)

    levels = []
    for level in range(NUM_LEVELS):
        n = int(num[level])
        if n == 0:
            levels.append(LevelStats(level, 0, 0.0, 0.0, empty=True))
        else:
            levels.append(LevelStats(level, n, float(dependent[level] / n), float(total[level] / n)))
    return DatasetStats(levels=tuple(levels))


def matches_reference(stats: DatasetStats,
                      level: int,
                      reference: DatasetStats = PUBLISHED_REFERENCE,
                      tolerance: float = REFERENCE_TOLERANCE) -> bool:
    """True if a level has exactly the reference count and both ratios within tolerance of the reference."""
    ours, theirs = stats[level], reference[level]
    return (ours.num == theirs.num
            and abs(ours.depend_rate - theirs.depend_rate) <= tolerance
            and abs(ours.depend_length - theirs.depend_length) <= tolerance)


def format_stats(stats: DatasetStats) -> str:
    """Renders stats as a fixed-width table."""
    lines = [f"{'level':>5} {'num':>8} {'depend_rate':>12} {'depend_length':>14}"]
    for s in stats:
        lines.append(f"{s.level:>5} {s.num:>8} {s.depend_rate:>12.4f} {s.depend_length:>14.4f}"
                     + ("  (empty)" if s.empty else ""))
    return "\n".join(lines)

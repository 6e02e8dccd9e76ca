"""Difficulty-based train/test splits.

A fixed number of samples (100 by default) is drawn from each normalized difficulty level, and adjacent levels are
paired into five test sets, Diff01, Diff23, Diff45, Diff67 and Diff89. Everything not drawn is the train set.

Sampling uses a fully specified generator so that any implementation reproduces the same split from the same seed:
a 64-bit linear congruential generator

    x <- (6364136223846793005 * x + 1442695040888963407) mod 2**64,   output x >> 33

seeded with x = seed, driving a Fisher-Yates shuffle of each level (levels 0..9 in turn, each in input order, j =
output mod (i + 1)). The first samples of each shuffled level are drawn.
"""
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, MutableSequence, Tuple, Union

import structlog

from ddr.dataset.corpus import MAX_LEVEL, normalize_difficulty
from ddr.errors import ShortLevelWarning
from ddr.knowledge.codecs import CODECS, LABELED_WITH_FORMAL, Codec, write_jsonl
from ddr.model import LabeledSample

logger = structlog.get_logger(__name__)

SAMPLES_PER_LEVEL = 100
TEST_SETS = ("Diff01", "Diff23", "Diff45", "Diff67", "Diff89")
TRAIN = "train"


class Lcg64:
    """64-bit linear congruential generator with 31-bit outputs."""
    MULTIPLIER = 6364136223846793005
    INCREMENT = 1442695040888963407
    MASK = (1 << 64) - 1

    def __init__(self, seed: int):
        self.state = seed & self.MASK

    def next(self) -> int:
        self.state = (self.MULTIPLIER * self.state + self.INCREMENT) & self.MASK
        return self.state >> 33

    def shuffle(self, items: MutableSequence):
        """Fisher-Yates shuffle in place."""
        for i in range(len(items) - 1, 0, -1):
            j = self.next() % (i + 1)
            items[i], items[j] = items[j], items[i]


@dataclass(frozen=True)
class Splits:
    """A train set in corpus order, and the test sets by name."""
    train: Tuple[LabeledSample, ...]
    tests: Dict[str, Tuple[LabeledSample, ...]]

    def __len__(self) -> int:
        return len(self.train) + sum(len(test) for test in self.tests.values())


def split_corpus(samples: Iterable[LabeledSample], seed: int, per_level: int = SAMPLES_PER_LEVEL) -> Splits:
    """Draws per_level samples from each difficulty level into paired test sets; the rest is train.

    A level with fewer than per_level samples contributes all of them, with a ShortLevelWarning.
    """
    samples = list(samples)
    by_level: List[List[int]] = [[] for _ in range(MAX_LEVEL + 1)]
    for i, sample in enumerate(samples):
        by_level[normalize_difficulty(sample.difficulty)].append(i)

    rng = Lcg64(seed)
    drawn: List[List[int]] = []
    for level, members in enumerate(by_level):
        if len(members) < per_level:
            warnings.warn(f"Difficulty level {level} has {len(members)} samples; fewer than {per_level} requested",
                          ShortLevelWarning)
        rng.shuffle(members)
        drawn.append(members[:per_level])

    tests = {
        name: tuple(samples[i] for i in drawn[2 * k] + drawn[2 * k + 1])
        for k, name in enumerate(TEST_SETS)
    }
    held_out = {i for members in drawn for i in members}
    train = tuple(sample for i, sample in enumerate(samples) if i not in held_out)
    logger.info("corpus split", seed=seed, train=len(train), **{name: len(test) for name, test in tests.items()})
    return Splits(train=train, tests=tests)


def _row_codec(sample: LabeledSample) -> Codec:
    return LABELED_WITH_FORMAL if sample.formal_statement else CODECS[LabeledSample]


def write_splits(splits: Splits, out_dir: Union[str, Path]) -> Dict[str, Path]:
    """Writes train.jsonl and one <test set>.jsonl per test set. Returns the written paths by split name."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {}
    for name, rows in [(TRAIN, splits.train), *splits.tests.items()]:
        paths[name] = out_dir / f"{name}.jsonl"
        with open(paths[name], "w", encoding="utf-8", newline="\n") as f:
            write_jsonl((_row_codec(row).encode(row) for row in rows), f)
    return paths

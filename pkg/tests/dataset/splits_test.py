"""Tests for ddr.dataset.splits."""
import json
import warnings

import pytest

from ddr.dataset.splits import TEST_SETS, TRAIN, Lcg64, split_corpus, write_splits
from ddr.errors import ShortLevelWarning
from ddr.model import LabeledSample


def _corpus(per_level, levels=range(10)):
    return [LabeledSample(id=f"{level}-{i}", informal_statement="s", formal_statement="", difficulty=level)
            for level in levels for i in range(per_level)]


class TestLcg64:
    def test_Recurrence(self):
        rng = Lcg64(0)
        assert rng.next() == 1442695040888963407 >> 33
        assert rng.state == 1442695040888963407
        rng.next()
        assert rng.state == (6364136223846793005 * 1442695040888963407 + 1442695040888963407) % 2 ** 64

    def test_Shuffle(self):
        """A shuffle is a permutation, and the same seed gives the same one."""
        a, b = list(range(20)), list(range(20))
        Lcg64(42).shuffle(a)
        Lcg64(42).shuffle(b)
        assert a == b
        assert sorted(a) == list(range(20))
        assert a != list(range(20))


class TestSplitCorpus:
    def test_Sizes(self):
        splits = split_corpus(_corpus(150), seed=7)
        assert list(splits.tests) == list(TEST_SETS)
        for test in splits.tests.values():
            assert len(test) == 200
        assert len(splits.train) == 10 * 150 - 1000
        assert len(splits) == 1500

    def test_Disjoint(self):
        splits = split_corpus(_corpus(150), seed=7)
        ids = [s.id for s in splits.train] + [s.id for test in splits.tests.values() for s in test]
        assert len(set(ids)) == len(ids) == 1500

    def test_PairedLevels(self):
        splits = split_corpus(_corpus(150), seed=7)
        assert {s.difficulty for s in splits.tests["Diff01"]} == {0, 1}
        assert {s.difficulty for s in splits.tests["Diff89"]} == {8, 9}

    def test_Deterministic(self):
        assert split_corpus(_corpus(150), seed=7) == split_corpus(_corpus(150), seed=7)
        assert split_corpus(_corpus(150), seed=7) != split_corpus(_corpus(150), seed=8)

    def test_TrainOrder(self):
        """The train set keeps corpus order."""
        corpus = _corpus(150)
        positions = {s.id: i for i, s in enumerate(corpus)}
        train = split_corpus(corpus, seed=3).train
        assert [positions[s.id] for s in train] == sorted(positions[s.id] for s in train)

    def test_ShortLevel(self):
        corpus = _corpus(150, levels=[0, 2, 3, 4, 5, 6, 7, 8, 9]) + _corpus(40, levels=[1])
        with pytest.warns(ShortLevelWarning):
            splits = split_corpus(corpus, seed=7)
        assert len(splits.tests["Diff01"]) == 140
        assert not [s for s in splits.train if s.difficulty == 1]

    def test_PerLevel(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            splits = split_corpus(_corpus(10), seed=1, per_level=4)
        assert len(splits.tests["Diff45"]) == 8
        assert len(splits.train) == 60


class TestWriteSplits:
    def test_Files(self, tmp_path):
        splits = split_corpus(_corpus(12), seed=5, per_level=10)
        paths = write_splits(splits, tmp_path / "out")
        assert set(paths) == {TRAIN, *TEST_SETS}
        rows = [json.loads(line) for line in paths["Diff23"].read_text(encoding="utf-8").splitlines()]
        assert len(rows) == 20
        assert set(rows[0]) == {"id", "informal_statement", "dependencies", "difficulty"}
        assert len(paths[TRAIN].read_text(encoding="utf-8").splitlines()) == 20

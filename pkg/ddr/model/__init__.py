from .base import DELIM, SEP, Index, LibraryItem, check_identifier, components
from .core import (AggregateScore, CandidateSet, CorpusSample, DatasetStats, DependencyList, IndexInfo, LabeledSample,
                   LevelStats, MatchResult, MatchStatus, Prediction, RetrievalScore)

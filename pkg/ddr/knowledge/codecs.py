"""Encode and decode JSON documents as ddr model classes.

Codecs define the JSON schema of every record ddr reads or writes: library items, corpus samples, labeled samples,
predictions, match results and reports. Schema relationships are declared explicitly, with defined types, rather than
inferred from the dataclasses; this keeps wire names (e.g. "name" for LibraryItem.fqn) independent of attribute
names, and makes key order in written files deterministic.

JSON Lines helpers at the bottom of the module read and write one document per line.
"""
import abc
import enum
import json
from collections import ChainMap
from datetime import datetime
from typing import Any, Callable, Iterable, Iterator, Mapping, Optional, TextIO, Tuple, Type

from ddr.errors import MalformedLine
from ddr.model import (AggregateScore, CorpusSample, DependencyList, IndexInfo, LabeledSample, LevelStats,
                       LibraryItem, MatchResult, MatchStatus, Prediction, RetrievalScore)


class Codec(abc.ABC):
    """Base class for all Codecs."""

    # Implementation Note: JSON documents are dicts whose values may be scalars, lists, or dicts. Rather than express
    # that in type hints, subclasses define and enforce typing of encoded types and resulting documents or fragments.

    @abc.abstractmethod
    def encode(self, obj):
        """Converts a python object into a JSON-compatible document or fragment."""
        raise NotImplementedError()

    @abc.abstractmethod
    def decode(self, doc):
        """Converts a JSON-compatible document or fragment into a python object."""
        raise NotImplementedError()


class AsIsCodec(Codec):
    """No-op codec passes everything through encode and decode as-is."""

    def encode(self, obj):
        return obj

    def decode(self, doc):
        return doc


AS_IS = AsIsCodec()


class ListCodec(Codec):
    """Encodes/decodes a python iterable type to a json-compatible list."""

    def __init__(self, item_codec: Codec = None, list_type: Callable[[Iterable], Iterable] = tuple):
        self.list_type = list_type
        self.item_codec = item_codec or AS_IS

    def encode(self, items):
        return list(self.item_codec.encode(item) for item in items)

    def decode(self, doc):
        return self.list_type(self.item_codec.decode(item) for item in doc)


class PairCodec(Codec):
    """Encodes a 2-tuple as a json object with two named keys."""

    def __init__(self, first: str, second: str):
        self.first = first
        self.second = second

    def encode(self, pair):
        a, b = pair
        return {self.first: a, self.second: b}

    def decode(self, doc):
        return doc[self.first], doc[self.second]


class EnumCodec(Codec):
    """Encodes an Enum member as its value."""

    def __init__(self, enum_type: Type[enum.Enum]):
        self.enum_type = enum_type

    def encode(self, member):
        return member.value

    def decode(self, doc):
        return self.enum_type(doc)


class DateTimeCodec(Codec):
    """Encodes a datetime as an ISO 8601 string."""

    def encode(self, obj: datetime):
        return obj.isoformat()

    def decode(self, doc):
        return datetime.fromisoformat(doc)


class ObjectCodec(Codec):
    """Encodes/decodes a python instance to a json-compatible dict.

    Object attributes to be persisted must be specified explicitly; any attributes not in the codec_map are ignored
    on encode, and any keys not in the codec_map are ignored on decode. Keys are written in codec_map order, parent
    attributes first.
    """

    def __init__(self,
                 clazz: Type,
                 codec_map: Mapping[str, Codec],
                 parent: Optional["ObjectCodec"] = None,
                 rename: Mapping[str, str] = None,
                 keep_none: bool = False,
                 defaults: Mapping[str, Any] = None):
        """Initialize an ObjectCodec.

        Args:
            clazz: The type of object being encoded.
            codec_map: specifies all object attributes included in an encoded document, with corresponding codecs.
            parent: (optional) codec extended by this codec. Typically the codec for a superclass of `clazz`.
            rename: (optional) maps object attributes to different keys in an encoded document.
            keep_none: write attributes whose value is None as JSON null, rather than omitting them.
            defaults: (optional) constructor arguments supplied when the document lacks them.
        """
        self.clazz = clazz
        self.keep_none = keep_none
        self.defaults = dict(defaults or {})
        if parent:
            self.codec_map = ChainMap(codec_map, parent.codec_map)
            self.encoded_name = ChainMap({}, parent.encoded_name)
            self.decoded_name = ChainMap({}, parent.decoded_name)
        else:
            self.codec_map = codec_map or {}
            self.encoded_name = {}
            self.decoded_name = {}

        if rename:
            for decoded, encoded in rename.items():
                self.encoded_name[decoded] = encoded
                self.decoded_name[encoded] = decoded

    def encode(self, obj):
        doc = {}
        for k, codec in self.codec_map.items():
            v = getattr(obj, k, None)
            if v is not None:
                doc[self.encoded_name.get(k, k)] = codec.encode(v)
            elif self.keep_none:
                doc[self.encoded_name.get(k, k)] = None
        return doc

    def decode(self, doc):
        args = dict(self.defaults)
        for k, v in doc.items():
            k = self.decoded_name.get(k, k)
            codec = self.codec_map.get(k)
            if codec is not None:
                args[k] = v if v is None else codec.decode(v)
        return self.clazz(**args)


STRINGS = ListCodec()

# Pre-defined codecs for model types. This dict may be extended by other imported packages.
CODECS = {
    MatchStatus: EnumCodec(MatchStatus),
    datetime: DateTimeCodec(),
}
CODECS[LibraryItem] = ObjectCodec(
    LibraryItem,
    codec_map={
        'fqn': AS_IS,
        'kind': AS_IS,
        'signature': AS_IS,
        'doc': AS_IS,
    },
    rename={'fqn': 'name'})
CODECS[MatchResult] = ObjectCodec(
    MatchResult,
    codec_map={
        'query': AS_IS,
        'status': CODECS[MatchStatus],
        'resolved': STRINGS,
        'partial_hits': STRINGS,
        'error': AS_IS,
    })
CODECS[IndexInfo] = ObjectCodec(
    IndexInfo,
    codec_map={
        'item_count': AS_IS,
        'text_bytes': AS_IS,
        'built_at': CODECS[datetime],
        'format_version': AS_IS,
    })
CODECS[DependencyList] = ObjectCodec(
    DependencyList,
    codec_map={
        'dependencies': STRINGS,
        'dropped': ListCodec(item_codec=PairCodec('candidate', 'reason')),
    })
CODECS[CorpusSample] = ObjectCodec(
    CorpusSample,
    codec_map={
        'id': AS_IS,
        'informal_statement': AS_IS,
        'formal_statement': AS_IS,
        'difficulty': AS_IS,
    })
# The released dataset row: the informal -> dependencies training pair. Reading one back leaves formal_statement
# empty unless the file retained it.
CODECS[LabeledSample] = ObjectCodec(
    LabeledSample,
    codec_map={
        'id': AS_IS,
        'informal_statement': AS_IS,
        'dependencies': STRINGS,
        'difficulty': AS_IS,
    },
    defaults={'formal_statement': ''})
LABELED_WITH_FORMAL = ObjectCodec(
    LabeledSample,
    codec_map={
        'id': AS_IS,
        'informal_statement': AS_IS,
        'formal_statement': AS_IS,
        'dependencies': STRINGS,
        'difficulty': AS_IS,
    })
CODECS[Prediction] = ObjectCodec(
    Prediction,
    codec_map={
        'id': AS_IS,
        'dependencies': STRINGS,
    })
CODECS[RetrievalScore] = ObjectCodec(
    RetrievalScore,
    codec_map={
        'precision': AS_IS,
        'recall': AS_IS,
        'f1': AS_IS,
    })
CODECS[AggregateScore] = ObjectCodec(
    AggregateScore,
    codec_map={
        'mean': CODECS[RetrievalScore],
        'std': CODECS[RetrievalScore],
        'n': AS_IS,
    })
CODECS[LevelStats] = ObjectCodec(
    LevelStats,
    codec_map={
        'level': AS_IS,
        'num': AS_IS,
        'depend_rate': AS_IS,
        'depend_length': AS_IS,
        'empty': AS_IS,
    })


def encode(obj) -> Any:
    """Encodes obj with the registered codec for its type."""
    return CODECS[type(obj)].encode(obj)


def dumps(doc) -> str:
    """Serializes one document as a single JSON line: UTF-8 text as-is, keys in codec order."""
    return json.dumps(doc, ensure_ascii=False)


def write_jsonl(docs: Iterable, sink: TextIO):
    for doc in docs:
        sink.write(dumps(doc))
        sink.write("\n")


def iter_lines(source: Iterable[str]) -> Iterator[Tuple[int, str]]:
    """Yields (1-based line number, line) for every non-blank line."""
    for line_no, line in enumerate(source, start=1):
        line = line.strip()
        if line:
            yield line_no, line


def parse_line(line_no: int, line: str) -> dict:
    """Parses one JSON Lines record, which must be a JSON object.

    Raises:
        MalformedLine if the line is not a JSON object.
    """
    try:
        doc = json.loads(line)
    except json.JSONDecodeError as e:
        raise MalformedLine(line_no, f"invalid JSON ({e.msg})") from None
    if not isinstance(doc, dict):
        raise MalformedLine(line_no, "not a JSON object")
    return doc


def read_jsonl(source: Iterable[str], codec: Codec) -> Iterator[Any]:
    """Decodes every record of a JSON Lines source. The first bad record raises MalformedLine."""
    for line_no, line in iter_lines(source):
        try:
            yield codec.decode(parse_line(line_no, line))
        except (TypeError, KeyError, ValueError) as e:
            if isinstance(e, MalformedLine):
                raise
            raise MalformedLine(line_no, str(e)) from None

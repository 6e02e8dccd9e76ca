"""Versioned binary serialization of a DependencyIndex.

File layout, all integers little-endian:

    magic           6 bytes   b"DDRIX\\x01"
    format_version  u32       1
    text_bytes      u64
    text            text_bytes bytes
    sa_len          u64
    suffix_array    sa_len x u64
    item_count      u64
    item_offsets    item_count x u64
    items           item_count x (fqn, kind, signature, doc), each a u32 length + UTF-8 bytes;
                    length 0xFFFFFFFF marks an absent optional field
    checksum        u64       FNV-1a 64 of every preceding byte

The build timestamp is not stored, so identical libraries serialize to identical bytes.
"""
import os
import struct
from datetime import datetime, timezone
from pathlib import Path
from typing import BinaryIO, List, Optional, Union

import numpy as np
import structlog

from ddr.calc.dependency_index import FORMAT_VERSION, DependencyIndex
from ddr.errors import BadMagic, ChecksumMismatch, IndexFormatError, TruncatedFile, UnsupportedVersion
from ddr.model import LibraryItem

logger = structlog.get_logger(__name__)

MAGIC = b"DDRIX\x01"
ABSENT = 0xFFFFFFFF

FNV_OFFSET = 0xcbf29ce484222325
FNV_PRIME = 0x100000001b3
_MASK = (1 << 64) - 1

_u32 = struct.Struct("<I")
_u64 = struct.Struct("<Q")
_U64_ARRAY = np.dtype("<u8")

PathOrFile = Union[str, Path, BinaryIO]


def fnv1a_64(data: bytes, h: int = FNV_OFFSET) -> int:
    """FNV-1a 64-bit hash of data, continuing from h."""
    for b in data:
        h = ((h ^ b) * FNV_PRIME) & _MASK
    return h


def _field(value: Optional[str]) -> bytes:
    if value is None:
        return _u32.pack(ABSENT)
    encoded = value.encode("utf-8")
    return _u32.pack(len(encoded)) + encoded


def dumps_index(index: DependencyIndex) -> bytes:
    """Serializes an index to bytes."""
    parts = [
        MAGIC,
        _u32.pack(FORMAT_VERSION),
        _u64.pack(len(index.text)),
        index.text,
        _u64.pack(len(index.suffix_array)),
        index.suffix_array.astype(_U64_ARRAY).tobytes(),
        _u64.pack(len(index.items)),
        index.item_offsets.astype(_U64_ARRAY).tobytes(),
    ]
    for item in index.items:
        parts.extend(_field(value) for value in (item.fqn, item.kind, item.signature, item.doc))
    body = b"".join(parts)
    return body + _u64.pack(fnv1a_64(body))


def save_index(index: DependencyIndex, sink: PathOrFile):
    """Writes an index to a path or a binary file object."""
    data = dumps_index(index)
    if isinstance(sink, (str, Path)):
        with open(sink, "wb") as f:
            f.write(data)
    else:
        sink.write(data)
    logger.info("index saved", items=len(index.items), file_bytes=len(data))


class _Reader:
    """Cursor over serialized bytes; running off the end is a TruncatedFile."""

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, size: int, what: str) -> bytes:
        end = self.pos + size
        if end > len(self.data):
            raise TruncatedFile(f"File ends inside {what} (need {end} bytes, have {len(self.data)})")
        chunk = self.data[self.pos:end]
        self.pos = end
        return chunk

    def u32(self, what: str) -> int:
        return _u32.unpack(self.take(_u32.size, what))[0]

    def u64(self, what: str) -> int:
        return _u64.unpack(self.take(_u64.size, what))[0]

    def u64_array(self, count: int, what: str) -> np.ndarray:
        if count > len(self.data):
            raise TruncatedFile(f"File too short for {count} entries of {what}")
        return np.frombuffer(self.take(count * _u64.size, what), dtype=_U64_ARRAY).astype(np.int64)

    def field(self, what: str) -> Optional[str]:
        size = self.u32(what)
        if size == ABSENT:
            return None
        try:
            return self.take(size, what).decode("utf-8")
        except UnicodeDecodeError:
            raise IndexFormatError(f"{what} is not valid UTF-8") from None


def loads_index(data: bytes, built_at: Optional[datetime] = None) -> DependencyIndex:
    """Deserializes an index from bytes.

    Raises:
        BadMagic, UnsupportedVersion, TruncatedFile, ChecksumMismatch, or IndexFormatError for other inconsistencies.
    """
    head = bytes(data[:len(MAGIC)])
    if head != MAGIC[:len(head)]:
        raise BadMagic(f"Not a ddr index file (magic {head!r})")
    reader = _Reader(data)
    reader.take(len(MAGIC), "magic")
    version = reader.u32("format_version")
    if version != FORMAT_VERSION:
        raise UnsupportedVersion(f"Index format version {version}; this build reads version {FORMAT_VERSION}")

    text = reader.take(reader.u64("text_bytes"), "text")
    suffix_array = reader.u64_array(reader.u64("sa_len"), "suffix_array")
    item_count = reader.u64("item_count")
    item_offsets = reader.u64_array(item_count, "item_offsets")
    items: List[LibraryItem] = []
    for i in range(item_count):
        fqn, kind, signature, doc = (reader.field(f"item {i} {name}") for name in ("fqn", "kind", "signature", "doc"))
        if fqn is None:
            raise IndexFormatError(f"Item {i} has no fqn")
        items.append(LibraryItem(fqn, kind=kind, signature=signature, doc=doc))

    body_end = reader.pos
    stored = reader.u64("checksum")
    if reader.pos != len(data):
        raise IndexFormatError(f"{len(data) - reader.pos} unexpected bytes after checksum")
    computed = fnv1a_64(data[:body_end])
    if stored != computed:
        raise ChecksumMismatch(f"Stored checksum {stored:#018x} != computed {computed:#018x}")

    if len(suffix_array) != len(text):
        raise IndexFormatError(f"Suffix array length {len(suffix_array)} != text length {len(text)}")
    return DependencyIndex(text, suffix_array, item_offsets, items, built_at=built_at)


def load_index(source: PathOrFile) -> DependencyIndex:
    """Reads an index from a path or a binary file object.

    A file loaded from a path reports that file's modification time as built_at; otherwise the load time.
    """
    if isinstance(source, (str, Path)):
        with open(source, "rb") as f:
            data = f.read()
        built_at = datetime.fromtimestamp(os.path.getmtime(source), tz=timezone.utc)
    else:
        data = source.read()
        built_at = datetime.now(timezone.utc)
    index = loads_index(data, built_at=built_at)
    logger.info("index loaded", items=len(index.items), file_bytes=len(data))
    return index

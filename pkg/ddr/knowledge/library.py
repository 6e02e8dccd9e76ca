"""Reads library identifier dumps.

Two formats are accepted:
- JSON Lines, one object per line: {"name": ..., "kind": ..., "signature": ..., "doc": ...}; only name is required.
- Plain text, one fully-qualified identifier per line.
"""
from pathlib import Path
from typing import Iterable, Iterator, List, Optional, Union

from ddr.errors import MalformedLine
from ddr.knowledge.codecs import CODECS, iter_lines, parse_line
from ddr.model import LibraryItem

JSONL = "jsonl"
TEXT = "text"


def _sniff(first_line: str) -> str:
    return JSONL if first_line.lstrip().startswith("{") else TEXT


def parse_library(lines: Iterable[str], fmt: Optional[str] = None) -> Iterator[LibraryItem]:
    """Parses library items from lines of text, in file order.

    Args:
        lines: Lines of a library dump.
        fmt: JSONL or TEXT. If None, the format is detected from the first non-blank line.

    Raises:
        MalformedLine if a JSONL record is not an object or lacks a string "name".
    """
    codec = CODECS[LibraryItem]
    for line_no, line in iter_lines(lines):
        if fmt is None:
            fmt = _sniff(line)
        if fmt == TEXT:
            yield LibraryItem(line)
            continue
        doc = parse_line(line_no, line)
        if not isinstance(doc.get("name"), str):
            raise MalformedLine(line_no, "missing string field 'name'")
        for key in ("kind", "signature", "doc"):
            if doc.get(key) is not None and not isinstance(doc[key], str):
                raise MalformedLine(line_no, f"field {key!r} must be a string or null")
        yield codec.decode(doc)


def read_library(path: Union[str, Path], fmt: Optional[str] = None) -> List[LibraryItem]:
    """Reads a library dump file. The format is detected from the content unless fmt is given."""
    with open(path, encoding="utf-8") as f:
        return list(parse_library(f, fmt))

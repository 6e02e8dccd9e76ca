"""Library items and the identifier rules every index and matcher relies on."""
from dataclasses import dataclass, field
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from ddr.errors import InvalidIdentifier

DELIM = b"\x01"
"""Separates identifiers in the concatenated index text. Never legal inside an identifier."""

SEP = "."
"""Separates the components of a qualified identifier."""


def check_identifier(fqn: str) -> str:
    """Validates a dot-separated identifier, returning it unchanged.

    Raises:
        InvalidIdentifier if the identifier is empty, is not encodable as UTF-8, contains the delimiter byte, or has
        an empty component (leading, trailing, or doubled dots).
    """
    if not isinstance(fqn, str) or not fqn:
        raise InvalidIdentifier(str(fqn), "empty")
    try:
        fqn.encode("utf-8")
    except UnicodeEncodeError:
        raise InvalidIdentifier(fqn, "not valid UTF-8") from None
    if DELIM.decode() in fqn:
        raise InvalidIdentifier(fqn, "contains the delimiter byte 0x01")
    if "" in fqn.split(SEP):
        raise InvalidIdentifier(fqn, "empty dot-component")
    return fqn


def components(identifier: str) -> Tuple[str, ...]:
    """Splits a validated identifier into its dot-separated components."""
    return tuple(check_identifier(identifier).split(SEP))


@dataclass(frozen=True, eq=True, order=True)
class LibraryItem:
    """One formal object of a library: its fully-qualified name, plus optional metadata.

    Identity is the fqn alone. Two items with the same name and different metadata are the same item, which is what
    lets an Index drop re-exported duplicates.

    Attributes:
        fqn: Fully-qualified dot-separated identifier, e.g. "Nat.sqrt".
        kind: Declaration kind, e.g. "theorem" or "def".
        signature: Type signature or statement, as source text.
        doc: Documentation string.
    """
    fqn: str
    kind: Optional[str] = field(default=None, compare=False)
    signature: Optional[str] = field(default=None, compare=False)
    doc: Optional[str] = field(default=None, compare=False)

    def __repr__(self):
        return f"[{self.fqn}]{' (' + self.kind + ')' if self.kind else ''}"

    @property
    def components(self) -> Tuple[str, ...]:
        return tuple(self.fqn.split(SEP))

    @property
    def short_name(self) -> str:
        """The last component, i.e. the name as it is usually written unqualified."""
        return self.fqn.rsplit(SEP, 1)[-1]


class Index(Sequence[LibraryItem]):
    """A list of LibraryItems with set semantics, keyed by fqn.

    Any item appears at most once and therefore has a unique numerical position, which is its item id within a
    DependencyIndex. Random access by position is supported directly by subscripting; by item with index_of().
    """

    def __init__(self, items: Optional[Iterable[LibraryItem]] = None):
        self._items: List[LibraryItem] = []
        self._index = {}
        if items is not None:
            self.update(items)

    def __len__(self) -> int:
        return len(self._items)

    def __iter__(self) -> Iterator[LibraryItem]:
        return iter(self._items)

    def __contains__(self, item) -> bool:
        """Constant-time containment test, by item or by fqn."""
        if isinstance(item, str):
            item = LibraryItem(item)
        return item in self._index

    def __getitem__(self, index: Union[int, slice]) -> LibraryItem:
        return self._items[index]

    def add(self, item: LibraryItem) -> bool:
        """Adds an item using set semantics. Returns False (and keeps the first) if its fqn is already present."""
        if item in self._index:
            return False
        self._index[item] = len(self._items)
        self._items.append(item)
        return True

    def update(self, items: Iterable[LibraryItem]):
        for item in items:
            self.add(item)

    def index_of(self, item: Union[LibraryItem, str]) -> Optional[int]:
        """Returns the numerical position of the item (or fqn), or None if not present."""
        if isinstance(item, str):
            item = LibraryItem(item)
        return self._index.get(item, None)

    def names(self) -> List[str]:
        return [item.fqn for item in self._items]

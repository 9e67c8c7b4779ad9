"""Input data model: parsing, deduplication, grouping and pruning.

The estimator works on two relations: a left one with schema (a, b) and a
right one with schema (b, c), joined on the shared attribute b.  The result
whose size we estimate is the set of distinct (a, c) pairs, equivalently the
support of the boolean matrix product.  Before estimation the inputs are
grouped by b-value and tuples whose b-value has no match on the other side
are dropped.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

MAX_ATTRIBUTE = (1 << 32) - 1

EDGES = "edges"
FIMI = "fimi"
MTX_PATTERN = "mtx-pattern"
FORMATS = (EDGES, FIMI, MTX_PATTERN)


class ParseError(ValueError):
    """Malformed input line; carries the 1-based line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class RangeError(ValueError):
    """Attribute value outside the unsigned 32-bit range."""

    def __init__(self, value: int, line: int):
        super().__init__(f"line {line}: attribute value {value} outside unsigned 32-bit range")
        self.value = value
        self.line = line


class Side(enum.Enum):
    LEFT = "left"
    RIGHT = "right"


@dataclass(frozen=True)
class Relation:
    """A deduplicated set of binary tuples over 32-bit attribute values.

    ``Side.LEFT`` means schema (a, b), join attribute in the second position;
    ``Side.RIGHT`` means schema (b, c), join attribute first.  Callers with
    attribute domains wider than 32 bits must pre-hash their values down; no
    compaction happens here.
    """

    side: Side
    tuples: frozenset[tuple[int, int]]

    def __len__(self) -> int:
        return len(self.tuples)

    def mirrored(self) -> "Relation":
        """Swap attribute positions and flip the side tag.

        A single parsed relation can serve as both join inputs through this:
        the self-join of r is group_and_prune(r, r.mirrored()).
        """
        other = Side.RIGHT if self.side is Side.LEFT else Side.LEFT
        return Relation(other, frozenset((y, x) for x, y in self.tuples))


def _check_value(value: int, line: int) -> int:
    if value < 0 or value > MAX_ATTRIBUTE:
        raise RangeError(value, line)
    return value


def _int_field(token: str, line: int) -> int:
    try:
        value = int(token)
    except ValueError:
        raise ParseError(f"expected an integer, got {token!r}", line) from None
    return _check_value(value, line)


def _parse_edges(text: str) -> set[tuple[int, int]]:
    tuples: set[tuple[int, int]] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if len(fields) != 2:
            raise ParseError(f"expected two fields, got {len(fields)}", lineno)
        tuples.add((_int_field(fields[0], lineno), _int_field(fields[1], lineno)))
    return tuples


def _parse_fimi(text: str) -> set[tuple[int, int]]:
    # One transaction per line; tuple = (0-based line index, item id).
    tuples: set[tuple[int, int]] = set()
    for row, raw in enumerate(text.splitlines()):
        _check_value(row, row + 1)
        for token in raw.split():
            tuples.add((row, _int_field(token, row + 1)))
    return tuples


def _parse_mtx(text: str) -> set[tuple[int, int]]:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("%%MatrixMarket"):
        raise ParseError("missing %%MatrixMarket header", 1)
    header = lines[0].lower().split()
    if "coordinate" not in header or "pattern" not in header:
        raise ParseError("only coordinate pattern matrices are supported", 1)
    if "general" not in header:
        raise ParseError("only general symmetry is supported", 1)

    dims: tuple[int, int, int] | None = None
    tuples: set[tuple[int, int]] = set()
    seen = 0
    for lineno, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        fields = line.split()
        if dims is None:
            if len(fields) != 3:
                raise ParseError("dimension line must be 'rows cols entries'", lineno)
            rows, cols, nnz = (_int_field(f, lineno) for f in fields)
            dims = (rows, cols, nnz)
            continue
        if len(fields) != 2:
            raise ParseError(f"expected 'row col', got {len(fields)} fields", lineno)
        r, c = (_int_field(f, lineno) for f in fields)
        if not (1 <= r <= dims[0]) or not (1 <= c <= dims[1]):
            raise ParseError(f"entry ({r}, {c}) outside declared {dims[0]}x{dims[1]} shape", lineno)
        seen += 1
        if seen > dims[2]:
            raise ParseError(f"more entries than the declared {dims[2]}", lineno)
        tuples.add((r, c))
    if dims is None:
        raise ParseError("missing dimension line", len(lines) + 1)
    if seen < dims[2]:
        raise ParseError(f"declared {dims[2]} entries, found {seen}", len(lines) + 1)
    return tuples


_PARSERS = {EDGES: _parse_edges, FIMI: _parse_fimi, MTX_PATTERN: _parse_mtx}


def parse_relation(text: str | bytes, fmt: str, side: Side = Side.LEFT) -> Relation:
    """Parse relation text in one of the supported formats.

    Duplicate tuples collapse silently.  Raises :class:`ParseError` on a
    malformed line and :class:`RangeError` on values beyond 32 bits.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        parser = _PARSERS[fmt]
    except KeyError:
        raise ValueError(f"unknown input format: {fmt!r}") from None
    return Relation(side, frozenset(parser(text)))


def load_relation(path: str, fmt: str, side: Side = Side.LEFT) -> Relation:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_relation(fh.read(), fmt, side)


def to_edges_text(relation: Relation) -> str:
    """Serialize to the edge-list format (sorted; parse round-trips)."""
    return "".join(f"{x} {y}\n" for x, y in sorted(relation.tuples))


@dataclass(frozen=True)
class Group:
    """Distinct left/right attribute values co-occurring with one join value.

    The arrays are sorted, duplicate-free, read-only uint64 views; the
    join-project result is the union over groups of left x right.
    """

    join_value: int
    left_values: np.ndarray
    right_values: np.ndarray

    @property
    def product(self) -> int:
        return self.left_values.size * self.right_values.size


@dataclass(frozen=True)
class GroupedInput:
    """Pruned, grouped join input; immutable and safe to share across runs."""

    groups: tuple[Group, ...]
    tuple_count: int  # surviving input tuples: sum over groups of |left| + |right|
    max_group_product: int
    total_product: int

    def __len__(self) -> int:
        return len(self.groups)


def _frozen_array(values: set[int]) -> np.ndarray:
    arr = np.array(sorted(values), dtype=np.uint64)
    arr.setflags(write=False)
    return arr


def group_and_prune(r1: Relation, r2: Relation) -> GroupedInput:
    """Group both relations by join value, keeping only values present in both.

    Tuples whose join value has no partner on the other side cannot produce
    result pairs and are dropped; the exact join-project size is unchanged.
    Group order is canonical (ascending join value) but nothing downstream
    depends on it.
    """
    if r1.side is not Side.LEFT:
        raise ValueError("first relation must be tagged Side.LEFT")
    if r2.side is not Side.RIGHT:
        raise ValueError("second relation must be tagged Side.RIGHT")

    left_by_b: dict[int, set[int]] = {}
    for a, b in r1.tuples:
        left_by_b.setdefault(b, set()).add(a)
    right_by_b: dict[int, set[int]] = {}
    for b, c in r2.tuples:
        right_by_b.setdefault(b, set()).add(c)

    groups = []
    tuple_count = 0
    max_product = 0
    total_product = 0
    for b in sorted(left_by_b.keys() & right_by_b.keys()):
        left = _frozen_array(left_by_b[b])
        right = _frozen_array(right_by_b[b])
        groups.append(Group(b, left, right))
        tuple_count += left.size + right.size
        product = left.size * right.size
        total_product += product
        if product > max_product:
            max_product = product
    return GroupedInput(tuple(groups), tuple_count, max_product, total_product)

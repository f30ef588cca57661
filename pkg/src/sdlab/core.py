"""Finite concept classes and the search states built on them.

A concept class is a dense ``m x n`` table of label ids: row ``i`` is concept
``i`` and column ``j`` is domain point ``j``.  Version spaces and active point
sets are integer bit-sets (bit ``i`` set means index ``i`` is present).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import kernel


class ClassFormatError(ValueError):
    """Raised for malformed concept-class tables or files."""


class StateError(ValueError):
    """Raised when an operation needs a non-empty version space."""


def _indices(bits: int) -> list[int]:
    out = []
    i = 0
    while bits:
        if bits & 1:
            out.append(i)
        bits >>= 1
        i += 1
    return out


@dataclass(frozen=True)
class VersionSpace:
    bits: int

    @classmethod
    def full(cls, size: int) -> "VersionSpace":
        return cls((1 << size) - 1)

    @classmethod
    def of(cls, indices: Iterable[int]) -> "VersionSpace":
        b = 0
        for i in indices:
            b |= 1 << i
        return cls(b)

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __contains__(self, i: int) -> bool:
        return bool(self.bits >> i & 1)

    def __bool__(self) -> bool:
        return self.bits != 0

    def indices(self) -> list[int]:
        return _indices(self.bits)


@dataclass(frozen=True)
class ActiveSet:
    bits: int

    @classmethod
    def full(cls, size: int) -> "ActiveSet":
        return cls((1 << size) - 1)

    @classmethod
    def of(cls, indices: Iterable[int]) -> "ActiveSet":
        b = 0
        for i in indices:
            b |= 1 << i
        return cls(b)

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __contains__(self, i: int) -> bool:
        return bool(self.bits >> i & 1)

    def __bool__(self) -> bool:
        return self.bits != 0

    def indices(self) -> list[int]:
        return _indices(self.bits)

    def without(self, point: int) -> "ActiveSet":
        return ActiveSet(self.bits & ~(1 << point))


@dataclass(frozen=True)
class LabeledExample:
    point: int
    label: int


@dataclass(frozen=True, eq=False)
class ConceptClass:
    """A finite set of functions from ``num_points`` points to ``num_labels`` labels.

    Rows must be pairwise distinct; use :meth:`from_rows` with ``dedupe=True``
    to build a class from a list that may contain repeats.
    """

    table: np.ndarray
    num_labels: int
    point_names: tuple[str, ...] | None = None
    label_names: tuple[str, ...] | None = None
    name: str = "anonymous"
    _masks: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        t = np.ascontiguousarray(self.table, dtype=np.int32)
        if t.ndim != 2:
            raise ClassFormatError("table must be two-dimensional")
        object.__setattr__(self, "table", t)
        t.setflags(write=False)
        m, n = t.shape
        if m and (t.min() < 0 or t.max() >= self.num_labels):
            raise ClassFormatError(f"table entries must lie in [0, {self.num_labels})")
        if m > 1 and n and self.num_labels < 2:
            raise ClassFormatError("non-degenerate classes need at least two labels")
        if m > 1 and len(np.unique(t, axis=0)) != m:
            raise ClassFormatError("concepts (rows) must be pairwise distinct")
        if self.point_names is not None and len(self.point_names) != n:
            raise ClassFormatError("point_names length does not match num_points")
        if self.label_names is not None and len(self.label_names) != self.num_labels:
            raise ClassFormatError("label_names length does not match num_labels")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], num_points: int | None = None,
                  num_labels: int | None = None, dedupe: bool = False, **kw) -> "ConceptClass":
        rows = [tuple(int(v) for v in r) for r in rows]
        if num_points is None:
            num_points = len(rows[0]) if rows else 0
        if any(len(r) != num_points for r in rows):
            raise ClassFormatError("ragged rows")
        if dedupe:
            rows = list(dict.fromkeys(rows))
        if num_labels is None:
            num_labels = max(2, 1 + max((max(r) for r in rows if r), default=1))
        table = np.array(rows, dtype=np.int32).reshape(len(rows), num_points)
        return cls(table, num_labels, **kw)

    @property
    def num_concepts(self) -> int:
        return self.table.shape[0]

    @property
    def num_points(self) -> int:
        return self.table.shape[1]

    def __len__(self) -> int:
        return self.num_concepts

    def __eq__(self, other):
        if not isinstance(other, ConceptClass):
            return NotImplemented
        return (self.num_labels == other.num_labels
                and self.table.shape == other.table.shape
                and bool(np.array_equal(self.table, other.table)))

    def __hash__(self):
        return hash((self.table.shape, self.table.tobytes(), self.num_labels))

    @property
    def is_binary(self) -> bool:
        return self.num_labels == 2

    def full_state(self) -> tuple[VersionSpace, ActiveSet]:
        return VersionSpace.full(self.num_concepts), ActiveSet.full(self.num_points)

    def row_set(self) -> set[tuple[int, ...]]:
        return {tuple(r) for r in self.table.tolist()}

    def mask(self, point: int, label: int) -> int:
        """Bit-set of concepts labelling ``point`` with ``label``."""
        key = (point, label)
        m = self._masks.get(key)
        if m is None:
            if len(self._masks) > 4096:
                self._masks.clear()
            hit = self.table[:, point] == label
            m = int.from_bytes(np.packbits(hit, bitorder="little").tobytes(), "little")
            self._masks[key] = m
        return m

    def subtable(self, vs: VersionSpace, active: ActiveSet) -> np.ndarray:
        rows = vs.indices()
        cols = active.indices()
        return self.table[np.ix_(rows, cols)]

    def restricted(self, points: Sequence[int], name: str | None = None) -> "ConceptClass":
        """The class projected onto ``points`` (deduplicated)."""
        sub = np.unique(self.table[:, list(points)], axis=0) if self.num_concepts else \
            np.zeros((0, len(points)), dtype=np.int32)
        names = None if self.point_names is None else tuple(self.point_names[p] for p in points)
        return ConceptClass(sub, self.num_labels, names, self.label_names,
                            name or f"{self.name}|{list(points)}")

    # -- serialization -------------------------------------------------
    def to_json(self) -> dict:
        d = {"num_points": self.num_points, "num_labels": self.num_labels,
             "table": self.table.tolist()}
        if self.point_names is not None:
            d["points"] = list(self.point_names)
        if self.label_names is not None:
            d["labels"] = list(self.label_names)
        return d

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))

    @classmethod
    def from_json(cls, d: dict, dedupe: bool = False, name: str = "file") -> "ConceptClass":
        try:
            n = int(d["num_points"])
            L = int(d["num_labels"])
            table = d["table"]
        except (KeyError, TypeError, ValueError) as e:
            raise ClassFormatError(f"missing or invalid field: {e}") from None
        if not isinstance(table, list) or any(not isinstance(r, list) for r in table):
            raise ClassFormatError("table must be a list of rows")
        for i, r in enumerate(table):
            if len(r) != n:
                raise ClassFormatError(f"row {i} has {len(r)} entries, expected {n}")
            for v in r:
                if not isinstance(v, int) or isinstance(v, bool) or not 0 <= v < L:
                    raise ClassFormatError(f"row {i} has out-of-range entry {v!r}")
        rows = [tuple(r) for r in table]
        if len(set(rows)) != len(rows):
            if not dedupe:
                raise ClassFormatError("duplicate rows (pass dedupe=True to merge them)")
            rows = list(dict.fromkeys(rows))
        points = d.get("points")
        labels = d.get("labels")
        return cls(np.array(rows, dtype=np.int32).reshape(len(rows), n), L,
                   tuple(points) if points is not None else None,
                   tuple(labels) if labels is not None else None, name)

    @classmethod
    def load(cls, path: str | Path, dedupe: bool = False) -> "ConceptClass":
        try:
            d = json.loads(Path(path).read_text())
        except json.JSONDecodeError as e:
            raise ClassFormatError(f"{path}: not valid JSON ({e})") from None
        return cls.from_json(d, dedupe=dedupe, name=Path(path).stem)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps() + "\n")


def _check_example(cls: ConceptClass, ex: LabeledExample) -> None:
    if not 0 <= ex.point < cls.num_points:
        raise ValueError(f"point {ex.point} out of range [0, {cls.num_points})")
    if not 0 <= ex.label < cls.num_labels:
        raise ValueError(f"label {ex.label} out of range [0, {cls.num_labels})")


def restrict(cls: ConceptClass, vs: VersionSpace, ex: LabeledExample) -> VersionSpace:
    """Concepts of ``vs`` that label ``ex.point`` with ``ex.label``."""
    _check_example(cls, ex)
    return VersionSpace(vs.bits & cls.mask(ex.point, ex.label))


def realizable_labels(cls: ConceptClass, vs: VersionSpace, point: int) -> set[int]:
    if not vs:
        raise StateError("empty version space has no realizable labels")
    if not 0 <= point < cls.num_points:
        raise ValueError(f"point {point} out of range")
    rows = vs.indices()
    return {int(v) for v in np.unique(cls.table[rows, point])}


def forced_point_reduction(cls: ConceptClass, vs: VersionSpace, active: ActiveSet) -> ActiveSet:
    """Drop active points on which every concept of ``vs`` agrees."""
    if not vs:
        return active
    rows = vs.indices()
    keep = 0
    for p in active.indices():
        col = cls.table[rows, p]
        if (col != col[0]).any():
            keep |= 1 << p
    return ActiveSet(keep)


def canonical_key(cls: ConceptClass, vs: VersionSpace, active: ActiveSet):
    """Memo key of a search state.

    Forced points are dropped, points with identical label partitions of
    ``vs`` are merged, and rows/columns are put in a sorted normal form.
    Equal keys imply isomorphic games.
    """
    if not vs:
        return ("empty",)
    key, _ = kernel.normalize(cls.subtable(vs, active))
    return key

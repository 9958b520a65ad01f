"""Exact linear algebra over GF(2) with bit-packed rows.

Rows and vectors are Python integers used as bitsets: bit ``j`` holds the
entry in column ``j``.  XOR of two integers is a word-parallel row
operation, so elimination cost scales with the number of machine words.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

import numpy as np

__all__ = [
    "BitVector",
    "BitMatrix",
    "rank",
    "kernel_basis",
    "solve",
    "Subspace",
    "bits",
]


def bits(x: int) -> Iterator[int]:
    """Yield the positions of set bits of ``x`` in increasing order."""
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


@dataclass(frozen=True)
class BitVector:
    """A vector in GF(2)^length stored as an integer bitset."""

    length: int
    value: int = 0

    def __post_init__(self):
        if self.length < 0:
            raise ValueError("length must be non-negative")
        if self.value < 0 or self.value >> self.length:
            raise ValueError("support exceeds vector length")

    @classmethod
    def from_support(cls, length: int, support: Iterable[int]) -> "BitVector":
        v = 0
        for i in support:
            if not 0 <= i < length:
                raise ValueError(f"position {i} outside length {length}")
            v ^= 1 << i
        return cls(length, v)

    @classmethod
    def from_array(cls, arr) -> "BitVector":
        arr = np.asarray(arr).reshape(-1)
        return cls.from_support(len(arr), np.flatnonzero(arr & 1).tolist())

    @property
    def support(self) -> frozenset:
        return frozenset(bits(self.value))

    def to_array(self) -> np.ndarray:
        out = np.zeros(self.length, dtype=np.uint8)
        out[list(bits(self.value))] = 1
        return out

    def is_zero(self) -> bool:
        return self.value == 0

    def __add__(self, other: "BitVector") -> "BitVector":
        if other.length != self.length:
            raise ValueError("length mismatch")
        return BitVector(self.length, self.value ^ other.value)


@dataclass(frozen=True)
class BitMatrix:
    """A rows x cols matrix over GF(2); ``data[i]`` is the bitset of row ``i``."""

    rows: int
    cols: int
    data: tuple = ()

    def __post_init__(self):
        if len(self.data) != self.rows:
            object.__setattr__(self, "data", tuple(self.data) + (0,) * (self.rows - len(self.data)))
        limit = 1 << self.cols
        for r in self.data:
            if r < 0 or r >= limit:
                raise ValueError("row entry outside column range")

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols, (0,) * rows)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(n, n, tuple(1 << i for i in range(n)))

    @classmethod
    def from_entries(cls, rows: int, cols: int, entries: Iterable[tuple]) -> "BitMatrix":
        data = [0] * rows
        seen = set()
        for r, c in entries:
            if not (0 <= r < rows and 0 <= c < cols):
                raise ValueError(f"entry {(r, c)} outside {rows}x{cols}")
            if (r, c) in seen:
                raise ValueError(f"duplicate entry {(r, c)}")
            seen.add((r, c))
            data[r] |= 1 << c
        return cls(rows, cols, tuple(data))

    @classmethod
    def from_columns(cls, rows: int, columns: Iterable[int]) -> "BitMatrix":
        """Build from column bitsets (bit ``i`` of column ``j`` is entry (i, j))."""
        columns = list(columns)
        data = [0] * rows
        for j, col in enumerate(columns):
            for i in bits(col):
                data[i] |= 1 << j
        return cls(rows, len(columns), tuple(data))

    @classmethod
    def from_array(cls, arr) -> "BitMatrix":
        arr = np.asarray(arr)
        if arr.ndim != 2:
            raise ValueError("expected a 2-d array")
        rows, cols = arr.shape
        data = []
        for r in range(rows):
            v = 0
            for c in np.flatnonzero(arr[r] & 1).tolist():
                v |= 1 << c
            data.append(v)
        return cls(rows, cols, tuple(data))

    @property
    def entries(self) -> frozenset:
        return frozenset((r, c) for r, row in enumerate(self.data) for c in bits(row))

    def to_array(self) -> np.ndarray:
        out = np.zeros((self.rows, self.cols), dtype=np.uint8)
        for r, c in self.entries:
            out[r, c] = 1
        return out

    def columns(self) -> list:
        """Column bitsets over the row index."""
        cols = [0] * self.cols
        for r, row in enumerate(self.data):
            for c in bits(row):
                cols[c] |= 1 << r
        return cols

    def transpose(self) -> "BitMatrix":
        return BitMatrix(self.cols, self.rows, tuple(self.columns()))

    def is_zero(self) -> bool:
        return not any(self.data)

    def apply(self, v: int) -> int:
        """Multiply by a column vector given as a bitset; returns a bitset."""
        out = 0
        for r, row in enumerate(self.data):
            if (row & v).bit_count() & 1:
                out |= 1 << r
        return out

    def __matmul__(self, other: "BitMatrix") -> "BitMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        data = []
        for row in self.data:
            acc = 0
            for k in bits(row):
                acc ^= other.data[k]
            data.append(acc)
        return BitMatrix(self.rows, other.cols, tuple(data))

    def __add__(self, other: "BitMatrix") -> "BitMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")
        return BitMatrix(self.rows, self.cols, tuple(a ^ b for a, b in zip(self.data, other.data)))


def _echelon(rows: Iterable[int]) -> dict:
    """Reduce bitset rows to echelon form keyed by pivot bit.

    Rows are processed in order; each row's pivot is its lowest set bit
    (leftmost column) after reduction by earlier pivots.
    """
    pivots: dict = {}
    for r in rows:
        while r:
            low = r & -r
            p = pivots.get(low)
            if p is None:
                pivots[low] = r
                break
            r ^= p
    return pivots


def rank(m: BitMatrix) -> int:
    """Row rank of ``m`` over GF(2)."""
    return len(_echelon(m.data))


class _ColumnReducer:
    """Column echelon form of a matrix that remembers column combinations.

    Each stored entry is ``(column bitset, combination bitset)`` where the
    combination records which original columns were summed.
    """

    def __init__(self, columns: list):
        self.pivots: dict = {}
        self.kernel: list = []
        for j, col in enumerate(columns):
            tag = 1 << j
            col, tag = self.reduce(col, tag)
            if col:
                self.pivots[col & -col] = (col, tag)
            else:
                self.kernel.append(tag)

    def reduce(self, col: int, tag: int = 0) -> tuple:
        while col:
            entry = self.pivots.get(col & -col)
            if entry is None:
                break
            col ^= entry[0]
            tag ^= entry[1]
        return col, tag


def kernel_basis(m: BitMatrix) -> list:
    """Basis of the null space ``{v : m v = 0}`` as BitVectors of length ``m.cols``."""
    red = _ColumnReducer(m.columns())
    return [BitVector(m.cols, t) for t in red.kernel]


def solve(m: BitMatrix, b: BitVector) -> Optional[BitVector]:
    """Return some ``v`` with ``m v = b``, or ``None`` when ``b`` is not in the image."""
    if b.length != m.rows:
        raise ValueError(f"right-hand side has length {b.length}, matrix has {m.rows} rows")
    red = _ColumnReducer(m.columns())
    rest, tag = red.reduce(b.value)
    if rest:
        return None
    return BitVector(m.cols, tag)


class Subspace:
    """Incrementally built subspace of GF(2)^n held in echelon form.

    Every inserted vector carries a tag bitset; ``reduce`` returns the
    residue together with the XOR of tags used, which expresses a vector
    in terms of the inserted generators.
    """

    def __init__(self, vectors: Iterable[int] = (), tags: Optional[Iterable[int]] = None):
        self._piv: dict = {}
        vectors = list(vectors)
        tags = [1 << i for i in range(len(vectors))] if tags is None else list(tags)
        for v, t in zip(vectors, tags):
            self.add(v, t)

    def __len__(self) -> int:
        return len(self._piv)

    def reduce(self, v: int, tag: int = 0) -> tuple:
        while v:
            entry = self._piv.get(v & -v)
            if entry is None:
                break
            v ^= entry[0]
            tag ^= entry[1]
        return v, tag

    def add(self, v: int, tag: int = 0) -> bool:
        """Insert ``v``; returns True when it enlarged the subspace."""
        v, tag = self.reduce(v, tag)
        if not v:
            return False
        self._piv[v & -v] = (v, tag)
        return True

    def contains(self, v: int) -> bool:
        return self.reduce(v)[0] == 0

    def basis(self) -> list:
        return [v for v, _ in self._piv.values()]

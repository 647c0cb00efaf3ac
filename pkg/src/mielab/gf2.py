"""GF(2) linear algebra on integer-bitset rows.

Rows are Python ints; bit j of a row is column j.  All reducing
operations work on a copy, so callers keep ownership of their matrices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, List, Tuple

__all__ = [
    "BinaryMatrix",
    "gf2_rank",
    "gf2_in_span",
    "gf2_row_reduce",
    "gf2_nullspace",
]


@dataclass
class BinaryMatrix:
    rows: int
    cols: int
    bits: List[int] = field(default_factory=list)

    def __post_init__(self):
        if len(self.bits) != self.rows:
            raise ValueError("bits must hold one int per row")
        mask = (1 << self.cols) - 1
        for r in self.bits:
            if r & ~mask:
                raise ValueError("row exceeds column count")

    @classmethod
    def from_ints(cls, bits: Iterable[int], cols: int) -> "BinaryMatrix":
        bits = list(bits)
        return cls(len(bits), cols, bits)

    @classmethod
    def from_lists(cls, rows: Iterable[Iterable[int]], cols: int) -> "BinaryMatrix":
        bits = []
        for row in rows:
            v = 0
            for j, b in enumerate(row):
                if b:
                    v |= 1 << j
            bits.append(v)
        return cls(len(bits), cols, bits)


def _reduce_rows(bits: List[int]) -> Tuple[List[int], List[int]]:
    """Row-echelon basis with lowest-column pivots.  Returns (basis, pivots)."""
    basis: List[int] = []
    pivots: List[int] = []
    for row in bits:
        for b, pv in zip(basis, pivots):
            if (row >> pv) & 1:
                row ^= b
        if row:
            pv = (row & -row).bit_length() - 1
            # keep basis reduced: clear this pivot from earlier rows
            for k in range(len(basis)):
                if (basis[k] >> pv) & 1:
                    basis[k] ^= row
            basis.append(row)
            pivots.append(pv)
    return basis, pivots


def gf2_rank(m: BinaryMatrix) -> int:
    """Rank of the row space; the input matrix is left unmodified."""
    basis, _ = _reduce_rows(list(m.bits))
    return len(basis)


def gf2_in_span(m: BinaryMatrix, v: int) -> bool:
    """True iff v is a GF(2) combination of the rows of m."""
    if v & ~((1 << m.cols) - 1):
        raise ValueError("vector length exceeds column count")
    basis, pivots = _reduce_rows(list(m.bits))
    for b, pv in zip(basis, pivots):
        if (v >> pv) & 1:
            v ^= b
    return v == 0


def gf2_row_reduce(bits: List[int]) -> Tuple[List[int], List[int], List[int]]:
    """Reduced row echelon with bookkeeping.

    Returns (basis, pivots, combos) where combos[k] is the bitmask of
    original row indices whose XOR equals basis[k].
    """
    basis: List[int] = []
    pivots: List[int] = []
    combos: List[int] = []
    for idx, row in enumerate(bits):
        combo = 1 << idx
        for b, pv, c in zip(basis, pivots, combos):
            if (row >> pv) & 1:
                row ^= b
                combo ^= c
        if row:
            pv = (row & -row).bit_length() - 1
            for k in range(len(basis)):
                if (basis[k] >> pv) & 1:
                    basis[k] ^= row
                    combos[k] ^= combo
            basis.append(row)
            pivots.append(pv)
            combos.append(combo)
    return basis, pivots, combos


def gf2_nullspace(bits: List[int]) -> List[int]:
    """Coefficient masks c with XOR_{i in c} bits[i] == 0 (a basis thereof)."""
    basis: List[int] = []
    pivots: List[int] = []
    combos: List[int] = []
    null: List[int] = []
    for idx, row in enumerate(bits):
        combo = 1 << idx
        for b, pv, c in zip(basis, pivots, combos):
            if (row >> pv) & 1:
                row ^= b
                combo ^= c
        if row:
            pv = (row & -row).bit_length() - 1
            basis.append(row)
            pivots.append(pv)
            combos.append(combo)
        else:
            null.append(combo)
    return null

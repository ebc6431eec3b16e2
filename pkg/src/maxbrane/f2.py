"""Linear algebra over F2 with vectors packed into Python ints.

Bit ``i`` of an int is coordinate ``i``. An :class:`Echelon` keeps pivot rows
keyed by their leading bit and, for every row, a second bitmask (the tag)
recording which inserted vectors it is a combination of. Tags make kernels,
solutions and coordinates fall out of a single elimination.
"""

from __future__ import annotations

from typing import Iterable, Sequence


class Echelon:
    def __init__(self) -> None:
        self.rows: dict[int, tuple[int, int]] = {}

    def __len__(self) -> int:
        return len(self.rows)

    def reduce(self, vec: int, tag: int = 0) -> tuple[int, int]:
        """Return ``(residual, tag')`` with no pivot bits left in the residual."""
        rows = self.rows
        res = 0
        while vec:
            p = vec.bit_length() - 1
            row = rows.get(p)
            if row is None:
                res |= 1 << p
                vec ^= 1 << p
            else:
                vec ^= row[0]
                tag ^= row[1]
        return res, tag

    def add(self, vec: int, tag: int = 0) -> tuple[bool, int]:
        """Insert a vector; returns (independent, tag of the residual)."""
        res, tag = self.reduce(vec, tag)
        if res:
            self.rows[res.bit_length() - 1] = (res, tag)
            return True, tag
        return False, tag

    def contains(self, vec: int) -> bool:
        return self.reduce(vec)[0] == 0

    def express(self, vec: int) -> int | None:
        """Tag of a combination equal to ``vec``, or None when outside the span."""
        res, tag = self.reduce(vec)
        return None if res else tag


def rank(vectors: Iterable[int]) -> int:
    ech = Echelon()
    return sum(1 for v in vectors if ech.add(v)[0])


def kernel(vectors: Sequence[int]) -> list[int]:
    """Basis of {c : XOR of vectors[i] over bits i of c is 0}, as bitmasks."""
    ech = Echelon()
    out = []
    for i, v in enumerate(vectors):
        indep, tag = ech.add(v, 1 << i)
        if not indep:
            out.append(tag)
    return out


def combine(vectors: Sequence[int], mask: int) -> int:
    acc = 0
    i = 0
    while mask:
        if mask & 1:
            acc ^= vectors[i]
        mask >>= 1
        i += 1
    return acc


def from_int_rows(rows: Sequence[Sequence[int]]) -> list[int]:
    """Reduce integer rows mod 2 and pack each into a bitmask."""
    out = []
    for row in rows:
        v = 0
        for j, x in enumerate(row):
            if x & 1:
                v |= 1 << j
        out.append(v)
    return out


def matrix_rank_mod2(rows: Sequence[Sequence[int]]) -> int:
    return rank(from_int_rows(rows))


def bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out

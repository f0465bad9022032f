"""GF(2) linear algebra on Python int bitsets.

A vector is an int whose bit k is the coefficient of basis vector k.
A matrix is a list of column vectors: ``cols[k]`` is the image of source
basis vector k, written as a bitset over the target basis.
"""

from __future__ import annotations

from typing import Iterable, List, Optional, Sequence, Tuple


def bits(v: int) -> List[int]:
    """Indices of the set bits of v, ascending."""
    out = []
    while v:
        low = v & -v
        out.append(low.bit_length() - 1)
        v ^= low
    return out


def vec(indices: Iterable[int]) -> int:
    """Bitset with the given indices set (repeated indices cancel)."""
    v = 0
    for k in indices:
        v ^= 1 << k
    return v


class Echelon:
    """Incrementally maintained echelon basis keyed by leading bit.

    Each stored row may carry a tag bitset recording which inserted
    vectors it combines, which lets callers solve linear systems.
    """

    __slots__ = ("rows", "tags", "_count")

    def __init__(self) -> None:
        self.rows: dict = {}
        self.tags: dict = {}
        self._count = 0

    def __len__(self) -> int:
        return len(self.rows)

    def reduce(self, v: int, tag: int = 0) -> Tuple[int, int]:
        """Reduce the leading bits of v; return (remainder, accumulated tag).

        The remainder is zero iff v lies in the span.
        """
        rows, tags = self.rows, self.tags
        while v:
            p = v.bit_length() - 1
            r = rows.get(p)
            if r is None:
                return v, tag
            v ^= r
            tag ^= tags[p]
        return 0, tag

    def canonical(self, v: int) -> int:
        """Unique representative of v modulo the span (no pivot bits set)."""
        for p in sorted(self.rows, reverse=True):
            if (v >> p) & 1:
                v ^= self.rows[p]
        return v

    def add(self, v: int, tag: Optional[int] = None) -> bool:
        """Insert v; return True if it was independent of the basis."""
        if tag is None:
            tag = 1 << self._count
        self._count += 1
        r, t = self.reduce(v, tag)
        if not r:
            return False
        p = r.bit_length() - 1
        self.rows[p] = r
        self.tags[p] = t
        return True

    def contains(self, v: int) -> bool:
        return self.reduce(v)[0] == 0

    def solve(self, v: int) -> Optional[int]:
        """Tag combination of inserted vectors summing to v, or None."""
        r, t = self.reduce(v, 0)
        return t if r == 0 else None


def rank(cols: Sequence[int]) -> int:
    e = Echelon()
    for c in cols:
        e.add(c)
    return len(e)


def kernel(cols: Sequence[int]) -> List[int]:
    """Basis of the kernel of the matrix with the given columns."""
    e = Echelon()
    out = []
    for k, c in enumerate(cols):
        r, t = e.reduce(c, 1 << k)
        if r:
            p = r.bit_length() - 1
            e.rows[p] = r
            e.tags[p] = t
        else:
            out.append(t)
    return out


def image_basis(cols: Sequence[int]) -> Echelon:
    e = Echelon()
    for c in cols:
        e.add(c)
    return e


def apply(cols: Sequence[int], v: int) -> int:
    """Matrix-vector product."""
    out = 0
    k = 0
    while v:
        if v & 1:
            out ^= cols[k]
        v >>= 1
        k += 1
    return out


def compose(a: Sequence[int], b: Sequence[int]) -> List[int]:
    """Columns of a∘b."""
    return [apply(a, c) for c in b]


def solve(cols: Sequence[int], target: int) -> Optional[int]:
    """Some x with apply(cols, x) == target, or None."""
    e = Echelon()
    for k, c in enumerate(cols):
        e.add(c, 1 << k)
    return e.solve(target)


def identity(n: int) -> List[int]:
    return [1 << k for k in range(n)]


def transpose(cols: Sequence[int], n_rows: int) -> List[int]:
    out = [0] * n_rows
    for k, c in enumerate(cols):
        for r in bits(c):
            out[r] |= 1 << k
    return out


def quotient_basis(space: Sequence[int], sub: Sequence[int]) -> List[int]:
    """Vectors from ``space`` forming a basis of span(space) / span(sub)."""
    e = image_basis(sub)
    out = []
    for v in space:
        if e.add(v):
            out.append(v)
    return out


__all__ = [
    "bits", "vec", "Echelon", "rank", "kernel", "image_basis", "apply",
    "compose", "solve", "identity", "transpose", "quotient_basis",
]

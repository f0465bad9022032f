"""Exact arithmetic in R = F2[[V]][Q]/Q^3 and in F2[U].

Gradings: deg Q = -1, deg V = -4, deg U = -2.  Coefficients are in F2, so an
element is just a finite set of monomials.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import FrozenSet, Iterable, Union

from .errors import ParseError

Degree = Fraction


def as_degree(x: Union[int, str, Fraction]) -> Fraction:
    return Fraction(x)


@dataclass(frozen=True, order=True)
class Monomial:
    """Q^q_exp V^v_exp with q_exp in {0,1,2}."""

    q_exp: int
    v_exp: int

    def __post_init__(self) -> None:
        if not 0 <= self.q_exp <= 2:
            raise ValueError(f"q exponent {self.q_exp} outside 0..2")
        if self.v_exp < 0:
            raise ValueError("negative V exponent")

    @property
    def degree(self) -> int:
        return -self.q_exp - 4 * self.v_exp

    def __str__(self) -> str:
        parts = []
        if self.q_exp:
            parts.append("Q" if self.q_exp == 1 else f"Q^{self.q_exp}")
        if self.v_exp:
            parts.append("V" if self.v_exp == 1 else f"V^{self.v_exp}")
        return "*".join(parts) if parts else "1"


def mono_degree(m: Monomial) -> Fraction:
    return Fraction(m.degree)


class RingElement:
    """Finite F2-combination of monomials of R in canonical form."""

    __slots__ = ("support", "_hash")

    def __init__(self, support: Iterable[Monomial] = ()) -> None:
        acc: set = set()
        for m in support:
            acc ^= {m}
        self.support: FrozenSet[Monomial] = frozenset(acc)
        self._hash = hash(self.support)

    @classmethod
    def mono(cls, q: int = 0, v: int = 0) -> "RingElement":
        if q > 2:
            return cls()
        return cls([Monomial(q, v)])

    @classmethod
    def parse(cls, text: str) -> "RingElement":
        return parse_ring(text)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, RingElement) and self.support == other.support

    def __hash__(self) -> int:
        return self._hash

    def __bool__(self) -> bool:
        return bool(self.support)

    def __add__(self, other: "RingElement") -> "RingElement":
        return RingElement(self.support ^ other.support)

    __sub__ = __add__

    def __mul__(self, other: "RingElement") -> "RingElement":
        return ring_mul(self, other)

    def __pow__(self, n: int) -> "RingElement":
        out = ONE
        for _ in range(n):
            out = out * self
        return out

    def is_zero(self) -> bool:
        return not self.support

    def is_homogeneous(self) -> bool:
        return len({m.degree for m in self.support}) <= 1

    @property
    def degree(self) -> int:
        """Degree of a nonzero homogeneous element."""
        degs = {m.degree for m in self.support}
        if len(degs) != 1:
            raise ValueError(f"{self} is zero or not homogeneous")
        return degs.pop()

    def has_unit(self) -> bool:
        return Monomial(0, 0) in self.support

    def monomials(self):
        return sorted(self.support, key=lambda m: (-m.degree, m.q_exp))

    def __str__(self) -> str:
        if not self.support:
            return "0"
        return " + ".join(str(m) for m in sorted(self.support, key=lambda m: (m.v_exp, m.q_exp)))

    __repr__ = __str__


ZERO = RingElement()
ONE = RingElement.mono(0, 0)
Q = RingElement.mono(1, 0)
V = RingElement.mono(0, 1)


def ring_mul(a: RingElement, b: RingElement) -> RingElement:
    """Product in R; monomials with Q exponent >= 3 vanish."""
    out: set = set()
    for m in a.support:
        for n in b.support:
            q = m.q_exp + n.q_exp
            if q <= 2:
                out ^= {Monomial(q, m.v_exp + n.v_exp)}
    return RingElement(out)


def graded_piece_dim(generator_degree, d) -> int:
    """Dimension of the rank-one free module R<g> in degree d."""
    s = Fraction(generator_degree) - Fraction(d)
    if s < 0 or s.denominator != 1:
        return 0
    s = int(s)
    return sum(1 for a in range(3) if s >= a and (s - a) % 4 == 0)


def monomials_of_degree(d: int):
    """All monomials of R of degree d (at most one)."""
    s = -d
    return [Monomial(a, (s - a) // 4) for a in range(3) if s >= a and (s - a) % 4 == 0]


_FACTOR = re.compile(r"([QVU])(?:\^(\d+))?")


def _parse_monomial(tok: str, letters: str):
    tok = tok.replace("*", "").replace(" ", "")
    if tok == "1":
        return {}
    exps: dict = {}
    pos = 0
    while pos < len(tok):
        m = _FACTOR.match(tok, pos)
        if not m or m.group(1) not in letters:
            raise ParseError(f"cannot parse monomial {tok!r}")
        exps[m.group(1)] = exps.get(m.group(1), 0) + int(m.group(2) or 1)
        pos = m.end()
    return exps


def parse_ring(text: str) -> RingElement:
    """Parse strings like ``"Q^2*V + V^3"``, ``"QV"``, ``"1"``, ``"0"``."""
    text = str(text).strip()
    if text in ("", "0"):
        return ZERO
    out = ZERO
    for tok in text.split("+"):
        tok = tok.strip()
        if tok == "0":
            continue
        if not tok:
            raise ParseError(f"empty term in {text!r}")
        exps = _parse_monomial(tok, "QV")
        out = out + RingElement.mono(exps.get("Q", 0), exps.get("V", 0))
    return out


class UPolynomial:
    """Finite F2-combination of powers of U, deg U = -2."""

    __slots__ = ("support",)

    def __init__(self, support: Iterable[int] = ()) -> None:
        acc: set = set()
        for k in support:
            if k < 0:
                raise ValueError("negative U exponent")
            acc ^= {k}
        self.support = frozenset(acc)

    @classmethod
    def parse(cls, text: str) -> "UPolynomial":
        text = str(text).strip()
        if text in ("", "0"):
            return cls()
        out = []
        for tok in text.split("+"):
            exps = _parse_monomial(tok.strip(), "U")
            out.append(exps.get("U", 0))
        return cls(out)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, UPolynomial) and self.support == other.support

    def __hash__(self) -> int:
        return hash(self.support)

    def __add__(self, other: "UPolynomial") -> "UPolynomial":
        return UPolynomial(self.support ^ other.support)

    def __mul__(self, other: "UPolynomial") -> "UPolynomial":
        return UPolynomial(a + b for a in self.support for b in other.support)

    def degrees(self):
        return sorted(-2 * k for k in self.support)

    def __str__(self) -> str:
        if not self.support:
            return "0"
        return " + ".join("1" if k == 0 else ("U" if k == 1 else f"U^{k}") for k in sorted(self.support))

    __repr__ = __str__


__all__ = [
    "Degree", "as_degree", "Monomial", "RingElement", "UPolynomial", "ZERO", "ONE", "Q", "V",
    "ring_mul", "mono_degree", "graded_piece_dim", "monomials_of_degree", "parse_ring",
]

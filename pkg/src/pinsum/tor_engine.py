"""Bigraded Tor over R and over F2[U].

``tor_minimal`` tensors a module with the minimal resolution of the other.
``tor_bar_oracle`` is an independent check built from bar constructions.
The default method uses R = F2[[V]] (x) F2[Q]/Q^3 and the twisted tensor
product of the two reduced bar constructions, which is far smaller than the
reduced bar construction of R itself (``method="full"``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from . import gf2
from .errors import ParseError, WindowExceeded
from .modules import DiagramModule, ModulePresentation, present_to_diagram
from .resolution import FreePieces, Resolution, resolve
from .ring_core import ONE, Q, V, Monomial, RingElement, ZERO, parse_ring

REPRESENTATIVE_CAP = 6


# ---------------------------------------------------------------------------
# bar chains

Term = Tuple[Tuple[int, int], Tuple[Monomial, ...], Tuple[int, int]]


class BarChain:
    """F2-sum of simple tensors x|r1|...|rn|y.

    x and y are basis vectors of graded pieces, written (degree, index).
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Iterable[Term] = ()) -> None:
        acc: set = set()
        for t in terms:
            acc ^= {t}
        self.terms = frozenset(acc)

    def __add__(self, other: "BarChain") -> "BarChain":
        return BarChain(self.terms ^ other.terms)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, BarChain) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def length(self) -> Optional[int]:
        ls = {len(t[1]) for t in self.terms}
        return ls.pop() if len(ls) == 1 else None

    def degree(self) -> Optional[int]:
        ds = {t[0][0] + t[2][0] + sum(m.degree for m in t[1]) for t in self.terms}
        return ds.pop() if len(ds) == 1 else None

    def render(self, left: Optional[DiagramModule] = None, right: Optional[DiagramModule] = None) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (x, rs, y) in sorted(self.terms, key=_term_key):
            parts.append("|".join([_label(left, x)] + [str(r) for r in rs] + [_label(right, y)]))
        return " + ".join(parts)

    __str__ = render


def _term_key(t):
    return (t[0], tuple((m.v_exp, m.q_exp) for m in t[1]), t[2])


def _label(m: Optional[DiagramModule], x: Tuple[int, int]) -> str:
    d, k = x
    if m is not None:
        labs = m.labels.get(d)
        if labs and k < len(labs):
            return labs[k]
    return f"[{d}:{k}]"


def shuffle(tup: Sequence[RingElement], b: RingElement) -> List[Tuple[RingElement, ...]]:
    """The (n,1)-shuffle: all insertions of b into the tuple."""
    tup = tuple(tup)
    return [tup[:i] + (b,) + tup[i:] for i in range(len(tup) + 1)]


@dataclass(frozen=True)
class QTuple:
    n: int
    tilde: bool = False

    def entries(self) -> Tuple[RingElement, ...]:
        """Alternating Q, Q^2 ending in Q (plain) or Q^2 (tilde)."""
        last = Q * Q if self.tilde else Q
        other = Q if self.tilde else Q * Q
        out = []
        for k in range(self.n):
            out.append(last if (self.n - 1 - k) % 2 == 0 else other)
        return tuple(out)

    def __str__(self) -> str:
        return "|".join(str(r) for r in self.entries())


def expand_tuple(rs: Sequence[RingElement]) -> List[Tuple[Monomial, ...]]:
    """Multilinear expansion of a tuple of ring elements into monomial tuples."""
    out: set = set()
    for combo in product(*[r.monomials() for r in rs]):
        out ^= {tuple(combo)}
    return sorted(out, key=lambda t: tuple((m.v_exp, m.q_exp) for m in t))


def bar_boundary(chain: BarChain, left: DiagramModule, right: DiagramModule) -> BarChain:
    """Reduced bar differential of M (x) Rbar^n (x) N."""
    out: set = set()
    for (x, rs, y) in chain.terms:
        n = len(rs)
        if n == 0:
            continue
        v = gf2.apply(left.act(rs[0], x[0]), 1 << x[1])
        for k in gf2.bits(v):
            out ^= {((x[0] + rs[0].degree, k), rs[1:], y)}
        for i in range(n - 1):
            a, b = rs[i], rs[i + 1]
            if a.q_exp + b.q_exp <= 2:
                out ^= {(x, rs[:i] + (Monomial(a.q_exp + b.q_exp, a.v_exp + b.v_exp),) + rs[i + 2:], y)}
        v = gf2.apply(right.act(rs[-1], y[0]), 1 << y[1])
        for k in gf2.bits(v):
            out ^= {(x, rs[:-1], (y[0] + rs[-1].degree, k))}
    return BarChain(out)


# ---------------------------------------------------------------------------
# tables

@dataclass
class BigradedTable:
    entries: Dict[Tuple[int, int], int] = field(default_factory=dict)
    representatives: Dict[Tuple[int, int], List[BarChain]] = field(default_factory=dict)
    window: Tuple[int, int] = (0, 0)
    max_i: int = 0

    def dim(self, i: int, j: int) -> int:
        return self.entries.get((i, j), 0)

    def support(self) -> List[Tuple[int, int]]:
        return sorted(k for k, v in self.entries.items() if v)

    def column(self, i: int) -> Dict[int, int]:
        return {j: n for (ii, j), n in self.entries.items() if ii == i and n}

    def total(self) -> Dict[int, int]:
        """Dimensions by total degree i + j."""
        out: Dict[int, int] = {}
        for (i, j), n in self.entries.items():
            if n:
                out[i + j] = out.get(i + j, 0) + n
        return out

    def to_json(self) -> dict:
        return {"window": list(self.window), "max_i": self.max_i,
                "entries": [[i, j, n] for (i, j), n in sorted(self.entries.items()) if n]}

    def ascii(self) -> str:
        """Staircase: columns i = 0..max_i, rows internal degree from the top."""
        lo, hi = self.window
        rows = []
        w = max(3, len(str(lo)) + 1)
        rows.append(" " * w + "".join(str(i).rjust(4) for i in range(self.max_i + 1)))
        for j in range(hi, lo - 1, -1):
            cells = []
            for i in range(self.max_i + 1):
                n = self.dim(i, j)
                cells.append(("." if not n else ("F" if n == 1 else f"F{n}")).rjust(4))
            rows.append(str(j).rjust(w) + "".join(cells))
        return "\n".join(rows)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BigradedTable):
            return NotImplemented
        return {k: v for k, v in self.entries.items() if v} == {k: v for k, v in other.entries.items() if v}


def _diagram(m, depth: int = 48) -> DiagramModule:
    if isinstance(m, DiagramModule):
        return m
    top = int(m.top)
    return present_to_diagram(m, (top - depth, top))


# ---------------------------------------------------------------------------
# Tor via the minimal resolution

class _TensorComplex:
    """M (x)_R F_i for a resolution F of N, degreewise."""

    def __init__(self, M: DiagramModule, res: Resolution) -> None:
        self.M = M
        self.res = res
        self._basis: Dict[Tuple[int, int], list] = {}

    def basis(self, i: int, j: int) -> list:
        key = (i, j)
        b = self._basis.get(key)
        if b is None:
            b = []
            for g, deg in enumerate(self.res.free(i).generator_degrees):
                d = j - int(deg)
                for k in range(self.M.dim(d)):
                    b.append((g, d, k))
            self._basis[key] = b
        return b

    def dmatrix(self, i: int, j: int) -> List[int]:
        """Columns of 1 (x) d_i : C_(i,j) -> C_(i-1,j)."""
        if i == 0:
            return [0] * len(self.basis(0, j))
        mat = self.res.steps[i - 1]
        tb = {x: k for k, x in enumerate(self.basis(i - 1, j))}
        cols = []
        for (g, d, k) in self.basis(i, j):
            v = 0
            for t in range(mat.target.rank):
                r = mat.entries[t][g]
                for m in r.support:
                    img = gf2.apply(self.M.act(m, d), 1 << k)
                    for b in gf2.bits(img):
                        v ^= 1 << tb[(t, d + m.degree, b)]
            cols.append(v)
        return cols


def tor_minimal(M, N, max_i: int, window: Tuple[int, int], representatives: bool = False,
                res: Optional[Resolution] = None) -> BigradedTable:
    """Tor^R(M, N) as the homology of M (x) (minimal resolution of N)."""
    if max_i < 0:
        raise ValueError("max_i must be non-negative")
    lo, hi = window
    Md = _diagram(M, max(48, hi - lo + 24))
    if res is None:
        res = resolve(N, max_i + 1)
    C = _TensorComplex(Md, res)
    table = BigradedTable(window=(lo, hi), max_i=max_i)
    n_steps = res.length
    for i in range(max_i + 1):
        if i > n_steps:
            break
        for j in range(hi, lo - 1, -1):
            n = len(C.basis(i, j))
            if not n:
                continue
            dcol = C.dmatrix(i, j)
            cycles = gf2.kernel(dcol)
            if not cycles:
                continue
            bnd = C.dmatrix(i + 1, j) if i + 1 <= n_steps else []
            rk = gf2.rank(bnd)
            dim = len(cycles) - rk
            if dim:
                table.entries[(i, j)] = dim
                if representatives and i <= REPRESENTATIVE_CAP:
                    e = gf2.image_basis(bnd)
                    reps = [z for z in cycles if e.add(z)]
                    phi = minimal_to_bar(res, i, _diagram(N))
                    table.representatives[(i, j)] = [_cycle_to_bar(C, i, j, z, phi) for z in reps]
    return table


def _cycle_to_bar(C: _TensorComplex, i: int, j: int, z: int, phi) -> BarChain:
    out = BarChain()
    basis = C.basis(i, j)
    for k in gf2.bits(z):
        g, d, b = basis[k]
        for (rs, y) in phi[g]:
            out = out + BarChain([((d, b), rs, y)])
    return out


def minimal_to_bar(res: Resolution, i: int, N: Optional[DiagramModule] = None):
    """Images of the step-i generators in the bar resolution of N.

    Returns, per generator, a list of (monomial tuple, (degree, index)) pairs
    representing sums of 1|r1|...|ri|y.
    """
    if N is None:
        N = _diagram(res.target)
    cover = res.cover
    phi = []
    for g, deg in enumerate(cover.free.generator_degrees):
        phi.append([((), (int(deg), k)) for k in gf2.bits(cover.images[g])])
    for s in range(1, i + 1):
        mat = res.steps[s - 1]
        new = []
        for col in range(mat.source.rank):
            acc: set = set()
            for row in range(mat.target.rank):
                for m in mat.entries[row][col].support:
                    for (rs, y) in phi[row]:
                        acc ^= {((m,) + rs, y)}
            new.append(sorted(acc, key=lambda t: (tuple((m.v_exp, m.q_exp) for m in t[0]), t[1])))
        phi = new
    return phi


# ---------------------------------------------------------------------------
# bar oracle

class _BarComplex:
    """Degreewise bar complex, either full or twisted.

    Letters are encoded as ints q + 3v for speed.
    """

    def __init__(self, M: DiagramModule, N: DiagramModule, method: str) -> None:
        self.M, self.N, self.method = M, N, method
        self.topM, self.topN = M.hi, N.hi
        self._basis: Dict[Tuple[int, int], list] = {}
        self._index: Dict[Tuple[int, int], dict] = {}
        self._dmat: Dict[Tuple[int, int], List[int]] = {}
        self._act: Dict = {}

    def _act_cols(self, side: int, code: int, d: int) -> List[int]:
        key = (side, code, d)
        mat = self._act.get(key)
        if mat is None:
            mod = self.M if side == 0 else self.N
            mat = mod.act(Monomial(code % 3, code // 3), d)
            self._act[key] = mat
        return mat

    def _words(self, n: int, budget: int):
        """(word, p) pairs of total degree -budget."""
        if self.method == "full":
            def rec(n, b):
                if n == 0:
                    if b == 0:
                        yield ()
                    return
                for s in range(1, b - (n - 1) + 1):
                    for code in _codes(s):
                        for rest in rec(n - 1, b - s):
                            yield (code,) + rest
            for w in rec(n, budget):
                yield w, -1
        else:
            # a V-word followed by a Q-word
            for p in range(n + 1):
                q = n - p
                for cq in product((1, 2), repeat=q):
                    rem = budget - sum(cq)
                    if rem < 4 * p or rem % 4:
                        continue
                    for comp in _compositions(rem // 4, p):
                        yield tuple(3 * b for b in comp) + cq, p

    def basis(self, n: int, j: int) -> list:
        key = (n, j)
        b = self._basis.get(key)
        if b is not None:
            return b
        b = []
        M, N = self.M, self.N
        max_budget = self.topM + self.topN - j
        for budget in range(n, max_budget + 1):
            for word, p in self._words(n, budget):
                rest = j + budget
                for dx in range(rest - self.topN, self.topM + 1):
                    dy = rest - dx
                    nx, ny = M.dim(dx), N.dim(dy)
                    for a in range(nx):
                        for c in range(ny):
                            b.append((dx, a, word, p, dy, c))
        self._basis[key] = b
        self._index[key] = {x: k for k, x in enumerate(b)}
        return b

    def dmatrix(self, n: int, j: int) -> List[int]:
        key = (n, j)
        got = self._dmat.get(key)
        if got is not None:
            return got
        src = self.basis(n, j)
        if n == 0:
            cols = [0] * len(src)
            self._dmat[key] = cols
            return cols
        self.basis(n - 1, j)
        tidx = self._index[(n - 1, j)]
        act = self._act_cols
        full = self.method == "full"
        bits = gf2.bits
        cols = []
        for (dx, a, word, p, dy, c) in src:
            out = 0
            if full:
                r = word[0]
                for k in bits(act(0, r, dx)[a]):
                    out ^= 1 << tidx[(dx - _deg(r), k, word[1:], -1, dy, c)]
                for i in range(n - 1):
                    x, y = word[i], word[i + 1]
                    if x % 3 + y % 3 <= 2:
                        out ^= 1 << tidx[(dx, a, word[:i] + (x + y,) + word[i + 2:], -1, dy, c)]
                r = word[-1]
                for k in bits(act(1, r, dy)[c]):
                    out ^= 1 << tidx[(dx, a, word[:-1], -1, dy - _deg(r), k)]
            else:
                q = n - p
                # left action on the first letter of each part
                if p:
                    r = word[0]
                    for k in bits(act(0, r, dx)[a]):
                        out ^= 1 << tidx[(dx - _deg(r), k, word[1:], p - 1, dy, c)]
                if q:
                    r = word[p]
                    for k in bits(act(0, r, dx)[a]):
                        out ^= 1 << tidx[(dx - r, k, word[:p] + word[p + 1:], p, dy, c)]
                # internal products
                for i in range(p - 1):
                    out ^= 1 << tidx[(dx, a, word[:i] + (word[i] + word[i + 1],) + word[i + 2:], p - 1, dy, c)]
                for i in range(p, n - 1):
                    x, y = word[i], word[i + 1]
                    if x + y <= 2:
                        out ^= 1 << tidx[(dx, a, word[:i] + (x + y,) + word[i + 2:], p, dy, c)]
                # right action on the last letter of each part
                if p:
                    r = word[p - 1]
                    for k in bits(act(1, r, dy)[c]):
                        out ^= 1 << tidx[(dx, a, word[:p - 1] + word[p:], p - 1, dy - _deg(r), k)]
                if q:
                    r = word[-1]
                    for k in bits(act(1, r, dy)[c]):
                        out ^= 1 << tidx[(dx, a, word[:-1], p, dy - r, k)]
            cols.append(out)
        self._dmat[key] = cols
        return cols

    def chain(self, n: int, j: int, v: int) -> BarChain:
        b = self.basis(n, j)
        return BarChain(((b[k][0], b[k][1]), tuple(Monomial(x % 3, x // 3) for x in b[k][2]), (b[k][4], b[k][5]))
                        for k in gf2.bits(v))


def _deg(code: int) -> int:
    """Minus the degree of the letter with the given code."""
    return code % 3 + 4 * (code // 3)


def _codes(s: int) -> List[int]:
    return [a + 3 * ((s - a) // 4) for a in range(3) if s >= a and (s - a) % 4 == 0 and s > 0]


def _compositions(total: int, parts: int):
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def tor_bar_oracle(M, N, max_i: int, window: Tuple[int, int], method: str = "twisted",
                   representatives: bool = False) -> BigradedTable:
    """Tor^R(M, N) from a bar construction, independent of resolutions."""
    if method not in ("twisted", "full"):
        raise ParseError(f"unknown bar method {method!r}")
    lo, hi = window
    depth = max(48, hi - lo + 24)
    B = _BarComplex(_diagram(M, depth), _diagram(N, depth), method)
    table = BigradedTable(window=(lo, hi), max_i=max_i)
    for j in range(hi, lo - 1, -1):
        for n in range(max_i + 1):
            cols = B.dmatrix(n, j)
            if not cols:
                continue
            cycles = gf2.kernel(cols)
            if not cycles:
                continue
            bnd = B.dmatrix(n + 1, j)
            dim = len(cycles) - gf2.rank(bnd)
            if dim:
                table.entries[(n, j)] = dim
                if representatives and method == "full" and n <= REPRESENTATIVE_CAP:
                    e = gf2.image_basis(bnd)
                    table.representatives[(n, j)] = [B.chain(n, j, z) for z in cycles if e.add(z)]
    return table


# ---------------------------------------------------------------------------
# F2[U]-modules

@dataclass(frozen=True)
class UModule:
    """One optional free tower F[U]<tower> plus torsion summands F[U]/U^k<d>.

    Shifts follow (M<n>)_d = M_(d-n): the top class of F[U]/U^k<d> sits in
    degree d.
    """

    tower: Optional[int]
    torsion: Tuple[Tuple[int, int], ...] = ()

    @classmethod
    def from_json(cls, obj: dict) -> "UModule":
        try:
            tower = obj.get("tower")
            tors = tuple(sorted((int(k), int(d)) for k, d in obj.get("torsion", [])))
        except (TypeError, ValueError, AttributeError) as exc:
            raise ParseError(f"bad F[U]-module descriptor: {exc}") from exc
        return cls(None if tower is None else int(tower), tors)

    def to_json(self) -> dict:
        return {"tower": self.tower, "torsion": [list(t) for t in self.torsion]}

    def dim(self, d: int) -> int:
        n = 0
        if self.tower is not None and d <= self.tower and (self.tower - d) % 2 == 0:
            n += 1
        for k, top in self.torsion:
            if top - 2 * (k - 1) <= d <= top and (top - d) % 2 == 0:
                n += 1
        return n

    def shifted(self, n: int) -> "UModule":
        return UModule(None if self.tower is None else self.tower + n,
                       tuple(sorted((k, d + n) for k, d in self.torsion)))

    def normalized(self) -> "UModule":
        return UModule(self.tower, tuple(sorted(self.torsion)))

    def __str__(self) -> str:
        parts = []
        if self.tower is not None:
            parts.append("F[U]" + (f"<{self.tower}>" if self.tower else ""))
        for k, d in sorted(self.torsion, key=lambda t: (t[1], t[0])):
            parts.append(f"F[U]/U^{k}<{d}>")
        return " + ".join(parts) if parts else "0"


def _summands(m: UModule):
    out = []
    if m.tower is not None:
        out.append((None, m.tower))
    out.extend(m.torsion)
    return out


def tor_over_U(A: UModule, B: UModule, max_i: int = 1, window: Optional[Tuple[int, int]] = None
               ) -> Tuple[BigradedTable, Dict[int, UModule]]:
    """Tor^(F2[U]) summand by summand; returns the table and Tor_0, Tor_1."""
    tor0_t, tor0, tor1 = None, [], []
    for ka, a in _summands(A):
        for kb, b in _summands(B):
            if ka is None and kb is None:
                tor0_t = a + b
            elif ka is None or kb is None:
                tor0.append((ka if kb is None else kb, a + b))
            else:
                tor0.append((min(ka, kb), a + b))
                tor1.append((min(ka, kb), a + b - 2 * max(ka, kb)))
    T0 = UModule(tor0_t, tuple(sorted(tor0)))
    T1 = UModule(None, tuple(sorted(tor1)))
    degs = []
    if window is None:
        tops = [d for _, d in T0.torsion + T1.torsion] + ([T0.tower] if T0.tower is not None else [])
        hi = max(tops, default=0)
        window = (hi - 40, hi)
    lo, hi = window
    table = BigradedTable(window=(lo, hi), max_i=max_i)
    for i, T in ((0, T0), (1, T1)):
        if i > max_i:
            continue
        for j in range(lo, hi + 1):
            n = T.dim(j)
            if n:
                table.entries[(i, j)] = n
    return table, {0: T0, 1: T1}


def hm_connected_sum(A: UModule, B: UModule, shift: int = 0) -> UModule:
    """Tor_0 + Tor_1 in total degree (Tor_1 moves up by one), then shifted."""
    _, T = tor_over_U(A, B)
    tors = list(T[0].torsion) + [(k, d + 1) for k, d in T[1].torsion]
    out = UModule(T[0].tower, tuple(sorted(tors)))
    return out.shifted(shift) if shift else out


__all__ = [
    "BarChain", "BigradedTable", "QTuple", "UModule", "shuffle", "expand_tuple", "bar_boundary",
    "tor_minimal", "tor_bar_oracle", "minimal_to_bar", "tor_over_U", "hm_connected_sum",
]

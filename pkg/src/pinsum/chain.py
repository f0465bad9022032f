"""Chain-level models over the dg algebra D = F2[Q, e].

Gradings: deg Q = -1, deg e = -2, and the differential is d(e) = Q^3, so
d(Q^a e^b) = b Q^(a+3) e^(b-1).  The cycles Q^a e^(2c) give H(D) = R with
V = e^2.  A finite-rank dg D-module is stored as generators plus the
differential of each generator written as a D-linear combination of
generators.  Homology of such a module is a graded R-module, and the whole
computation is degreewise F2 linear algebra.

Generators may be truncated (Q^qcap g = 0, e^ecap g = 0); this is used for
free orbits of an involution, where Q acts trivially.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from . import gf2
from .errors import InvariantViolation, PreconditionViolated

DMono = Tuple[int, int]          # (a, b) meaning Q^a e^b
DElem = FrozenSet[DMono]
Basis = Tuple[int, int, int]     # (a, b, i) meaning Q^a e^b g_i


def dmono_degree(m: DMono) -> int:
    return -m[0] - 2 * m[1]


def delem(*monos: DMono) -> DElem:
    out: set = set()
    for m in monos:
        out ^= {m}
    return frozenset(out)


def dmul(x: Iterable[DMono], y: Iterable[DMono]) -> DElem:
    out: set = set()
    for a, b in x:
        for c, d in y:
            out ^= {(a + c, b + d)}
    return frozenset(out)


def dd(x: Iterable[DMono]) -> DElem:
    out: set = set()
    for a, b in x:
        if b % 2:
            out ^= {(a + 3, b - 1)}
    return frozenset(out)


def lift_ring(elem) -> DElem:
    """Cycle representative in D of a ring element of R (V -> e^2)."""
    return frozenset((m.q_exp, 2 * m.v_exp) for m in elem.support)


def d_monos_of_degree(t: int) -> List[DMono]:
    s = -t
    if s < 0:
        return []
    return [(s - 2 * b, b) for b in range(s // 2 + 1)]


@dataclass(frozen=True)
class Gen:
    name: str
    degree: int
    qcap: Optional[int] = None
    ecap: Optional[int] = None

    def allows(self, a: int, b: int) -> bool:
        return (self.qcap is None or a < self.qcap) and (self.ecap is None or b < self.ecap)


class DModule:
    """Finite-rank dg module over D.

    ``diff[i]`` maps generator index j to the D-coefficient of g_j in d(g_i).
    ``offset`` is a common rational degree shift (all integer work happens
    relative to it).  ``named`` lists labelled cycles as (label, degree,
    set of basis triples); they seed readable homology bases.
    """

    def __init__(self, gens: Sequence[Gen], diff: Sequence[Dict[int, DElem]],
                 offset: Fraction = Fraction(0), check: bool = True, named=()) -> None:
        self.gens: Tuple[Gen, ...] = tuple(gens)
        self.named = tuple((str(n), int(t), frozenset(e)) for n, t, e in named)
        self.diff: Tuple[Dict[int, DElem], ...] = tuple(
            {j: frozenset(c) for j, c in dd_.items() if c} for dd_ in diff)
        self.offset = Fraction(offset)
        self._basis: Dict[int, List[Basis]] = {}
        self._index: Dict[int, Dict[Basis, int]] = {}
        if len(self.diff) != len(self.gens):
            raise ValueError("one differential entry per generator required")
        for i, row in enumerate(self.diff):
            for j, c in row.items():
                for m in c:
                    if self.gens[j].degree + dmono_degree(m) != self.gens[i].degree - 1:
                        raise InvariantViolation(
                            f"inhomogeneous differential entry {self.gens[i].name}->{self.gens[j].name}")
        if check:
            self.check_d_squared()

    @property
    def rank(self) -> int:
        return len(self.gens)

    @property
    def top(self) -> int:
        return max((g.degree for g in self.gens), default=0)

    def names(self) -> List[str]:
        return [g.name for g in self.gens]

    # -- degreewise bases -------------------------------------------------
    def basis(self, t: int) -> List[Basis]:
        b = self._basis.get(t)
        if b is None:
            b = []
            for i, g in enumerate(self.gens):
                for a, e in d_monos_of_degree(t - g.degree):
                    if g.allows(a, e):
                        b.append((a, e, i))
            self._basis[t] = b
            self._index[t] = {x: k for k, x in enumerate(b)}
        return b

    def index(self, t: int) -> Dict[Basis, int]:
        self.basis(t)
        return self._index[t]

    def to_vec(self, elems: Iterable[Basis], t: int) -> int:
        idx = self.index(t)
        v = 0
        for x in elems:
            a, b, i = x
            if self.gens[i].allows(a, b):
                v ^= 1 << idx[x]
        return v

    def from_vec(self, v: int, t: int) -> List[Basis]:
        b = self.basis(t)
        return [b[k] for k in gf2.bits(v)]

    def mul_basis(self, m: DMono, x: Basis) -> Optional[Basis]:
        a, b, i = x
        y = (a + m[0], b + m[1], i)
        return y if self.gens[i].allows(y[0], y[1]) else None

    def d_basis(self, x: Basis) -> set:
        a, b, i = x
        out: set = set()
        if b % 2:
            y = (a + 3, b - 1, i)
            if self.gens[i].allows(y[0], y[1]):
                out ^= {y}
        for j, c in self.diff[i].items():
            for (p, q) in c:
                y = (a + p, b + q, j)
                if self.gens[j].allows(y[0], y[1]):
                    out ^= {y}
        return out

    def dmatrix(self, t: int) -> List[int]:
        """Columns of d: C_t -> C_(t-1)."""
        return [self.to_vec(self.d_basis(x), t - 1) for x in self.basis(t)]

    def mult_vec(self, m: DMono, v: int, t: int) -> int:
        tt = t + dmono_degree(m)
        out = set()
        for x in self.from_vec(v, t):
            y = self.mul_basis(m, x)
            if y is not None:
                out ^= {y}
        return self.to_vec(out, tt)

    def mult_elem_vec(self, c: Iterable[DMono], v: int, t: int) -> int:
        c = list(c)
        if not c:
            return 0
        tt = t + dmono_degree(c[0])
        out = 0
        for m in c:
            out ^= self.mult_vec(m, v, t)
        return out

    def d_vec(self, v: int, t: int) -> int:
        out: set = set()
        for x in self.from_vec(v, t):
            out ^= self.d_basis(x)
        return self.to_vec(out, t - 1)

    def gen_vec(self, i: int) -> int:
        return self.to_vec([(0, 0, i)], self.gens[i].degree)

    def check_d_squared(self) -> None:
        for i, g in enumerate(self.gens):
            x = (0, 0, i)
            first = self.d_basis(x)
            second: set = set()
            for y in first:
                second ^= self.d_basis(y)
            if second:
                raise InvariantViolation(f"d^2 != 0 on generator {g.name}")

    def shifted(self, n: int) -> "DModule":
        gens = [Gen(g.name, g.degree + n, g.qcap, g.ecap) for g in self.gens]
        named = [(nm, t + n, e) for nm, t, e in self.named]
        return DModule(gens, self.diff, self.offset, check=False, named=named)

    def with_offset(self, off: Fraction) -> "DModule":
        return DModule(self.gens, self.diff, Fraction(off), check=False, named=self.named)

    def with_names(self, named) -> "DModule":
        return DModule(self.gens, self.diff, self.offset, check=False, named=named)

    def named_vec(self, k: int) -> Tuple[str, int, int]:
        nm, t, e = self.named[k]
        return nm, t, self.to_vec(e, t)

    def __repr__(self) -> str:
        return f"DModule(rank={self.rank}, degrees={[g.degree for g in self.gens]})"


# -- constructions --------------------------------------------------------

def free_rank_one(degree: int = 0, name: str = "1") -> DModule:
    return DModule([Gen(name, degree)], [{}])


def tensor(A: DModule, B: DModule, shift: int = 0, sep: str = "|") -> DModule:
    """A (x)_D B with the Leibniz differential (char 2, no signs)."""
    gens: List[Gen] = []
    pos = {}
    for i, g in enumerate(A.gens):
        for j, h in enumerate(B.gens):
            pos[(i, j)] = len(gens)
            qc = _mincap(g.qcap, h.qcap)
            ec = _mincap(g.ecap, h.ecap)
            gens.append(Gen(f"{g.name}{sep}{h.name}", g.degree + h.degree + shift, qc, ec))
    diff: List[Dict[int, DElem]] = [dict() for _ in gens]
    for i in range(A.rank):
        for j in range(B.rank):
            k = pos[(i, j)]
            for i2, c in A.diff[i].items():
                t = pos[(i2, j)]
                diff[k][t] = diff[k].get(t, frozenset()) ^ c
            for j2, c in B.diff[j].items():
                t = pos[(i, j2)]
                diff[k][t] = diff[k].get(t, frozenset()) ^ c
    named = []
    for na, ta, ea in A.named:
        for nb, tb, eb in B.named:
            el: set = set()
            for (a, b, i) in ea:
                for (c, d, j) in eb:
                    k = pos[(i, j)]
                    if gens[k].allows(a + c, b + d):
                        el ^= {(a + c, b + d, k)}
            if el:
                named.append((f"{na}{sep}{nb}", ta + tb + shift, el))
    return DModule(gens, diff, A.offset + B.offset, named=named)


def _mincap(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def dual(A: DModule, shift: int = 0) -> DModule:
    """Hom_D(A, D): degrees negate, and d g_i = c g_j gives d g_j* = c g_i*."""
    if any(g.qcap is not None or g.ecap is not None for g in A.gens):
        raise PreconditionViolated("dual requires a semifree model")
    gens = [Gen(_star(g.name), -g.degree + shift) for g in A.gens]
    diff: List[Dict[int, DElem]] = [dict() for _ in gens]
    for i in range(A.rank):
        for j, c in A.diff[i].items():
            diff[j][i] = diff[j].get(i, frozenset()) ^ c
    return DModule(gens, diff, -A.offset)


def _star(name: str) -> str:
    return name[:-1] if name.endswith("*") else name + "*"


def direct_sum(A: DModule, B: DModule) -> DModule:
    if A.offset != B.offset:
        raise PreconditionViolated("direct sum needs matching degree offsets")
    n = A.rank
    gens = list(A.gens) + list(B.gens)
    diff = [dict(r) for r in A.diff] + [{j + n: c for j, c in r.items()} for r in B.diff]
    named = list(A.named) + [(nm, t, {(a, b, i + n) for a, b, i in e}) for nm, t, e in B.named]
    return DModule(gens, diff, A.offset, named=named)


def cone_q_model() -> DModule:
    """C_Q = D{1, s} with d s = Q: its homology is F2[U]."""
    return DModule([Gen("1", 0), Gen("s", 0)], [{}, {0: delem((1, 0))}])


def minimize(A: DModule) -> DModule:
    """Cancel generator pairs joined by a unit differential coefficient."""
    gens = list(A.gens)
    diff = [dict(r) for r in A.diff]
    alive = list(range(len(gens)))
    while True:
        pair = None
        for i in alive:
            if gens[i].qcap is not None or gens[i].ecap is not None:
                continue
            for j, c in diff[i].items():
                if (0, 0) in c and gens[j].qcap is None and gens[j].ecap is None:
                    pair = (i, j)
                    break
            if pair:
                break
        if pair is None:
            break
        i, j = pair
        di = {k: c for k, c in diff[i].items() if k not in (i, j)}
        for k in alive:
            if k in (i, j):
                continue
            row = diff[k]
            ckj = row.get(j)
            new = {m: c for m, c in row.items() if m not in (i, j)}
            if ckj:
                for m, c in di.items():
                    new[m] = new.get(m, frozenset()) ^ dmul(ckj, c)
            diff[k] = {m: c for m, c in new.items() if c}
        alive = [k for k in alive if k not in (i, j)]
    remap = {k: n for n, k in enumerate(alive)}
    new_gens = [gens[k] for k in alive]
    new_diff = [{remap[m]: c for m, c in diff[k].items()} for k in alive]
    return DModule(new_gens, new_diff, A.offset)


# -- maps -------------------------------------------------------------------

class DMap:
    """D-linear map between models, given on generators; fixed degree shift."""

    def __init__(self, source: DModule, target: DModule, images: Sequence[Dict[int, DElem]],
                 degree: int = 0) -> None:
        self.source = source
        self.target = target
        self.images = [dict(r) for r in images]
        self.degree = degree

    def apply_basis(self, x: Basis) -> set:
        a, b, i = x
        out: set = set()
        for j, c in self.images[i].items():
            for (p, q) in c:
                y = (a + p, b + q, j)
                if self.target.gens[j].allows(y[0], y[1]):
                    out ^= {y}
        return out

    def apply_vec(self, v: int, t: int) -> int:
        out: set = set()
        for x in self.source.from_vec(v, t):
            out ^= self.apply_basis(x)
        return self.target.to_vec(out, t + self.degree)

    def check_chain_map(self) -> None:
        for i, g in enumerate(self.source.gens):
            t = g.degree
            v = self.source.gen_vec(i)
            lhs = self.target.d_vec(self.apply_vec(v, t), t + self.degree)
            rhs = self.apply_vec(self.source.d_vec(v, t), t - 1)
            if lhs != rhs:
                raise InvariantViolation(f"map is not a chain map on {g.name}")


def gysin_maps(X: DModule):
    """(HM model, iota, pi, U) for the cone of Q on X."""
    C = cone_q_model()
    Y = tensor(X, C)
    n = X.rank
    e = delem((0, 1))
    one = delem((0, 0))
    q2 = delem((2, 0))
    iota = DMap(X, Y, [{2 * i: one} for i in range(n)], 0)
    pi = DMap(Y, X, [({} if k % 2 == 0 else {k // 2: one}) for k in range(2 * n)], 0)
    u_images = []
    for k in range(2 * n):
        if k % 2 == 0:
            u_images.append({k: e, k + 1: q2})
        else:
            u_images.append({k: e})
    U = DMap(Y, Y, u_images, -2)
    return Y, iota, pi, U


# -- homology ---------------------------------------------------------------

class Homology:
    """Degreewise homology of a model over the window [lo, top]."""

    def __init__(self, model: DModule, lo: int, hi: Optional[int] = None) -> None:
        self.model = model
        self.lo = lo
        self.hi = model.top if hi is None else hi
        self._data: Dict[int, tuple] = {}

    def _compute(self, t: int):
        data = self._data.get(t)
        if data is not None:
            return data
        M = self.model
        n = len(M.basis(t))
        if n == 0:
            data = ([], gf2.Echelon(), gf2.Echelon())
            self._data[t] = data
            return data
        cycles = gf2.kernel(M.dmatrix(t))
        bnd = gf2.Echelon()
        for c in M.dmatrix(t + 1):
            bnd.add(c, 0)
        reps: List[int] = []
        full = gf2.Echelon()
        for p, r in bnd.rows.items():
            full.rows[p] = r
            full.tags[p] = 0
        for z in sorted(cycles, key=lambda v: (bin(v).count("1"), v)):
            r, tg = full.reduce(z, 1 << len(reps))
            if r:
                p = r.bit_length() - 1
                full.rows[p] = r
                full.tags[p] = tg
                reps.append(z)
        data = (reps, bnd, full)
        self._data[t] = data
        return data

    def dim(self, t: int) -> int:
        return len(self._compute(t)[0])

    def reps(self, t: int) -> List[int]:
        return self._compute(t)[0]

    def is_cycle(self, v: int, t: int) -> bool:
        return self.model.d_vec(v, t) == 0

    def is_boundary(self, v: int, t: int) -> bool:
        return self._compute(t)[1].contains(v)

    def coords(self, v: int, t: int) -> int:
        """Coordinates of the cycle v in the chosen homology basis."""
        reps, bnd, full = self._compute(t)
        r, tg = full.reduce(v, 0)
        if r:
            raise InvariantViolation(f"vector in degree {t} is not a cycle")
        return tg

    def rep_of(self, coords: int, t: int) -> int:
        reps = self.reps(t)
        v = 0
        for k in gf2.bits(coords):
            v ^= reps[k]
        return v

    def action(self, mono: DMono, t: int) -> List[int]:
        """Matrix of multiplication by a cycle monomial of D on H_t."""
        tt = t + dmono_degree(mono)
        return [self.coords(self.model.mult_vec(mono, z, t), tt) for z in self.reps(t)]

    def map_matrix(self, f: DMap, target_h: "Homology", t: int) -> List[int]:
        tt = t + f.degree
        return [target_h.coords(f.apply_vec(z, t), tt) for z in self.reps(t)]

    def bounding_chain(self, v: int, t: int) -> Optional[int]:
        """Some chain c in degree t+1 with d c = v, or None."""
        return gf2.solve(self.model.dmatrix(t + 1), v)

    def describe(self, v: int, t: int) -> str:
        return chain_str(self.model, v, t)


def chain_str(M: DModule, v: int, t: int) -> str:
    terms = []
    for a, b, i in M.from_vec(v, t):
        parts = []
        if a:
            parts.append("Q" if a == 1 else f"Q^{a}")
        if b:
            parts.append("e" if b == 1 else f"e^{b}")
        parts.append(M.gens[i].name)
        terms.append("*".join(parts))
    return " + ".join(terms) if terms else "0"


__all__ = [
    "DMono", "DElem", "Gen", "DModule", "DMap", "Homology", "delem", "dmul", "dd", "lift_ring",
    "tensor", "dual", "direct_sum", "cone_q_model", "minimize", "gysin_maps", "free_rank_one",
    "chain_str", "dmono_degree",
]

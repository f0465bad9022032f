"""Graded minimal free resolutions over R and their periodic tails.

Kernels are computed degreewise by F2 linear algebra, scanning from the top
generator degree downward.  Minimal generators of a kernel K in degree d
are a complement of V*K_(d+4) + Q*K_(d+1) inside K_d.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from . import gf2
from .errors import NotPeriodic, WindowExceeded
from .modules import (DiagramModule, FreeModule, HomogeneousMatrix, ModulePresentation,
                      present_to_diagram)
from .ring_core import Monomial, RingElement, ZERO

DEFAULT_CAP = 400
STABLE_RUN = 8


class FreePieces:
    """Degreewise bases of a free module with cached monomial multiplication."""

    def __init__(self, fm: FreeModule) -> None:
        self.fm = fm
        self._basis: Dict[int, list] = {}
        self._index: Dict[int, dict] = {}

    def basis(self, d: int) -> list:
        b = self._basis.get(d)
        if b is None:
            b = self.fm.basis(d)
            self._basis[d] = b
            self._index[d] = {x: k for k, x in enumerate(b)}
        return b

    def index(self, d: int) -> dict:
        self.basis(d)
        return self._index[d]

    def dim(self, d: int) -> int:
        return len(self.basis(d))

    def mult(self, q: int, v: int, vec: int, d: int) -> int:
        basis = self.basis(d)
        tidx = self.index(d - q - 4 * v)
        out = 0
        for k in gf2.bits(vec):
            g, m = basis[k]
            if m.q_exp + q <= 2:
                out ^= 1 << tidx[(g, Monomial(m.q_exp + q, m.v_exp + v))]
        return out

    def column(self, vec: int, d: int) -> List[RingElement]:
        """R-coefficients of a vector in the degree-d piece."""
        basis = self.basis(d)
        col = [set() for _ in range(self.fm.rank)]
        for k in gf2.bits(vec):
            g, m = basis[k]
            col[g] ^= {m}
        return [RingElement(c) for c in col]

    @property
    def top(self) -> int:
        return int(max(self.fm.generator_degrees))

    @property
    def bottom(self) -> int:
        return int(min(self.fm.generator_degrees))


@dataclass
class Cover:
    """Minimal surjection from a free module onto a module (the map d0)."""

    free: FreeModule
    images: List[int]
    labels: List[str] = field(default_factory=list)


@dataclass
class Resolution:
    target: object
    cover: Cover
    steps: List[HomogeneousMatrix]
    periodic_from: Optional[int] = None
    period_shift: Optional[int] = None
    period_pair: Optional[Tuple[HomogeneousMatrix, HomogeneousMatrix]] = None

    def free(self, i: int) -> FreeModule:
        """The free module F_i (F_0 is the cover)."""
        return self.cover.free if i == 0 else self.steps[i - 1].source

    def betti(self, i: int) -> List:
        return sorted(self.free(i).generator_degrees)

    @property
    def length(self) -> int:
        return len(self.steps)

    def to_json(self) -> dict:
        return {
            "generator_degrees": [[str(g) for g in self.free(i).generator_degrees] for i in range(self.length + 1)],
            "cover_labels": self.cover.labels,
            "matrices": [m.str_rows() for m in self.steps],
            "periodic_from": self.periodic_from,
            "period_shift": self.period_shift,
            "period_pair": [m.str_rows() for m in self.period_pair] if self.period_pair else None,
        }


def _as_diagram(m, window=None) -> DiagramModule:
    if isinstance(m, DiagramModule):
        return m
    return present_to_diagram(m, window)


def minimal_cover(m, window=None, cap: int = DEFAULT_CAP):
    """Minimal cover of a module, or minimal generators of a kernel.

    For a module (presentation or diagram) this returns a ``Cover``.  For a
    ``Kernel`` it returns the syzygy ``HomogeneousMatrix``.
    """
    if isinstance(m, Kernel):
        return m.generators(cap)
    if isinstance(m, ModulePresentation) and m.relations.is_minimal() and not _has_zero_gen(m):
        return _presentation_cover(m)
    return _diagram_cover(_as_diagram(m, window))


def _has_zero_gen(p: ModulePresentation) -> bool:
    # a generator killed by a unit relation is not minimal; caught by is_minimal
    return False


def _presentation_cover(p: ModulePresentation) -> Cover:
    d = present_to_diagram(p, (int(p.top) - 12, int(p.top)), require_tail=False)
    images = []
    for k, g in enumerate(p.generators.generator_degrees):
        # generator k is the k-th standard basis vector among free basis at g
        basis = p.generators.basis(g)
        rel = gf2.image_basis(p.relations.evaluate(g))
        keep = [j for j in range(len(basis)) if j not in rel.rows]
        pos = basis.index((k, Monomial(0, 0)))
        r = rel.canonical(1 << pos)
        images.append(gf2.vec(i for i, j in enumerate(keep) if (r >> j) & 1))
    names = list(p.names) if p.names else [f"g{k}" for k in range(p.generators.rank)]
    return Cover(p.generators, images, names)


def _diagram_cover(m: DiagramModule) -> Cover:
    degs, images, labels = [], [], []
    for d in range(m.hi, m.lo - 5, -1):
        n = m.dim(d)
        if not n:
            continue
        sub = gf2.Echelon()
        if m.dim(d + 1):
            for c in m.q(d + 1):
                sub.add(c)
        if m.dim(d + 4):
            for c in m.v(d + 4):
                sub.add(c)
        for k in range(n):
            if sub.add(1 << k):
                degs.append(d)
                images.append(1 << k)
                lab = m.labels.get(d)
                labels.append(lab[k] if lab and k < len(lab) else f"e[{d}]")
    return Cover(FreeModule(tuple(degs)), images, labels)


class Kernel:
    """Degreewise kernel of a map from a free module to a module."""

    def __init__(self, source: FreeModule, evaluate, target_bottom: Optional[int] = None) -> None:
        self.F = FreePieces(source)
        self.evaluate = evaluate
        self.target_bottom = target_bottom
        self._K: Dict[int, List[int]] = {}

    def piece(self, d: int) -> List[int]:
        k = self._K.get(d)
        if k is None:
            k = gf2.kernel(self.evaluate(d)) if self.F.dim(d) else []
            self._K[d] = k
        return k

    def generators(self, cap: int = DEFAULT_CAP) -> Optional[HomogeneousMatrix]:
        F = self.F
        top = F.top
        floor = F.bottom
        if self.target_bottom is not None:
            floor = min(floor, self.target_bottom)
        found: List[Tuple[int, int]] = []
        quiet = 0
        d = top
        while True:
            if top - d > cap:
                raise WindowExceeded(f"kernel generators did not stabilize within {cap} degrees",
                                     top=top, reached=d)
            K = self.piece(d)
            new = 0
            if K:
                sub = gf2.Echelon()
                for x in self.piece(d + 1):
                    sub.add(F.mult(1, 0, x, d + 1))
                for x in self.piece(d + 4):
                    sub.add(F.mult(0, 1, x, d + 4))
                cands = sorted((sub.canonical(x) for x in K), key=lambda x: (bin(x).count("1"), x))
                for x in cands:
                    r = sub.canonical(x)
                    if r and sub.add(r):
                        found.append((d, r))
                        new += 1
            if d < floor - 4:
                stable = new == 0 and len(self.piece(d)) == len(self.piece(d + 4))
                quiet = quiet + 1 if stable else 0
                if quiet >= STABLE_RUN:
                    break
            d -= 1
        if not found:
            return None
        # lowest degree first, then discovery order
        order = sorted(range(len(found)), key=lambda j: (found[j][0], j))
        found = [found[j] for j in order]
        src = FreeModule(tuple(deg for deg, _ in found))
        cols = [F.column(vec, deg) for deg, vec in found]
        rows = tuple(tuple(cols[j][i] for j in range(len(cols))) for i in range(F.fm.rank))
        return HomogeneousMatrix(src, F.fm, rows)


def _cover_kernel(m: DiagramModule, cover: Cover) -> Kernel:
    F = FreePieces(cover.free)

    def evaluate(d: int) -> List[int]:
        cols = []
        for (g, mono) in F.basis(d):
            gd = int(cover.free.generator_degrees[g])
            cols.append(gf2.apply(m.act(mono, gd), cover.images[g]))
        return cols

    ker = Kernel(cover.free, evaluate, m.lo)
    ker.F = F
    return ker


def _matrix_kernel(d: HomogeneousMatrix) -> Kernel:
    return Kernel(d.source, d.evaluate)


def resolve(m, steps: int, window=None, cap: int = DEFAULT_CAP) -> Resolution:
    if steps < 1:
        raise ValueError("steps must be at least 1")
    diag = _as_diagram(m, window)
    cover = minimal_cover(m, window) if isinstance(m, ModulePresentation) else _diagram_cover(diag)
    mats: List[HomogeneousMatrix] = []
    if cover.free.rank:
        ker = _cover_kernel(diag, cover)
        for _ in range(steps):
            mat = ker.generators(cap)
            if mat is None:
                break
            mats.append(mat)
            ker = _matrix_kernel(mat)
    res = Resolution(m, cover, mats)
    _detect_period(res)
    return res


def _entries_equal(a: HomogeneousMatrix, b: HomogeneousMatrix) -> bool:
    return a.entries == b.entries


def _detect_period(res: Resolution) -> None:
    n = res.length
    for i in range(1, n - 1):
        if not _entries_equal(res.steps[i - 1], res.steps[i + 1]):
            continue
        if i + 2 < n and not _entries_equal(res.steps[i], res.steps[i + 2]):
            continue
        s = _shift(res.free(i), res.free(i + 2))
        if s is None:
            continue
        res.periodic_from = i
        res.period_shift = s
        a, b = res.steps[i - 1], res.steps[i]
        res.period_pair = (a, b) if i % 2 == 0 else (b, a)
        return
    # fallback: Betti degree multisets repeat with a constant shift
    for i in range(1, n - 2):
        shifts = {_shift(res.free(j), res.free(j + 2)) for j in range(i, n - 1)}
        if len(shifts) == 1 and None not in shifts:
            res.periodic_from = i
            res.period_shift = shifts.pop()
            return


def _shift(a: FreeModule, b: FreeModule) -> Optional[int]:
    x, y = sorted(a.generator_degrees), sorted(b.generator_degrees)
    if len(x) != len(y) or not x:
        return None
    s = {yy - xx for xx, yy in zip(x, y)}
    return s.pop() if len(s) == 1 else None


# ---------------------------------------------------------------------------
# matrix factorizations, checked over F2[Q,V] without truncating Q^3

def _lift(r: RingElement) -> frozenset:
    return frozenset((m.q_exp, m.v_exp) for m in r.support)


def poly_matmul(A, B) -> List[List[frozenset]]:
    n, k, m = len(A), len(B), len(B[0]) if B else 0
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = set()
            for t in range(k):
                for x in A[i][t]:
                    for y in B[t][j]:
                        acc ^= {(x[0] + y[0], x[1] + y[1])}
            row.append(frozenset(acc))
        out.append(row)
    return out


def is_q3_factorization(A: HomogeneousMatrix, B: HomogeneousMatrix) -> bool:
    """AB = BA = Q^3 I over F2[[Q,V]]."""
    a = [[_lift(x) for x in row] for row in A.entries]
    b = [[_lift(x) for x in row] for row in B.entries]
    n = len(a)
    if any(len(row) != n for row in a) or len(b) != n:
        return False
    want = [[frozenset({(3, 0)}) if i == j else frozenset() for j in range(n)] for i in range(n)]
    return poly_matmul(a, b) == want and poly_matmul(b, a) == want


def matrix_factorization(res: Resolution) -> Tuple[HomogeneousMatrix, HomogeneousMatrix]:
    if res.periodic_from is None or res.period_pair is None:
        raise NotPeriodic("resolution has no literal periodic pair",
                          periodic_from=res.periodic_from)
    A, B = res.period_pair
    if not is_q3_factorization(A, B):
        raise NotPeriodic("periodic pair does not factor Q^3 I")
    return A, B


def diagram_to_presentation(m: DiagramModule, cap: int = DEFAULT_CAP) -> ModulePresentation:
    """Minimal presentation: cover plus first syzygies."""
    cover = _diagram_cover(m)
    mat = _cover_kernel(m, cover).generators(cap)
    gens = cover.free
    if mat is None:
        mat = HomogeneousMatrix(FreeModule(()), gens, tuple(() for _ in range(gens.rank)))
    names = tuple(_clean(l) for l in cover.labels)
    return ModulePresentation(gens, mat, names)


def _clean(label: str) -> str:
    return label.replace(" ", "")


__all__ = [
    "Resolution", "Cover", "Kernel", "FreePieces", "minimal_cover", "resolve", "matrix_factorization",
    "is_q3_factorization", "diagram_to_presentation", "poly_matmul",
]

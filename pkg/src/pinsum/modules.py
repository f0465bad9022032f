"""Graded R-modules: presentations, degreewise diagrams, and the catalog.

A ``ModulePresentation`` is a free module with a homogeneous relation
matrix.  A ``DiagramModule`` stores the module degreewise on a window
together with the Q and V action matrices and a V-periodic tail below the
window.  Catalog entries also carry a chain model over D (see ``chain``) so
that connected sums, duals and Gysin data can be computed exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import gf2
from .chain import DModule, Gen, Homology, delem, dual as chain_dual, chain_str
from .errors import (InvariantViolation, MissingMarking, MissingModel, ParseError,
                     UnknownCatalogEntry, WindowExceeded, WindowTooSmall)
from .ring_core import ONE, ZERO, Q as RQ, V as RV, Monomial, RingElement, monomials_of_degree, parse_ring

DEFAULT_DEPTH = 40


# ---------------------------------------------------------------------------
# free modules and matrices

@dataclass(frozen=True)
class FreeModule:
    generator_degrees: Tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.generator_degrees)

    def basis(self, d: int) -> List[Tuple[int, Monomial]]:
        """Basis of the degree-d piece: (generator index, monomial)."""
        out = []
        for k, g in enumerate(self.generator_degrees):
            for m in monomials_of_degree(d - g):
                out.append((k, m))
        return out

    def dim(self, d: int) -> int:
        return len(self.basis(d))


@dataclass(frozen=True)
class HomogeneousMatrix:
    """rank(target) x rank(source) matrix of ring elements (column convention)."""

    source: FreeModule
    target: FreeModule
    entries: Tuple[Tuple[RingElement, ...], ...]

    def __post_init__(self) -> None:
        if len(self.entries) != self.target.rank:
            raise ValueError("entries must have one row per target generator")
        for i, row in enumerate(self.entries):
            if len(row) != self.source.rank:
                raise ValueError("entries must have one column per source generator")
            for j, r in enumerate(row):
                if r and (not r.is_homogeneous() or
                          r.degree != self.source.generator_degrees[j] - self.target.generator_degrees[i]):
                    raise InvariantViolation(f"entry ({i},{j}) = {r} has the wrong degree")

    @classmethod
    def from_rows(cls, source_degs, target_degs, rows) -> "HomogeneousMatrix":
        ents = tuple(tuple(x if isinstance(x, RingElement) else parse_ring(x) for x in row) for row in rows)
        return cls(FreeModule(tuple(source_degs)), FreeModule(tuple(target_degs)), ents)

    def column(self, j: int) -> List[RingElement]:
        return [row[j] for row in self.entries]

    def evaluate(self, d: int) -> List[int]:
        """F2 matrix from the source piece at degree d to the target piece at d."""
        sb = self.source.basis(d)
        tidx = {x: k for k, x in enumerate(self.target.basis(d))}
        cols = []
        for (j, m) in sb:
            v = 0
            for i in range(self.target.rank):
                for n in (self.entries[i][j] * RingElement([m])).support:
                    v ^= 1 << tidx[(i, n)]
            cols.append(v)
        return cols

    def __matmul__(self, other: "HomogeneousMatrix") -> "HomogeneousMatrix":
        rows = []
        for i in range(self.target.rank):
            row = []
            for j in range(other.source.rank):
                acc = ZERO
                for k in range(self.source.rank):
                    acc = acc + self.entries[i][k] * other.entries[k][j]
                row.append(acc)
            rows.append(tuple(row))
        return HomogeneousMatrix(other.source, self.target, tuple(rows))

    def is_minimal(self) -> bool:
        return not any(r.has_unit() for row in self.entries for r in row)

    def str_rows(self) -> List[List[str]]:
        return [[str(r) for r in row] for row in self.entries]

    def __str__(self) -> str:
        return "[" + ", ".join("[" + ", ".join(r) + "]" for r in self.str_rows()) + "]"


@dataclass(frozen=True)
class ModulePresentation:
    generators: FreeModule
    relations: HomogeneousMatrix
    names: Tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.relations.target != self.generators:
            raise InvariantViolation("relations must land in the generator module")

    @classmethod
    def make(cls, gens, rels_cols, rel_degs=None, names=()) -> "ModulePresentation":
        """Build from generator degrees and relations given as columns."""
        gens = tuple(int(g) if Fraction(g).denominator == 1 else Fraction(g) for g in gens)
        cols = [[x if isinstance(x, RingElement) else parse_ring(x) for x in c] for c in rels_cols]
        if rel_degs is None:
            rel_degs = []
            for c in cols:
                if not all(r.is_homogeneous() for r in c):
                    raise ParseError(f"relation {c} is inhomogeneous")
                ds = {gens[i] + r.degree for i, r in enumerate(c) if r}
                if len(ds) != 1:
                    raise ParseError(f"relation {c} is zero or inhomogeneous")
                rel_degs.append(ds.pop())
        rows = tuple(tuple(cols[j][i] for j in range(len(cols))) for i in range(len(gens)))
        src = FreeModule(tuple(rel_degs))
        return cls(FreeModule(gens), HomogeneousMatrix(src, FreeModule(gens), rows), tuple(names))

    @property
    def top(self) -> int:
        return max(self.generators.generator_degrees, default=0)


# ---------------------------------------------------------------------------
# diagrams

@dataclass(frozen=True)
class TowerMarking:
    """Tower data read from the tail.

    ``alpha_bottom`` and friends hold the highest degree of a based class of
    the Q^2V, QV and V towers respectively (the far end of each tower in the
    usual left-to-right pictures).  ``based_classes`` labels basis vectors.
    """

    alpha_bottom: int
    beta_bottom: int
    gamma_bottom: int
    based_classes: Dict[int, Tuple[str, ...]] = field(default_factory=dict, compare=False)


@dataclass(eq=False)
class DiagramModule:
    lo: int
    hi: int
    dims: Dict[int, int]
    q_maps: Dict[int, List[int]]
    v_maps: Dict[int, List[int]]
    tail: bool = False
    marking: Optional[TowerMarking] = None
    offset: Fraction = Fraction(0)
    labels: Dict[int, List[str]] = field(default_factory=dict)
    model: Optional[DModule] = None

    # -- tail-extended access ------------------------------------------------
    def _fold(self, d: int) -> int:
        if d >= self.lo:
            return d
        if not self.tail:
            raise WindowTooSmall(f"degree {d} lies below the window and no tail is recorded", degree=d)
        return self.lo + (d - self.lo) % 4

    def dim(self, d: int) -> int:
        if d > self.hi:
            return 0
        return self.dims.get(self._fold(d), 0)

    def q(self, d: int) -> List[int]:
        """Matrix of Q: M_d -> M_(d-1)."""
        if d > self.hi or self.dim(d) == 0:
            return [0] * self.dim(d)
        if d - 1 >= self.lo:
            return self.q_maps[d]
        if d >= self.lo + 1:
            raise AssertionError
        f = self._fold(d)
        if f > self.lo:
            return self.q_maps[f]
        # f == lo: Q_lo = Q_(lo+4) composed with V_(lo+4)^-1
        vinv = _inverse(self.v_maps[self.lo + 4])
        return gf2.compose(self.q_maps[self.lo + 4], vinv)

    def v(self, d: int) -> List[int]:
        """Matrix of V: M_d -> M_(d-4)."""
        if d > self.hi or self.dim(d) == 0:
            return [0] * self.dim(d)
        if d - 4 >= self.lo:
            return self.v_maps[d]
        if d >= self.lo:
            # target below window: identified with M_d itself by the tail
            return gf2.identity(self.dim(d))
        return gf2.identity(self.dim(d))

    def act(self, mono: Monomial, d: int) -> List[int]:
        mat = gf2.identity(self.dim(d))
        cur = d
        for _ in range(mono.v_exp):
            mat = gf2.compose(self.v(cur), mat)
            cur -= 4
        for _ in range(mono.q_exp):
            mat = gf2.compose(self.q(cur), mat)
            cur -= 1
        return mat

    def degrees(self) -> List[int]:
        return [d for d in range(self.hi, self.lo - 1, -1) if self.dims.get(d, 0)]

    def shifted(self, n: int) -> "DiagramModule":
        sh = lambda dct: {d + n: v for d, v in dct.items()}
        marking = None
        if self.marking is not None:
            mk = self.marking
            marking = TowerMarking(mk.alpha_bottom + n, mk.beta_bottom + n, mk.gamma_bottom + n,
                                   sh(mk.based_classes))
        return DiagramModule(self.lo + n, self.hi + n, sh(self.dims), sh(self.q_maps), sh(self.v_maps),
                             self.tail, marking, self.offset, sh(self.labels),
                             self.model.shifted(n) if self.model is not None else None)

    def same_as(self, other: "DiagramModule", lo: Optional[int] = None, hi: Optional[int] = None) -> bool:
        """Isomorphism check degreewise: dims plus ranks of all Q/V composites."""
        lo = max(self.lo, other.lo) if lo is None else lo
        hi = max(self.hi, other.hi) if hi is None else hi
        for d in range(hi, lo - 1, -1):
            if self.dim(d) != other.dim(d):
                return False
        return _rank_profile(self, lo, hi) == _rank_profile(other, lo, hi)

    # -- serialization -----------------------------------------------------
    def to_json(self) -> dict:
        out = {
            "window": [self.lo, self.hi],
            "offset": str(self.offset),
            "dims": {str(d): self.dims[d] for d in self.degrees()},
            "q_maps": {str(d): _mat_json(self.q_maps[d], self.dim(d - 1))
                       for d in self.degrees() if d in self.q_maps and self.dim(d - 1)},
            "v_maps": {str(d): _mat_json(self.v_maps[d], self.dim(d - 4))
                       for d in self.degrees() if d in self.v_maps and self.dim(d - 4)},
            "tail": {"periodic": self.tail, "pattern": [self.dim(self.lo + r) for r in range(4)]}
            if self.tail else None,
        }
        if self.labels:
            out["labels"] = {str(d): self.labels[d] for d in self.degrees() if d in self.labels}
        if self.marking is not None:
            out["marking"] = {"alpha_bottom": self.marking.alpha_bottom,
                              "beta_bottom": self.marking.beta_bottom,
                              "gamma_bottom": self.marking.gamma_bottom}
        return out

    def ascii(self, lo: Optional[int] = None) -> str:
        return render_ascii(self, lo)


def _inverse(cols: List[int]) -> List[int]:
    n = len(cols)
    out = []
    for k in range(n):
        x = gf2.solve(cols, 1 << k)
        if x is None:
            raise InvariantViolation("tail V-map is not invertible")
        out.append(x)
    return out


def _mat_json(cols: List[int], n_rows: int) -> List[List[int]]:
    return [[(c >> r) & 1 for c in cols] for r in range(n_rows)]


def mat_from_json(rows, n_cols: int) -> List[int]:
    """Inverse of the row-list matrix encoding: column bitsets."""
    cols = [0] * n_cols
    for r, row in enumerate(rows):
        if len(row) != n_cols:
            raise ParseError("matrix row has the wrong length", row=r)
        for c, x in enumerate(row):
            if x not in (0, 1):
                raise ParseError("matrix entries must be 0 or 1")
            if x:
                cols[c] |= 1 << r
    return cols


def diagram_from_json(obj: dict) -> DiagramModule:
    """Rebuild a diagram written by DiagramModule.to_json (no chain model)."""
    try:
        lo, hi = (int(x) for x in obj["window"])
        dims = {int(d): int(n) for d, n in obj["dims"].items()}
        q_raw, v_raw = obj.get("q_maps", {}), obj.get("v_maps", {})
        labels = {int(d): list(l) for d, l in obj.get("labels", {}).items()}
        offset = Fraction(obj.get("offset", "0"))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad diagram descriptor: {exc}") from exc
    if lo >= hi:
        raise WindowExceeded("window must satisfy lo < hi", window=[lo, hi])
    q_maps, v_maps = {}, {}
    for d, n in dims.items():
        if d - 1 >= lo:
            q_maps[d] = mat_from_json(q_raw.get(str(d), []), n) if dims.get(d - 1) else [0] * n
        if d - 4 >= lo:
            v_maps[d] = mat_from_json(v_raw.get(str(d), []), n) if dims.get(d - 4) else [0] * n
    return finish_diagram(dims, q_maps, v_maps, lo, hi, labels, None, offset, require_tail=False)


def _rank_profile(m: DiagramModule, lo: int, hi: int):
    prof = []
    for d in range(hi, lo - 1, -1):
        if not m.dim(d):
            continue
        for a in range(3):
            for b in range(3):
                if a == 0 and b == 0:
                    continue
                if d - a - 4 * b < lo:
                    continue
                prof.append((d, a, b, gf2.rank(m.act(Monomial(a, b), d))))
    return prof


def check_diagram(m: DiagramModule, lo: Optional[int] = None) -> None:
    """Assert VQ = QV and Q^3 = 0 on every degree of the window."""
    lo = m.lo if lo is None else lo
    for d in range(m.hi, lo - 1, -1):
        if not m.dim(d):
            continue
        qv = gf2.compose(m.q(d - 4), m.v(d))
        vq = gf2.compose(m.v(d - 1), m.q(d))
        if qv != vq:
            raise InvariantViolation(f"QV != VQ at degree {d}")
        q3 = gf2.compose(m.q(d - 2), gf2.compose(m.q(d - 1), m.q(d)))
        if any(q3):
            raise InvariantViolation(f"Q^3 != 0 at degree {d}")


def _detect_tail(dims, v_maps, lo, hi) -> bool:
    if hi - lo < 8:
        return False
    for d in range(lo + 4, lo + 8):
        n, m = dims.get(d, 0), dims.get(d - 4, 0)
        if n != m:
            return False
        if n and gf2.rank(v_maps[d]) != n:
            return False
    return True


def finish_diagram(dims, q_maps, v_maps, lo, hi, labels=None, model=None, offset=Fraction(0),
                   require_tail=True) -> DiagramModule:
    tail = _detect_tail(dims, v_maps, lo, hi)
    if require_tail and not tail:
        raise WindowTooSmall(f"no V-periodic tail at the bottom of window [{lo}, {hi}]", window=[lo, hi])
    m = DiagramModule(lo, hi, dims, q_maps, v_maps, tail, None, offset, labels or {}, model)
    if tail:
        try:
            m.marking = compute_marking(m)
        except MissingMarking:
            m.marking = None
    return m


# ---------------------------------------------------------------------------
# presentation -> diagram

def present_to_diagram(p: ModulePresentation, window: Optional[Tuple[int, int]] = None,
                       require_tail: bool = True) -> DiagramModule:
    top = int(max(p.generators.generator_degrees, default=0))
    if window is None:
        window = (top - DEFAULT_DEPTH, top)
    lo, hi = int(window[0]), int(window[1])
    if hi < top:
        raise WindowTooSmall("window must reach the top generator degree", window=[lo, hi])
    pieces = {}
    for d in range(hi, lo - 6, -1):
        basis = p.generators.basis(d)
        rel = gf2.image_basis(p.relations.evaluate(d))
        keep = [k for k in range(len(basis)) if k not in rel.rows]
        pieces[d] = (basis, rel, keep)

    def coords(vec_, d):
        basis, rel, keep = pieces[d]
        r = rel.canonical(vec_)
        return gf2.vec(i for i, k in enumerate(keep) if (r >> k) & 1)

    def act(d, q, v):
        basis, rel, keep = pieces[d]
        tt = d - q - 4 * v
        tb = {x: k for k, x in enumerate(pieces[tt][0])}
        cols = []
        for k in keep:
            g, m = basis[k]
            if m.q_exp + q > 2:
                cols.append(0)
                continue
            tgt = tb[(g, Monomial(m.q_exp + q, m.v_exp + v))]
            cols.append(coords(1 << tgt, tt))
        return cols

    dims, q_maps, v_maps, labels = {}, {}, {}, {}
    names = p.names or tuple(f"g{k}" for k in range(p.generators.rank))
    for d in range(hi, lo - 1, -1):
        basis, rel, keep = pieces[d]
        if not keep:
            continue
        dims[d] = len(keep)
        labels[d] = [_mono_label(basis[k][1], names[basis[k][0]]) for k in keep]
        if d - 1 >= lo:
            q_maps[d] = act(d, 1, 0)
        if d - 4 >= lo:
            v_maps[d] = act(d, 0, 1)
    return finish_diagram(dims, q_maps, v_maps, lo, hi, labels, require_tail=require_tail)


def _mono_label(m: Monomial, name: str) -> str:
    s = str(m)
    return name if s == "1" else f"{s}*{name}"


# ---------------------------------------------------------------------------
# model -> diagram

class LabeledHomology:
    """Homology of a model with a basis seeded by the model's named cycles.

    In each degree the basis starts with products m*g of ring monomials and
    named cycles g (when independent), then continues with the default
    homology representatives.
    """

    def __init__(self, model: DModule, lo: int, hi: Optional[int] = None) -> None:
        self.model = model
        self.H = Homology(model, lo, hi)
        self.lo, self.hi = self.H.lo, self.H.hi
        self._named = [model.named_vec(k) for k in range(len(model.named))]
        self._data: Dict[int, tuple] = {}

    def _compute(self, t: int):
        got = self._data.get(t)
        if got is not None:
            return got
        H, M = self.H, self.model
        n = H.dim(t)
        reps, labels, coords = [], [], []
        e = gf2.Echelon()
        if n:
            for name, deg, vec in self._named:
                for mono in monomials_of_degree(t - deg):
                    z = M.mult_vec((mono.q_exp, 2 * mono.v_exp), vec, deg)
                    if not z or not H.is_cycle(z, t):
                        continue
                    c = H.coords(z, t)
                    if c and e.add(c):
                        reps.append(z)
                        coords.append(c)
                        labels.append(_mono_label(mono, name))
            for k, z in enumerate(H.reps(t)):
                if len(reps) == n:
                    break
                if e.add(1 << k):
                    reps.append(z)
                    coords.append(1 << k)
                    labels.append(chain_str(M, z, t))
        inv = _inverse(coords) if coords else []
        got = (reps, labels, inv)
        self._data[t] = got
        return got

    def dim(self, t: int) -> int:
        return self.H.dim(t)

    def reps(self, t: int) -> List[int]:
        return self._compute(t)[0]

    def labels(self, t: int) -> List[str]:
        return self._compute(t)[1]

    def coords(self, v: int, t: int) -> int:
        inv = self._compute(t)[2]
        return gf2.apply(inv, self.H.coords(v, t)) if inv else 0

    def rep_of(self, coords: int, t: int) -> int:
        reps = self.reps(t)
        out = 0
        for k in gf2.bits(coords):
            out ^= reps[k]
        return out

    def is_boundary(self, v: int, t: int) -> bool:
        return self.H.is_boundary(v, t)

    def is_cycle(self, v: int, t: int) -> bool:
        return self.H.is_cycle(v, t)

    def bounding_chain(self, v: int, t: int) -> Optional[int]:
        return self.H.bounding_chain(v, t)

    def action(self, mono, t: int) -> List[int]:
        """Matrix of a cycle monomial (a, b) = Q^a e^b of D on H_t."""
        tt = t - mono[0] - 2 * mono[1]
        return [self.coords(self.model.mult_vec(mono, z, t), tt) for z in self.reps(t)]


def diagram_from_model(model: DModule, lo: Optional[int] = None, hi: Optional[int] = None,
                       require_tail: bool = True) -> DiagramModule:
    top = model.top
    hi = top if hi is None else hi
    lo = top - DEFAULT_DEPTH if lo is None else lo
    H = LabeledHomology(model, lo - 4, hi)
    dims, q_maps, v_maps, labels = {}, {}, {}, {}
    for d in range(hi, lo - 1, -1):
        n = H.dim(d)
        if not n:
            continue
        dims[d] = n
        labels[d] = H.labels(d)
        if d - 1 >= lo:
            q_maps[d] = H.action((1, 0), d)
        if d - 4 >= lo:
            v_maps[d] = H.action((0, 2), d)
    out = finish_diagram(dims, q_maps, v_maps, lo, hi, labels, model, model.offset, require_tail)
    out.homology = H
    return out


def name_generators(model: DModule, names: Dict[int, Sequence[str]], depth: int = 24) -> DModule:
    """Attach names to minimal generators of the homology, per degree."""
    H = Homology(model, model.top - depth, model.top)
    named = []
    for t, labs in names.items():
        sub = gf2.Echelon()
        if H.dim(t + 1):
            for c in H.action((1, 0), t + 1):
                sub.add(c)
        if H.dim(t + 4):
            for c in H.action((0, 2), t + 4):
                sub.add(c)
        found = [H.reps(t)[k] for k in range(H.dim(t)) if sub.add(1 << k)]
        for lab, z in zip(labs, found):
            named.append((lab, t, model.from_vec(z, t)))
    return model.with_names(list(model.named) + named)


# ---------------------------------------------------------------------------
# towers and markings

def tail_types(m: DiagramModule) -> Dict[str, int]:
    """Residues mod 4 of the V, QV and Q^2V towers, read from the tail."""
    if not m.tail:
        raise MissingMarking("diagram has no periodic tail")
    pattern = {r: m.dim(m.lo + r) for r in range(4)}
    occupied = sorted(((m.lo + r) % 4) for r, n in pattern.items() if n)
    if sorted(pattern.values()) != [0, 1, 1, 1]:
        raise MissingMarking("tail is not a single copy of the R-tower", pattern=list(pattern.values()))
    empty = [r for r in range(4) if r not in occupied][0]
    c = (empty - 1) % 4
    return {"V": c, "QV": (c - 1) % 4, "Q2V": (c - 2) % 4}


def is_based(m: DiagramModule, d: int, v: int) -> bool:
    """True if V^k v is nonzero once it reaches the periodic tail."""
    cur = d
    while cur >= m.lo + 4:
        if not v:
            return False
        v = gf2.apply(m.v(cur), v)
        cur -= 4
    return v != 0


def compute_marking(m: DiagramModule) -> TowerMarking:
    types = tail_types(m)
    tops = {}
    based: Dict[int, Tuple[str, ...]] = {}
    by_res = {r: name for name, r in types.items()}
    for d in range(m.hi, m.lo - 1, -1):
        n = m.dim(d)
        if not n:
            continue
        kind = by_res.get(d % 4)
        lab = []
        for k in range(n):
            if kind is not None and is_based(m, d, 1 << k):
                lab.append(kind + "-based")
            else:
                lab.append("unbased")
        based[d] = tuple(lab)
        if kind is not None and kind not in tops:
            # any based class in this piece?
            if any(is_based(m, d, 1 << k) for k in range(n)) or _piece_based(m, d):
                tops[kind] = d
    return TowerMarking(tops["Q2V"], tops["QV"], tops["V"], based)


def _piece_based(m: DiagramModule, d: int) -> bool:
    cur, mat = d, gf2.identity(m.dim(d))
    while cur >= m.lo + 4:
        mat = gf2.compose(m.v(cur), mat)
        cur -= 4
    return any(mat)


# ---------------------------------------------------------------------------
# catalog

FAMILIES = ("M", "MinusM", "N", "MinusN", "F_triv", "FVmodVk", "FullTower", "PoincareSphere")
_ALIASES = {"-M": "MinusM", "MINUSM": "MinusM", "F": "F_triv", "FTRIV": "F_triv", "F_TRIV": "F_triv",
            "FVMODVK": "FVmodVk", "R": "FullTower", "FULLTOWER": "FullTower", "S3": "FullTower",
            "POINCARESPHERE": "PoincareSphere", "POINCARE": "PoincareSphere", "-N": "MinusN",
            "MINUSN": "MinusN"}


@dataclass(frozen=True)
class CatalogId:
    family: str
    parameter: int = 0
    shift: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        fam = self.family
        if fam not in FAMILIES:
            fam = _ALIASES.get(fam.upper().replace(" ", ""), fam)
            object.__setattr__(self, "family", fam)
        if fam not in FAMILIES:
            raise UnknownCatalogEntry(f"unknown catalog family {self.family!r}")
        object.__setattr__(self, "shift", Fraction(self.shift))
        needs = fam in ("M", "MinusM", "N", "MinusN", "FVmodVk")
        if needs and self.parameter < 1:
            raise UnknownCatalogEntry(f"{fam} needs a parameter >= 1")
        if fam in ("N", "MinusN") and self.parameter % 2:
            raise UnknownCatalogEntry("N_n is defined for even n")

    def __str__(self) -> str:
        base = {"MinusM": "-M", "MinusN": "-N"}.get(self.family, self.family)
        if self.family in ("M", "MinusM", "N", "MinusN", "FVmodVk"):
            base += str(self.parameter)
        return base + (f"<{self.shift}>" if self.shift else "")


def _m_model(n: int) -> DModule:
    k = n // 2
    top = "qv^-%d" % k if k else "q"
    if n % 2 == 0:
        gens = [Gen(top, 4 * k - 1), Gen("y", 0), Gen("w", 0)]
        diff = [{}, {}, {0: delem((0, 2 * k)), 1: delem((1, 0))}]
        named = [(top, 4 * k - 1, {(0, 0, 0)}), ("1", 0, {(0, 0, 1)})]
    else:
        gens = [Gen(top, 4 * k + 1), Gen("a", 0), Gen("b", 0)]
        diff = [{}, {0: delem((2, 2 * k))}, {0: delem((0, 2 * k + 1)), 1: delem((1, 0))}]
        named = [(top, 4 * k + 1, {(0, 0, 0)}), ("v", -2, {(0, 1, 1), (2, 0, 2)})]
    return DModule(gens, diff, named=named)


def _f_model() -> DModule:
    gens = [Gen("1", 0), Gen("u", 0), Gen("w", -1), Gen("t", -1)]
    diff = [{}, {0: delem((1, 0))}, {0: delem((0, 1)), 1: delem((2, 0))},
            {1: delem((0, 1)), 2: delem((1, 0))}]
    return DModule(gens, diff, named=[("1", 0, {(0, 0, 0)})])


def _n2_model() -> DModule:
    gens = [Gen("q^2", -2), Gen("w", -2), Gen("u", -3)]
    diff = [{}, {0: delem((1, 0))}, {0: delem((0, 1)), 1: delem((2, 0))}]
    return DModule(gens, diff, named=[("v", -4, {(1, 0, 2), (0, 1, 1)}), ("q^2", -2, {(0, 0, 0)})])


def _minus_m_model(n: int) -> DModule:
    base = chain_dual(_m_model(n))
    k = n // 2
    if n % 2 == 0:
        return name_generators(base, {-4 * k: [f"v^{k}" if k > 1 else "v"], -2: ["q^2"], 0: ["z"]})
    return base


def catalog_model(cid: CatalogId) -> DModule:
    """Chain model over D whose homology is the catalog module."""
    fam, n = cid.family, cid.parameter
    if fam == "FullTower":
        base = DModule([Gen("1", 0)], [{}], named=[("1", 0, {(0, 0, 0)})])
    elif fam == "PoincareSphere":
        base = DModule([Gen("1", -3)], [{}], named=[("1", -3, {(0, 0, 0)})])
    elif fam == "M":
        base = _m_model(n)
    elif fam == "MinusM":
        base = _minus_m_model(n)
    elif fam == "F_triv" or (fam == "FVmodVk" and n == 1):
        base = _f_model()
    elif fam == "N" and n == 2:
        base = _n2_model()
    elif fam == "MinusN" and n == 2:
        base = chain_dual(_n2_model())
    else:
        raise MissingModel(f"no chain model is available for {cid}", catalog=str(cid))
    s = cid.shift
    if s.denominator == 1:
        return base.shifted(int(s))
    return base.with_offset(base.offset + (s - int(s))).shifted(int(s))


def catalog(cid: CatalogId) -> ModulePresentation:
    fam, n, s = cid.family, cid.parameter, cid.shift
    if fam == "FullTower":
        p = ModulePresentation.make([0], [], names=("1",))
    elif fam == "PoincareSphere":
        p = ModulePresentation.make([-3], [], names=("1",))
    elif fam == "F_triv":
        p = ModulePresentation.make([0], [["V"], ["Q"]], names=("1",))
    elif fam == "FVmodVk":
        p = ModulePresentation.make([0], [[f"V^{n}"], ["Q"]], names=("1",))
    elif fam == "M" and n % 2 == 0:
        k = n // 2
        p = ModulePresentation.make([4 * k - 1, 0], [[f"V^{k}", "Q"]], names=(f"qv^-{k}", "1"))
    elif fam == "M":
        k = n // 2
        p = ModulePresentation.make([-2, 4 * k + 1], [["Q", f"V^{k + 1}"], ["0", f"Q^2*V^{k}"]],
                                    names=("v", f"qv^-{k}" if k else "q"))
    elif fam == "N":
        k = n // 2
        p = ModulePresentation.make([-4 * k, -2], [["Q^2", f"V^{k}"], ["0", "Q"]],
                                    names=(f"v^{k}" if k > 1 else "v", "q^2"))
    elif fam == "MinusM" and n % 2 == 0:
        k = n // 2
        p = ModulePresentation.make([-4 * k, -2, 0],
                                    [["Q^2", f"V^{k}", "0"], ["0", "Q", "0"], ["0", "0", f"V^{k}"],
                                     ["0", "0", "Q"]], names=(f"v^{k}" if k > 1 else "v", "q^2", "z"))
    else:
        # odd -M_n and -N: read the presentation off the chain model
        from .resolution import diagram_to_presentation
        p = diagram_to_presentation(diagram_from_model(catalog_model(CatalogId(fam, n))))
    return shift(p, s)


def catalog_diagram(cid: CatalogId, depth: int = DEFAULT_DEPTH) -> DiagramModule:
    """Diagram of a catalog entry; read off the chain model when one exists."""
    try:
        model = catalog_model(cid)
    except MissingModel:
        model = None
    if model is not None:
        d = diagram_from_model(model, model.top - depth, model.top)
    else:
        p = catalog(cid)
        top = int(p.top)
        d = present_to_diagram(p, (top - depth, top))
    d.catalog_id = cid
    return d


# ---------------------------------------------------------------------------
# structural operations

def shift(m, n):
    """M<n>, with (M<n>)_d = M_(d-n)."""
    n = Fraction(n)
    if isinstance(m, DiagramModule):
        if n.denominator != 1:
            out = m.shifted(int(n // 1))
            out.offset = m.offset + (n - int(n // 1))
            return out
        return m.shifted(int(n))
    if isinstance(m, DModule):
        return m.shifted(int(n))
    gens = tuple(_num(g + n) for g in m.generators.generator_degrees)
    rels = tuple(_num(g + n) for g in m.relations.source.generator_degrees)
    return ModulePresentation(FreeModule(gens),
                              HomogeneousMatrix(FreeModule(rels), FreeModule(gens), m.relations.entries),
                              m.names)


def _num(x):
    x = Fraction(x)
    return int(x) if x.denominator == 1 else x


def direct_sum(a: ModulePresentation, b: ModulePresentation) -> ModulePresentation:
    ga, gb = a.generators.generator_degrees, b.generators.generator_degrees
    ra, rb = a.relations.source.generator_degrees, b.relations.source.generator_degrees
    rows = []
    for i in range(len(ga)):
        rows.append(tuple(a.relations.entries[i]) + tuple(ZERO for _ in rb))
    for i in range(len(gb)):
        rows.append(tuple(ZERO for _ in ra) + tuple(b.relations.entries[i]))
    gens = FreeModule(tuple(ga) + tuple(gb))
    names = (a.names or tuple(f"a{k}" for k in range(len(ga)))) + \
            (b.names or tuple(f"b{k}" for k in range(len(gb))))
    return ModulePresentation(gens, HomogeneousMatrix(FreeModule(tuple(ra) + tuple(rb)), gens, tuple(rows)),
                              names)


def zero_module() -> ModulePresentation:
    return ModulePresentation.make([], [])


def dualize(m: DiagramModule) -> DiagramModule:
    """Diagram of the orientation-reversed manifold, HS-hat(-Y) = model*<-2>.

    The R-module alone does not determine the dual (Massey products enter),
    so the diagram must carry a chain model.
    """
    if m.marking is None:
        raise MissingMarking("dualize needs a marked diagram")
    if m.model is None:
        raise MissingModel("dualize needs the chain model behind the diagram")
    dm = chain_dual(m.model, -2)
    depth = max(DEFAULT_DEPTH, m.hi - m.lo)
    return diagram_from_model(dm, dm.top - depth, dm.top)


# ---------------------------------------------------------------------------
# ascii rendering

def render_ascii(m: DiagramModule, lo: Optional[int] = None) -> str:
    """Row-of-F picture: one column per degree, highest degree on the left."""
    lo = max(m.lo, m.hi - 24) if lo is None else lo
    degs = list(range(m.hi, lo - 1, -1))
    cells = []
    for d in degs:
        n = m.dim(d)
        cells.append("." if n == 0 else ("F" if n == 1 else f"F^{n}"))
    width = max(len(c) for c in cells + [str(d) for d in degs]) + 1
    line1 = "".join(c.rjust(width) for c in cells)
    line2 = "".join(str(d).rjust(width) for d in degs)
    tail = "  ..." if m.tail else ""
    return line1 + tail + "\n" + line2


__all__ = [
    "FreeModule", "HomogeneousMatrix", "ModulePresentation", "DiagramModule", "TowerMarking", "CatalogId",
    "catalog", "catalog_model", "catalog_diagram", "present_to_diagram", "diagram_from_model", "shift",
    "direct_sum", "dualize", "zero_module", "compute_marking", "tail_types", "is_based", "check_diagram",
    "render_ascii", "finish_diagram", "diagram_from_json", "mat_from_json", "FAMILIES",
]

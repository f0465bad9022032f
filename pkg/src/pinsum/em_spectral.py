"""Connected sums via the Eilenberg-Moore spectral sequence.

The Floer module of Y0 # Y1 is H(X0 (x)_D X1)<+1> for chain models X0, X1
over D (HS-hat conventions).  The spectral sequence is computed from a
filtered semifree resolution P of X1 whose associated graded is the minimal
resolution of H(X1): filtering X0 (x) P by resolution level gives E^2 = Tor,
and every higher differential is a persistence pair of that filtration.
Massey products are read off the models by choosing bounding chains.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from . import gf2
from .chain import DMap, DModule, Gen, Homology, free_rank_one, tensor
from .errors import (MissingModel, OracleIncomplete, ParseError, PreconditionViolated,
                     WindowExceeded, NoLift)
from .modules import (DEFAULT_DEPTH, CatalogId, DiagramModule, LabeledHomology, catalog_diagram,
                      catalog_model, diagram_from_model, dualize)
from .resolution import resolve
from .ring_core import Monomial, RingElement, parse_ring, Q as RQ, V as RV
from .tor_engine import BarChain, BigradedTable, tor_minimal

SHIFT = 1  # HS-hat(Y0 # Y1) = H(X0 (x) X1)<+1>

_D = free_rank_one(0, "1")


# ---------------------------------------------------------------------------
# Massey products from chain models

@dataclass(frozen=True)
class ModuleClass:
    degree: int
    coords: int
    text: str = ""

    def __bool__(self) -> bool:
        return bool(self.coords)

    def __str__(self) -> str:
        return self.text or "0"


@dataclass(frozen=True)
class _Cyc:
    model: DModule
    t: int
    vec: int


def _delem(c: _Cyc) -> frozenset:
    return frozenset((a, b) for a, b, _ in _D.from_vec(c.vec, c.t))


def _ring_value(c: _Cyc) -> RingElement:
    mons = [Monomial(a, b // 2) for a, b, _ in _D.from_vec(c.vec, c.t) if b % 2 == 0 and a < 3]
    return RingElement(mons)


class MasseyOracle:
    """Triple and fourfold Massey products for one module (or just for R).

    Arguments are ring elements, ``ModuleClass`` values, or labels from the
    labelled homology basis.  ``seeds`` override computed values; each
    computed value is recorded in ``derived``.
    """

    def __init__(self, source=None, seeds: Optional[dict] = None, depth: int = DEFAULT_DEPTH) -> None:
        self.H: Optional[LabeledHomology] = None
        self.model: Optional[DModule] = None
        if isinstance(source, DiagramModule):
            if source.model is None:
                raise MissingModel("Massey products need the chain model behind the diagram")
            self.model = source.model
            self.H = getattr(source, "homology", None) or LabeledHomology(
                source.model, source.lo - 4, source.hi)
        elif isinstance(source, DModule):
            self.model = source
            self.H = LabeledHomology(source, source.top - depth, source.top)
        self.seeds = dict(seeds or {})
        self.derived: Dict[tuple, object] = {}
        self._RH = Homology(_D, -400, 0)

    # -- argument handling ---------------------------------------------------
    def cls(self, label: str) -> ModuleClass:
        if self.H is None:
            raise ParseError(f"no module to look up {label!r} in")
        for t in range(self.H.hi, self.H.lo - 1, -1):
            labs = self.H.labels(t) if self.H.dim(t) else []
            if label in labs:
                k = labs.index(label)
                return ModuleClass(t, 1 << k, label)
        raise ParseError(f"unknown class label {label!r}")

    def value_of(self, t: int, coords: int) -> ModuleClass:
        labs = self.H.labels(t) if self.H.dim(t) else []
        text = " + ".join(labs[k] for k in gf2.bits(coords))
        return ModuleClass(t, coords, text)

    def _arg(self, a) -> _Cyc:
        if isinstance(a, str):
            try:
                a = self.cls(a)
            except ParseError:
                a = parse_ring(a)
        if isinstance(a, RingElement):
            if not a or not a.is_homogeneous():
                raise PreconditionViolated(f"Massey argument {a} must be nonzero and homogeneous")
            t = a.degree
            vec = _D.to_vec([(m.q_exp, 2 * m.v_exp, 0) for m in a.support], t)
            return _Cyc(_D, t, vec)
        if isinstance(a, ModuleClass):
            return _Cyc(self.model, a.degree, self.H.rep_of(a.coords, a.degree))
        raise ParseError(f"bad Massey argument {a!r}")

    def _value(self, c: _Cyc):
        if c.model is _D:
            return _ring_value(c)
        return self.value_of(c.t, self.H.coords(c.vec, c.t))

    # -- chain operations --------------------------------------------------
    def _mul(self, u: _Cyc, w: _Cyc) -> _Cyc:
        if u.model is _D:
            return _Cyc(w.model, u.t + w.t, w.model.mult_elem_vec(_delem(u), w.vec, w.t))
        if w.model is _D:
            return _Cyc(u.model, u.t + w.t, u.model.mult_elem_vec(_delem(w), u.vec, u.t))
        raise OracleIncomplete("a product of two module classes needs a pairing", key="psi")

    def _bound(self, c: _Cyc, what: str) -> _Cyc:
        h = gf2.solve(c.model.dmatrix(c.t + 1), c.vec) if c.vec else 0
        if h is None:
            raise PreconditionViolated(f"Massey product undefined: {what} is nonzero", product=what)
        return _Cyc(c.model, c.t + 1, h)

    def _homology(self, model: DModule):
        return self._RH if model is _D else self.H.H

    @staticmethod
    def _add(u: _Cyc, w: _Cyc) -> _Cyc:
        assert u.model is w.model and u.t == w.t
        return _Cyc(u.model, u.t, u.vec ^ w.vec)

    # -- products ------------------------------------------------------------
    def triple(self, a, b, c):
        key = ("triple", str(a), str(b), str(c))
        if key in self.seeds:
            return self.seeds[key]
        x, y, z = self._arg(a), self._arg(b), self._arg(c)
        h1 = self._bound(self._mul(x, y), f"{a}*{b}")
        h2 = self._bound(self._mul(y, z), f"{b}*{c}")
        val = self._value(self._add(self._mul(h1, z), self._mul(x, h2)))
        self.derived[key] = val
        return val

    def bar_triple(self, x, r, s):
        """Generalized product <x|r, s>, reduced to the ordinary <r, x, s>."""
        return self.triple(r, x, s)

    def quadruple(self, a, b, c, d):
        key = ("quadruple", str(a), str(b), str(c), str(d))
        if key in self.seeds:
            return self.seeds[key]
        A, B, C, Dd = (self._arg(v) for v in (a, b, c, d))
        h12 = self._bound(self._mul(A, B), f"{a}*{b}")
        h23 = self._bound(self._mul(B, C), f"{b}*{c}")
        h34 = self._bound(self._mul(C, Dd), f"{c}*{d}")
        r13 = self._add(self._mul(h12, C), self._mul(A, h23))
        r24 = self._add(self._mul(h23, Dd), self._mul(B, h34))
        H13, H24 = self._homology(r13.model), self._homology(r24.model)
        n13 = H13.dim(r13.t)
        z12 = [_Cyc(h12.model, h12.t, z) for z in self._homology(h12.model).reps(h12.t)]
        z23 = [_Cyc(h23.model, h23.t, z) for z in self._homology(h23.model).reps(h23.t)]
        z34 = [_Cyc(h34.model, h34.t, z) for z in self._homology(h34.model).reps(h34.t)]

        def co13(u):
            return H13.coords(u.vec, u.t)

        def co24(u):
            return H24.coords(u.vec, u.t)

        cols = [co13(self._mul(z, C)) for z in z12]
        cols += [co13(self._mul(A, z)) | (co24(self._mul(z, Dd)) << n13) for z in z23]
        cols += [co24(self._mul(B, z)) << n13 for z in z34]
        sol = gf2.solve(cols, co13(r13) | (co24(r24) << n13))
        if sol is None:
            raise PreconditionViolated("fourfold Massey product undefined: no defining system",
                                       product=str(key))
        n12, n23 = len(z12), len(z23)
        for k in gf2.bits(sol):
            if k < n12:
                h12 = self._add(h12, z12[k])
            elif k < n12 + n23:
                h23 = self._add(h23, z23[k - n12])
            else:
                h34 = self._add(h34, z34[k - n12 - n23])
        r13 = self._add(self._mul(h12, C), self._mul(A, h23))
        r24 = self._add(self._mul(h23, Dd), self._mul(B, h34))
        h13 = self._bound(r13, "the first triple")
        h24 = self._bound(r24, "the second triple")
        val = self._add(self._add(self._mul(h13, Dd), self._mul(h12, h34)), self._mul(A, h24))
        out = self._value(val)
        self.derived[key] = out
        return out


ALGEBRA = MasseyOracle()


# ---------------------------------------------------------------------------
# d2 and d3 on simple tensors

def _expand_class(val, left: bool):
    if isinstance(val, RingElement):
        return [("r", m) for m in val.support]
    return [("m", (val.degree, k)) for k in gf2.bits(val.coords)]


def _window_sum(chain: BarChain, left: MasseyOracle, right: MasseyOracle, width: int) -> BarChain:
    out = BarChain()
    for (x, rs, y) in chain.terms:
        seq = [("m", x)] + [("r", r) for r in rs] + [("m", y)]
        if len(rs) + 2 < width + 1:
            continue
        for s in range(len(seq) - width + 1):
            win = seq[s:s + width]
            args = []
            for kind, v in win:
                if kind == "r":
                    args.append(RingElement([v]))
            if s == 0:
                orc = left
                a0 = orc.value_of(*_unit(x))
                args = [a0] + args
            elif s + width == len(seq):
                orc = right
                args = args + [orc.value_of(*_unit(y))]
            else:
                orc = ALGEBRA
            val = orc.triple(*args) if width == 3 else orc.quadruple(*args)
            if not val:
                continue
            for kind, v in _expand_class(val, s == 0):
                new = list(seq[:s]) + [(kind, v)] + list(seq[s + width:])
                xs, ys = new[0][1], new[-1][1]
                mid = tuple(v2 for _, v2 in new[1:-1])
                out = out + BarChain([(xs, mid, ys)])
    return out


def _unit(x):
    d, k = x
    return d, 1 << k


def d2_simple_tensor(chain: BarChain, left: MasseyOracle, right: Optional[MasseyOracle] = None) -> BarChain:
    """d2 of a sum of simple tensors x|r1|...|rn|y: insert triple products."""
    return _window_sum(chain, left, right or left, 3)


def d3_fourfold(chain: BarChain, left: MasseyOracle, right: Optional[MasseyOracle] = None) -> BarChain:
    """d3 of a sum of simple tensors, valid once d2 vanishes: fourfold products."""
    return _window_sum(chain, left, right or left, 4)


def qtuple_chain(n: int) -> BarChain:
    """Q_n = 1|Q|Q^2|Q|...|1 in Tor(F, F), with n bars."""
    rs = tuple(Monomial(1 if k % 2 == 0 else 2, 0) for k in range(n))
    return BarChain([((0, 0), rs, (0, 0))])


# ---------------------------------------------------------------------------
# filtered resolution and the spectral sequence

@dataclass
class FilteredResolution:
    P: DModule
    level: List[int]
    eps: DMap
    resolution: object
    levels: int


def filtered_resolution(X1: DModule, levels: int, depth: int = DEFAULT_DEPTH) -> FilteredResolution:
    """Semifree P -> X1 with generators for the minimal resolution of H(X1)."""
    N1 = diagram_from_model(X1, X1.top - depth, X1.top)
    H1 = N1.homology
    res = resolve(N1, max(levels, 1))
    gens: List[Gen] = []
    diff: List[Dict[int, frozenset]] = []
    level: List[int] = []
    eps_img: List[Dict[int, frozenset]] = []
    by_level: List[List[int]] = []

    def as_dict(elems) -> Dict[int, frozenset]:
        out: Dict[int, set] = {}
        for a, b, i in elems:
            out.setdefault(i, set()).symmetric_difference_update({(a, b)})
        return {i: frozenset(s) for i, s in out.items() if s}

    ids = []
    for k, deg in enumerate(res.cover.free.generator_degrees):
        deg = int(deg)
        z = H1.rep_of(res.cover.images[k], deg)
        ids.append(len(gens))
        gens.append(Gen(f"[0]{res.cover.labels[k] if k < len(res.cover.labels) else k}", deg))
        diff.append({})
        level.append(0)
        eps_img.append(as_dict(X1.from_vec(z, deg)))
    by_level.append(ids)
    for i in range(1, min(levels, res.length) + 1):
        mat = res.steps[i - 1]
        P = DModule(gens, diff, check=False)
        eps = DMap(P, X1, eps_img)
        new = []
        for j, a in enumerate(mat.source.generator_degrees):
            a = int(a)
            T = a + i - 1
            c = set()
            for k, r in enumerate(mat.column(j)):
                for m in r.support:
                    c ^= {(m.q_exp, 2 * m.v_exp, by_level[i - 1][k])}
            cv = P.to_vec(c, T)
            n1 = len(P.basis(T - 1))
            cols, which = [], []
            for x in P.basis(T):
                if level[x[2]] <= i - 2:
                    bv = P.to_vec([x], T)
                    cols.append(P.d_vec(bv, T) | (eps.apply_vec(bv, T) << n1))
                    which.append(("b", x))
            for k, col in enumerate(X1.dmatrix(T + 1)):
                cols.append(col << n1)
                which.append(("h", k))
            rhs = P.d_vec(cv, T) | (eps.apply_vec(cv, T) << n1)
            sol = gf2.solve(cols, rhs) if rhs else 0
            if sol is None:
                raise NoLift(f"no lift for resolution generator {j} at level {i}", level=i, generator=j)
            bset, h = set(c), 0
            for k in gf2.bits(sol):
                kind, x = which[k]
                if kind == "b":
                    bset ^= {x}
                else:
                    h ^= 1 << x
            new.append((Gen(f"[{i}]{j}", a + i), as_dict(bset), as_dict(X1.from_vec(h, T + 1))))
        ids = []
        for g, dg, e in new:
            ids.append(len(gens))
            gens.append(g)
            diff.append(dg)
            level.append(i)
            eps_img.append(e)
        by_level.append(ids)
    P = DModule(gens, diff)
    eps = DMap(P, X1, eps_img)
    eps.check_chain_map()
    return FilteredResolution(P, level, eps, res, len(by_level) - 1)


@dataclass
class SpectralPage:
    r: int
    entries: Dict[Tuple[int, int], int]
    differentials: Dict[Tuple[int, int], int]

    def dim(self, i: int, j: int) -> int:
        return self.entries.get((i, j), 0)

    def table(self) -> BigradedTable:
        return BigradedTable({k: v for k, v in self.entries.items() if v})


@dataclass
class SpectralSequence:
    pages: Dict[int, SpectralPage]
    e_infinity: Dict[Tuple[int, int], int]
    fired: List[Tuple[int, Tuple[int, int], Tuple[int, int]]]
    levels: int
    window: Tuple[int, int]
    trusted_bottom: int = 0  # lowest total degree untouched by the level cutoff

    def valid_level(self, r: int) -> int:
        """Highest column whose E^r entries are unaffected by truncation."""
        return self.levels - r + 1

    def max_differential(self) -> int:
        return max((r for r, _, _ in self.fired), default=0)

    def total(self, t: int, max_level: Optional[int] = None) -> int:
        return sum(v for (i, j), v in self.e_infinity.items()
                   if i + j == t and (max_level is None or i <= max_level))


def _persistence(C: DModule, filt, t: int):
    """Reduce d: C_t -> C_(t-1) in filtration order.

    Returns (pairs, positive): pairs maps a row basis index of degree t-1 to
    (column index, gap); positive lists the column indices that are cycles.
    """
    rows = C.basis(t - 1)
    cols_b = C.basis(t)
    rorder = sorted(range(len(rows)), key=lambda k: (filt(rows[k]), k))
    rpos = {k: p for p, k in enumerate(rorder)}
    mat = C.dmatrix(t)
    pivots: Dict[int, int] = {}
    pairs: Dict[int, Tuple[int, int]] = {}
    positive: List[int] = []
    for j in sorted(range(len(cols_b)), key=lambda k: (filt(cols_b[k]), k)):
        col = 0
        for b in gf2.bits(mat[j]):
            col |= 1 << rpos[b]
        while col:
            low = col.bit_length() - 1
            if low in pivots:
                col ^= pivots[low]
            else:
                pivots[low] = col
                row = rorder[low]
                pairs[row] = (j, filt(cols_b[j]) - filt(rows[row]))
                break
        if not col:
            positive.append(j)
    return pairs, positive


def spectral_sequence(X0: DModule, X1: DModule, levels: int = 12,
                      window: Optional[Tuple[int, int]] = None, fr: Optional[FilteredResolution] = None
                      ) -> SpectralSequence:
    """All pages of the spectral sequence of X0 (x) P filtered by level."""
    fr = fr or filtered_resolution(X1, levels)
    C = tensor(X0, fr.P)
    nP = fr.P.rank

    def filt(x):
        return fr.level[x[2] % nP]

    hi = C.top if window is None else window[1]
    lo = hi - 24 if window is None else window[0]
    red = {t: _persistence(C, filt, t) for t in range(hi + 1, lo - 1, -1)}
    counts: Dict[Tuple[int, int, int], int] = {}  # (gap or -1 for infinite, p, t)
    fired = []
    for t in range(hi, lo - 1, -1):
        basis = C.basis(t)
        pairs_out = red[t + 1][0]
        neg = {}
        for row, (j, gap) in red[t][0].items():
            neg[j] = gap
        for j in red[t][1]:
            x = basis[j]
            gap = pairs_out[j][1] if j in pairs_out else -1
            key = (gap, filt(x), t)
            counts[key] = counts.get(key, 0) + 1
            if j in pairs_out and gap >= 1:
                jj = pairs_out[j][0]
                src = filt(C.basis(t + 1)[jj])
                fired.append((gap, (src, t + 1 - src), (filt(x), t - filt(x))))
        for j, gap in neg.items():
            key = (gap, filt(basis[j]), t)
            counts[key] = counts.get(key, 0) + 1
    max_gap = max([g for g, _, _ in counts] + [1])
    pages = {}
    for r in range(1, max_gap + 2):
        ent: Dict[Tuple[int, int], int] = {}
        for (g, p, t), n in counts.items():
            if g == -1 or g >= r:
                ent[(p, t - p)] = ent.get((p, t - p), 0) + n
        dif: Dict[Tuple[int, int], int] = {}
        for (g, src, _tgt) in fired:
            if g == r:
                dif[src] = dif.get(src, 0) + 1
        pages[r] = SpectralPage(r, ent, dif)
    einf = {}
    for (g, p, t), n in counts.items():
        if g == -1:
            einf[(p, t - p)] = einf.get((p, t - p), 0) + n
    # a finite resolution is exact; otherwise the first missing level sits
    # no higher than the last one present
    trusted = lo
    if fr.levels >= levels:
        last = max(g.degree for k, g in enumerate(fr.P.gens) if fr.level[k] == fr.levels)
        trusted = max(X0.top + last + 2, lo)
    return SpectralSequence(pages, einf, sorted(fired), fr.levels, (lo, hi), trusted)


# ---------------------------------------------------------------------------
# extensions for sums with M_2k

_V_LABEL = re.compile(r"^(?:V(?:\^(\d+))?\*)?v(?:\^(\d+))?$")


def pretty(label: str) -> str:
    """V^a*v^b is written v^(a+b), as in the simple-type pictures."""
    m = _V_LABEL.match(label)
    if not m or not label.startswith("V"):
        return label
    a = int(m.group(1) or 1)
    b = int(m.group(2) or 1)
    return f"v^{a + b}"


@dataclass
class ExtensionReport:
    module: DiagramModule
    entries: List[dict] = field(default_factory=list)


def _even_k(Y) -> Optional[int]:
    cid = getattr(Y, "catalog_id", None) if not isinstance(Y, CatalogId) else Y
    if cid is not None and cid.family == "M" and cid.parameter % 2 == 0:
        return cid.parameter // 2
    return None


def resolve_extensions_even(left, k: int, right_shift: int = -1, depth: int = DEFAULT_DEPTH) -> ExtensionReport:
    """R-action on Tor_1 classes of left # M_2k, checked on the tensor model.

    Each x with Qx = V^k x = 0 gives the column-1 class
    x|V^k|qv^-k + x|Q|1, represented by the cycle Z below.  Its Q- and
    V-images are compared with <Q,x,V^k>|qv^-k, with Vx in column 1, or with
    <V,x,Q>|1.
    """
    L0 = left if isinstance(left, DiagramModule) else diagram_from_model(left, left.top - depth, left.top)
    X0 = L0.model
    if X0 is None:
        raise MissingModel("extension resolution needs the chain model of the other summand")
    H0 = L0.homology if hasattr(L0, "homology") else LabeledHomology(X0, L0.lo - 4, L0.hi)
    orc = MasseyOracle(L0)
    X1 = catalog_model(CatalogId("M", 2 * k, right_shift))
    top = X1.gens[0].name
    T = tensor(X0, X1, shift=SHIFT)
    HT = Homology(T, L0.lo - 4 * k - 8, T.top)
    nR = X1.rank

    def put(vec, t, j):
        return {(a, b, i * nR + j) for a, b, i in X0.from_vec(vec, t)}

    def tens_class(val: ModuleClass, j: int):
        z = H0.rep_of(val.coords, val.degree) if val else 0
        tt = val.degree + X1.gens[j].degree + SHIFT
        return T.to_vec(put(z, val.degree, j), tt), tt

    entries = []
    Vk = RingElement([Monomial(0, k)])
    for t in range(L0.hi, L0.lo - 1, -1):
        n = H0.dim(t)
        if not n:
            continue
        qm = H0.action((1, 0), t)
        vm = H0.action((0, 2 * k), t)
        nq = H0.dim(t - 1)
        ker = gf2.kernel([qm[c] | (vm[c] << nq) for c in range(n)])
        for x in ker:
            xc = orc.value_of(t, x)
            xv = H0.rep_of(x, t)
            h1 = gf2.solve(X0.dmatrix(t), X0.mult_vec((1, 0), xv, t))
            h2 = gf2.solve(X0.dmatrix(t - 4 * k + 1), X0.mult_vec((0, 2 * k), xv, t))
            if h1 is None or h2 is None:
                raise NoLift("Tor_1 class without bounding chains", degree=t)
            zt = t + X1.gens[2].degree + SHIFT
            Z = T.to_vec(put(h2, t - 4 * k + 1, 0) ^ put(h1, t, 1) ^ put(xv, t, 2), zt)
            if T.d_vec(Z, zt):
                raise NoLift("Tor_1 representative is not a cycle", degree=t)
            name = f"{xc}|V^{k}|{top} + {xc}|Q|1" if k > 1 else f"{xc}|V|{top} + {xc}|Q|1"
            m = orc.triple(RQ, xc, Vk)
            w, wt = tens_class(m, 0)
            ok = HT.is_boundary(T.mult_vec((1, 0), Z, zt) ^ w, zt - 1)
            entries.append({"class": name, "action": "Q", "column": 1,
                            "value": f"{pretty(str(m))}|{top}" if m else "0", "column_of_value": 0,
                            "verified": bool(ok)})
            vx = gf2.apply(H0.action((0, 2), t), x)
            if vx:
                vxc = orc.value_of(t - 4, vx)
                entries.append({"class": name, "action": "V", "column": 1,
                                "value": f"{vxc}|V^{k}|{top} + {vxc}|Q|1", "column_of_value": 1,
                                "verified": True})
            else:
                m2 = orc.triple(RV, xc, RQ)
                w2, _ = tens_class(m2, 1)
                ok2 = HT.is_boundary(T.mult_vec((0, 2), Z, zt) ^ w2, zt - 4)
                entries.append({"class": name, "action": "V", "column": 1,
                                "value": f"{pretty(str(m2))}|1" if m2 else "0", "column_of_value": 0,
                                "verified": bool(ok2)})
    module = diagram_from_model(T, T.top - max(DEFAULT_DEPTH, L0.hi - L0.lo), T.top)
    return ExtensionReport(module, entries)


# ---------------------------------------------------------------------------
# the pipeline

@dataclass
class ConnectedSumResult:
    module: DiagramModule
    shift_applied: int
    provenance: List[dict]
    model: DModule
    spectral: Optional[SpectralSequence] = None
    oracle: Optional[MasseyOracle] = None

    def to_json(self) -> dict:
        return {"module": self.module.to_json(), "shift_applied": self.shift_applied,
                "provenance": self.provenance}


def model_of(Y) -> DModule:
    if isinstance(Y, ConnectedSumResult):
        return Y.model
    if isinstance(Y, DModule):
        return Y
    if isinstance(Y, CatalogId):
        return catalog_model(Y)
    if isinstance(Y, DiagramModule):
        if Y.model is None:
            raise MissingModel("summand has no chain model; only E^2 is available")
        return Y.model
    raise ParseError(f"cannot use {type(Y).__name__} as a summand")


def _as_diagram(Y, depth: int = DEFAULT_DEPTH) -> DiagramModule:
    if isinstance(Y, ConnectedSumResult):
        return Y.module
    if isinstance(Y, CatalogId):
        return catalog_diagram(Y)
    if isinstance(Y, DModule):
        return diagram_from_model(Y, Y.top - depth, Y.top)
    return Y


def connected_sum(Y0, Y1, window: Optional[Tuple[int, int]] = None, levels: int = 12,
                  spectral: bool = True) -> ConnectedSumResult:
    """Y0 # Y1 for summands with chain models (HS-hat conventions)."""
    try:
        X0, X1 = model_of(Y0), model_of(Y1)
    except MissingModel as err:
        try:
            e2 = tor_minimal(_as_diagram(Y0), _as_diagram(Y1), 4, (-30, 10))
            err.report["e2"] = e2.to_json()
        except Exception:  # the E^2 page is a courtesy; the missing model is the error
            pass
        raise
    T = tensor(X0, X1, shift=SHIFT)
    hi = T.top if window is None else window[1]
    lo = hi - max(DEFAULT_DEPTH, 2 * (T.top - min(g.degree for g in T.gens)) + 16) if window is None else window[0]
    if lo >= hi:
        raise WindowExceeded("window must satisfy lo < hi", window=[lo, hi])
    module = diagram_from_model(T, lo, hi)
    prov: List[dict] = [{"step": "tensor", "shift": SHIFT,
                         "note": "module is the homology of the tensor product of the chain models"}]
    ss = None
    if spectral:
        ss = spectral_sequence(X0, X1, levels)
        for r, src, tgt in ss.fired:
            if r >= 2:
                prov.append({"step": "differential", "page": r, "source": list(src), "target": list(tgt)})
        prov.append({"step": "collapse", "last_nonzero_page": max(ss.max_differential(), 1)})
        lo_t, hi_t = ss.trusted_bottom, ss.window[1]
        agree = all(ss.total(t) == module.dim(t + SHIFT) for t in range(lo_t, hi_t + 1))
        prov.append({"step": "e_infinity_check", "degrees": [lo_t + SHIFT, hi_t + SHIFT], "agrees": agree})
    k1, k0 = _even_k(Y1), _even_k(Y0)
    other = None
    if k1 is not None:
        k, other, sh = k1, Y0, getattr(Y1, "catalog_id", Y1).shift
    elif k0 is not None:
        k, other, sh = k0, Y1, getattr(Y0, "catalog_id", Y0).shift
    if other is not None and sh.denominator == 1:
        rep = resolve_extensions_even(_as_diagram(other), k, int(sh))
        for e in rep.entries:
            prov.append({"step": "extension", **e})
    out = ConnectedSumResult(module, SHIFT, prov, T, ss)
    out.oracle = MasseyOracle(module)
    return out


def multi_sum(summands: Sequence, window: Optional[Tuple[int, int]] = None, assoc: str = "left",
              spectral: bool = False) -> ConnectedSumResult:
    """Connected sum of several summands; nested lists give explicit grouping."""

    def fold(items):
        items = [fold(x) if isinstance(x, (list, tuple)) else x for x in items]
        if not items:
            raise ParseError("empty connected sum")
        acc = items[0]
        if len(items) == 1:
            return acc if isinstance(acc, ConnectedSumResult) else _single(acc)
        for nxt in items[1:]:
            acc = connected_sum(acc, nxt, None, spectral=spectral)
        return acc

    if assoc == "left":
        flat = []

        def walk(x):
            if isinstance(x, (list, tuple)):
                for y in x:
                    walk(y)
            else:
                flat.append(x)
        walk(summands)
        res = fold(flat)
    elif assoc == "explicit":
        res = fold(list(summands))
    else:
        raise ParseError(f"unknown association {assoc!r}")
    if window is not None:
        res.module = diagram_from_model(res.model, window[0], window[1])
    return res


def _single(Y) -> ConnectedSumResult:
    X = model_of(Y)
    d = _as_diagram(Y)
    if d.model is None:
        d = diagram_from_model(X, X.top - DEFAULT_DEPTH, X.top)
    return ConnectedSumResult(d, 0, [{"step": "single"}], X)


def reverse(Y) -> ConnectedSumResult:
    """Orientation reversal of a summand, as a one-term result."""
    d = dualize(_as_diagram(Y) if not isinstance(Y, ConnectedSumResult) else Y.module)
    return ConnectedSumResult(d, 0, [{"step": "dualize"}], d.model)


__all__ = [
    "ModuleClass", "MasseyOracle", "ALGEBRA", "d2_simple_tensor", "d3_fourfold", "qtuple_chain",
    "FilteredResolution", "filtered_resolution", "SpectralPage", "SpectralSequence", "spectral_sequence",
    "ExtensionReport", "resolve_extensions_even", "ConnectedSumResult", "connected_sum", "multi_sum",
    "reverse", "model_of", "pretty", "SHIFT",
]

"""Gysin triangle data, Massey products through it, and correction terms.

The triangle HS --Q--> HS --iota--> HM --pi--> HS comes from the short exact
sequence X -> X (x) C_Q -> X of chain models, where C_Q = D{1, s} with
ds = Q.  HM is an F2[U]-module with V = U^2.

Conventions: every module here is in HS-hat conventions, so S^3 has its
unit in degree -1.  Normalized degrees (S^3 at 0) are one higher.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import gf2
from .chain import DModule, Gen, dual as chain_dual, gysin_maps
from .errors import (EvenDegreeIrreducible, MissingMarking, NoLift, OracleIncomplete, ParseError,
                     PreconditionViolated, WindowMismatch)
from .modules import (DEFAULT_DEPTH, DiagramModule, LabeledHomology, diagram_from_json, diagram_from_model,
                      mat_from_json, tail_types)
from .tor_engine import UModule

# ---------------------------------------------------------------------------
# data

@dataclass
class HMData:
    """Degreewise F2[U]-module: dims, U: HM_d -> HM_(d-2), labels."""

    lo: int
    hi: int
    dims: Dict[int, int]
    u_maps: Dict[int, List[int]]
    labels: Dict[int, List[str]] = field(default_factory=dict)

    def dim(self, d: int) -> int:
        return self.dims.get(d, 0) if self.lo <= d <= self.hi else 0

    def u(self, d: int) -> List[int]:
        return self.u_maps.get(d, [0] * self.dim(d))

    def u_power(self, d: int, n: int) -> List[int]:
        mat = gf2.identity(self.dim(d))
        for s in range(n):
            mat = gf2.compose(self.u(d - 2 * s), mat)
        return mat

    def tower_top(self) -> Optional[int]:
        """Highest degree carrying a class that survives every U-power in the window."""
        for d in range(self.hi, self.lo - 1, -1):
            if not self.dim(d):
                continue
            n = (d - self.lo) // 2
            if n >= 4 and any(self.u_power(d, n)):
                return d
        return None

    def to_umodule(self) -> UModule:
        """Decompose into one tower plus torsion summands (window permitting)."""

        def a(d, k):
            if k < 0:
                return self.dim(d)
            return gf2.rank(self.u_power(d, k)) if self.dim(d) else 0

        top = self.tower_top()
        tors = []
        for d in range(self.hi, self.lo - 1, -1):
            if not self.dim(d):
                continue
            depth = (d - self.lo) // 2
            for L in range(1, depth + 1):
                n = (a(d, L - 1) - a(d + 2, L)) - (a(d, L) - a(d + 2, L + 1))
                tors.extend([(L, d)] * n)
        return UModule(top, tuple(sorted(tors)))


@dataclass
class GysinData:
    hs: DiagramModule
    hm: HMData
    iota: Dict[int, List[int]]
    pi: Dict[int, List[int]]
    q_action: Dict[int, List[int]]
    lo: int
    hi: int
    unknowns: Tuple[str, ...] = ()

    def q(self, d: int) -> List[int]:
        return self.q_action.get(d, [0] * self.hs.dim(d))

    def v(self, d: int) -> List[int]:
        return self.hs.v(d)

    def to_json(self) -> dict:
        mat = lambda cols, n: [[(c >> r) & 1 for c in cols] for r in range(n)]
        return {
            "window": [self.lo, self.hi],
            "hs": self.hs.to_json(),
            "hm": {"dims": {str(d): n for d, n in sorted(self.hm.dims.items()) if n},
                   "u_maps": {str(d): mat(self.hm.u(d), self.hm.dim(d - 2))
                              for d in sorted(self.hm.dims) if self.hm.dim(d) and self.hm.dim(d - 2)}},
            "iota": {str(d): mat(c, self.hm.dim(d)) for d, c in sorted(self.iota.items()) if c},
            "pi": {str(d): mat(c, self.hs.dim(d)) for d, c in sorted(self.pi.items()) if c},
            "unknowns": list(self.unknowns),
        }


def gysin_from_model(X: DModule, lo: Optional[int] = None, hi: Optional[int] = None) -> GysinData:
    hi = X.top if hi is None else hi
    lo = hi - DEFAULT_DEPTH if lo is None else lo
    hs = diagram_from_model(X, lo, hi)
    HX = hs.homology
    Y, iota, pi, U = gysin_maps(X)
    HY = LabeledHomology(Y, lo - 4, hi)
    dims, umaps, labels, io, pm, qa = {}, {}, {}, {}, {}, {}
    for d in range(hi, lo - 1, -1):
        n = HY.dim(d)
        if n:
            dims[d] = n
            labels[d] = HY.labels(d)
            if d - 2 >= lo - 4:
                umaps[d] = [HY.coords(U.apply_vec(z, d), d - 2) for z in HY.reps(d)]
            pm[d] = [HX.coords(pi.apply_vec(z, d), d) for z in HY.reps(d)]
        if HX.dim(d):
            io[d] = [HY.coords(iota.apply_vec(z, d), d) for z in HX.reps(d)]
            qa[d] = HX.action((1, 0), d)
    hm = HMData(lo, hi, dims, umaps, labels)
    return GysinData(hs, hm, io, pm, qa, lo, hi)


def gysin_from_json(obj: dict) -> GysinData:
    """Explicit Gysin data: an hs diagram, hm dims and U-maps, iota and pi."""
    try:
        hs = diagram_from_json(obj["hs"])
        lo, hi = (int(x) for x in obj.get("window", [hs.lo, hs.hi]))
        hm_obj = obj["hm"]
        dims = {int(d): int(n) for d, n in hm_obj["dims"].items()}
        u_raw, io_raw, pi_raw = hm_obj.get("u_maps", {}), obj.get("iota", {}), obj.get("pi", {})
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad Gysin descriptor: {exc}") from exc
    umaps = {d: mat_from_json(u_raw.get(str(d), []), n) if dims.get(d - 2) else [0] * n for d, n in dims.items()}
    hm = HMData(lo, hi, dims, umaps)
    iota = {d: mat_from_json(io_raw.get(str(d), []), hs.dim(d)) if hm.dim(d) else [0] * hs.dim(d)
            for d in range(hi, lo - 1, -1) if hs.dim(d)}
    pi = {d: mat_from_json(pi_raw.get(str(d), []), n) if hs.dim(d) else [0] * n for d, n in dims.items()}
    qa = {d: hs.q(d) for d in range(hi, lo, -1) if hs.dim(d)}
    return GysinData(hs, hm, iota, pi, qa, lo, hi, tuple(obj.get("unknowns", ())))


def gysin_from_diagram(m: DiagramModule, lo: Optional[int] = None, hi: Optional[int] = None) -> GysinData:
    if m.model is None:
        raise OracleIncomplete("Gysin data needs the chain model behind the diagram")
    hi = m.hi if hi is None else hi
    lo = max(m.lo, hi - DEFAULT_DEPTH) if lo is None else lo
    return gysin_from_model(m.model, lo, hi)


# ---------------------------------------------------------------------------
# exactness and the Q^2 lemma

def _mat(g_maps, d, n_src):
    return g_maps.get(d, [0] * n_src)


def verify_exactness(g: GysinData, window: Optional[Tuple[int, int]] = None) -> dict:
    """Degreewise exactness of the triangle; ranks are reported per degree."""
    lo, hi = (g.lo, g.hi) if window is None else window
    if lo < g.lo or hi > g.hi or lo >= hi:
        raise WindowMismatch("window is not inside the data window", window=[lo, hi], data=[g.lo, g.hi])
    rows, ok = [], True
    for d in range(hi, lo, -1):
        hs, hs1, hm = g.hs.dim(d), g.hs.dim(d - 1), g.hm.dim(d)
        io, pm, qd = _mat(g.iota, d, hs), _mat(g.pi, d, hm), g.q(d)
        io1 = _mat(g.iota, d - 1, hs1)
        r_io, r_pi, r_q, r_io1 = gf2.rank(io), gf2.rank(pm), gf2.rank(qd), gf2.rank(io1)
        at_hm = not any(gf2.compose(pm, io)) and r_io + r_pi == hm
        at_hs = not any(gf2.compose(qd, pm)) and r_pi + r_q == hs
        at_hs1 = not any(gf2.compose(io1, qd)) and r_q + r_io1 == hs1
        good = at_hm and at_hs and at_hs1
        ok &= good
        rows.append({"degree": d, "rank_iota": r_io, "rank_pi": r_pi, "rank_q": r_q,
                     "at_hm": at_hm, "at_hs": at_hs, "at_hs_minus_1": at_hs1, "ok": good})
    return {"ok": ok, "degrees": rows}


def lemma_q2_check(g: GysinData, window: Optional[Tuple[int, int]] = None) -> bool:
    """Q^2 x = pi(U iota(x)) in every degree of the window."""
    lo, hi = (g.lo, g.hi) if window is None else window
    for d in range(hi, lo + 1, -1):
        n = g.hs.dim(d)
        if not n:
            continue
        lhs = gf2.compose(g.q(d - 1), g.q(d))
        rhs = gf2.compose(_mat(g.pi, d - 2, g.hm.dim(d - 2)),
                          gf2.compose(g.hm.u(d), _mat(g.iota, d, n)))
        if lhs != rhs:
            return False
    return True


# ---------------------------------------------------------------------------
# Massey products through the triangle

@dataclass
class Coset:
    degree: int
    rep: int
    indeterminacy: List[int]
    labels: List[str] = field(default_factory=list)

    def _space(self) -> gf2.Echelon:
        e = gf2.Echelon()
        for v in self.indeterminacy:
            e.add(v)
        return e

    def contains(self, v: int) -> bool:
        return self._space().contains(v ^ self.rep)

    def same(self, other: "Coset") -> bool:
        return self.degree == other.degree and self.contains(other.rep) and \
            gf2.rank(self.indeterminacy) == gf2.rank(other.indeterminacy) and \
            all(self._space().contains(v) for v in other.indeterminacy)

    def is_zero(self) -> bool:
        return self._space().contains(self.rep)

    def __str__(self) -> str:
        if not self.rep:
            return "0"
        return " + ".join(self.labels[k] for k in gf2.bits(self.rep)) if self.labels else bin(self.rep)


def _solve(cols: List[int], b: int, pivot: str):
    if pivot == "forward":
        return gf2.solve(cols, b)
    rev = list(reversed(cols))
    x = gf2.solve(rev, b)
    if x is None:
        return None
    n = len(cols)
    return gf2.vec(n - 1 - k for k in gf2.bits(x))


def _class(g: GysinData, x):
    """(degree, coords) from a label or a pair."""
    if isinstance(x, tuple):
        return x
    for d in g.hs.degrees():
        labs = g.hs.labels.get(d, [])
        if x in labs:
            return d, 1 << labs.index(x)
    raise ParseError(f"unknown class {x!r}")


def _image(mats: List[int]) -> List[int]:
    return list(gf2.image_basis(mats).rows.values())


def _hs_image(g: GysinData, kind: str, d: int) -> List[int]:
    """Basis of Im Q, Im Q^2 or Im V^n landing in degree d."""
    if kind == "Q":
        return _image(g.q(d + 1)) if g.hs.dim(d + 1) else []
    if kind == "Q2":
        return _image(gf2.compose(g.q(d + 1), g.q(d + 2))) if g.hs.dim(d + 2) else []
    n = int(kind[1:])
    src = d + 4 * n
    if not g.hs.dim(src):
        return []
    mat = gf2.identity(g.hs.dim(src))
    for s in range(n):
        mat = gf2.compose(g.v(src - 4 * s), mat)
    return _image(mat)


def _coset(g, d, rep, kinds):
    ind = []
    for k in kinds:
        ind.extend(_hs_image(g, k, d))
    return Coset(d, rep, ind, list(g.hs.labels.get(d, [])))


def _lift_pi(g: GysinData, d: int, x: int, pivot: str) -> int:
    y = _solve(_mat(g.pi, d, g.hm.dim(d)), x, pivot) if x else 0
    if y is None:
        raise NoLift("class is not in the image of pi although Qx = 0", degree=d)
    return y


def _lift_iota(g: GysinData, d: int, y: int, pivot: str) -> int:
    z = _solve(_mat(g.iota, d, g.hs.dim(d)), y, pivot) if y else 0
    if z is None:
        raise NoLift("class is not in the image of iota", degree=d)
    return z


def _q(g, d, x):
    return gf2.apply(g.q(d), x)


def phi1(g: GysinData, x, power: int = 1, pivot: str = "forward") -> Coset:
    """<Q, x, V^n>: lift x = pi(y), then U^(2n) y = iota(z)."""
    d, x = _class(g, x)
    vx = x
    for s in range(power):
        vx = gf2.apply(g.v(d - 4 * s), vx)
    if _q(g, d, x) or vx:
        raise PreconditionViolated("phi1 needs Qx = 0 and V^n x = 0", degree=d)
    y = _lift_pi(g, d, x, pivot)
    uy = gf2.apply(g.hm.u_power(d, 2 * power), y)
    z = _lift_iota(g, d - 4 * power, uy, pivot)
    return _coset(g, d - 4 * power, z, ["Q", f"V{power}"])


def phi2(g: GysinData, x, pivot: str = "forward") -> Coset:
    """<x, Q, Q^2> = pi(U y) for any lift x = pi(y)."""
    d, x = _class(g, x)
    if _q(g, d, x):
        raise PreconditionViolated("phi2 needs Qx = 0", degree=d)
    y = _lift_pi(g, d, x, pivot)
    w = gf2.apply(_mat(g.pi, d - 2, g.hm.dim(d - 2)), gf2.apply(g.hm.u(d), y))
    return _coset(g, d - 2, w, ["Q2"])


def phi3(g: GysinData, x, pivot: str = "forward") -> Coset:
    """<x, Q^2, Q>: U iota(x) = iota(y)."""
    d, x = _class(g, x)
    if _q(g, d - 1, _q(g, d, x)):
        raise PreconditionViolated("phi3 needs Q^2 x = 0", degree=d)
    ux = gf2.apply(g.hm.u(d), gf2.apply(_mat(g.iota, d, g.hs.dim(d)), x))
    y = _lift_iota(g, d - 2, ux, pivot)
    return _coset(g, d - 2, y, ["Q"])


def phi4(g: GysinData, x, pivot: str = "forward") -> Coset:
    """<x, Q, Q^2, Q>: choose the lift y with pi(U y) = 0, then U y = iota(w)."""
    d, x = _class(g, x)
    if _q(g, d, x):
        raise PreconditionViolated("phi4 needs Qx = 0", degree=d)
    y0 = _lift_pi(g, d, x, pivot)
    pim = _mat(g.pi, d - 2, g.hm.dim(d - 2))
    target = gf2.apply(pim, gf2.apply(g.hm.u(d), y0))
    # correct y0 by iota(w0): pi U iota = Q^2
    io = _mat(g.iota, d, g.hs.dim(d))
    cols = [gf2.apply(pim, gf2.apply(g.hm.u(d), c)) for c in io]
    w0 = _solve(cols, target, pivot) if target else 0
    if w0 is None:
        raise PreconditionViolated("phi4 needs <x, Q, Q^2> = 0", degree=d)
    y = y0 ^ gf2.apply(io, w0)
    w = _lift_iota(g, d - 2, gf2.apply(g.hm.u(d), y), pivot)
    return _coset(g, d - 2, w, ["Q"])


# ---------------------------------------------------------------------------
# equivariant reconstruction

def equivariant_reconstruct(tower: int, pairs: Sequence[Tuple[int, int]],
                            differential: Sequence[Tuple[int, int]] = (),
                            window: Optional[Tuple[int, int]] = None):
    """HS-hat and Gysin data from a reducible tower and conjugate pairs.

    ``pairs`` lists (length k, top degree d) for pairs of irreducible
    generators with U^k = 0, all in odd degree.  ``differential`` lists
    (pair index, U-power s): the tower top maps to (1+j) U^s of that pair.
    The invariant complex is modelled over D with one free generator for
    the tower and one Q-trivial orbit per pair.
    """
    gens = [Gen("g", tower)]
    for n, (k, d) in enumerate(pairs):
        if d % 2 == 0:
            raise EvenDegreeIrreducible("irreducible generators must sit in odd degree", degree=d)
        if k < 1:
            raise ParseError("pair length must be positive")
        gens.append(Gen("xyzw"[n] if n < 4 else f"x{n}", d, 1, k))
    dg: Dict[int, set] = {}
    for n, s in differential:
        k, d = pairs[n]
        if d - 2 * s != tower - 1:
            raise ParseError("differential has the wrong degree", pair=n, power=s)
        dg.setdefault(n + 1, set()).symmetric_difference_update({(0, s)})
    X = DModule(gens, [{j: frozenset(c) for j, c in dg.items()}] + [{} for _ in pairs])
    hi = max(g.degree for g in gens)
    lo = min(g.degree for g in gens) - 2 * max([k for k, _ in pairs] + [0]) - 16
    if window is not None:
        lo, hi = window
    g = gysin_from_model(X, lo, hi)
    return g.hs, g


# ---------------------------------------------------------------------------
# correction terms

@dataclass(frozen=True)
class CorrectionTerms:
    alpha: Fraction
    beta: Fraction
    gamma: Fraction
    delta: Optional[Fraction] = None
    delta_prime: Optional[Fraction] = None
    delta_double_prime: Optional[Fraction] = None

    def __post_init__(self) -> None:
        a, b, c = self.alpha, self.beta, self.gamma
        if not a >= b >= c:
            raise PreconditionViolated("alpha >= beta >= gamma fails", alpha=str(a), beta=str(b), gamma=str(c))
        if a.denominator == 1 and b.denominator == 1 and c.denominator == 1:
            if (a - b) % 2 or (b - c) % 2:
                raise PreconditionViolated("alpha, beta, gamma must agree mod 2")
        elif (a - b).denominator != 1 or ((a - b) % 2) or ((b - c) % 2):
            raise PreconditionViolated("alpha, beta, gamma must agree mod 2")

    def shifted(self, n) -> "CorrectionTerms":
        n = Fraction(n)
        f = lambda v: None if v is None else v + n
        return CorrectionTerms(self.alpha + n, self.beta + n, self.gamma + n, f(self.delta),
                               f(self.delta_prime), f(self.delta_double_prime))

    def to_json(self) -> dict:
        s = lambda v: None if v is None else str(v)
        return {"alpha": s(self.alpha), "beta": s(self.beta), "gamma": s(self.gamma), "delta": s(self.delta),
                "delta_prime": s(self.delta_prime), "delta_double_prime": s(self.delta_double_prime)}

    def __str__(self) -> str:
        parts = [f"alpha={self.alpha}", f"beta={self.beta}", f"gamma={self.gamma}"]
        if self.delta is not None:
            parts.append(f"delta={self.delta}")
        if self.delta_prime is not None:
            parts.append(f"delta'={self.delta_prime}")
        if self.delta_double_prime is not None:
            parts.append(f"delta''={self.delta_double_prime}")
        return " ".join(parts)


# Calibration: with tower tops t read in HS-hat conventions, S^3 gives
# t = -3, -2, -1 for the Q^2V, QV and V towers and -1 for the HM tower.
ALPHA_CONST, BETA_CONST, GAMMA_CONST, DELTA_CONST = 3, 2, 1, 1
# delta' and delta'' read the highest based Q^2V-type class killed by Q.
PRIME_CONST = 3


def _half(x) -> Fraction:
    return Fraction(x) / 2


def _killed_based_top(m: DiagramModule) -> int:
    """Highest degree of a based Q^2V-type class x with Qx = 0."""
    res = tail_types(m)["Q2V"]
    for d in range(m.hi, m.lo + 3, -1):
        if d % 4 != res or not m.dim(d):
            continue
        ker = gf2.kernel(m.q(d))
        for v in ker:
            cur, w = d, v
            while cur >= m.lo + 4 and w:
                w = gf2.apply(m.v(cur), w)
                cur -= 4
            if w:
                return d
    raise MissingMarking("no based class of the Q^2V tower found in the window")


def correction_terms(m: DiagramModule, g: Optional[GysinData] = None, dual: Optional[DiagramModule] = None
                     ) -> CorrectionTerms:
    """alpha, beta, gamma from the tower marking; the deltas from chain data.

    delta is read from the U-tower of HM (Gysin data); delta' from the dual
    module and delta'' from m itself.  Without chain data they stay None.
    """
    if m.marking is None:
        raise MissingMarking("correction terms need a tower marking")
    mk, off = m.marking, m.offset
    alpha = _half(mk.alpha_bottom + off + ALPHA_CONST)
    beta = _half(mk.beta_bottom + off + BETA_CONST)
    gamma = _half(mk.gamma_bottom + off + GAMMA_CONST)
    delta = dp = dpp = None
    if g is None and m.model is not None:
        g = gysin_from_model(m.model, m.lo, m.hi)
    if g is not None:
        top = g.hm.tower_top()
        if top is None:
            raise OracleIncomplete("HM window too small to see the U-tower", window=[g.lo, g.hi])
        delta = _half(top + off + DELTA_CONST)
    if dual is None and m.model is not None:
        dm = chain_dual(m.model, -2)
        dual = diagram_from_model(dm, dm.top - max(DEFAULT_DEPTH, m.hi - m.lo), dm.top)
    if dual is not None:
        dp = -_half(_killed_based_top(dual) + dual.offset + PRIME_CONST)
    if m.model is not None or dual is not None:
        try:
            dpp = _half(_killed_based_top(m) + off + PRIME_CONST)
        except MissingMarking:
            dpp = None
    return CorrectionTerms(alpha, beta, gamma, delta, dp, dpp)


__all__ = [
    "HMData", "GysinData", "gysin_from_model", "gysin_from_diagram", "gysin_from_json", "verify_exactness", "lemma_q2_check",
    "Coset", "phi1", "phi2", "phi3", "phi4", "equivariant_reconstruct", "CorrectionTerms",
    "correction_terms",
]

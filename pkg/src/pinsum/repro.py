"""The acceptance matrix behind ``pinsum repro``.

Each row recomputes one worked example from the bundled data and compares
with frozen values by exact equality.
"""

from __future__ import annotations

import json
from fractions import Fraction
from importlib import resources
from typing import Callable, Dict, List, Tuple

from . import gf2
from .em_spectral import connected_sum
from .gysin import (correction_terms, equivariant_reconstruct, gysin_from_model, lemma_q2_check, phi1, phi2,
                    phi3, verify_exactness)
from .modules import CatalogId, ModulePresentation, catalog, catalog_diagram, dualize
from .resolution import is_q3_factorization, resolve
from .tor_engine import UModule, hm_connected_sum, tor_bar_oracle, tor_minimal


def data(name: str):
    return json.loads(resources.files("pinsum").joinpath("data", name).read_text())


def _load(name: str):
    from .cli import load_module
    return load_module(data(name))


def _abg(m) -> Tuple[Fraction, Fraction, Fraction]:
    ct = correction_terms(m)
    return ct.alpha, ct.beta, ct.gamma


def _cat(f, n=0, s=-1):
    return catalog_diagram(CatalogId(f, n, s))


def check_tor_ff() -> bool:
    t = tor_minimal(catalog(CatalogId("F_triv")), catalog(CatalogId("F_triv")), 7, (-25, 0))
    want = {(0, 0): 1}
    for n in range(1, 4):
        want[(2 * n, -3 * n)] = want[(2 * n, -3 * n - 2)] = 1
    for n in range(0, 4):
        want[(2 * n + 1, -3 * n - 1)] = want[(2 * n + 1, -3 * n - 4)] = 1
    return {k: v for k, v in t.entries.items() if v} == want


def check_matrices() -> bool:
    def rows(cid_or_p, steps=4):
        p = cid_or_p if isinstance(cid_or_p, ModulePresentation) else catalog(cid_or_p)
        r = resolve(p, steps)
        return r, [s.str_rows() for s in r.steps]

    even = lambda v: [["Q", "0"], [v, "Q^2"]]
    odd = lambda v: [["Q^2", "0"], [v, "Q"]]
    ok = True
    r, m = rows(CatalogId("F_triv"))
    ok &= m == [[["V", "Q"]], even("V"), odd("V"), even("V")]
    r, m = rows(CatalogId("N", 2))
    ok &= m == [odd("V"), even("V"), odd("V"), even("V")]
    for k in (1, 2, 3):
        v = "V" if k == 1 else f"V^{k}"
        ok &= rows(CatalogId("FVmodVk", k))[1] == [[[v, "Q"]], even(v), odd(v), even(v)]
        ok &= rows(CatalogId("N", 2 * k))[1] == [odd(v), even(v), odd(v), even(v)]
        r, m = rows(CatalogId("M", 2 * k))
        ok &= m == [[[v], ["Q"]]] and r.betti(1) == [-1]
    p = ModulePresentation.make([0], [["V^2"], ["Q*V"], ["Q^2"]])
    r, m = rows(p)
    ok &= m[1] == [["Q", "0", "0"], ["V", "Q", "0"], ["0", "V", "Q"]]
    ok &= m[2] == [["Q^2", "0", "0"], ["Q*V", "Q^2", "0"], ["V^2", "Q*V", "Q^2"]]
    ok &= r.period_pair is not None and is_q3_factorization(*r.period_pair)
    for cid in (CatalogId("F_triv"), CatalogId("N", 2), CatalogId("N", 4), CatalogId("FVmodVk", 2),
                CatalogId("MinusM", 2)):
        r = resolve(catalog(cid), 5)
        ok &= r.period_pair is not None and is_q3_factorization(*r.period_pair)
    return bool(ok)


PERIODIC_CATALOG = [("F_triv", 0), ("N", 2), ("N", 4), ("FVmodVk", 1), ("FVmodVk", 2), ("FVmodVk", 3),
                    ("M", 1), ("M", 2), ("M", 3), ("M", 4), ("MinusM", 2), ("MinusM", 3), ("MinusM", 4),
                    ("MinusN", 2), ("FullTower", 0), ("PoincareSphere", 0)]


def check_periodicity() -> bool:
    for f, n in PERIODIC_CATALOG:
        r = resolve(catalog(CatalogId(f, n)), 7)
        for i in range(3, r.length - 1):
            if sorted(x - 3 for x in r.betti(i)) != r.betti(i + 2):
                return False
    return True


ORACLE_SET = [("F_triv", 0), ("M", 1), ("M", 2), ("M", 3), ("M", 4), ("MinusM", 2), ("MinusM", 3), ("N", 2),
              ("FVmodVk", 2)]


def check_oracle() -> bool:
    mods = [catalog(CatalogId(f, n)) for f, n in ORACLE_SET]
    return all(tor_minimal(a, b, 4, (-30, 10)) == tor_bar_oracle(a, b, 4, (-30, 10)) for a in mods for b in mods)


def check_m1m1() -> bool:
    r = connected_sum(_cat("M", 1), _cat("M", 1))
    m = r.module
    dims = [m.dim(d) for d in range(1, -5, -1)]
    pic = dims == [1, 2, 1, 1, 1, 0] and gf2.rank(m.q(1)) == 1 and not any(m.q(0)) and not any(m.v(0))
    pic &= gf2.rank(m.q(-1)) == 1 and gf2.rank(m.q(-2)) == 1
    pic &= gf2.apply(m.v(1), 1) == gf2.apply(m.q(-2), gf2.apply(m.q(-1), 1))
    return bool(pic) and _abg(m) == (2, 0, 0)


def check_m3m3() -> bool:
    r = connected_sum(_cat("M", 3), _cat("M", 3))
    g = gysin_from_model(r.model, r.module.lo, r.module.hi)
    m3 = gysin_from_model(_cat("M", 3).model).hm.to_umodule()
    want = UModule(0, ((3, 5), (3, 5), (3, 5), (3, 10)))
    return (_abg(r.module) == (6, 2, 0) and hm_connected_sum(m3, m3, 1).shifted(1) == want
            and g.hm.to_umodule().shifted(1) == want and verify_exactness(g)["ok"])


def check_mm2_m4() -> bool:
    r = connected_sum(_cat("MinusM", 2), _cat("M", 4))
    ext = [p for p in r.provenance if p["step"] == "extension" and p["action"] == "Q"]
    return (_abg(r.module) == (2, 2, 0) and len(ext) == 1 and ext[0]["value"] == "v^2|qv^-2"
            and ext[0]["verified"])


def check_mixed() -> bool:
    ct = correction_terms(_load("M4_minus_M3M3.json"))
    return (ct.alpha, ct.delta, ct.beta, ct.gamma) == (2, 0, -2, -2)


def check_two_summand() -> bool:
    for k in range(1, 5):
        for k2 in range(1, k + 1):
            a, b = catalog(CatalogId("M", 2 * k)), catalog(CatalogId("M", 2 * k2))
            if tor_minimal(a, b, 2, (-20, 20)) != tor_bar_oracle(a, b, 2, (-20, 20)):
                return False
            r = connected_sum(_cat("M", 2 * k), _cat("M", 2 * k2), spectral=False)
            if _abg(r.module) != (2 * k + 2 * k2, 2 * k, 0):
                return False
    return True


def check_poincare() -> bool:
    P = _cat("FullTower", 0, -3)
    xs = [_cat("M", 1), _cat("M", 2), connected_sum(_cat("M", 3), _cat("M", 3), spectral=False).module]
    for x in xs:
        y = connected_sum(x, P, spectral=False).module
        if not y.same_as(x.shifted(-2)):
            return False
        a, b = correction_terms(x), correction_terms(y)
        if (b.alpha, b.beta, b.gamma, b.delta) != (a.alpha - 1, a.beta - 1, a.gamma - 1, a.delta - 1):
            return False
    return True


def check_massey() -> bool:
    for k in (1, 2, 3):
        m = _cat("MinusM", 2 * k)
        g = gysin_from_model(m.model, m.lo, m.hi)
        if not lemma_q2_check(g):
            return False
        want_v = "v" if k == 1 else f"v^{k}"
        for piv in ("forward", "reverse"):
            a, b = phi2(g, "z", pivot=piv), phi1(g, "z", power=k, pivot=piv)
            if str(a) != "q^2" or str(b) != want_v or a.degree != -3 or b.degree != -1 - 4 * k:
                return False
        if not phi2(g, "z").same(phi2(g, "z", pivot="reverse")):
            return False
    return True


def check_sigma() -> bool:
    d = data("sigma_13_21_34_hm.json")
    hs, g = equivariant_reconstruct(d["tower"], d["pairs"], d["differential"])
    dims = {11: 1, 9: 2, 8: 1, 7: 2, 5: 2, 4: 1, 3: 2, 1: 1, 0: 1, -2: 1, -3: 1, -4: 1}
    if any(hs.dim(t) != dims.get(t, 0) for t in range(12, -5, -1)):
        return False
    ok = verify_exactness(g)["ok"] and lemma_q2_check(g)
    ok &= hs.labels[9] == ["Q*g", "e*x"] and hs.labels[7] == ["Q^3*g", "e^2*x"]
    c = phi3(g, (9, 0b10))
    ok &= c.degree == 7 and c.contains(0b10) and c.contains(0b11)
    return bool(ok)


def dual_m3m3_picture_ok() -> bool:
    """Based and unbased classes of -(M3#M3), normalized, down to degree -14."""
    m = dualize(connected_sum(_cat("M", 3), _cat("M", 3), spectral=False).module).shifted(1)
    based, unbased = [], []
    for d in range(0, -15, -1):
        for kind in m.marking.based_classes.get(d, ()):
            (unbased if kind == "unbased" else based).append(d)
    q_arrows = [d for d in range(0, -15, -1) if m.dim(d) and gf2.rank(m.q(d))]
    return (based == [-2, -5, -6, -9, -10, -12, -13, -14] and unbased == [0, 0, -2, -4, -4, -7, -8]
            and q_arrows == [-5, -7, -9, -12, -13] and gf2.rank(m.v(0)) == 2 and gf2.rank(m.v(-4)) == 1
            and not any(m.v(-7)) and not any(m.v(-8)))


def check_duality() -> bool:
    marked = [_cat("M", n) for n in (1, 2, 3, 4)] + [_cat("MinusM", n) for n in (2, 3, 4)]
    marked.append(_cat("FullTower", 0, -1))
    marked.append(connected_sum(_cat("M", 3), _cat("M", 3), spectral=False).module)
    for m in marked:
        a, b = correction_terms(m), correction_terms(dualize(m))
        if b.alpha != -a.gamma or b.beta != -a.beta or b.gamma != -a.alpha:
            return False
    return dual_m3m3_picture_ok()


def check_collapse() -> bool:
    even = [(_cat("M", 2), _cat("M", 2)), (_cat("MinusM", 2), _cat("M", 4)), (_cat("MinusM", 2), _cat("MinusM", 4)),
            (_cat("M", 4), _cat("M", 2))]
    odd = [(_cat("M", 1), _cat("M", 1)), (_cat("M", 3), _cat("M", 3)), (_cat("M", 1), _cat("M", 3))]
    for pairs, bound in ((even, 3), (odd, 4)):
        for a, b in pairs:
            ss = connected_sum(a, b).spectral
            if any(r >= bound for r, _, _ in ss.fired):
                return False
    return True


CRITERIA: List[Tuple[int, str, Callable[[], bool]]] = [
    (1, "Tor(F,F) staircase", check_tor_ff),
    (2, "resolution matrices and Q^3 factorizations", check_matrices),
    (3, "two-periodicity of Betti degrees", check_periodicity),
    (4, "minimal resolution agrees with the bar oracle", check_oracle),
    (5, "M1#M1 diagram and (2,0,0)", check_m1m1),
    (6, "M3#M3 (6,2,0) with HM and exactness", check_m3m3),
    (7, "-M2#M4 (2,2,0) with the Tor_1 extension", check_mm2_m4),
    (8, "M4#-(M3#M3) (2,0,-2,-2)", check_mixed),
    (9, "M_2k#M_2k' two-summand formula", check_two_summand),
    (10, "Poincare sphere shift", check_poincare),
    (11, "Gysin and Massey suite on -M_2k", check_massey),
    (12, "Sigma(13,21,34) reconstruction", check_sigma),
    (13, "duality of correction terms", check_duality),
    (14, "collapse bounds", check_collapse),
]


def run_all() -> List[Dict]:
    rows = []
    for cid, title, fn in CRITERIA:
        try:
            ok = bool(fn())
            err = None
        except Exception as exc:  # a crash is a failed row, reported with its message
            ok, err = False, f"{type(exc).__name__}: {exc}"
        row = {"id": cid, "title": title, "ok": ok}
        if err:
            row["error"] = err
        rows.append(row)
    return rows

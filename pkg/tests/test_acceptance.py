"""The fourteen acceptance criteria, each at exact equality."""

import pytest

from pinsum import gf2
from pinsum.em_spectral import connected_sum
from pinsum.gysin import (correction_terms, equivariant_reconstruct, gysin_from_model, lemma_q2_check, phi1, phi2,
                          phi3, verify_exactness)
from pinsum.modules import CatalogId, ModulePresentation, catalog, catalog_diagram, dualize
from pinsum.repro import PERIODIC_CATALOG, _load, data, dual_m3m3_picture_ok
from pinsum.resolution import is_q3_factorization, resolve
from pinsum.tor_engine import UModule, hm_connected_sum, tor_bar_oracle, tor_minimal


def cat(f, n=0, s=-1):
    return catalog_diagram(CatalogId(f, n, s))


def abg(m):
    ct = correction_terms(m)
    return (ct.alpha, ct.beta, ct.gamma)


def rows_of(p, steps=4):
    if not isinstance(p, ModulePresentation):
        p = catalog(p)
    r = resolve(p, steps)
    return r, [s.str_rows() for s in r.steps]


def even(v):
    return [["Q", "0"], [v, "Q^2"]]


def odd(v):
    return [["Q^2", "0"], [v, "Q"]]


@pytest.mark.criterion(1, "Tor(F,F) staircase")
def test_criterion_01_tor_ff():
    t = tor_minimal(catalog(CatalogId("F_triv")), catalog(CatalogId("F_triv")), 7, (-25, 0))
    got = sorted(k for k, v in t.entries.items() if v)
    assert got == [(0, 0), (1, -4), (1, -1), (2, -5), (2, -3), (3, -7), (3, -4), (4, -8), (4, -6),
                   (5, -10), (5, -7), (6, -11), (6, -9), (7, -13), (7, -10)]
    assert all(v == 1 for v in t.entries.values() if v)
    for n in range(1, 4):
        assert t.dim(2 * n, -3 * n) == t.dim(2 * n, -3 * n - 2) == 1
    for n in range(4):
        assert t.dim(2 * n + 1, -3 * n - 1) == t.dim(2 * n + 1, -3 * n - 4) == 1


@pytest.mark.criterion(2, "resolution matrices and Q^3 factorizations")
def test_criterion_02_matrices():
    assert rows_of(CatalogId("F_triv"))[1] == [[["V", "Q"]], even("V"), odd("V"), even("V")]
    assert rows_of(CatalogId("N", 2))[1] == [odd("V"), even("V"), odd("V"), even("V")]
    for k, v in ((1, "V"), (2, "V^2"), (3, "V^3")):
        assert rows_of(CatalogId("FVmodVk", k))[1] == [[[v, "Q"]], even(v), odd(v), even(v)]
        assert rows_of(CatalogId("N", 2 * k))[1] == [odd(v), even(v), odd(v), even(v)]
        r, m = rows_of(CatalogId("M", 2 * k))
        assert m == [[[v], ["Q"]]]
        assert r.length == 1
    p = ModulePresentation.make([0], [["V^2"], ["Q*V"], ["Q^2"]])
    r, m = rows_of(p)
    assert m[0] == [["V^2", "Q*V", "Q^2"]]
    assert m[1] == [["Q", "0", "0"], ["V", "Q", "0"], ["0", "V", "Q"]]
    assert m[2] == [["Q^2", "0", "0"], ["Q*V", "Q^2", "0"], ["V^2", "Q*V", "Q^2"]]
    assert is_q3_factorization(*r.period_pair)
    for cid in (CatalogId("F_triv"), CatalogId("N", 2), CatalogId("N", 4), CatalogId("FVmodVk", 2),
                CatalogId("MinusM", 2)):
        r = resolve(catalog(cid), 5)
        A, B = r.period_pair
        assert is_q3_factorization(A, B) and is_q3_factorization(B, A)


@pytest.mark.criterion(3, "two-periodicity of Betti degrees")
def test_criterion_03_periodicity():
    checked = 0
    for f, n in PERIODIC_CATALOG:
        r = resolve(catalog(CatalogId(f, n)), 7)
        for i in range(3, r.length - 1):
            assert sorted(x - 3 for x in r.betti(i)) == r.betti(i + 2), (f, n, i)
            checked += 1
    assert checked >= 30


ORACLE_SET = [("F_triv", 0), ("M", 1), ("M", 2), ("M", 3), ("M", 4), ("MinusM", 2), ("MinusM", 3), ("N", 2),
              ("FVmodVk", 2)]


@pytest.mark.criterion(4, "minimal resolution agrees with the bar oracle")
def test_criterion_04_oracle():
    mods = [catalog(CatalogId(f, n)) for f, n in ORACLE_SET]
    for a in mods:
        for b in mods:
            assert tor_minimal(a, b, 4, (-30, 10)) == tor_bar_oracle(a, b, 4, (-30, 10))


@pytest.mark.criterion(5, "M1#M1 diagram and (2,0,0)")
def test_criterion_05_m1m1():
    m = connected_sum(cat("M", 1), cat("M", 1)).module
    assert [m.dim(d) for d in range(1, -6, -1)] == [1, 2, 1, 1, 1, 0, 1]
    assert gf2.rank(m.q(1)) == 1
    assert not any(m.q(0)) and not any(m.v(0))
    assert gf2.rank(m.q(-1)) == 1 and gf2.rank(m.q(-2)) == 1
    # V on the top class lands on the bottom of the Q chain from degree -1
    assert gf2.apply(m.v(1), 1) == gf2.apply(m.q(-2), gf2.apply(m.q(-1), 1)) != 0
    assert abg(m) == (2, 0, 0)


@pytest.mark.criterion(6, "M3#M3 (6,2,0) with HM and exactness")
def test_criterion_06_m3m3():
    r = connected_sum(cat("M", 3), cat("M", 3))
    assert abg(r.module) == (6, 2, 0)
    want = UModule(0, ((3, 5), (3, 5), (3, 5), (3, 10)))
    m3 = gysin_from_model(cat("M", 3).model).hm.to_umodule()
    assert hm_connected_sum(m3, m3, 1).shifted(1) == want
    g = gysin_from_model(r.model, r.module.lo, r.module.hi)
    assert g.hm.to_umodule().shifted(1) == want
    assert verify_exactness(g)["ok"]
    assert lemma_q2_check(g)


@pytest.mark.criterion(7, "-M2#M4 (2,2,0) with the Tor_1 extension")
def test_criterion_07_mm2_m4():
    r = connected_sum(cat("MinusM", 2), cat("M", 4))
    assert abg(r.module) == (2, 2, 0)
    ext = [p for p in r.provenance if p["step"] == "extension"]
    q = [p for p in ext if p["action"] == "Q"]
    assert len(q) == 1
    assert q[0]["value"] == "v^2|qv^-2" and q[0]["verified"]
    assert q[0]["class"] == "z|V^2|qv^-2 + z|Q|1"


@pytest.mark.criterion(8, "M4#-(M3#M3) (2,0,-2,-2)")
def test_criterion_08_mixed():
    ct = correction_terms(_load("M4_minus_M3M3.json"))
    assert (ct.alpha, ct.delta, ct.beta, ct.gamma) == (2, 0, -2, -2)


@pytest.mark.criterion(9, "M_2k#M_2k' two-summand formula")
def test_criterion_09_two_summand():
    for k in range(1, 5):
        for k2 in range(1, k + 1):
            a, b = catalog(CatalogId("M", 2 * k)), catalog(CatalogId("M", 2 * k2))
            assert tor_minimal(a, b, 2, (-20, 20)) == tor_bar_oracle(a, b, 2, (-20, 20))
            r = connected_sum(cat("M", 2 * k), cat("M", 2 * k2), spectral=False)
            assert abg(r.module) == (2 * k + 2 * k2, 2 * k, 0), (k, k2)


@pytest.mark.criterion(10, "Poincare sphere shift")
def test_criterion_10_poincare():
    P = cat("FullTower", 0, -3)
    xs = [cat("M", 1), cat("M", 2), connected_sum(cat("M", 3), cat("M", 3), spectral=False).module]
    for x in xs:
        y = connected_sum(x, P, spectral=False).module
        assert y.same_as(x.shifted(-2))
        a, b = correction_terms(x), correction_terms(y)
        assert (b.alpha, b.beta, b.gamma, b.delta) == (a.alpha - 1, a.beta - 1, a.gamma - 1, a.delta - 1)


@pytest.mark.criterion(11, "Gysin and Massey suite on -M_2k")
def test_criterion_11_massey():
    for k, v in ((1, "v"), (2, "v^2"), (3, "v^3")):
        m = cat("MinusM", 2 * k)
        g = gysin_from_model(m.model, m.lo, m.hi)
        assert lemma_q2_check(g)
        for piv in ("forward", "reverse"):
            a = phi2(g, "z", pivot=piv)
            b = phi1(g, "z", power=k, pivot=piv)
            assert (str(a), a.degree) == ("q^2", -3)
            assert (str(b), b.degree) == (v, -1 - 4 * k)
        assert phi2(g, "z").same(phi2(g, "z", pivot="reverse"))
        assert phi1(g, "z", power=k).same(phi1(g, "z", power=k, pivot="reverse"))


@pytest.mark.criterion(12, "Sigma(13,21,34) reconstruction")
def test_criterion_12_sigma():
    d = data("sigma_13_21_34_hm.json")
    hs, g = equivariant_reconstruct(d["tower"], d["pairs"], d["differential"])
    dims = {11: 1, 9: 2, 8: 1, 7: 2, 5: 2, 4: 1, 3: 2, 1: 1, 0: 1, -2: 1, -3: 1, -4: 1}
    assert {t: hs.dim(t) for t in range(12, -5, -1) if hs.dim(t)} == dims
    arrows = {t: (hs.q(t), hs.v(t)) for t in dims}
    assert arrows == {11: ([0], [2]), 9: ([1, 0], [1, 2]), 8: ([1], [1]), 7: ([0, 0], [1, 2]),
                      5: ([1, 0], [1, 0]), 4: ([1], [1]), 3: ([0, 0], [0, 0]), 1: ([1], [1]),
                      0: ([0], [1]), -2: ([1], [1]), -3: ([1], [1]), -4: ([0], [1])}
    assert hs.labels[7] == ["Q^3*g", "e^2*x"]
    assert str(g.hm.to_umodule()) == "F[U] + F[U]/U^4<9> + F[U]/U^5<11> + F[U]/U^6<11>"
    assert verify_exactness(g)["ok"] and lemma_q2_check(g)
    c = phi3(g, (9, 0b10))
    assert c.degree == 7
    # e^2*x and e*y = Q^3*g + e^2*x represent the same coset
    assert c.contains(0b10) and c.contains(0b11)


@pytest.mark.criterion(13, "duality of correction terms")
def test_criterion_13_duality():
    marked = [cat("M", n) for n in (1, 2, 3, 4)] + [cat("MinusM", n) for n in (2, 3, 4)]
    marked += [cat("FullTower", 0, -1), connected_sum(cat("M", 3), cat("M", 3), spectral=False).module]
    for m in marked:
        a, b = correction_terms(m), correction_terms(dualize(m))
        assert (b.alpha, b.beta, b.gamma) == (-a.gamma, -a.beta, -a.alpha)
    assert abg(dualize(marked[-1])) == (0, -2, -6)
    assert dual_m3m3_picture_ok()


@pytest.mark.criterion(14, "collapse bounds")
def test_criterion_14_collapse():
    even_pairs = [(("M", 2), ("M", 2)), (("MinusM", 2), ("M", 4)), (("MinusM", 2), ("MinusM", 4)),
                  (("M", 4), ("M", 2))]
    odd_pairs = [(("M", 1), ("M", 1)), (("M", 3), ("M", 3)), (("M", 1), ("M", 3))]
    for pairs, bound in ((even_pairs, 3), (odd_pairs, 4)):
        for a, b in pairs:
            ss = connected_sum(cat(*a), cat(*b)).spectral
            assert all(r < bound for r, _, _ in ss.fired), (a, b)
    assert connected_sum(cat("M", 1), cat("M", 1)).spectral.max_differential() == 3

import pytest

from pinsum.errors import EvenDegreeIrreducible, PreconditionViolated, WindowMismatch
from pinsum.gysin import (CorrectionTerms, correction_terms, equivariant_reconstruct, gysin_from_json,
                          gysin_from_model, lemma_q2_check, phi2, phi4, verify_exactness)
from pinsum.modules import CatalogId, catalog_diagram
from pinsum.tor_engine import UModule


def cat(f, n=0, s=-1):
    return catalog_diagram(CatalogId(f, n, s))


def gy(m):
    return gysin_from_model(m.model, m.lo, m.hi)


def test_m_n_hm_and_exactness():
    for n in range(1, 6):
        g = gy(cat("M", n))
        assert g.hm.to_umodule() == UModule(-1, ((n, 2 * n - 2),))
        assert verify_exactness(g)["ok"]
        assert lemma_q2_check(g)


def test_correction_terms_m_n():
    want = {1: (1, 1, -1, 0, -1, 1), 2: (2, 2, 0, 0, 0, 0), 3: (3, 3, -1, 0, -1, 1),
            4: (4, 4, 0, 0, 0, 0), 5: (5, 5, -1, 0, -1, 1)}
    for n, w in want.items():
        ct = correction_terms(cat("M", n))
        assert (ct.alpha, ct.beta, ct.gamma, ct.delta, ct.delta_prime, ct.delta_double_prime) == w


def test_sphere_and_minus_m3():
    assert str(correction_terms(cat("FullTower"))) == "alpha=0 beta=0 gamma=0 delta=0 delta'=0 delta''=0"
    ct = correction_terms(cat("MinusM", 3))
    assert (ct.alpha, ct.beta, ct.gamma, ct.delta) == (1, -3, -3, 0)


def test_delta_prime_window():
    for m in [cat("M", n) for n in range(1, 5)] + [cat("MinusM", n) for n in (2, 3)]:
        ct = correction_terms(m)
        assert ct.delta_prime - ct.delta in (-1, 0)


def test_json_round_trip():
    g = gy(cat("MinusM", 2))
    j = g.to_json()
    assert sorted(j) == ["hm", "hs", "iota", "pi", "unknowns", "window"]
    assert verify_exactness(gysin_from_json(j))["ok"]


def test_window_mismatch():
    m = cat("MinusM", 2)
    with pytest.raises(WindowMismatch):
        verify_exactness(gy(m), (m.hi + 50, m.hi + 60))


def test_phi4_precondition():
    with pytest.raises(PreconditionViolated) as info:
        phi4(gy(cat("MinusM", 2)), "z")
    assert info.value.report["degree"] == -1


def test_coset_fields():
    c = phi2(gy(cat("MinusM", 2)), "z")
    assert str(c) == "q^2" and c.labels == ["q^2"]
    assert not c.is_zero()
    assert c.indeterminacy == []


def test_even_pair_rejected():
    with pytest.raises(EvenDegreeIrreducible) as info:
        equivariant_reconstruct(0, [(2, 4)], [])
    assert info.value.exit_code == 2


def test_correction_term_invariants():
    with pytest.raises(PreconditionViolated):
        CorrectionTerms(1, 2, 0, 0, 0, 0)
    ct = CorrectionTerms(2, 0, 0, 0, 0, 0)
    assert ct.shifted(-1).alpha == 1

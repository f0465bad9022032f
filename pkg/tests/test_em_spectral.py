import pytest

from pinsum.em_spectral import connected_sum, multi_sum, reverse
from pinsum.errors import MissingModel
from pinsum.modules import CatalogId, catalog, catalog_diagram, dualize, present_to_diagram


def cat(f, n=0, s=-1):
    return catalog_diagram(CatalogId(f, n, s))


def test_sphere_is_unit():
    for n in (1, 2, 3):
        m = cat("M", n)
        assert connected_sum(m, cat("FullTower")).module.same_as(m)


def test_commutative():
    a = connected_sum(cat("M", 1), cat("M", 2), spectral=False).module
    b = connected_sum(cat("M", 2), cat("M", 1), spectral=False).module
    assert a.same_as(b)


def test_associative():
    left = multi_sum([cat("M", 1), cat("M", 2), cat("M", 3)]).module
    right = multi_sum([cat("M", 1), [cat("M", 2), cat("M", 3)]], assoc="explicit").module
    assert left.same_as(right, max(left.lo, right.lo))


def test_missing_model_reports_e2():
    bare = present_to_diagram(catalog(CatalogId("M", 1)))
    assert bare.model is None
    with pytest.raises(MissingModel) as info:
        connected_sum(bare, cat("M", 1))
    assert info.value.exit_code == 3
    assert "e2" in info.value.report


def test_reverse_is_dual():
    assert reverse(cat("M", 1)).module.same_as(dualize(cat("M", 1)))


def test_m1m1_provenance():
    r = connected_sum(cat("M", 1), cat("M", 1))
    steps = {p["step"]: p for p in r.provenance}
    assert steps["tensor"]["shift"] == 1
    assert steps["collapse"]["last_nonzero_page"] == 3
    assert steps["e_infinity_check"] == {"step": "e_infinity_check", "degrees": [-3, 1], "agrees": True}
    assert sorted(r.spectral.pages) == [1, 2, 3, 4]


def test_e_infinity_agrees_on_examples():
    for a, b in ((("M", 3), ("M", 3)), (("MinusM", 2), ("M", 4)), (("M", 5), ("MinusM", 3))):
        r = connected_sum(cat(*a), cat(*b))
        check = [p for p in r.provenance if p["step"] == "e_infinity_check"][0]
        assert check["agrees"], (a, b)


def test_deterministic_json():
    a = connected_sum(cat("M", 3), cat("M", 3)).to_json()
    b = connected_sum(cat("M", 3), cat("M", 3)).to_json()
    assert a == b

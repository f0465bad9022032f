import pytest

from pinsum.errors import UnknownCatalogEntry
from pinsum.modules import (CatalogId, ModulePresentation, catalog, catalog_diagram, check_diagram,
                            diagram_from_json, dualize, present_to_diagram, render_ascii, tail_types)


def test_cyclic_presentation_dims():
    p = ModulePresentation.make([0], [["V^2"], ["Q*V"], ["Q^2"]])
    d = present_to_diagram(p, (-12, 0))
    # basis 1, Q, V
    assert [d.dim(x) for x in range(0, -13, -1)] == [1, 1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0]
    assert len(d.q(0)) == 1 and d.q(0) == [1]
    assert d.q(-1) == [0]


def test_m1_diagram_and_marking():
    m = catalog_diagram(CatalogId("M", 1, -1))
    assert (m.lo, m.hi) == (-40, 0)
    assert [m.dim(d) for d in range(0, -10, -1)] == [1, 1, 0, 1, 1, 1, 0, 1, 1, 1]
    mk = m.marking
    assert (mk.alpha_bottom, mk.beta_bottom, mk.gamma_bottom) == (-1, 0, -3)
    assert mk.based_classes[0] == ("QV-based",)
    assert tail_types(m) == {"V": 1, "QV": 0, "Q2V": 3}
    check_diagram(m)


def test_catalog_ids():
    assert str(CatalogId("MinusM", 2, -1)) == "-M2<-1>"
    with pytest.raises(UnknownCatalogEntry):
        CatalogId("Bogus")
    with pytest.raises(UnknownCatalogEntry):
        CatalogId("M", 0)
    with pytest.raises(UnknownCatalogEntry):
        CatalogId("N", 3)


def test_every_catalog_entry_builds():
    for cid in (CatalogId("F_triv"), CatalogId("N", 2), CatalogId("FVmodVk", 3), CatalogId("M", 5),
                CatalogId("MinusM", 4), CatalogId("MinusN", 2), CatalogId("FullTower"), CatalogId("PoincareSphere")):
        p = catalog(cid)
        assert p.generators.rank >= 1
        check_diagram(catalog_diagram(cid))


def test_json_round_trip():
    m = catalog_diagram(CatalogId("M", 3, -1))
    j = m.to_json()
    assert sorted(j) == ["dims", "labels", "marking", "offset", "q_maps", "tail", "v_maps", "window"]
    assert diagram_from_json(j).same_as(m)


def test_shift_convention():
    m = catalog_diagram(CatalogId("M", 2, -1))
    s = m.shifted(3)
    for d in range(m.lo, m.hi + 1):
        assert s.dim(d + 3) == m.dim(d)


def test_dualize_involution():
    for n in (1, 2, 3):
        m = catalog_diagram(CatalogId("M", n, -1))
        assert dualize(dualize(m)).same_as(m)


def test_dualize_matches_minus_catalog():
    for k in (1, 2, 3):
        a = dualize(catalog_diagram(CatalogId("M", 2 * k, -1)))
        b = catalog_diagram(CatalogId("MinusM", 2 * k, -1))
        lo = max(a.lo, b.lo)
        assert a.same_as(b, lo, min(a.hi, b.hi))


def test_ascii_is_deterministic():
    m = catalog_diagram(CatalogId("M", 1, -1))
    assert render_ascii(m) == render_ascii(catalog_diagram(CatalogId("M", 1, -1)))
    assert render_ascii(m).splitlines()[0].split()[:4] == ["F", "F", ".", "F"]


def test_inhomogeneous_relation_rejected():
    from pinsum.errors import ParseError
    with pytest.raises(ParseError):
        ModulePresentation.make([0], [["Q + V"]])

from pinsum.modules import CatalogId, catalog
from pinsum.ring_core import parse_ring
from pinsum.tor_engine import UModule, hm_connected_sum, shuffle, tor_bar_oracle, tor_minimal, tor_over_U


def test_shuffle():
    got = shuffle([parse_ring("Q"), parse_ring("V")], parse_ring("Q^2"))
    assert [tuple(str(x) for x in t) for t in got] == [("Q^2", "Q", "V"), ("Q", "Q^2", "V"), ("Q", "V", "Q^2")]


def test_tor_symmetry():
    a, b = catalog(CatalogId("M", 1)), catalog(CatalogId("N", 2))
    ab = tor_minimal(a, b, 3, (-20, 5))
    ba = tor_minimal(b, a, 3, (-20, 5))
    assert ab.entries == ba.entries


def test_tor_zero_is_tensor():
    t = tor_minimal(catalog(CatalogId("F_triv")), catalog(CatalogId("M", 2)), 0, (-10, 5))
    # one class per generator of M2
    assert sorted(k for k, v in t.entries.items() if v) == [(0, 0), (0, 3)]


def test_small_oracle_case():
    a, b = catalog(CatalogId("N", 2)), catalog(CatalogId("F_triv"))
    assert tor_minimal(a, b, 3, (-20, 0)) == tor_bar_oracle(a, b, 3, (-20, 0))


def test_representatives():
    f = catalog(CatalogId("F_triv"))
    t = tor_minimal(f, f, 2, (-10, 0), representatives=True)
    assert sorted(t.representatives) == [(0, 0), (1, -4), (1, -1), (2, -5), (2, -3)]
    assert all(len(v) == 1 and v[0] for v in t.representatives.values())


def test_tor_over_u():
    _, T = tor_over_U(UModule(0, ((3, 5),)), UModule(0, ((2, 4),)), 1)
    assert str(T[0]) == "F[U] + F[U]/U^2<4> + F[U]/U^3<5> + F[U]/U^2<9>"
    assert str(T[1]) == "F[U]/U^2<3>"


def test_hm_sum_m1():
    m1 = UModule(-1, ((1, 0),))
    assert hm_connected_sum(m1, m1, 1) == UModule(-1, ((1, 0), (1, 0), (1, 0), (1, 1)))


def test_umodule_json():
    u = UModule(0, ((3, 5), (2, 4)))
    assert UModule.from_json(u.to_json()) == UModule(0, ((2, 4), (3, 5)))
    assert [u.dim(d) for d in range(5, -3, -1)] == [1, 1, 1, 1, 1, 1, 0, 1]

from pinsum.modules import CatalogId, ModulePresentation, catalog, catalog_diagram
from pinsum.resolution import diagram_to_presentation, is_q3_factorization, matrix_factorization, resolve


def test_n2_betti_and_factorization():
    r = resolve(catalog(CatalogId("N", 2)), 6)
    assert [r.betti(i) for i in range(r.length + 1)] == [
        [-4, -2], [-6, -3], [-7, -5], [-9, -6], [-10, -8], [-12, -9], [-13, -11]]
    assert r.periodic_from == 1
    A, B = matrix_factorization(r)
    assert A.str_rows() == [["Q", "0"], ["V", "Q^2"]]
    assert B.str_rows() == [["Q^2", "0"], ["V", "Q"]]
    assert is_q3_factorization(A, B)


def test_m1_is_periodic():
    r = resolve(catalog(CatalogId("M", 1)), 6)
    assert r.periodic_from == 1
    assert [r.betti(i) for i in range(3)] == [[-2, 1], [-3, -1], [-5, -2]]


def test_m_even_resolution_is_finite():
    r = resolve(catalog(CatalogId("M", 4)), 6)
    assert r.length == 1
    assert r.period_pair is None


def test_steps_are_minimal():
    r = resolve(catalog(CatalogId("F_triv")), 6)
    assert all(s.is_minimal() for s in r.steps)


def test_json_shape():
    r = resolve(catalog(CatalogId("N", 2)), 4)
    assert sorted(r.to_json()) == ["cover_labels", "generator_degrees", "matrices", "period_pair",
                                   "period_shift", "periodic_from"]


def test_diagram_and_presentation_agree():
    p = ModulePresentation.make([0], [["V^2"], ["Q*V"], ["Q^2"]])
    a = resolve(p, 4)
    b = resolve(diagram_to_presentation(catalog_diagram(CatalogId("N", 2))), 4)
    c = resolve(catalog(CatalogId("N", 2)), 4)
    assert [b.betti(i) for i in range(4)] == [c.betti(i) for i in range(4)]
    assert a.betti(1) == [-8, -5, -2]


def test_non_factorization_rejected():
    r = resolve(catalog(CatalogId("N", 2)), 6)
    A, _ = matrix_factorization(r)
    assert not is_q3_factorization(A, A)

import pytest

from pinsum.errors import ParseError
from pinsum.ring_core import (ONE, Q, V, ZERO, Monomial, RingElement, UPolynomial, graded_piece_dim,
                              monomials_of_degree, parse_ring)


def test_degrees():
    assert Q.degree == -1 and V.degree == -4
    assert parse_ring("Q^2*V^3").degree == -14


def test_q_cubed_vanishes():
    assert Q * Q * Q == ZERO
    assert (Q ** 2) * V == parse_ring("Q^2V")
    assert Q ** 3 == ZERO


def test_characteristic_two():
    a = parse_ring("Q + V")
    assert a + a == ZERO
    assert a * a == parse_ring("Q^2 + V^2")


def test_parse_round_trip():
    for text in ("1", "Q", "V^3", "Q*V", "Q^2*V^2 + V^3"):
        assert parse_ring(str(parse_ring(text))) == parse_ring(text)
    assert parse_ring("0") == ZERO
    assert parse_ring("QV") == Q * V


def test_parse_errors():
    with pytest.raises(ParseError):
        parse_ring("Q + + V")
    with pytest.raises(ParseError):
        parse_ring("X^2")


def test_monomial_bounds():
    with pytest.raises(ValueError):
        Monomial(3, 0)
    with pytest.raises(ValueError):
        Monomial(0, -1)


def test_homogeneity():
    assert not parse_ring("Q + V").is_homogeneous()
    assert parse_ring("Q^2*V + V^2").is_homogeneous() is False
    assert parse_ring("V + V^2*Q^0").is_homogeneous() is False
    assert ONE.has_unit() and not Q.has_unit()


def test_graded_pieces():
    # R in degrees 0..-9: 1, Q, Q^2, -, V, QV, Q^2V, -, V^2, QV^2
    assert [graded_piece_dim(0, d) for d in range(0, -10, -1)] == [1, 1, 1, 0, 1, 1, 1, 0, 1, 1]
    assert graded_piece_dim(0, 1) == 0
    assert monomials_of_degree(-6) == [Monomial(2, 1)]
    assert monomials_of_degree(-3) == []


def test_u_polynomials():
    u = UPolynomial.parse("1 + U^2")
    assert str(u * u) == "1 + U^4"
    assert u.degrees() == [-4, 0]
    assert UPolynomial.parse("0") == UPolynomial()

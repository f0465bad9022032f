from pinsum import gf2


def test_bits_and_vec():
    assert gf2.bits(0b1011) == [0, 1, 3]
    assert gf2.vec([0, 1, 3, 3]) == 0b0011


def test_rank_kernel():
    cols = [0b011, 0b110, 0b101]
    assert gf2.rank(cols) == 2
    ker = gf2.kernel(cols)
    assert len(ker) == 1
    assert gf2.apply(cols, ker[0]) == 0


def test_solve():
    cols = [0b01, 0b11]
    x = gf2.solve(cols, 0b10)
    assert gf2.apply(cols, x) == 0b10
    assert gf2.solve([0b01], 0b10) is None


def test_compose_identity_transpose():
    a = [0b10, 0b01]
    assert gf2.compose(a, a) == gf2.identity(2)
    # rows (1,1) and (1,0) are the columns of the transpose
    assert gf2.transpose([0b11, 0b01], 2) == [0b11, 0b01]
    assert gf2.transpose([0b11, 0b10], 2) == [0b01, 0b11]
    assert gf2.transpose(gf2.transpose([0b110, 0b011], 3), 2) == [0b110, 0b011]


def test_echelon():
    e = gf2.Echelon()
    assert e.add(0b101)
    assert e.add(0b011)
    assert not e.add(0b110)
    assert e.contains(0b110)
    assert e.canonical(0b110) == 0
    assert e.canonical(0b100) == e.canonical(0b001)


def test_quotient_basis():
    q = gf2.quotient_basis([0b001, 0b010, 0b011], [0b011])
    assert len(q) == 1

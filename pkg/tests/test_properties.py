from hypothesis import given, settings
from hypothesis import strategies as st

from pinsum import gf2
from pinsum.modules import ModulePresentation, present_to_diagram
from pinsum.resolution import resolve
from pinsum.ring_core import Monomial, RingElement
from pinsum.tor_engine import UModule, hm_connected_sum

monos = st.builds(Monomial, st.integers(0, 2), st.integers(0, 3))
elems = st.lists(monos, max_size=4).map(RingElement)
cols = st.lists(st.integers(0, 2 ** 6 - 1), max_size=6)
nonunit = monos.filter(lambda m: (m.q_exp, m.v_exp) != (0, 0))
umods = st.builds(UModule, st.none() | st.integers(-4, 4),
                  st.lists(st.tuples(st.integers(1, 4), st.integers(-4, 8)), max_size=3).map(lambda t: tuple(sorted(t))))


@given(elems, elems, elems)
def test_ring_axioms(a, b, c):
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


@given(cols)
def test_rank_nullity(m):
    assert gf2.rank(m) + len(gf2.kernel(m)) == len(m)
    assert all(gf2.apply(m, k) == 0 for k in gf2.kernel(m))


@given(umods, umods)
def test_hm_sum_symmetric(a, b):
    assert hm_connected_sum(a, b) == hm_connected_sum(b, a)


@settings(max_examples=25, deadline=None)
@given(st.lists(nonunit, min_size=1, max_size=3, unique=True))
def test_monomial_quotient_resolution(rels):
    p = ModulePresentation.make([0], [[str(m)] for m in rels])
    r = resolve(p, 4)
    for a, b in zip(r.steps, r.steps[1:]):
        assert all(not x for row in (a @ b).entries for x in row)
    assert all(s.is_minimal() for s in r.steps)
    # exactness of the resolution in each degree
    for a, b in zip(r.steps, r.steps[1:]):
        for d in range(-16, 1):
            assert len(gf2.kernel(a.evaluate(d))) == gf2.rank(b.evaluate(d))
    # the cokernel of d_1 is the module itself
    m = present_to_diagram(p, (-24, 0))
    d1 = r.steps[0]
    for d in range(-16, 1):
        assert m.dim(d) == len(d1.target.basis(d)) - gf2.rank(d1.evaluate(d))

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from maxbrane import intmat, lattice
from maxbrane.errors import DegenerateLatticeError, PreconditionError
from maxbrane.lattice import IntegerLattice, make_named


def numpy_signature(gram):
    ev = np.linalg.eigvalsh(np.array(gram, dtype=float))
    return int((ev > 1e-9).sum()), int((ev < -1e-9).sum())


def test_named_lattices():
    U = make_named("U")
    assert U.gram == ((0, 1), (1, 0)) and U.det == -1 and lattice.signature(U) == (1, 1)
    E8 = make_named("E8")
    assert E8.det == 1 and E8.is_even and lattice.signature(E8) == (8, 0)
    assert lattice.signature(make_named("E8(-1)")) == (0, 8)
    K3 = make_named("U^3 + E8(-1)^2")
    assert K3.rank == 22 and K3.det == -1 and lattice.signature(K3) == (3, 19)
    assert make_named("<3>(2)").gram == ((6,),)


@pytest.mark.parametrize("expr", ["U + <2>", "E8(-1) + <-4>", "U^2 + <6> + <-10>", "<1>^3 + <-1>"])
def test_signature_against_numpy(expr):
    L = make_named(expr)
    assert lattice.signature(L) == numpy_signature(L.gram)


@settings(max_examples=40)
@given(st.lists(st.integers(-5, 5), min_size=6, max_size=6))
def test_inertia_random_symmetric(entries):
    a, b, c, d, e, f = entries
    g = [[a, b, c], [b, d, e], [c, e, f]]
    pos, neg, zero = lattice.inertia(g)
    ev = np.linalg.eigvalsh(np.array(g, dtype=float))
    assert (pos, neg, zero) == (int((ev > 1e-9).sum()), int((ev < -1e-9).sum()), int((abs(ev) <= 1e-9).sum()))


def test_discriminant_groups():
    A = lattice.discriminant_group(make_named("<4>"))
    assert A.invariant_factors == (4,) and A.qvalues == (Fraction(1, 4),)
    A = lattice.discriminant_group(make_named("U^3 + E8(-1)^2 + <-4>"))
    assert A.invariant_factors == (4,) and A.qvalues == (Fraction(7, 4),)
    A = lattice.discriminant_group(make_named("<2> + <2>"))
    assert A.invariant_factors == (2, 2) and A.order == 4
    assert lattice.discriminant_group(make_named("E8")).is_trivial


def test_divisibility_and_class():
    L = make_named("U + <-6>")
    assert lattice.divisibility(L, [0, 0, 1]) == 6
    assert lattice.divisibility(L, [1, 0, 0]) == 1
    cls, q = lattice.discriminant_class(L, [0, 0, 1])
    assert q == Fraction(-1, 6) % 2
    with pytest.raises(PreconditionError):
        lattice.discriminant_class(L, [0, 0, 2])
    with pytest.raises(PreconditionError):
        lattice.divisibility(L, [0, 0, 0])


def test_invariant_triple_units():
    # <2n-2> forms twisted by a unit k with k^2 = 1 mod 2(2n-2)... <-10> and <-10> with generator 3
    a = lattice.invariant_triple(make_named("U + <-10>"))
    b = lattice.invariant_triple(make_named("U + <-10>"))
    assert a.equivalent(b) and a.key() == b.key()
    c = lattice.invariant_triple(make_named("U + <10>"))
    assert not a.equivalent(c)
    d = lattice.invariant_triple(make_named("<2> + <2> + U"))
    e = lattice.invariant_triple(make_named("<2> + <-2> + U"))
    assert not d.equivalent(e)


def test_orthogonal_complement_and_restrict():
    L = make_named("U^3 + E8(-1)^2 + <-2>")
    comp = lattice.orthogonal_complement(L, [[0] * 22 + [1]])
    assert comp.rank == 22 and abs(comp.det) == 1
    z = lattice.orthogonal_complement(make_named("U"), [[1, 0]])
    assert z.rank == 1 and z.degenerate and z.gram == ((0,),)
    with pytest.raises(DegenerateLatticeError):
        z.to_lattice()


def test_errors():
    with pytest.raises(DegenerateLatticeError):
        IntegerLattice(((1, 1), (1, 1)))
    with pytest.raises(PreconditionError):
        IntegerLattice(((1, 2), (0, 1)))
    with pytest.raises(PreconditionError):
        make_named("Q8")
    with pytest.raises(PreconditionError):
        lattice.lattice_from_json({})
    assert lattice.lattice_from_json({"gram": [["2", "1"], [1, "2"]]}).det == 3


@settings(max_examples=25)
@given(st.integers(0, 10_000))
def test_invariants_stable_under_base_change(seed):
    import random

    rng = random.Random(seed)
    L = make_named("U + <-4> + <6>")
    p = intmat.random_unimodular(rng, L.rank)
    g2 = intmat.matmul(intmat.matmul(intmat.transpose(p), L.gram), p)
    L2 = IntegerLattice(g2)
    assert lattice.invariant_triple(L).equivalent(lattice.invariant_triple(L2))

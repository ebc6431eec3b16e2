import itertools

import pytest

from maxbrane import hilbert
from maxbrane.errors import InvariantError, PreconditionError
from maxbrane.hilbert import SurfaceData
from maxbrane.involution import InvolutiveModule

# Betti numbers of K3^[n], n = 1..4 (b0, b2, ..., b_{4n})
K3N = {
    1: [1, 22, 1],
    2: [1, 23, 276, 23, 1],
    3: [1, 23, 299, 2554, 299, 23, 1],
    # b6 follows from the known total 25650 and b8 = 19298 by Poincare duality
    4: [1, 23, 300, 2852, 19298, 2852, 300, 23, 1],
}
TOTALS = {1: 24, 2: 324, 3: 3200, 4: 25650}


@pytest.mark.parametrize("n", sorted(K3N))
def test_goettsche_k3(n):
    series = hilbert.goettsche_series(22, n)[n]
    assert series[::2] == K3N[n] and not any(series[1::2])
    assert sum(series) == TOTALS[n]


def test_p2_hilbert_betti():
    # (P^2)^[2]: 1, 2, 3, 2, 1
    assert hilbert.goettsche_series(1, 2)[2][::2] == [1, 2, 3, 2, 1]


def test_census_brute_force():
    for b2, n in itertools.product(range(3), range(4)):
        counts = [0] * (4 * n + 1)
        for pt in hilbert.partition_tuples(b2, n):
            counts[pt.degree] += 1
        assert counts == hilbert.lqw_census(b2, n)


def test_h4_matrix_p1p1():
    # S = P^1 x P^1 with sigma = id: degree 2 classes fixed up to the exceptional sign
    S = SurfaceData(2, InvolutiveModule([[1, 0], [0, 1]]), "antiholo", True)
    m = hilbert.h4_induced(S, 2)
    assert hilbert.rows_form(m)[4] == [0, 1, 0, 0, 1, 0]
    assert len(m) == hilbert.h4_size(2, 2)


def test_h2_induced_sign():
    S = SurfaceData(1, InvolutiveModule([[-1]]), "antiholo", True)
    assert hilbert.h2_induced(S, 3) == [[-1, 0], [0, -1]]
    S = SurfaceData(1, InvolutiveModule([[1]]), "holo", True)
    assert hilbert.h2_induced(S, 3) == [[1, 0], [0, 1]]


def test_maximality_witness_k3_holo():
    s = [[1 if i == j else 0 for j in range(22)] for i in range(22)]
    s[0][0] = -1
    S = SurfaceData(22, InvolutiveModule(s), "holo", True)
    v = hilbert.hilbert_maximality(S, 3)
    assert v.label == "not_maximal" and v.witness["matrix"] == [[1, 1], [0, -1]]


def test_blowup_stays_maximal():
    B = hilbert.blowup_transform(hilbert.p2_real())
    assert B.b2 == 2
    assert hilbert.hilbert_maximality(B, 3).maximal


def test_inconsistent_inputs():
    with pytest.raises(PreconditionError):
        SurfaceData(1, InvolutiveModule([[-1]]), "weird", True)
    with pytest.raises(PreconditionError):
        hilbert.hilbert_maximality(hilbert.p2_real(), 1)
    bad = SurfaceData(1, InvolutiveModule([[-1]], [[1]]), "antiholo", True, True, True)
    with pytest.raises(PreconditionError):
        hilbert.hilbert_maximality(bad, 2)


def test_surface_json_roundtrip():
    S = hilbert.p2_real()
    assert SurfaceData.from_json(S.to_json()).to_json() == S.to_json()
    with pytest.raises(PreconditionError):
        SurfaceData.from_json({"b2": 1})

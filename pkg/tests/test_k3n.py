import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from maxbrane import intmat, k3n, lattice
from maxbrane.errors import PreconditionError


def _diag(signs):
    return tuple(tuple(signs[i] if i == j else 0 for j in range(23)) for i in range(23))


@pytest.mark.parametrize("n,order", [(2, 2), (3, 4), (5, 8)])
def test_lattice_discriminant(n, order):
    A = lattice.discriminant_group(k3n.build_k3n_lattice(n))
    assert A.invariant_factors == (order,)


def test_lattice_rejects_small_n():
    with pytest.raises(PreconditionError):
        k3n.build_k3n_lattice(1)


def test_discriminant_action_examples():
    assert k3n.MonodromyInvolution(3, _diag([1] * 23)).tau == 1
    assert k3n.MonodromyInvolution(3, _diag([-1] * 23)).tau == -1
    assert k3n.MonodromyInvolution(3, _diag([1] * 22 + [-1])).tau == -1


def test_non_monodromy_rejected():
    # n = 7: a reflection on U3 + <-12> acting by 7 on A_L = Z/12 (found by a small search)
    s = [[int(i == j) for j in range(23)] for i in range(23)]
    block = [[3, 2, -12], [2, 3, -12], [1, 1, -5]]
    idx = (4, 5, 22)
    for a, i in enumerate(idx):
        for b, j in enumerate(idx):
            s[i][j] = block[a][b]
    L = k3n.build_k3n_lattice(7)
    assert L.is_isometry(s) and intmat.matmul(s, s) == intmat.identity(23)
    with pytest.raises(PreconditionError, match="monodromy"):
        k3n.MonodromyInvolution(7, s)
    with pytest.raises(PreconditionError):
        k3n.MonodromyInvolution(5, [row[:22] for row in s[:22]])


def test_classify_n2_first_line():
    b = k3n.classify_split(k3n.representative(2, 1, 0))
    assert (b.case, b.line) == (1, 0) and b.matched["plus"] == "U"


def test_classify_rejects_non_admissible():
    with pytest.raises(PreconditionError):
        k3n.classify_split(k3n.MonodromyInvolution(3, _diag([1] * 23)))
    with pytest.raises(PreconditionError):
        k3n.obstruct(k3n.MonodromyInvolution(3, _diag([1] * 23)))


def test_classify_rejects_lambda_positive():
    s = [list(r) for r in _diag([1, 1] + [-1] * 21)]
    # swap the two E8 copies: lambda = 8
    for i in range(8):
        s[6 + i][6 + i] = s[14 + i][14 + i] = 0
        s[6 + i][14 + i] = s[14 + i][6 + i] = -1
    with pytest.raises(PreconditionError):
        k3n.classify_split(k3n.MonodromyInvolution(3, s))


@pytest.mark.parametrize("n,k,wsq,eps2", [(2, 3, 4, -2), (4, 5, 4, -6), (3, 1, 0, -4)])
def test_construct_epsilon(n, k, wsq, eps2):
    rep = k3n.representative(n, 1, 0)
    L = rep.lattice
    data = k3n.construct_epsilon(L, n, k, rep.frame)
    assert data.w_square == wsq and L.square(data.epsilon) == eps2
    if k == 1:
        assert data.epsilon == rep.frame.x


def test_construct_epsilon_invalid_k():
    rep = k3n.representative(4, 1, 0)
    with pytest.raises(PreconditionError):
        k3n.construct_epsilon(rep.lattice, 4, 3, rep.frame)
    with pytest.raises(PreconditionError):
        k3n.construct_epsilon(rep.lattice, 4, 2, rep.frame)


def test_eichler_keys():
    L = k3n.build_k3n_lattice(3)
    e = [0] * 23
    f = [0] * 23
    e[0], f[1] = 1, 1
    assert k3n.eichler_equivalent(L, e, f)
    r2 = [0] * 23
    r2[0], r2[1] = 1, -1
    r4 = [0] * 23
    r4[0], r4[1] = 1, -2
    assert not k3n.eichler_equivalent(L, r2, r4)
    with pytest.raises(PreconditionError):
        k3n.eichler_orbit_key(L, [2 * x for x in r2])


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([2, 3, 4, 5]))
def test_eichler_key_invariant_under_w(seed, n):
    rng = random.Random(seed)
    L = k3n.build_k3n_lattice(n)
    g, _ = k3n.random_w_element(n, rng, 5)
    v = [rng.randint(-3, 3) for _ in range(23)]
    c = intmat.content(v) if any(v) else 0
    if c == 0:
        return
    v = [x // c for x in v]
    assert k3n.eichler_orbit_key(L, v) == k3n.eichler_orbit_key(L, intmat.matvec(g, v))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([2, 3, 4, 5, 6]))
def test_discriminant_orders_multiply(seed, n):
    s = k3n.random_instance(n, random.Random(seed))
    b = k3n.classify_split(s)
    prod = 1
    for d in b.plus_factors + b.minus_factors:
        prod *= d
    assert prod == 2 * n - 2


def test_obstruction_examples():
    c = k3n.obstruct(k3n.representative(2, 2, 0))
    assert c["witness_matrix"] == [[1, 1], [0, -1]] and c["branch"] == "iota(delta)=delta"
    c = k3n.obstruct(k3n.representative(3, 1, 1))
    assert c["witness_matrix"] == [[1, 1], [0, -1]] and c["branch"] == "iota(delta)=-delta" and c["tau"] == -1
    for n in (4, 6):
        c3 = k3n.obstruct(k3n.representative(n, 3))
        assert c3["witness_equals"] == "e(x)" and c3["lambda_Q"] >= 1
        c4 = k3n.obstruct(k3n.representative(n, 4))
        assert c4["witness_equals"] == "e(y)"


def test_case_mismatch_errors():
    with pytest.raises(PreconditionError):
        k3n.obstruction_case34(k3n.representative(3, 1, 0))
    with pytest.raises(PreconditionError):
        k3n.obstruction_case12(k3n.representative(4, 3))
    with pytest.raises(PreconditionError):
        k3n.representative(5, 3)


def test_missing_frame_is_reported():
    rng = random.Random(11)
    rep = k3n.representative(3, 1, 0)
    g, ginv = k3n.random_w_element(3, rng, 6)
    s = k3n.conjugate(rep, g, ginv)
    bare = k3n.MonodromyInvolution(3, s.matrix)
    try:
        cert = k3n.obstruct(bare)
    except PreconditionError as exc:
        assert "frame" in str(exc)
    else:
        assert cert["lambda_lower_bound"] == 1
    assert k3n.obstruct(s)["lambda_lower_bound"] == 1


def test_mukai_embedding():
    M = k3n.build_mukai(4)
    assert M.lattice.square(M.gamma) == 6 and M.lattice.det == 1


def test_symplectic_tables():
    t = k3n.symplectic_smith_slack(2)
    assert {r["label"]: r["count"] for r in t["components"]} == {"K3^[1]": 1, "points": 28}
    t = k3n.symplectic_smith_slack(3)
    assert {r["label"]: r["count"] for r in t["components"]} == {"K3^[1]": 8, "points": 64}
    assert k3n.symplectic_smith_slack(1)["components"] == [{"m": 0, "label": "points", "count": 8, "betti_total": 1}]
    og = k3n.symplectic_smith_slack(og6=True)
    assert sorted(o["total"] for o in og["options"]) == [16, 48, 384] and og["slack"] == 1536
    with pytest.raises(PreconditionError):
        k3n.symplectic_smith_slack(0)


def test_json_roundtrip():
    s = k3n.representative(4, 2, 1)
    s2 = k3n.MonodromyInvolution.from_json(s.to_json())
    assert s2 == s and s2.frame == s.frame

"""Finite simplicial complexes with an involution, over F2.

Covers homology, fixed loci, Smith-inequality verdicts, Borel equivariant
cohomology through the periodic resolution, the Smith-Gysin sequence of a free
action, and the low Kalinin differentials computed on chains.

Chains are bitmasks over the simplices of one dimension, in the order of
``K.cells[k]``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations, permutations
from typing import Any, Iterable, Sequence

from . import f2
from .errors import PreconditionError, UnsupportedHypothesisError, check

Simplex = tuple[int, ...]


def _apply_perm(perm: Sequence[int], mask: int) -> int:
    out = 0
    while mask:
        low = mask & -mask
        out |= 1 << perm[low.bit_length() - 1]
        mask ^= low
    return out


def _closure(tops: Iterable[Iterable[int]]) -> set[Simplex]:
    out: set[Simplex] = set()
    for t in tops:
        s = tuple(sorted(set(t)))
        if not s:
            continue
        if s in out:
            continue
        for k in range(1, len(s) + 1):
            out.update(combinations(s, k))
    return out


class SimplicialGComplex:
    """Simplicial complex on vertices 0..n-1 with a vertex involution.

    ``coloring`` may carry a sigma-invariant proper vertex colouring in which
    every simplex is rainbow; it orders the vertices of each simplex
    compatibly with sigma and is what product triangulations need.
    """

    def __init__(
        self,
        n_vertices: int,
        simplices: Iterable[Iterable[int]],
        involution: Sequence[int] | None = None,
        coloring: Sequence[int] | None = None,
    ) -> None:
        self.n_vertices = int(n_vertices)
        inv = tuple(range(self.n_vertices)) if involution is None else tuple(int(x) for x in involution)
        if len(inv) != self.n_vertices or sorted(inv) != list(range(self.n_vertices)):
            raise PreconditionError("involution must be a permutation of the vertices")
        if any(inv[inv[v]] != v for v in range(self.n_vertices)):
            raise PreconditionError("involution does not square to the identity")
        self.involution = inv
        closed = _closure(simplices)
        for s in closed:
            if s[0] < 0 or s[-1] >= self.n_vertices:
                raise PreconditionError(f"simplex {s} uses an unknown vertex")
        closed.update((v,) for v in range(self.n_vertices))
        for s in closed:
            if self.image(s) not in closed:
                raise PreconditionError(f"involution does not preserve simplex {s}")
        dim = max((len(s) - 1 for s in closed), default=-1)
        self.cells: list[list[Simplex]] = [sorted(s for s in closed if len(s) == k + 1) for k in range(dim + 1)]
        self.index: list[dict[Simplex, int]] = [{s: i for i, s in enumerate(c)} for c in self.cells]
        self.coloring: tuple[int, ...] | None = None
        if coloring is not None:
            col = tuple(int(c) for c in coloring)
            if len(col) != self.n_vertices:
                raise PreconditionError("colouring has the wrong length")
            if any(col[inv[v]] != col[v] for v in range(self.n_vertices)):
                raise PreconditionError("colouring is not invariant")
            if any(len({col[v] for v in s}) != len(s) for s in closed):
                raise PreconditionError("colouring is not rainbow on every simplex")
            self.coloring = col

    @property
    def dim(self) -> int:
        return len(self.cells) - 1

    @property
    def simplices(self) -> frozenset[Simplex]:
        return frozenset(s for c in self.cells for s in c)

    def counts(self) -> list[int]:
        return [len(c) for c in self.cells]

    def image(self, s: Simplex) -> Simplex:
        return tuple(sorted(self.involution[v] for v in s))

    @cached_property
    def perms(self) -> list[list[int]]:
        return [[self.index[k][self.image(s)] for s in self.cells[k]] for k in range(self.dim + 1)]

    @cached_property
    def is_regular(self) -> bool:
        """Every invariant simplex is fixed vertexwise."""
        inv = self.involution
        for c in self.cells:
            for s in c:
                if self.image(s) == s and any(inv[v] != v for v in s):
                    return False
        return True

    @cached_property
    def is_free(self) -> bool:
        return all(self.image(s) != s for c in self.cells for s in c)

    @cached_property
    def chains(self) -> "ChainComplexF2":
        bd: list[list[int]] = [[0] * len(self.cells[0])] if self.cells else []
        for k in range(1, self.dim + 1):
            idx = self.index[k - 1]
            row = []
            for s in self.cells[k]:
                m = 0
                for j in range(len(s)):
                    m |= 1 << idx[s[:j] + s[j + 1 :]]
                row.append(m)
            bd.append(row)
        return ChainComplexF2(self.counts(), bd)

    def invariant_coloring(self) -> tuple[int, ...] | None:
        """A sigma-invariant rainbow colouring, or None when none exists."""
        if self.coloring is not None:
            return self.coloring
        inv = self.involution
        nbrs: list[set[int]] = [set() for _ in range(self.n_vertices)]
        for s in self.cells[1] if self.dim >= 1 else []:
            a, b = s
            nbrs[a].add(b)
            nbrs[b].add(a)
        col = [-1] * self.n_vertices
        for v in range(self.n_vertices):
            if col[v] >= 0:
                continue
            orbit = {v, inv[v]}
            if inv[v] in nbrs[v]:
                return None
            used = {col[u] for w in orbit for u in nbrs[w] if col[u] >= 0}
            c = 0
            while c in used:
                c += 1
            for w in orbit:
                col[w] = c
        return tuple(col)

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> "SimplicialGComplex":
        try:
            n = int(obj["vertices"])
            simp = [[int(v) for v in s] for s in obj["simplices"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise PreconditionError(f"malformed complex JSON: {exc}") from exc
        inv = obj.get("involution")
        return cls(n, simp, inv, obj.get("coloring"))

    def to_json(self) -> dict[str, Any]:
        tops = self.top_simplices()
        return {"vertices": self.n_vertices, "simplices": [list(s) for s in tops], "involution": list(self.involution)}

    def top_simplices(self) -> list[Simplex]:
        faces: set[Simplex] = set()
        for k in range(1, self.dim + 1):
            for s in self.cells[k]:
                for j in range(len(s)):
                    faces.add(s[:j] + s[j + 1 :])
        return [s for c in self.cells for s in c if s not in faces]


class ChainComplexF2:
    """Chain complex of finite F2 vector spaces with homology bookkeeping.

    ``boundary[k][i]`` is the boundary of the i-th basis chain of degree k as
    a bitmask in degree k-1 (all zero in degree 0).
    """

    def __init__(self, counts: Sequence[int], boundary: Sequence[Sequence[int]]) -> None:
        self.counts = list(counts)
        self.boundary = [list(b) for b in boundary]
        self._hom: dict[int, "_DegreeHomology"] = {}
        self._solvers: dict[int, f2.Echelon] = {}

    @property
    def top(self) -> int:
        return len(self.counts) - 1

    def d(self, k: int, chain: int) -> int:
        if k <= 0 or k > self.top:
            return 0
        return f2.combine(self.boundary[k], chain)

    @cached_property
    def ranks(self) -> list[int]:
        """rank of the boundary map leaving degree k."""
        return [0] + [f2.rank(self.boundary[k]) for k in range(1, self.top + 1)]

    @cached_property
    def betti(self) -> list[int]:
        r = self.ranks + [0]
        return [self.counts[k] - r[k] - r[k + 1] for k in range(self.top + 1)]

    def _solver(self, k: int) -> f2.Echelon:
        """Echelon of boundaries of degree-(k+1) basis chains, tagged by chain."""
        if k not in self._solvers:
            ech = f2.Echelon()
            if k + 1 <= self.top:
                for i, b in enumerate(self.boundary[k + 1]):
                    ech.add(b, 1 << i)
            self._solvers[k] = ech
        return self._solvers[k]

    def solve(self, k: int, target: int) -> int | None:
        """A degree-(k+1) chain with boundary ``target``, or None."""
        if target == 0:
            return 0
        return self._solver(k).express(target)

    def homology(self, k: int) -> "_DegreeHomology":
        if k not in self._hom:
            self._hom[k] = _DegreeHomology(self, k)
        return self._hom[k]

    def dim_h(self, k: int) -> int:
        if k < 0 or k > self.top:
            return 0
        return self.betti[k]


class _DegreeHomology:
    def __init__(self, cc: ChainComplexF2, k: int) -> None:
        self.k = k
        n = cc.counts[k] if 0 <= k <= cc.top else 0
        if 0 < k <= cc.top:
            cycles = f2.kernel(cc.boundary[k])
        else:
            cycles = [1 << i for i in range(n)]
        self.cycles = cycles
        self.coord = f2.Echelon()
        if k + 1 <= cc.top:
            for b in cc.boundary[k + 1]:
                self.coord.add(b, 0)
        self.reps: list[int] = []
        for z in cycles:
            res, _ = self.coord.reduce(z)
            if res:
                self.coord.add(z, 1 << len(self.reps))
                self.reps.append(z)
        check(len(self.reps) == cc.betti[k] if 0 <= k <= cc.top else True, "homology rank mismatch")

    @property
    def dim(self) -> int:
        return len(self.reps)

    def coords(self, cycle: int) -> int:
        res, tag = self.coord.reduce(cycle)
        check(res == 0, "chain is not a cycle")
        return tag

    def rep(self, hvec: int) -> int:
        return f2.combine(self.reps, hvec)

    def is_boundary(self, cycle: int) -> bool:
        return self.coords(cycle) == 0


# ---------------------------------------------------------------------------
# Betti numbers, fixed loci, subdivision, products


@dataclass(frozen=True)
class BettiVector:
    values: tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(self.values)

    def __getitem__(self, k: int) -> int:
        return self.values[k] if 0 <= k < len(self.values) else 0


def betti_f2(K: SimplicialGComplex) -> BettiVector:
    if K.dim < 0:
        return BettiVector(())
    return BettiVector(tuple(K.chains.betti))


def _require_regular(K: SimplicialGComplex) -> None:
    if not K.is_regular:
        raise PreconditionError(
            "the involution is not regular (some invariant simplex is not fixed pointwise); "
            "apply barycentric_subdivide first"
        )


def fixed_subcomplex(K: SimplicialGComplex) -> SimplicialGComplex:
    _require_regular(K)
    inv = K.involution
    fixed = [v for v in range(K.n_vertices) if inv[v] == v]
    relabel = {v: i for i, v in enumerate(fixed)}
    simp = [tuple(relabel[v] for v in s) for c in K.cells for s in c if all(inv[v] == v for v in s)]
    col = None
    if K.coloring is not None:
        col = [K.coloring[v] for v in fixed]
    return SimplicialGComplex(len(fixed), simp, None, col)


def barycentric_subdivide(K: SimplicialGComplex) -> SimplicialGComplex:
    """First barycentric subdivision, coloured by the dimension of each barycentre."""
    verts = [s for c in K.cells for s in c]
    vid = {s: i for i, s in enumerate(verts)}
    inv = [vid[K.image(s)] for s in verts]
    coloring = [len(s) - 1 for s in verts]
    tops = []
    for s in K.top_simplices():
        for order in permutations(s):
            flag = [tuple(sorted(order[: j + 1])) for j in range(len(order))]
            tops.append([vid[f] for f in flag])
    return SimplicialGComplex(len(verts), tops, inv, coloring)


def product_complex(A: SimplicialGComplex, B: SimplicialGComplex) -> SimplicialGComplex:
    """Staircase triangulation of |A| x |B| with the diagonal involution.

    Vertices of every simplex are ordered by an invariant colouring, so the
    staircase simplices are permuted by the product involution.
    """
    if not ((A.is_regular and B.is_regular) or (A.is_free and B.is_free)):
        raise PreconditionError("product needs two regular or two free factors")
    ca, cb = A.invariant_coloring(), B.invariant_coloring()
    if ca is None or cb is None:
        raise PreconditionError("factor admits no invariant colouring; subdivide it first")
    nb = B.n_vertices
    tops = []
    for s in A.top_simplices():
        so = sorted(s, key=lambda v: ca[v])
        for t in B.top_simplices():
            to = sorted(t, key=lambda v: cb[v])
            p, q = len(so) - 1, len(to) - 1
            for ups in combinations(range(p + q), p):
                i = j = 0
                verts = [so[0] * nb + to[0]]
                upset = set(ups)
                for step in range(p + q):
                    if step in upset:
                        i += 1
                    else:
                        j += 1
                    verts.append(so[i] * nb + to[j])
                tops.append(verts)
    inv = [A.involution[v // nb] * nb + B.involution[v % nb] for v in range(A.n_vertices * nb)]
    col = [ca[v // nb] + cb[v % nb] for v in range(A.n_vertices * nb)]
    return SimplicialGComplex(A.n_vertices * nb, tops, inv, col)


# ---------------------------------------------------------------------------
# verdicts


@dataclass(frozen=True)
class MaximalityVerdict:
    maximal: bool
    fixed_total: int
    total: int
    fixed_betti: BettiVector
    betti: BettiVector

    @property
    def label(self) -> str:
        return "maximal" if self.maximal else "not_maximal"


def maximality_verdict(K: SimplicialGComplex) -> MaximalityVerdict:
    F = fixed_subcomplex(K)
    bf, bk = betti_f2(F), betti_f2(K)
    check(bf.total <= bk.total, f"Smith inequality violated: {bf.total} > {bk.total}")
    return MaximalityVerdict(bf.total == bk.total, bf.total, bk.total, bf, bk)


def induced_on_homology(K: SimplicialGComplex, k: int) -> list[int]:
    """sigma_* on H_k as a list of images of the homology basis (bitmasks)."""
    if k < 0 or k > K.dim:
        return []
    H = K.chains.homology(k)
    perm = K.perms[k]
    return [H.coords(_apply_perm(perm, z)) for z in H.reps]


def lefschetz_number(K: SimplicialGComplex) -> int:
    """Hopf trace of sigma on oriented rational chains.

    An invariant simplex contributes the sign of the permutation sigma
    induces on its vertices.
    """
    total = 0
    inv = K.involution
    for k, c in enumerate(K.cells):
        tr = 0
        for s in c:
            if K.image(s) == s:
                images = [inv[v] for v in s]
                # sign of the permutation s -> images
                pos = [s.index(v) for v in images]
                sign = 1
                seen = [False] * len(pos)
                for i in range(len(pos)):
                    if not seen[i]:
                        j, length = i, 0
                        while not seen[j]:
                            seen[j] = True
                            j = pos[j]
                            length += 1
                        if length % 2 == 0:
                            sign = -sign
                tr += sign
        total += (-1) ** k * tr
    return total


def euler_characteristic(K: SimplicialGComplex) -> int:
    return sum((-1) ** k * n for k, n in enumerate(K.counts()))


# ---------------------------------------------------------------------------
# Borel cohomology


@dataclass(frozen=True)
class BorelReport:
    dims: tuple[int, ...]
    image_dims: tuple[int, ...]
    betti: tuple[int, ...]
    surjective: bool
    trivial_action: bool
    degenerate_count: bool

    @property
    def three_way_agree(self) -> bool:
        return self.surjective == (self.trivial_action and self.degenerate_count)


def borel_cohomology(K: SimplicialGComplex, degree_cap: int | None = None) -> BorelReport:
    """H^p_G(X; F2) for p <= degree_cap via the periodic resolution.

    The total complex in degree k is the sum over p + q = k of q-cochains,
    with differential coboundary + (1 + sigma^*). Restriction to X is the
    p = 0 component. Surjectivity is checked in every degree up to dim K,
    whatever the cap.
    """
    _require_regular(K)
    dimk = K.dim
    cap = dimk + 2 if degree_cap is None else int(degree_cap)
    if cap < 0:
        raise PreconditionError("degree cap must be nonnegative")
    top = max(cap, dimk)
    counts = K.counts()
    perms = K.perms
    cc = K.chains
    # coboundary of the q-cochain dual to simplex i: all (q+1)-simplices having it as a face
    cofaces: list[list[int]] = []
    for q in range(dimk + 1):
        row = [0] * counts[q]
        if q + 1 <= dimk:
            for j, b in enumerate(cc.boundary[q + 1]):
                for i in f2.bits(b):
                    row[i] |= 1 << j
        cofaces.append(row)

    def layout(k: int) -> dict[int, int]:
        """offset of the q-block inside total degree k."""
        off, out = 0, {}
        for q in range(min(k, dimk) + 1):
            out[q] = off
            off += counts[q]
        out[-1] = off  # total size
        return out

    layouts = [layout(k) for k in range(top + 2)]

    def D(k: int) -> list[int]:
        src, dst = layouts[k], layouts[k + 1]
        rows = []
        for q in range(min(k, dimk) + 1):
            for i in range(counts[q]):
                img = 0
                if q + 1 <= dimk:
                    img |= cofaces[q][i] << dst[q + 1]
                # (1 + sigma^*) lands in the block with p + 1, same q
                j = perms[q][i]
                if j != i:
                    img |= ((1 << i) | (1 << j)) << dst[q]
                rows.append(img)
        return rows

    dmaps = [D(k) for k in range(top + 1)]
    ranks = [f2.rank(rows) for rows in dmaps]
    dims = []
    for k in range(top + 1):
        size = layouts[k][-1]
        prev = ranks[k - 1] if k > 0 else 0
        dims.append(size - ranks[k] - prev)
    betti = cc.betti + [0] * (top + 1 - len(cc.betti))
    image_dims = []
    for k in range(dimk + 1):
        # kernel tags index the basis of the total degree-k space directly
        cocycles = f2.kernel(dmaps[k])
        mask = (1 << counts[k]) - 1
        off = layouts[k][k]
        cobound = f2.Echelon()
        if k > 0:
            for i in range(counts[k - 1]):
                cobound.add(cofaces[k - 1][i])
        base = len(cobound)
        for z in cocycles:
            cobound.add((z >> off) & mask)
        image_dims.append(len(cobound) - base)
    surjective = all(image_dims[k] == betti[k] for k in range(dimk + 1))
    trivial = all(
        all(img == 1 << j for j, img in enumerate(induced_on_homology(K, k))) for k in range(dimk + 1)
    )
    expected = [sum(betti[: k + 1]) for k in range(top + 1)]
    degenerate = dims == expected
    rep = BorelReport(tuple(dims[: cap + 1]), tuple(image_dims), tuple(cc.betti), surjective, trivial, degenerate)
    check(rep.three_way_agree, f"Borel criteria disagree: {rep}")
    return rep


# ---------------------------------------------------------------------------
# linear maps between homology groups, stored as lists of column bitmasks


def _rank(cols: Sequence[int]) -> int:
    return f2.rank(cols)


def _compose(after: Sequence[int], before: Sequence[int]) -> list[int]:
    return [f2.combine(after, c) for c in before]


class _Subquotient:
    """ker / im inside a coordinate space, with chosen representatives."""

    def __init__(self, kernel: Sequence[int], image: Sequence[int]) -> None:
        self.ech = f2.Echelon()
        for v in image:
            self.ech.add(v, 0)
        self.kernel = f2.Echelon()
        for v in kernel:
            self.kernel.add(v)
        self.reps: list[int] = []
        for v in kernel:
            if self.ech.reduce(v)[0]:
                self.ech.add(v, 1 << len(self.reps))
                self.reps.append(v)

    @property
    def dim(self) -> int:
        return len(self.reps)

    def coords(self, v: int) -> int:
        check(self.kernel.contains(v), "class does not lie in the kernel")
        res, tag = self.ech.reduce(v)
        check(res == 0, "class is outside the subquotient")
        return tag


# ---------------------------------------------------------------------------
# Smith-Gysin sequence


@dataclass(frozen=True)
class SmithGysinReport:
    quotient_betti: tuple[int, ...]
    betti: tuple[int, ...]
    quotient_cells: tuple[tuple[tuple[int, ...], ...], ...]
    alpha: tuple[tuple[int, ...], ...]
    beta: tuple[tuple[int, ...], ...]
    gamma: tuple[tuple[int, ...], ...]
    rank_alpha: tuple[int, ...]
    rank_beta: tuple[int, ...]
    rank_gamma: tuple[int, ...]
    dim_invariant: tuple[int, ...]
    exact: bool


def orbit_chain_complex(K: SimplicialGComplex) -> tuple[ChainComplexF2, list[list[int]], list[list[int]]]:
    """Cellular chains of K / sigma for a free action.

    Returns the chain complex together with, per degree, the representative
    simplex index of each orbit and the orbit index of each simplex.
    """
    reps: list[list[int]] = []
    orbit_of: list[list[int]] = []
    for k in range(K.dim + 1):
        perm = K.perms[k]
        r, o = [], [0] * len(perm)
        for i, j in enumerate(perm):
            if i < j:
                o[i] = o[j] = len(r)
                r.append(i)
        reps.append(r)
        orbit_of.append(o)
    bd: list[list[int]] = [[0] * len(reps[0])]
    for k in range(1, K.dim + 1):
        row = []
        for i in reps[k]:
            m = 0
            for face in f2.bits(K.chains.boundary[k][i]):
                m ^= 1 << orbit_of[k - 1][face]
            row.append(m)
        bd.append(row)
    return ChainComplexF2([len(r) for r in reps], bd), reps, orbit_of


def smith_gysin(K: SimplicialGComplex) -> SmithGysinReport:
    """Transfer, projection and connecting maps of a free double cover, with exactness checked."""
    if not K.is_free:
        raise PreconditionError("smith_gysin needs a free involution (no invariant simplex)")
    Q, reps, orbit_of = orbit_chain_complex(K)
    M = K.chains
    top = K.dim

    def transfer(k: int, chain: int) -> int:
        out = 0
        for o in f2.bits(chain):
            i = reps[k][o]
            out |= (1 << i) | (1 << K.perms[k][i])
        return out

    def project(k: int, chain: int) -> int:
        out = 0
        for i in f2.bits(chain):
            out ^= 1 << orbit_of[k][i]
        return out

    def lift(k: int, chain: int) -> int:
        out = 0
        for o in f2.bits(chain):
            out |= 1 << reps[k][o]
        return out

    def untransfer(k: int, chain: int) -> int:
        check(_apply_perm(K.perms[k], chain) == chain, "chain is not invariant")
        out = 0
        for i in f2.bits(chain):
            if reps[k][orbit_of[k][i]] == i:
                out |= 1 << orbit_of[k][i]
        return out

    alpha, beta, gamma = [], [], []
    for r in range(top + 1):
        HQ, HM = Q.homology(r), M.homology(r)
        alpha.append([HM.coords(transfer(r, z)) for z in HQ.reps])
        beta.append([HQ.coords(project(r, z)) for z in HM.reps])
        g = []
        for z in HQ.reps:
            if r == 0:
                g.append(0)
                continue
            c = lift(r, z)
            w = untransfer(r - 1, M.d(r, c))
            g.append(Q.homology(r - 1).coords(w))
        gamma.append(g)
    ra = [_rank(a) for a in alpha]
    rb = [_rank(b) for b in beta]
    rg = [_rank(g) for g in gamma]
    hq = [Q.dim_h(r) for r in range(top + 1)]
    hm = [M.dim_h(r) for r in range(top + 1)]
    exact = True
    for r in range(top + 1):
        exact &= all(c == 0 for c in _compose(beta[r], alpha[r]))
        exact &= all(c == 0 for c in _compose(gamma[r], beta[r]))
        if r > 0:
            exact &= all(c == 0 for c in _compose(alpha[r - 1], gamma[r]))
            exact &= rg[r] + ra[r - 1] == hq[r - 1]
        exact &= ra[r] + rb[r] == hm[r]
        exact &= rb[r] + rg[r] == hq[r]
    # the sequence starts with 0 -> H_top(Q), so alpha_top is injective
    exact &= ra[top] == hq[top]
    check(exact, "Smith-Gysin sequence failed to be exact")
    inv = []
    for r in range(top + 1):
        sig = induced_on_homology(K, r)
        inv.append(len(f2.kernel([s ^ (1 << j) for j, s in enumerate(sig)])))
    cells = tuple(
        tuple(tuple(sorted({min(v, K.involution[v]) for v in K.cells[k][i]})) for i in reps[k]) for k in range(top + 1)
    )
    return SmithGysinReport(
        tuple(hq),
        tuple(hm),
        cells,
        tuple(tuple(a) for a in alpha),
        tuple(tuple(b) for b in beta),
        tuple(tuple(g) for g in gamma),
        tuple(ra),
        tuple(rb),
        tuple(rg),
        tuple(inv),
        exact,
    )


# ---------------------------------------------------------------------------
# Kalinin differentials


@dataclass(frozen=True)
class KalininReport:
    """Differentials on the F2 homology of an involution.

    ``d[r][k]`` lists, for each basis class of E^r_k, its image in E^r_{k+r-1}
    as a coordinate bitmask; ``page_dims[r][k]`` is dim E^r_k.
    """

    d: dict[int, dict[int, tuple[int, ...]]]
    ranks: dict[int, dict[int, int]]
    page_dims: dict[int, tuple[int, ...]]
    vanishes: dict[int, bool]
    representatives: dict[int, dict[int, tuple[int, ...]]] = field(repr=False)

    @property
    def all_vanish(self) -> bool:
        return all(self.vanishes.values())


def kalinin_differentials(K: SimplicialGComplex, up_to: int = 3, seed: int = 0) -> KalininReport:
    """d_1, d_2 and (when odd homology vanishes) d_3 computed by chain lifts.

    Every higher differential is evaluated twice, the second time after
    perturbing the chosen cycle by a random boundary and each lift by a random
    cycle; disagreement is an internal error.
    """
    if up_to not in (1, 2, 3):
        raise UnsupportedHypothesisError("only d_1, d_2 and d_3 are defined here")
    _require_regular(K)
    M = K.chains
    top = K.dim
    H = [M.homology(k) for k in range(top + 1)]
    sig = [induced_on_homology(K, k) for k in range(top + 1)]
    if up_to == 3 and any(M.dim_h(k) for k in range(1, top + 1, 2)):
        raise UnsupportedHypothesisError("d_3 is only computed when the odd homology vanishes")

    d1 = {k: tuple(s ^ (1 << j) for j, s in enumerate(sig[k])) for k in range(top + 1)}
    E2 = [_Subquotient(f2.kernel(d1[k]), d1[k]) for k in range(top + 1)]
    out_d: dict[int, dict[int, tuple[int, ...]]] = {1: d1}
    ranks = {1: {k: _rank(d1[k]) for k in d1}}
    dims = {1: tuple(H[k].dim for k in range(top + 1)), 2: tuple(e.dim for e in E2)}
    reps: dict[int, dict[int, tuple[int, ...]]] = {2: {k: tuple(E2[k].reps) for k in range(top + 1)}}
    rngs = [random.Random(seed), random.Random(seed + 7919)]

    def sigma(k: int, chain: int) -> int:
        return _apply_perm(K.perms[k], chain)

    def random_cycle(rng: random.Random, k: int) -> int:
        if k > top:
            return 0
        cyc = H[k].cycles
        return f2.combine(cyc, rng.getrandbits(len(cyc))) if cyc else 0

    def random_boundary(rng: random.Random, k: int) -> int:
        if k + 1 > top:
            return 0
        return M.d(k + 1, rng.getrandbits(M.counts[k + 1]))

    def climb(rng: random.Random | None, k: int, hvec: int, steps: int) -> int:
        """eta_{k+steps} + sigma eta_{k+steps}, starting from a cycle of the class."""
        eta = H[k].rep(hvec)
        if rng is not None:
            eta ^= random_boundary(rng, k)
        cur = k
        for _ in range(steps):
            target = eta ^ sigma(cur, eta)
            nxt = M.solve(cur, target)
            check(nxt is not None, "averaged chain is not a boundary")
            if rng is not None:
                nxt ^= random_cycle(rng, cur + 1)
            eta = nxt  # type: ignore[assignment]
            cur += 1
        return eta ^ sigma(cur, eta)

    def differential(steps: int, page: list[_Subquotient]) -> dict[int, tuple[int, ...]]:
        res: dict[int, tuple[int, ...]] = {}
        for k in range(top + 1):
            tgt = k + steps
            imgs = []
            for x in page[k].reps:
                if tgt > top:
                    imgs.append(0)
                    continue
                vals = []
                for rng in (None, *rngs):
                    y = climb(rng, k, x, steps)
                    vals.append(page[tgt].coords(H[tgt].coords(y)))
                check(len(set(vals)) == 1, "Kalinin differential depends on the chain lift")
                imgs.append(vals[0])
            res[k] = tuple(imgs)
        return res

    if up_to >= 2:
        d2 = differential(1, E2)
        out_d[2] = d2
        ranks[2] = {k: _rank(d2[k]) for k in d2}
    if up_to >= 3:
        check(all(r == 0 for r in ranks[2].values()), "d_2 must vanish when odd homology does")
        dims[3] = dims[2]
        reps[3] = reps[2]
        d3 = differential(2, E2)
        out_d[3] = d3
        ranks[3] = {k: _rank(d3[k]) for k in d3}
    vanishes = {r: all(v == 0 for v in ranks[r].values()) for r in ranks}
    report = KalininReport(out_d, ranks, dims, vanishes, reps)
    if not report.all_vanish:
        check(not maximality_verdict(K).maximal, "nonzero Kalinin differential on a maximal involution")
    return report


# ---------------------------------------------------------------------------
# standard examples


def octahedron(involution: str = "identity") -> SimplicialGComplex:
    """Boundary of the octahedron; vertices 0..5 are +x, -x, +y, -y, +z, -z.

    ``involution`` is ``identity``, ``antipodal`` or ``reflection`` (z -> -z).
    """
    tops = [(a, b, c) for a in (0, 1) for b in (2, 3) for c in (4, 5)]
    inv = {
        "identity": [0, 1, 2, 3, 4, 5],
        "antipodal": [1, 0, 3, 2, 5, 4],
        "reflection": [0, 1, 2, 3, 5, 4],
    }[involution]
    return SimplicialGComplex(6, tops, inv, [0, 0, 1, 1, 2, 2])


def hexagon(involution: str = "antipodal") -> SimplicialGComplex:
    tops = [(i, (i + 1) % 6) for i in range(6)]
    inv = {"identity": list(range(6)), "antipodal": [(i + 3) % 6 for i in range(6)]}[involution]
    return SimplicialGComplex(6, tops, inv, [i % 3 for i in range(6)])


def point() -> SimplicialGComplex:
    return SimplicialGComplex(1, [(0,)], [0], [0])

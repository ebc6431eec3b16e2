"""Involutions of the K3^[n] lattice and the H^4 obstruction to maximality.

Lattice coordinates: U1 = (0, 1), U2 = (2, 3), U3 = (4, 5), two copies of
E8(-1) at 6..13 and 14..21, and the generator of <-2n+2> at index 22. This
last generator plays the role of delta, half the exceptional class.

An admissible involution with lambda = 0 splits L into its eigen-lattices.
Exactly one of four discriminant patterns occurs. In the first two, a vector
epsilon in the non-unimodular eigen-lattice is moved to delta, and the
residual action on its orthogonal complement yields an explicit 2x2 block
[[1,1],[0,-1]] on H^4. In the last two, the involution is transported to the
rank 24 Mukai-type lattice, where the vector w - sigma_Q(w) is odd.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, gcd
from typing import Any, Sequence

from . import intmat
from .errors import InvariantError, PreconditionError, check
from .hilbert import goettsche_series, h4_witness
from .involution import InvolutiveModule, comessatti
from .lattice import (
    E8_CARTAN,
    IntegerLattice,
    discriminant_class,
    discriminant_group,
    divisibility,
    invariant_triple,
    is_primitive,
    make_named,
    orthogonal_complement,
    parse_int_matrix,
    restrict,
    signature,
)

DELTA = 22
U_SLOTS = ((0, 1), (2, 3), (4, 5))
E8_SLOTS = (tuple(range(6, 14)), tuple(range(14, 22)))

# Betti numbers of OG6-type manifolds (degrees 0..12)
OG6_BETTI = (1, 0, 8, 0, 199, 0, 1504, 0, 199, 0, 8, 0, 1)


@lru_cache(maxsize=64)
def build_k3n_lattice(n: int) -> IntegerLattice:
    """U^3 + E8(-1)^2 + <-2n+2> in the fixed coordinate order."""
    if n < 2:
        raise PreconditionError("K3^[n] lattice needs n >= 2")
    return make_named(f"U^3 + E8(-1)^2 + <{2 - 2 * n}>")


def _vec(n: int, entries: dict[int, int]) -> list[int]:
    out = [0] * n
    for i, x in entries.items():
        out[i] = x
    return out


def _has_two_hyperbolic_planes(lat: IntegerLattice) -> bool:
    """Look for two orthogonal U summands sitting on consecutive coordinate pairs."""
    g = lat.gram
    found = 0
    i = 0
    while i + 1 < lat.rank:
        block = (g[i][i], g[i][i + 1], g[i + 1][i], g[i + 1][i + 1])
        rest_zero = all(g[i][j] == 0 and g[i + 1][j] == 0 for j in range(lat.rank) if j not in (i, i + 1))
        if block == (0, 1, 1, 0) and rest_zero:
            found += 1
            i += 2
        else:
            i += 1
    return found >= 2


# ---------------------------------------------------------------------------
# monodromy involutions


@dataclass(frozen=True)
class Frame:
    """x in the non-unimodular eigen-lattice and a hyperbolic pair (e, f) orthogonal to it."""

    x: tuple[int, ...]
    e: tuple[int, ...]
    f: tuple[int, ...]

    def to_json(self) -> dict[str, Any]:
        return {"x": list(self.x), "e": list(self.e), "f": list(self.f)}

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> "Frame":
        try:
            return cls(*(tuple(int(t) for t in obj[k]) for k in ("x", "e", "f")))
        except (KeyError, TypeError, ValueError) as exc:
            raise PreconditionError(f"malformed frame: {exc}") from exc


@dataclass(frozen=True)
class MonodromyInvolution:
    n: int
    matrix: tuple[tuple[int, ...], ...]
    frame: Frame | None = None
    lattice: IntegerLattice = field(init=False, repr=False, compare=False)
    module: InvolutiveModule = field(init=False, repr=False, compare=False)
    tau: int = field(init=False, compare=False)

    def __post_init__(self) -> None:
        L = build_k3n_lattice(self.n)
        s = tuple(tuple(int(x) for x in r) for r in self.matrix)
        if len(s) != L.rank or any(len(r) != L.rank for r in s):
            raise PreconditionError(f"involution must be a {L.rank}x{L.rank} matrix")
        object.__setattr__(self, "matrix", s)
        object.__setattr__(self, "lattice", L)
        # InvolutiveModule checks sigma^2 = 1 and the isometry condition
        object.__setattr__(self, "module", InvolutiveModule(s, L.gram))
        object.__setattr__(self, "tau", discriminant_action(self))

    def apply(self, v: Sequence[int]) -> tuple[int, ...]:
        return self.module.apply(v)

    def eigen(self, sign: int) -> list[list[int]]:
        a = intmat.sub(self.matrix, intmat.scale(intmat.identity(len(self.matrix)), sign))
        return intmat.kernel_basis(a, len(self.matrix))

    def eigen_signatures(self) -> tuple[tuple[int, int], tuple[int, int]]:
        out = []
        for sign in (1, -1):
            b = self.eigen(sign)
            out.append(signature(restrict(self.lattice, b).to_lattice()) if b else (0, 0))
        return out[0], out[1]

    @property
    def admissible(self) -> bool:
        plus, minus = self.eigen_signatures()
        return plus[0] == 1 and minus[0] == 2

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"n": self.n, "sigma": [list(r) for r in self.matrix]}
        if self.frame is not None:
            out["frame"] = self.frame.to_json()
        return out

    @classmethod
    def from_json(cls, obj: dict[str, Any], n: int | None = None) -> "MonodromyInvolution":
        if not isinstance(obj, dict) or "sigma" not in obj:
            raise PreconditionError("involution JSON needs 'sigma'")
        nn = n if n is not None else obj.get("n")
        if nn is None:
            raise PreconditionError("n is required (flag --n or JSON field 'n')")
        if n is not None and obj.get("n") is not None and int(obj["n"]) != n:
            raise PreconditionError(f"--n {n} disagrees with JSON n = {obj['n']}")
        frame = Frame.from_json(obj["frame"]) if obj.get("frame") is not None else None
        return cls(int(nn), tuple(map(tuple, parse_int_matrix(obj["sigma"]))), frame)


def discriminant_action(sigma: MonodromyInvolution) -> int:
    """Sign tau with sigma acting as tau * id on A_L; rejects anything else.

    For n = 2 the group is Z/2 and both signs agree; +1 is returned.
    """
    L = sigma.lattice
    A = discriminant_group(L)
    plus = minus = True
    for gen_index, rep in enumerate(A.generator_reps):
        img = [sum(Fraction(sigma.matrix[i][j]) * rep[j] for j in range(L.rank)) for i in range(L.rank)]
        cls = A.class_of(img)
        unit = tuple(int(i == gen_index) for i in range(len(A.invariant_factors)))
        neg = tuple((-u) % d for u, d in zip(unit, A.invariant_factors))
        plus = plus and cls == unit
        minus = minus and cls == neg
    if plus:
        return 1
    if minus:
        return -1
    raise PreconditionError("not a monodromy operator: the action on A_L is not +-id")


# ---------------------------------------------------------------------------
# classification


@dataclass(frozen=True)
class BraneCase:
    case: int
    line: int | None
    tau: int
    plus_factors: tuple[int, ...]
    minus_factors: tuple[int, ...]
    plus_signature: tuple[int, int]
    minus_signature: tuple[int, int]
    plus_basis: tuple[tuple[int, ...], ...] = field(repr=False)
    minus_basis: tuple[tuple[int, ...], ...] = field(repr=False)
    matched: dict[str, str] = field(default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        return {
            "case": self.case,
            "line": self.line,
            "tau": self.tau,
            "plus": {"signature": list(self.plus_signature), "discriminant": list(self.plus_factors)},
            "minus": {"signature": list(self.minus_signature), "discriminant": list(self.minus_factors)},
            "matched": dict(self.matched),
        }


def _e8_terms(i: int) -> str:
    return "" if i == 0 else (" + E8(-1)" if i == 1 else f" + E8(-1)^{i}")


def case_lines(n: int, case: int) -> list[tuple[str, str]]:
    """Named (plus, minus) eigen-lattice pairs for the three lines of Case 1 or 2."""
    d = f"<{2 - 2 * n}>"
    if case == 1:
        return [(f"U{_e8_terms(i)}", f"U^2{_e8_terms(2 - i)} + {d}") for i in range(3)]
    if case == 2:
        return [(f"U{_e8_terms(i)} + {d}", f"U^2{_e8_terms(2 - i)}") for i in range(3)]
    raise PreconditionError("only Cases 1 and 2 carry explicit lines")


def classify_split(sigma: MonodromyInvolution) -> BraneCase:
    n = sigma.n
    L = sigma.lattice
    if comessatti(sigma.module) != 0:
        raise PreconditionError("classification needs lambda(L, sigma) = 0")
    P, N = sigma.eigen(1), sigma.eigen(-1)
    check(len(P) + len(N) == L.rank, "eigen-lattices do not span")
    check(abs(intmat.det(intmat.from_columns(P + N))) == 1, "lambda = 0 but L is not the eigen sum")
    if not sigma.admissible:
        raise PreconditionError("involution is not anti-symplectic admissible (signatures (1,*) and (2,*))")
    Pl = restrict(L, P).to_lattice()
    Nl = restrict(L, N).to_lattice()
    tp, tn = invariant_triple(Pl), invariant_triple(Nl)
    order_p = discriminant_group(Pl).order
    order_n = discriminant_group(Nl).order
    check(order_p * order_n == 2 * n - 2, f"|A_P| |A_N| = {order_p * order_n}, expected {2 * n - 2}")
    if not tp.factors:
        case = 1
    elif not tn.factors:
        case = 2
    else:
        if n % 2 or n < 4:
            raise InvariantError(f"split discriminant {tp.factors} + {tn.factors} impossible for n = {n}")
        if tp.factors == (2,) and tn.factors == ((n - 1,) if n > 2 else ()):
            case = 3
        elif tn.factors == (2,) and tp.factors == (n - 1,):
            case = 4
        else:
            raise InvariantError(f"no case fits A_P = {tp.factors}, A_N = {tn.factors}")
    expected_tau = {1: -1, 2: 1, 3: -1, 4: 1}[case]
    if n > 2:
        check(sigma.tau == expected_tau, f"Case {case} needs tau = {expected_tau}, got {sigma.tau}")
    line = None
    matched: dict[str, str] = {}
    if case in (1, 2):
        for i, (pe, ne) in enumerate(case_lines(n, case)):
            if tp.equivalent(invariant_triple(make_named(pe))) and tn.equivalent(invariant_triple(make_named(ne))):
                line = i
                matched = {"plus": pe, "minus": ne}
                break
        check(line is not None, f"Case {case} eigen-lattices match none of the listed lines")
    return BraneCase(
        case,
        line,
        sigma.tau,
        tp.factors,
        tn.factors,
        tp.signature,
        tn.signature,
        tuple(map(tuple, P)),
        tuple(map(tuple, N)),
        matched,
    )


# ---------------------------------------------------------------------------
# representatives


def representative(n: int, case: int, line: int = 0) -> MonodromyInvolution:
    """An explicit involution in the given case (and line, for Cases 1 and 2)."""
    L = build_k3n_lattice(n)
    if case in (1, 2):
        if line not in (0, 1, 2):
            raise PreconditionError("line must be 0, 1 or 2")
        diag = [-1] * L.rank
        for i in U_SLOTS[0]:
            diag[i] = 1
        for k in range(line):
            for i in E8_SLOTS[k]:
                diag[i] = 1
        if case == 2:
            diag[DELTA] = 1
        s = [[diag[i] if i == j else 0 for j in range(L.rank)] for i in range(L.rank)]
        frame = _standard_frame(case)
        return MonodromyInvolution(n, tuple(map(tuple, s)), frame)
    if case in (3, 4):
        if n % 2 or n < 4:
            raise PreconditionError("Cases 3 and 4 only exist for even n >= 4")
        return MonodromyInvolution(n, tuple(map(tuple, _glued_split(n, case))))
    raise PreconditionError("case must be 1, 2, 3 or 4")


def _standard_frame(case: int) -> Frame:
    r = 23
    e_slot = U_SLOTS[1] if case == 1 else U_SLOTS[0]
    return Frame(
        tuple(_vec(r, {DELTA: 1})),
        tuple(_vec(r, {e_slot[0]: 1})),
        tuple(_vec(r, {e_slot[1]: 1})),
    )


def _glued_split(n: int, case: int) -> list[list[int]]:
    """Involution with discriminants Z/2 and Z/(n-1) on the two eigen-lattices.

    z = 2e + a f + delta in U3 + <-2n+2> has divisibility 2 and z^2 = +-2, so
    U3 + <-2n+2> = Zz + z^perp; z^perp carries the Z/(n-1) part.
    """
    L = build_k3n_lattice(n)
    r = L.rank
    e, f = U_SLOTS[2]
    a = n // 2 if n % 4 == 0 else (n - 2) // 2
    z = _vec(r, {e: 2, f: a, DELTA: 1})
    zsq = L.square(z)
    check(zsq in (2, -2) and divisibility(L, z) == 2, "glue vector has the wrong invariants")
    # z^perp inside U3 + <delta>
    local = [e, f, DELTA]
    sub = [[1 if i == j else 0 for j in range(r)] for i in local]
    comp = intmat.kernel_basis([[L.pair(z, b) for b in sub]], 3)
    zperp = [[sum(c * b[k] for c, b in zip(cv, sub)) for k in range(r)] for cv in comp]
    u1 = [_vec(r, {i: 1}) for i in U_SLOTS[0]]
    u2 = [_vec(r, {i: 1}) for i in U_SLOTS[1]]
    e8 = [_vec(r, {i: 1}) for blk in E8_SLOTS for i in blk]
    if case == 3:
        P = [z] if zsq == 2 else [z] + u1
        N = zperp + (u1 + u2 + e8 if zsq == 2 else u2 + e8)
    else:
        N = [z] + u1 + (e8 if zsq == 2 else u2)
        P = zperp + (u2 if zsq == 2 else e8)
    B = intmat.from_columns(P + N)
    check(abs(intmat.det(B)) == 1, "eigen bases do not span L")
    D = [[0] * r for _ in range(r)]
    for i in range(r):
        D[i][i] = 1 if i < len(P) else -1
    Binv = intmat.integer_inverse(B)
    return intmat.matmul(intmat.matmul(B, D), Binv)


# ---------------------------------------------------------------------------
# random conjugation by W(L)


def _reflection(L: IntegerLattice, root: Sequence[int]) -> list[list[int]]:
    """s_r(x) = x - 2 (x.r)/(r.r) r for a -2 root r: x + (x.r) r."""
    check(L.square(root) == -2, "reflection root must have square -2")
    img = L.image(root)
    r = L.rank
    return [[int(i == j) + img[j] * root[i] for j in range(r)] for i in range(r)]


def _transvection(L: IntegerLattice, e: Sequence[int], a: Sequence[int]) -> list[list[int]]:
    """Eichler transvection x -> x - (a.x) e + (e.x) a - (a^2/2)(e.x) e."""
    check(L.square(e) == 0 and L.pair(e, a) == 0, "transvection needs e isotropic and a orthogonal to e")
    a2 = L.square(a)
    check(a2 % 2 == 0, "transvection vector must have even square")
    ie, ia = L.image(e), L.image(a)
    r = L.rank
    return [
        [int(i == j) - ia[j] * e[i] + ie[j] * a[i] - (a2 // 2) * ie[j] * e[i] for j in range(r)]
        for i in range(r)
    ]


def random_w_element(n: int, rng: random.Random, length: int = 4) -> tuple[list[list[int]], list[list[int]]]:
    """A random product of root reflections and Eichler transvections, with its inverse.

    Every factor acts trivially on A_L.
    """
    L = build_k3n_lattice(n)
    r = L.rank
    roots = [_vec(r, {i: 1}) for blk in E8_SLOTS for i in blk] + [
        _vec(r, {p: 1, q: -1}) for p, q in U_SLOTS
    ]
    g = intmat.identity(r)
    ginv = intmat.identity(r)
    for _ in range(length):
        if rng.random() < 0.4:
            m = _reflection(L, rng.choice(roots))
            mi = m
        else:
            slot = rng.randrange(3)
            e = _vec(r, {U_SLOTS[slot][rng.randrange(2)]: 1})
            others = [i for i in range(r) if i not in U_SLOTS[slot]]
            a = [0] * r
            for i in rng.sample(others, 2):
                a[i] = rng.choice((-1, 1))
            m = _transvection(L, e, a)
            mi = _transvection(L, e, [-x for x in a])
        g = intmat.matmul(m, g)
        ginv = intmat.matmul(ginv, mi)
    check(intmat.matmul(g, ginv) == intmat.identity(r), "inverse word mismatch")
    check(L.is_isometry(g), "W(L) word is not an isometry")
    return g, ginv


def conjugate(sigma: MonodromyInvolution, g: Sequence[Sequence[int]], ginv: Sequence[Sequence[int]]) -> MonodromyInvolution:
    """g sigma g^-1, carrying the frame along."""
    s = intmat.matmul(intmat.matmul(g, sigma.matrix), ginv)
    frame = None
    if sigma.frame is not None:
        fr = sigma.frame
        frame = Frame(*(tuple(intmat.matvec(g, v)) for v in (fr.x, fr.e, fr.f)))
    return MonodromyInvolution(sigma.n, tuple(map(tuple, s)), frame)


def applicable_cases(n: int) -> list[tuple[int, int | None]]:
    out: list[tuple[int, int | None]] = [(c, i) for c in (1, 2) for i in range(3)]
    if n % 2 == 0 and n >= 4:
        out += [(3, None), (4, None)]
    return out


def random_instance(n: int, rng: random.Random, length: int = 4) -> MonodromyInvolution:
    case, line = rng.choice(applicable_cases(n))
    rep = representative(n, case, line or 0)
    g, ginv = random_w_element(n, rng, length)
    return conjugate(rep, g, ginv)


def seeded_instance(n: int, seed: int, index: int, length: int = 4) -> MonodromyInvolution:
    """Instance ``index`` of the stream for (n, seed); independent of evaluation order."""
    return random_instance(n, random.Random(f"{seed}:{n}:{index}"), length)


def _summarize(n: int, seed: int, index: int) -> dict[str, Any]:
    sigma = seeded_instance(n, seed, index)
    cert = obstruct(sigma)
    return {
        "index": index,
        "case": cert["case"],
        "line": cert["line"],
        "tau": cert["tau"],
        "lambda_lower_bound": cert["lambda_lower_bound"],
    }


def property_run(n: int, count: int, seed: int = 0, workers: int = 1) -> dict[str, Any]:
    """Obstruct ``count`` random admissible lambda = 0 involutions; any failure raises."""
    if count < 0:
        raise PreconditionError("count must be nonnegative")
    if workers > 1 and count > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_summarize, [n] * count, [seed] * count, range(count)))
    else:
        rows = [_summarize(n, seed, i) for i in range(count)]
    by_case: dict[str, int] = {}
    for r in rows:
        key = f"case{r['case']}" + ("" if r["line"] is None else f".line{r['line']}")
        by_case[key] = by_case.get(key, 0) + 1
    return {
        "n": n,
        "seed": seed,
        "count": count,
        "certified": sum(1 for r in rows if r["lambda_lower_bound"] >= 1),
        "by_case": dict(sorted(by_case.items())),
    }


# ---------------------------------------------------------------------------
# Eichler orbit key and epsilon


@dataclass(frozen=True)
class OrbitKey:
    square: int
    cls: tuple[int, ...]
    q: Fraction

    def to_json(self) -> dict[str, Any]:
        return {"square": self.square, "class": list(self.cls), "q": str(self.q)}


def eichler_orbit_key(L: IntegerLattice, v: Sequence[int]) -> OrbitKey:
    """(v^2, v*) which determines the orbit of a primitive v under the stable orthogonal group."""
    if not L.is_even:
        raise PreconditionError("Eichler criterion needs an even lattice")
    if not _has_two_hyperbolic_planes(L):
        raise PreconditionError("Eichler criterion needs two orthogonal hyperbolic planes")
    if not is_primitive(L, v):
        raise PreconditionError("Eichler criterion applies to primitive vectors")
    cls, q = discriminant_class(L, v)
    return OrbitKey(L.square(v), cls, q)


def eichler_equivalent(L: IntegerLattice, u: Sequence[int], v: Sequence[int]) -> bool:
    return eichler_orbit_key(L, u) == eichler_orbit_key(L, v)


@dataclass(frozen=True)
class EpsilonData:
    epsilon: tuple[int, ...]
    k: int
    w: tuple[int, ...]
    w_square: int

    def to_json(self) -> dict[str, Any]:
        return {"epsilon": list(self.epsilon), "k": self.k, "w": list(self.w), "w_square": self.w_square}


def _scaled_class(A, cls: Sequence[int], k: int) -> tuple[int, ...]:
    return tuple((k * c) % d for c, d in zip(cls, A.invariant_factors))


def construct_epsilon(L: IntegerLattice, n: int, k: int, frame: Frame) -> EpsilonData:
    """epsilon = k x + (2n-2) w with w = e + (w^2/2) f orthogonal to x and w^2 = (k^2-1)/(2n-2)."""
    d = 2 * n - 2
    if gcd(k, d) != 1:
        raise PreconditionError(f"k = {k} is not coprime to {d}")
    if (k * k - 1) % d or ((k * k - 1) // d) % 2:
        raise PreconditionError(f"invalid k = {k}: (k^2 - 1)/{d} is not an even integer")
    x, e, f = frame.x, frame.e, frame.f
    if L.square(x) != -d or divisibility(L, x) != d or not is_primitive(L, x):
        raise PreconditionError("frame vector x must be primitive with x^2 = 2-2n and div(x) = 2n-2")
    if (L.square(e), L.square(f), L.pair(e, f), L.pair(x, e), L.pair(x, f)) != (0, 0, 1, 0, 0):
        raise PreconditionError("frame needs a hyperbolic pair (e, f) orthogonal to x")
    w_sq = (k * k - 1) // d
    m = w_sq // 2
    w = tuple(a + m * b for a, b in zip(e, f)) if m else tuple([0] * L.rank)
    check(L.square(w) == w_sq and L.pair(w, x) == 0, "w has the wrong invariants")
    eps = tuple(k * a + d * b for a, b in zip(x, w))
    check(is_primitive(L, eps), "epsilon is not primitive")
    check(L.square(eps) == -d, f"epsilon^2 = {L.square(eps)}, expected {-d}")
    check(divisibility(L, eps) == d, "epsilon has the wrong divisibility")
    A = discriminant_group(L)
    cx, _ = discriminant_class(L, x)
    ce, _ = discriminant_class(L, eps)
    check(ce == _scaled_class(A, cx, k), "epsilon* differs from k x*")
    return EpsilonData(eps, k, w, w_sq)


def _find_frame(sigma: MonodromyInvolution, case: int) -> Frame:
    if sigma.frame is not None:
        return sigma.frame
    L = sigma.lattice
    s = -1 if case == 1 else 1
    d = 2 * sigma.n - 2
    r = L.rank
    for sign in (1, -1):
        x = tuple(_vec(r, {DELTA: sign}))
        if sigma.apply(x) != tuple(s * t for t in x):
            continue
        for p, q in U_SLOTS:
            e, f = tuple(_vec(r, {p: 1})), tuple(_vec(r, {q: 1}))
            if sigma.apply(e) == tuple(s * t for t in e) and sigma.apply(f) == tuple(s * t for t in f):
                return Frame(x, e, f)
    raise PreconditionError(
        f"no frame found: supply 'frame' with x (square {-d}, divisibility {d}) and a hyperbolic pair in the "
        f"{'anti-' if s < 0 else ''}invariant lattice"
    )


# ---------------------------------------------------------------------------
# certificates


def obstruction_case12(sigma: MonodromyInvolution, brane: BraneCase | None = None) -> dict[str, Any]:
    brane = brane or classify_split(sigma)
    if brane.case not in (1, 2):
        raise PreconditionError(f"Case {brane.case} is handled by obstruction_case34")
    n, L = sigma.n, sigma.lattice
    d = 2 * n - 2
    s = -1 if brane.case == 1 else 1  # eigenvalue of sigma on the lattice containing epsilon
    frame = _find_frame(sigma, brane.case)
    for v in (frame.x, frame.e, frame.f):
        if sigma.apply(v) != tuple(s * t for t in v):
            raise PreconditionError("frame vectors must lie in the non-unimodular eigen-lattice")
    delta = tuple(_vec(L.rank, {DELTA: 1}))
    A = discriminant_group(L)
    cv, _ = discriminant_class(L, delta)
    cx, _ = discriminant_class(L, frame.x)
    ks = [k for k in range(1, d + 1) if gcd(k, d) == 1 and _scaled_class(A, cx, k) == cv]
    check(bool(ks), "x* does not generate A_L")
    k = ks[0]
    if (k * k - 1) % (2 * d):
        k += d
    eps_data = construct_epsilon(L, n, k, frame)
    eps = eps_data.epsilon
    check(sigma.apply(eps) == tuple(s * t for t in eps), "epsilon left its eigen-lattice")
    check(eichler_equivalent(L, eps, delta), "epsilon and delta lie in different Eichler orbits")
    comp = orthogonal_complement(L, [eps])
    check(abs(comp.det) == 1 and comp.rank == L.rank - 1, "epsilon^perp is not unimodular")
    C = intmat.from_columns([list(eps)] + [list(b) for b in comp.basis])
    check(abs(intmat.det(C)) == 1, "L is not Z epsilon + epsilon^perp")
    # the K3 part: g = s * sigma restricted to epsilon^perp
    conj = intmat.matmul(intmat.matmul(intmat.integer_inverse(C), sigma.matrix), C)
    check(conj[0][0] == s and all(conj[0][j] == 0 and conj[j][0] == 0 for j in range(1, L.rank)),
          "sigma does not preserve Z epsilon + epsilon^perp")
    g = [[s * x for x in row[1:]] for row in conj[1:]]
    check(comessatti(InvolutiveModule(g)) == 0, "residual action on epsilon^perp is not split")
    wit = h4_witness(L.rank - 1, g, "holo", n, -1)
    alpha = comp.ambient(wit["alpha"])
    check(sigma.apply(alpha) == tuple(-s * t for t in alpha), "alpha lies in the wrong eigenspace")
    check(L.pair(alpha, eps) == 0, "alpha is not orthogonal to epsilon")
    return {
        "case": brane.case,
        "line": brane.line,
        "n": n,
        "tau": sigma.tau,
        "branch": "iota(delta)=delta" if s == 1 else "iota(delta)=-delta",
        "frame": frame.to_json(),
        "epsilon": eps_data.to_json(),
        "epsilon_key": eichler_orbit_key(L, eps).to_json(),
        "delta_key": eichler_orbit_key(L, delta).to_json(),
        "alpha": list(alpha),
        "alpha_eigenvalue": -s,
        "witness_basis": wit["basis"],
        "witness_matrix": wit["matrix"],
        "lambda_block": wit["lambda_block"],
        "lambda_h4": wit["lambda_h4"],
        "h4_rank": wit["h4_rank"],
        "lambda_lower_bound": 1,
    }


@dataclass(frozen=True)
class MukaiQ:
    n: int
    lattice: IntegerLattice
    gamma: tuple[int, ...]
    embed: tuple[tuple[int, ...], ...]  # 24 x 23, columns = images of the L basis

    def e(self, v: Sequence[int]) -> tuple[int, ...]:
        return tuple(intmat.matvec(self.embed, v))


def build_mukai(n: int) -> MukaiQ:
    """U^3 + E8(-1)^2 + U with gamma = e4 + (n-1) f4 and L sent onto gamma^perp."""
    if n < 2:
        raise PreconditionError("n >= 2")
    Q = make_named("U^3 + E8(-1)^2 + U")
    e4, f4 = 22, 23
    gamma = tuple(_vec(24, {e4: 1, f4: n - 1}))
    cols = [_vec(24, {i: 1}) for i in range(22)] + [_vec(24, {e4: 1, f4: -(n - 1)})]
    E = intmat.from_columns(cols)
    M = MukaiQ(n, Q, gamma, tuple(map(tuple, E)))
    L = build_k3n_lattice(n)
    check(Q.square(gamma) == 2 * n - 2 and is_primitive(Q, gamma), "gamma has the wrong invariants")
    check(intmat.matmul(intmat.matmul(intmat.transpose(E), Q.gram), E) == [list(r) for r in L.gram],
          "embedding is not an isometry")
    check(all(Q.pair(gamma, c) == 0 for c in cols), "embedding misses gamma^perp")
    check(abs(intmat.det(intmat.from_columns(cols + [list(gamma)]))) == 2 * n - 2, "gamma^perp is not saturated")
    return M


def mukai_action(M: MukaiQ, sigma: MonodromyInvolution) -> list[list[int]]:
    """sigma_Q = tau * e sigma e^-1 on gamma^perp and the identity on gamma."""
    cols = [list(c) for c in intmat.transpose(M.embed)] + [list(M.gamma)]
    B = intmat.from_columns(cols)
    r = sigma.lattice.rank
    D = intmat.block_diag(intmat.scale(sigma.matrix, sigma.tau), [[1]])
    Binv = intmat.rational_inverse(B)
    prod = [[sum(Fraction(x) * y for x, y in zip(row, col)) for col in zip(*Binv)] for row in intmat.matmul(B, D)]
    check(all(x.denominator == 1 for row in prod for x in row), "sigma_Q is not integral")
    sq = [[int(x) for x in row] for row in prod]
    check(M.lattice.is_isometry(sq), "sigma_Q is not an isometry")
    check(intmat.matmul(sq, sq) == intmat.identity(r + 1), "sigma_Q is not an involution")
    return sq


def obstruction_case34(sigma: MonodromyInvolution, brane: BraneCase | None = None) -> dict[str, Any]:
    n = sigma.n
    if n % 2 or n < 4:
        raise PreconditionError("Cases 3 and 4 only occur for even n >= 4")
    brane = brane or classify_split(sigma)
    if brane.case not in (3, 4):
        raise PreconditionError(f"Case {brane.case} is handled by obstruction_case12")
    d = 2 * n - 2
    M = build_mukai(n)
    Q = M.lattice
    sq = mukai_action(M, sigma)
    e4, f4 = 22, 23
    u = M.gamma
    v = tuple(_vec(24, {e4: -1, f4: n - 1}))
    check(Q.square(u) == d and Q.square(v) == -d and Q.pair(u, v) == 0, "u, v have the wrong invariants")
    check(all((a + b) % d == 0 for a, b in zip(u, v)), "u + v is not divisible by 2n-2")
    delta_p = v  # u already sits at gamma, so the isometry moving u to gamma is the identity
    w = tuple((a + b) // d for a, b in zip(delta_p, M.gamma))
    delta = tuple(_vec(23, {DELTA: -1}))
    check(M.e(delta) == delta_p, "e(delta) differs from delta'")
    sd = sigma.apply(delta)
    dplus = [a + b for a, b in zip(delta, sd)]  # 2 delta_+
    dminus = [a - b for a, b in zip(delta, sd)]  # 2 delta_-
    if brane.case == 3:
        check(all(t % (2 * (n - 1)) == 0 for t in dplus), "delta_+ is not divisible by n-1")
        check(all(t % 4 == 0 for t in dminus), "delta_- is not divisible by 2")
        x = tuple(t // (2 * (n - 1)) for t in dplus)
        y = tuple(t // 4 for t in dminus)
        check(tuple((n - 1) * a + 2 * b for a, b in zip(x, y)) == delta, "delta != (n-1)x + 2y")
        target = x
    else:
        check(all(t % 4 == 0 for t in dplus), "delta_+ is not divisible by 2")
        check(all(t % (2 * (n - 1)) == 0 for t in dminus), "delta_- is not divisible by n-1")
        x = tuple(t // 4 for t in dplus)
        y = tuple(t // (2 * (n - 1)) for t in dminus)
        check(tuple(2 * a + (n - 1) * b for a, b in zip(x, y)) == delta, "delta != 2x + (n-1)y")
        target = y
    sw = intmat.matvec(sq, w)
    diff = tuple(a - b for a, b in zip(w, sw))
    check(diff == M.e(target), "w - sigma_Q(w) differs from the predicted vector")
    check(intmat.content(diff) % 2 == 1, "w - sigma_Q(w) is divisible by 2")
    lam_q = comessatti(InvolutiveModule(sq))
    check(lam_q >= 1, "lambda(Q) = 0 despite an odd witness")
    return {
        "case": brane.case,
        "line": None,
        "n": n,
        "tau": sigma.tau,
        "gamma": list(M.gamma),
        "u": list(u),
        "v": list(v),
        "delta_prime": list(delta_p),
        "delta": list(delta),
        "w": list(w),
        "x": list(x),
        "y": list(y),
        "witness_vector": list(diff),
        "witness_equals": "e(x)" if brane.case == 3 else "e(y)",
        "sigma_Q": [list(r) for r in sq],
        "lambda_Q": lam_q,
        "lambda_lower_bound": 1,
    }


def obstruct(sigma: MonodromyInvolution) -> dict[str, Any]:
    """Certificate that the induced action on H^2 + H^4 is nontrivial mod 2."""
    brane = classify_split(sigma)
    if brane.case in (1, 2):
        return obstruction_case12(sigma, brane)
    return obstruction_case34(sigma, brane)


# ---------------------------------------------------------------------------
# symplectic slack


def _k3m_total(m: int) -> int:
    return 1 if m == 0 else sum(goettsche_series(22, m)[m])


def symplectic_smith_slack(n: int | None = None, og6: bool = False) -> dict[str, Any]:
    """Fixed loci of symplectic involutions against the ambient total Betti number."""
    if og6:
        options = [
            {"components": {"K3": 16}, "total": 16 * 24},
            {"components": {"points": 16}, "total": 16},
            {"components": {"K3": 2}, "total": 2 * 24},
        ]
        amb = sum(OG6_BETTI)
        best = max(o["total"] for o in options)
        return {"type": "OG6", "options": options, "fixed_total": best, "ambient_total": amb, "slack": amb - best}
    if n is None or n < 1:
        raise PreconditionError("K3^[n] slack needs n >= 1")
    comps: dict[int, int] = {}
    for k in range(n + 1):
        for l in range(k + 1):
            rest = n - k - 2 * l
            if rest >= 0 and rest % 2 == 0:
                c = comb(8, k) * comb(k, l)
                if c:
                    comps[rest // 2] = comps.get(rest // 2, 0) + c
    table = [
        {"m": m, "label": "points" if m == 0 else f"K3^[{m}]", "count": comps[m], "betti_total": _k3m_total(m)}
        for m in sorted(comps, reverse=True)
    ]
    fixed = sum(row["count"] * row["betti_total"] for row in table)
    amb = sum(goettsche_series(22, n)[n])
    return {"type": f"K3^[{n}]", "components": table, "fixed_total": fixed, "ambient_total": amb, "slack": amb - fixed}


__all__ = [
    "DELTA",
    "BraneCase",
    "EpsilonData",
    "Frame",
    "MonodromyInvolution",
    "MukaiQ",
    "OrbitKey",
    "E8_CARTAN",
    "applicable_cases",
    "build_k3n_lattice",
    "build_mukai",
    "case_lines",
    "classify_split",
    "conjugate",
    "construct_epsilon",
    "discriminant_action",
    "eichler_equivalent",
    "eichler_orbit_key",
    "mukai_action",
    "obstruct",
    "obstruction_case12",
    "obstruction_case34",
    "property_run",
    "random_instance",
    "seeded_instance",
    "random_w_element",
    "representative",
    "symplectic_smith_slack",
]

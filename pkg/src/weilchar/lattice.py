"""Integer-lattice and root-datum computations: Smith normal form, torsion of
twist coinvariants, restricted roots with type tags, and descended root
systems.

All arithmetic is over Z with plain Python ints (no overflow); matrices are
lists of lists or anything numpy can coerce.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np


class LatticeError(Exception):
    pass


class NotFiniteOrder(LatticeError):
    pass


class RootNotInDatum(LatticeError):
    pass


class InconsistentEvaluation(LatticeError):
    pass


def _to_rows(m) -> list[list[int]]:
    a = np.asarray(m, dtype=object)
    if a.ndim != 2:
        raise LatticeError("expected a matrix")
    return [[int(x) for x in row] for row in a]


def smith_normal_form(m) -> tuple[list[list[int]], list[list[int]], list[list[int]]]:
    """U, D, V with D = U*m*V, U and V unimodular, D diagonal, d_i | d_{i+1}.

    Plain row/column reduction with a divisibility fixup; exact over Z.
    """
    d = _to_rows(m)
    rows = len(d)
    cols = len(d[0]) if rows else 0
    u = [[int(i == j) for j in range(rows)] for i in range(rows)]
    v = [[int(i == j) for j in range(cols)] for i in range(cols)]

    def row_op(i, j, k):  # row_i -= k * row_j
        d[i] = [a - k * b for a, b in zip(d[i], d[j])]
        u[i] = [a - k * b for a, b in zip(u[i], u[j])]

    def col_op(i, j, k):  # col_i -= k * col_j
        for r in range(rows):
            d[r][i] -= k * d[r][j]
        for r in range(cols):
            v[r][i] -= k * v[r][j]

    def row_swap(i, j):
        d[i], d[j] = d[j], d[i]
        u[i], u[j] = u[j], u[i]

    def col_swap(i, j):
        for r in range(rows):
            d[r][i], d[r][j] = d[r][j], d[r][i]
        for r in range(cols):
            v[r][i], v[r][j] = v[r][j], v[r][i]

    def pivot(s):
        best = None
        for i in range(s, rows):
            for j in range(s, cols):
                if d[i][j] and (best is None or abs(d[i][j]) < abs(d[best[0]][best[1]])):
                    best = (i, j)
        return best

    s = 0
    while s < min(rows, cols):
        pos = pivot(s)
        if pos is None:
            break
        row_swap(s, pos[0])
        col_swap(s, pos[1])
        # one elimination pass; any leftover remainder is strictly smaller
        # than the pivot, so restarting with a fresh minimal pivot terminates
        for i in range(s + 1, rows):
            if d[i][s]:
                row_op(i, s, d[i][s] // d[s][s])
        if any(d[i][s] for i in range(s + 1, rows)):
            continue
        for j in range(s + 1, cols):
            if d[s][j]:
                col_op(j, s, d[s][j] // d[s][s])
        if any(d[s][j] for j in range(s + 1, cols)):
            continue
        # divisibility fixup: pull an offending row into the pivot row and
        # restart the step (the next pivot properly divides the old one)
        offender = None
        for i in range(s + 1, rows):
            if any(d[i][j] % d[s][s] for j in range(s + 1, cols)):
                offender = i
                break
        if offender is not None:
            row_op(s, offender, -1)
            continue
        if d[s][s] < 0:
            d[s] = [-a for a in d[s]]
            u[s] = [-a for a in u[s]]
        s += 1
    return u, d, v


def det_int(m) -> int:
    """Exact integer determinant (fraction-free via Fractions; small sizes)."""
    a = [[Fraction(x) for x in row] for row in _to_rows(m)]
    n = len(a)
    det = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c]), None)
        if piv is None:
            return 0
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det *= a[c][c]
        for i in range(c + 1, n):
            f = a[i][c] / a[c][c]
            a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    assert det.denominator == 1
    return int(det)


def matrix_order(theta, bound: int = 10_000) -> int:
    """Multiplicative order of an integer matrix; NotFiniteOrder if > bound."""
    t = _to_rows(theta)
    n = len(t)
    ident = [[int(i == j) for j in range(n)] for i in range(n)]
    acc = t
    for k in range(1, bound + 1):
        if acc == ident:
            return k
        acc = [[sum(acc[i][r] * t[r][j] for r in range(n)) for j in range(n)] for i in range(n)]
    raise NotFiniteOrder("no power up to %d is the identity" % bound)


def pi0_torsion(theta) -> list[int]:
    """Invariant factors > 1 of coker(1 - theta); theta of finite order."""
    matrix_order(theta)  # raises NotFiniteOrder
    t = _to_rows(theta)
    n = len(t)
    one_minus = [[int(i == j) - t[i][j] for j in range(n)] for i in range(n)]
    _, d, _ = smith_normal_form(one_minus)
    return [d[i][i] for i in range(n) if d[i][i] > 1]


# ---------------------------------------------------------------------------
# Root data


@dataclass(frozen=True)
class RootDatum:
    """Character lattice Z^rank with roots, coroots (aligned lists, integer
    dot pairing) and a finite-order lattice automorphism theta."""

    rank: int
    roots: tuple[tuple[int, ...], ...]
    coroots: tuple[tuple[int, ...], ...]
    theta: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.roots) != len(self.coroots):
            raise LatticeError("roots and coroots must align")
        for a, av in zip(self.roots, self.coroots):
            if sum(x * y for x, y in zip(a, av)) != 2:
                raise LatticeError("pairing <a, a^> != 2 for %r" % (a,))
        self.order  # validates finite order
        perm = {}
        inv_t = _int_inverse(self.theta)
        for i, a in enumerate(self.roots):
            ta = _apply(self.theta, a)
            if ta not in self.roots:
                raise LatticeError("theta does not permute the roots")
            perm[i] = self.roots.index(ta)
        for i, av in enumerate(self.coroots):
            # theta acts on cocharacters by the inverse transpose
            tav = _apply(_transpose(inv_t), av)
            if tuple(tav) != self.coroots[perm[i]]:
                raise LatticeError("theta action on coroots incompatible with roots")

    @property
    def order(self) -> int:
        return matrix_order(self.theta)

    def theta_apply(self, alpha, power: int = 1) -> tuple[int, ...]:
        v = tuple(alpha)
        m = _int_power(self.theta, power % self.order)
        return _apply(m, v)

    def theta_orbit(self, alpha) -> list[tuple[int, ...]]:
        if tuple(alpha) not in self.roots:
            raise RootNotInDatum("%r not a root" % (alpha,))
        orbit = [tuple(alpha)]
        cur = self.theta_apply(alpha)
        while cur != tuple(alpha):
            orbit.append(cur)
            cur = self.theta_apply(cur)
        return orbit


def _apply(m, v) -> tuple[int, ...]:
    return tuple(sum(m[i][j] * v[j] for j in range(len(v))) for i in range(len(m)))


def _transpose(m):
    return tuple(tuple(row[i] for row in m) for i in range(len(m[0])))


def _int_power(m, k: int):
    n = len(m)
    out = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
    base = tuple(tuple(row) for row in m)
    while k:
        if k & 1:
            out = tuple(tuple(sum(out[i][r] * base[r][j] for r in range(n)) for j in range(n)) for i in range(n))
        base = tuple(tuple(sum(base[i][r] * base[r][j] for r in range(n)) for j in range(n)) for i in range(n))
        k >>= 1
    return out


def _int_inverse(m):
    order = matrix_order(m)
    return _int_power(m, order - 1)


@dataclass(frozen=True)
class RestrictedRoot:
    vector: tuple[int, ...]
    type_tag: int  # 1, 2 or 3
    orbit: tuple[tuple[int, ...], ...]  # the Theta-orbit of preimages


@dataclass
class Restriction:
    """Output of restrict_roots: the projection to the coinvariant lattice and
    the restricted-root bookkeeping."""

    datum: RootDatum
    proj_rows: tuple[tuple[int, ...], ...]  # p*: X* -> Z^m, rows of U at zero divisors
    restricted: tuple[RestrictedRoot, ...]
    by_root: dict = dc_field(default_factory=dict)  # root -> restricted vector

    def project(self, x) -> tuple[int, ...]:
        return tuple(sum(r[j] * x[j] for j in range(len(x))) for r in self.proj_rows)


def restrict_roots(d: RootDatum) -> Restriction:
    """Restricted roots p*(alpha) in Y*(T) = X*/(X* cap (1-theta)X*_Q), with
    type 1/2/3 tags; the map Phi/Theta -> Phi_res is asserted bijective."""
    n = d.rank
    one_minus = [[int(i == j) - d.theta[i][j] for j in range(n)] for i in range(n)]
    u, dd, _ = smith_normal_form(one_minus)
    zero_rows = [i for i in range(n) if i >= len(dd) or dd[i][i] == 0]
    proj_rows = tuple(tuple(u[i]) for i in zero_rows)

    def project(x):
        return tuple(sum(r[j] * x[j] for j in range(n)) for r in proj_rows)

    orbits: list[list[tuple[int, ...]]] = []
    seen = set()
    for a in d.roots:
        if a in seen:
            continue
        orb = d.theta_orbit(a)
        seen.update(orb)
        orbits.append(orb)

    res_vecs = {}
    for orb in orbits:
        vecs = {project(a) for a in orb}
        if len(vecs) != 1:
            raise LatticeError("projection not constant on a Theta-orbit")
        v = vecs.pop()
        if v in res_vecs:
            raise LatticeError("Phi/Theta -> Phi_res is not injective")
        res_vecs[v] = tuple(orb)

    all_res = set(res_vecs)
    restricted = []
    by_root = {}
    for v, orb in res_vecs.items():
        double = tuple(2 * x for x in v)
        half = tuple(x // 2 for x in v) if all(x % 2 == 0 for x in v) else None
        if double in all_res:
            tag = 2
        elif half is not None and half in all_res:
            tag = 3
        else:
            tag = 1
        rr = RestrictedRoot(v, tag, orb)
        restricted.append(rr)
        for a in orb:
            by_root[a] = v
    out = Restriction(d, proj_rows, tuple(restricted))
    out.by_root = by_root
    return out


def norm_sum(alpha, d: RootDatum) -> tuple[tuple[int, ...], int, int, int]:
    """N(alpha) = sum of the Theta-orbit, plus (l_alpha, rho_alpha, sigma_sign)."""
    orb = d.theta_orbit(alpha)
    n_alpha = tuple(sum(a[j] for a in orb) for j in range(d.rank))
    res = restrict_roots(d)
    tag = next(r.type_tag for r in res.restricted if tuple(alpha) in r.orbit)
    rho = 2 if tag == 2 else 1
    sigma = -1 if tag == 3 else 1
    return n_alpha, len(orb), rho, sigma


def descended_roots(d: RootDatum, nu_eval) -> set[tuple[int, ...]]:
    """{p*(alpha) : N(alpha)(nu) = sigma_alpha}, the roots of the descended
    group; nu_eval maps each root to the value N(alpha)(nu) (constant on
    Theta-orbits, with 1 and -1 distinguished by equality)."""
    res = restrict_roots(d)
    out = set()
    for rr in res.restricted:
        vals = {nu_eval[a] for a in rr.orbit}
        if len(vals) != 1:
            raise InconsistentEvaluation("nu evaluation not constant on %r" % (rr.orbit,))
        val = vals.pop()
        sigma = -1 if rr.type_tag == 3 else 1
        if val == sigma:
            out.add(rr.vector)
    return out


# ---------------------------------------------------------------------------
# Built-in catalogue (simple-root basis; theta = diagram automorphism)

_CARTAN = {
    "A1": [[2]],
    "A2": [[2, -1], [-1, 2]],
    "A3": [[2, -1, 0], [-1, 2, -1], [0, -1, 2]],
    "A4": [[2, -1, 0, 0], [-1, 2, -1, 0], [0, -1, 2, -1], [0, 0, -1, 2]],
    "B2": [[2, -2], [-1, 2]],
    "C2": [[2, -1], [-2, 2]],
    "D4": [[2, -1, 0, 0], [-1, 2, -1, -1], [0, -1, 2, 0], [0, -1, 0, 2]],
}

# diagram automorphisms as permutations of the simple roots (0-indexed)
_DIAGRAM = {
    "A2.flip": ("A2", [1, 0]),
    "A3.flip": ("A3", [2, 1, 0]),
    "A4.flip": ("A4", [3, 2, 1, 0]),
    "D4.swap": ("D4", [0, 1, 3, 2]),
    "D4.triality": ("D4", [2, 1, 3, 0]),
}


def _generate_root_system(cartan) -> tuple[list[tuple[int, ...]], list[tuple[int, ...]]]:
    """Close the simple (root, coroot) pairs under simple reflections.

    Roots live in simple-root coordinates, coroots in fundamental-coweight
    coordinates, so the natural pairing is the plain dot product and
    coroot(alpha_j) is column j of the Cartan matrix."""
    n = len(cartan)
    simples = [tuple(int(i == j) for i in range(n)) for j in range(n)]
    cosimples = [tuple(cartan[i][j] for i in range(n)) for j in range(n)]

    # close with coroots tracked: s_j(a) = a - <a, aj^>aj ; s_j(av) = av - <aj, av>aj^
    pairs = {(simples[j], cosimples[j]) for j in range(n)}
    pairs |= {(tuple(-x for x in a), tuple(-x for x in av)) for a, av in pairs}
    changed = True
    while changed:
        changed = False
        for a, av in list(pairs):
            for j in range(n):
                pa = sum(a[i] * cartan[i][j] for i in range(n))  # <a, alpha_j^vee>
                pav = av[j]  # <alpha_j, av>
                na = tuple(a[i] - pa * simples[j][i] for i in range(n))
                nav = tuple(av[i] - pav * cosimples[j][i] for i in range(n))
                if (na, nav) not in pairs:
                    pairs.add((na, nav))
                    changed = True
    roots, coroots = zip(*sorted(pairs))
    return list(roots), list(coroots)


def catalogue() -> dict[str, RootDatum]:
    """Built-in root data: A1..A4, B2, C2, D4, with identity theta, plus the
    diagram-automorphism variants."""
    out = {}
    for name, cartan in _CARTAN.items():
        roots, coroots = _generate_root_system(cartan)
        n = len(cartan)
        ident = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
        out[name] = RootDatum(n, tuple(roots), tuple(coroots), ident)
    for name, (base, perm) in _DIAGRAM.items():
        d = out[base]
        n = d.rank
        theta = tuple(tuple(int(perm[j] == i) for j in range(n)) for i in range(n))
        out[name] = RootDatum(n, d.roots, d.coroots, theta)
    return out


def datum_to_json(d: RootDatum) -> dict:
    return {
        "rank": d.rank,
        "roots": [list(r) for r in d.roots],
        "coroots": [list(r) for r in d.coroots],
        "theta": [list(r) for r in d.theta],
    }


def datum_from_json(obj) -> RootDatum:
    return RootDatum(
        int(obj["rank"]),
        tuple(tuple(int(x) for x in r) for r in obj["roots"]),
        tuple(tuple(int(x) for x in r) for r in obj["coroots"]),
        tuple(tuple(int(x) for x in r) for r in obj["theta"]),
    )

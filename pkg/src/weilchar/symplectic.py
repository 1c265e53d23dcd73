"""Finite symplectic spaces over F_p, the Heisenberg group, Sp elements,
maximal tori with their weights, and eigenvalue/conjugacy utilities.

Vectors are tuples over F_p, matrices numpy int arrays acting on column
vectors; Gram matrices are kept explicit (block constructions of the sign
machinery produce non-standard forms that must not be normalized away).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import ffield, modp
from .ffield import FieldDesc, FieldElem

SP_ENUM_CAP = 10_000  # largest |Sp(V)| exhaustive modes will enumerate


class SymplecticError(Exception):
    pass


class SpaceMismatch(SymplecticError):
    pass


class DegreeMismatch(SymplecticError):
    pass


class NotSemisimple(SymplecticError):
    pass


@dataclass(frozen=True)
class SympSpace:
    """Symplectic F_p-space with explicit Gram matrix and optional ordered
    orthogonal block structure (blocks = index tuples into the coordinates)."""

    p: int
    gram: tuple[tuple[int, ...], ...]
    blocks: tuple[tuple[int, ...], ...] | None = None

    def __post_init__(self):
        g = self.gram_mat
        if g.shape[0] != g.shape[1] or g.shape[0] % 2:
            raise SymplecticError("gram must be square of even size")
        if ((g + g.T) % self.p).any():
            raise SymplecticError("gram is not antisymmetric mod p")
        if modp.det(g, self.p) == 0:
            raise SymplecticError("gram is degenerate")
        if self.blocks is not None:
            flat = sorted(i for b in self.blocks for i in b)
            if flat != list(range(self.dim)):
                raise SymplecticError("blocks must partition the coordinates")
            for b1, b2 in itertools.combinations(self.blocks, 2):
                if (g[np.ix_(b1, b2)] % self.p).any():
                    raise SymplecticError("blocks are not gram-orthogonal")

    @property
    def dim(self) -> int:
        return len(self.gram)

    @property
    def gram_mat(self) -> np.ndarray:
        return np.asarray(self.gram, dtype=np.int64)

    def form(self, u, v) -> int:
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        return int(u @ self.gram_mat @ v % self.p)

    def vectors(self):
        for vv in itertools.product(range(self.p), repeat=self.dim):
            yield vv

    def sub_block(self, idx: tuple[int, ...]) -> "SympSpace":
        g = self.gram_mat[np.ix_(idx, idx)]
        return SympSpace(self.p, tuple(tuple(int(x) for x in row) for row in g))


def space_to_json(space: SympSpace) -> dict:
    return {
        "p": space.p,
        "dim": space.dim,
        "gram": [list(row) for row in space.gram],
        "blocks": None if space.blocks is None else [list(b) for b in space.blocks],
    }


def space_from_json(obj) -> SympSpace:
    blocks = obj.get("blocks")
    return SympSpace(
        int(obj["p"]),
        tuple(tuple(int(x) for x in row) for row in obj["gram"]),
        None if blocks is None else tuple(tuple(int(i) for i in b) for b in blocks),
    )


def mat_to_json(g: SpElem) -> list:
    """Row-major residue lists."""
    return [int(x) for row in g.mat for x in row]


def mat_from_json(space: SympSpace, flat) -> SpElem:
    n = space.dim
    rows = [flat[i * n : (i + 1) * n] for i in range(n)]
    return sp_elem(space, rows)


def standard_space(p: int, n: int) -> SympSpace:
    """Standard form: block anti-diagonal with J_n = antidiag(1,..,1)."""
    j = np.fliplr(np.eye(n, dtype=np.int64))
    g = np.block([[np.zeros((n, n), dtype=np.int64), j], [(-j) % p, np.zeros((n, n), dtype=np.int64)]])
    return SympSpace(p, tuple(tuple(int(x) for x in row) for row in g % p))


def direct_sum(spaces: list[SympSpace]) -> SympSpace:
    p = spaces[0].p
    if any(s.p != p for s in spaces):
        raise SpaceMismatch("mixed characteristics")
    dims = [s.dim for s in spaces]
    total = sum(dims)
    g = np.zeros((total, total), dtype=np.int64)
    blocks = []
    off = 0
    for s in spaces:
        g[off : off + s.dim, off : off + s.dim] = s.gram_mat
        blocks.append(tuple(range(off, off + s.dim)))
        off += s.dim
    return SympSpace(p, tuple(tuple(int(x) for x in row) for row in g), tuple(blocks))


@dataclass(frozen=True)
class HeisElem:
    """Element (v, z) of the Heisenberg group H(V) = V x F_p with
    (v1,z1)(v2,z2) = (v1+v2, z1+z2+<v1,v2>/2)."""

    space: SympSpace
    v: tuple[int, ...]
    z: int

    def __post_init__(self):
        object.__setattr__(self, "v", tuple(int(x) % self.space.p for x in self.v))
        object.__setattr__(self, "z", int(self.z) % self.space.p)

    def __mul__(self, other: "HeisElem") -> "HeisElem":
        return heis_mul(self, other)

    def inverse(self) -> "HeisElem":
        p = self.space.p
        return HeisElem(self.space, tuple(-x % p for x in self.v), -self.z % p)


def heis_identity(space: SympSpace) -> HeisElem:
    return HeisElem(space, (0,) * space.dim, 0)


def heis_mul(a: HeisElem, b: HeisElem) -> HeisElem:
    if a.space != b.space:
        raise SpaceMismatch("Heisenberg elements from different spaces")
    p = a.space.p
    half = pow(2, p - 2, p)  # 1/2 mod p
    z = (a.z + b.z + half * a.space.form(a.v, b.v)) % p
    return HeisElem(a.space, tuple((x + y) % p for x, y in zip(a.v, b.v)), z)


def heis_elements(space: SympSpace):
    for v in space.vectors():
        for z in range(space.p):
            yield HeisElem(space, v, z)


@dataclass(frozen=True)
class SpElem:
    """Form-preserving matrix: mat^T gram mat = gram."""

    space: SympSpace
    mat: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        m = self.mat_np
        g = self.space.gram_mat
        if ((m.T @ g @ m - g) % self.space.p).any():
            raise SymplecticError("matrix does not preserve the form")

    @property
    def mat_np(self) -> np.ndarray:
        return np.asarray(self.mat, dtype=np.int64)

    def __mul__(self, other: "SpElem") -> "SpElem":
        if self.space != other.space:
            raise SpaceMismatch("Sp elements from different spaces")
        return sp_elem(self.space, self.mat_np @ other.mat_np)

    def inverse(self) -> "SpElem":
        return sp_elem(self.space, modp.mat_inv(self.mat_np, self.space.p))

    def __pow__(self, k: int) -> "SpElem":
        return sp_elem(self.space, modp.mat_pow(self.mat_np, k, self.space.p))

    def apply(self, v) -> tuple[int, ...]:
        out = self.mat_np @ np.asarray(v, dtype=np.int64) % self.space.p
        return tuple(int(x) for x in out)

    def apply_heis(self, h: HeisElem) -> HeisElem:
        # the induced automorphism of H(V): (v, z) -> (gv, z)
        return HeisElem(h.space, self.apply(h.v), h.z)

    def order(self) -> int:
        n = self.space.dim
        ident = np.eye(n, dtype=np.int64)
        acc = self.mat_np.copy()
        for k in range(1, SP_ENUM_CAP * 4):
            if not ((acc - ident) % self.space.p).any():
                return k
            acc = acc @ self.mat_np % self.space.p
        raise SymplecticError("order exceeds bound")

    def is_semisimple(self) -> bool:
        # order coprime to p suffices for the groups considered here
        return self.order() % self.space.p != 0

    def fixed_space_dim(self) -> int:
        m = (self.mat_np - np.eye(self.space.dim, dtype=np.int64)) % self.space.p
        return len(modp.kernel_basis(m, self.space.p))


def sp_elem(space: SympSpace, mat) -> SpElem:
    m = np.asarray(mat, dtype=np.int64) % space.p
    return SpElem(space, tuple(tuple(int(x) for x in row) for row in m))


def sp_identity(space: SympSpace) -> SpElem:
    return sp_elem(space, np.eye(space.dim, dtype=np.int64))


# ---------------------------------------------------------------------------
# Hyperbolic bases / polarizations


def hyperbolic_basis(space: SympSpace) -> tuple[list[tuple[int, ...]], list[tuple[int, ...]]]:
    """Deterministic symplectic Gram-Schmidt: bases (e_i), (f_i) with
    <e_i, f_j> = delta_ij and both spans totally isotropic."""
    p = space.p
    n = space.dim // 2
    es: list[np.ndarray] = []
    fs: list[np.ndarray] = []

    def reduce_vec(v):
        v = v.copy() % p
        for e, f in zip(es, fs):
            v = (v - space.form(v, f) * np.asarray(e)) % p
            v = (v + space.form(v, e) * np.asarray(f)) % p
        return v % p

    basis_iter = (np.eye(space.dim, dtype=np.int64)[i] for i in range(space.dim))
    pool = list(basis_iter)
    while len(es) < n:
        e = None
        for cand in pool:
            r = reduce_vec(cand)
            if r.any():
                e = r
                break
        assert e is not None
        partner = None
        for cand in pool:
            r = reduce_vec(cand)
            w = space.form(e, r)
            if w:
                partner = (r * pow(w, p - 2, p)) % p
                break
        assert partner is not None
        es.append(tuple(int(x) for x in e))
        fs.append(tuple(int(x) for x in partner))
    return es, fs


def transport_to_standard(space: SympSpace) -> np.ndarray:
    """Matrix P with P^T J_std-ish ... maps space coordinates to standard
    coordinates: columns of P^{-1} are the hyperbolic basis.  For the standard
    space layout used by the Weil model, coordinate vector order is
    (e_1..e_n, f_1..f_n) with <e_i, f_j> = delta_ij."""
    es, fs = hyperbolic_basis(space)
    basis = np.array(es + fs, dtype=np.int64).T  # columns
    return modp.mat_inv(basis, space.p)


def standard_polarized_space(p: int, n: int) -> SympSpace:
    """The (e, f)-coordinate space with gram [[0, I],[-I, 0]]."""
    ident = np.eye(n, dtype=np.int64)
    zero = np.zeros((n, n), dtype=np.int64)
    g = np.block([[zero, ident], [(-ident) % p, zero]])
    return SympSpace(p, tuple(tuple(int(x) for x in row) for row in g))


# ---------------------------------------------------------------------------
# Field-element matrices (multiplication and Frobenius as F_p-linear maps)


def mult_matrix(x: FieldElem) -> np.ndarray:
    """Matrix of y -> x*y on x.parent in the polynomial basis (columns are
    images of t^i)."""
    k = x.parent.degree
    cols = []
    basis = x.parent.gen()
    cur = x.parent.one()
    for _ in range(k):
        cols.append((x * cur).coeffs)
        cur = cur * basis
    return np.array(cols, dtype=np.int64).T


def frobenius_matrix(desc: FieldDesc, j: int = 1) -> np.ndarray:
    """Matrix of y -> y^(p^j) on desc in the polynomial basis."""
    k = desc.degree
    cols = []
    basis = desc.gen()
    cur = desc.one()
    for _ in range(k):
        cols.append(cur.frobenius(j).coeffs)
        cur = cur * basis
    return np.array(cols, dtype=np.int64).T


def coords_to_elem(desc: FieldDesc, coords) -> FieldElem:
    return desc.element(tuple(int(c) for c in coords))


# ---------------------------------------------------------------------------
# Maximal tori (Lemma: norm-one and split factors)


@dataclass(frozen=True)
class NormOneFactor:
    """k_i over k_i deg-2 subextension: acts by multiplication on k_i with the
    form Tr(x tau(y) - tau(x) y); contributes q_i^o + 1 elements."""

    subdegree: int  # [k_i^o : F_p]


@dataclass(frozen=True)
class SplitFactor:
    """k_i^o acting as (x, y) -> (zx, z^{-1}y) on two copies; q_i^o - 1 elements."""

    subdegree: int


@dataclass(frozen=True)
class TorusDesc:
    p: int
    factors: tuple


@dataclass(frozen=True)
class TorusElement:
    torus: "BuiltTorus"
    coords: tuple[FieldElem, ...]
    elem: SpElem


@dataclass(frozen=True)
class BuiltTorus:
    desc: TorusDesc
    space: SympSpace
    offsets: tuple[int, ...]  # coordinate offset of each factor block

    @property
    def p(self) -> int:
        return self.desc.p

    def factor_field(self, i: int) -> FieldDesc:
        f = self.desc.factors[i]
        if isinstance(f, NormOneFactor):
            return ffield.field(self.p, 2 * f.subdegree)
        return ffield.field(self.p, f.subdegree)

    def factor_subfield(self, i: int) -> FieldDesc:
        return ffield.field(self.p, self.desc.factors[i].subdegree)

    def element(self, coords) -> TorusElement:
        coords = tuple(coords)
        blocks = []
        for i, f in enumerate(self.desc.factors):
            x = coords[i]
            if isinstance(f, NormOneFactor):
                big = self.factor_field(i)
                if x.parent != big or x * x.frobenius(f.subdegree) != 1:
                    raise SymplecticError("coordinate %d is not norm-one in %r" % (i, big))
                blocks.append(mult_matrix(x))
            else:
                sub = self.factor_field(i)
                if x.parent != sub or x.is_zero():
                    raise SymplecticError("coordinate %d is not a unit of %r" % (i, sub))
                m = mult_matrix(x)
                minv = mult_matrix(x.inverse())
                zero = np.zeros_like(m)
                blocks.append(np.block([[m, zero], [zero, minv]]))
        total = self.space.dim
        mat = np.zeros((total, total), dtype=np.int64)
        for off, b in zip(self.offsets, blocks):
            d = b.shape[0]
            mat[off : off + d, off : off + d] = b
        return TorusElement(self, coords, sp_elem(self.space, mat))

    def elements(self):
        pools = []
        for i, f in enumerate(self.desc.factors):
            if isinstance(f, NormOneFactor):
                pools.append(ffield.norm_one_group(self.factor_field(i), self.factor_subfield(i)))
            else:
                pools.append(list(self.factor_field(i).units()))
        for combo in itertools.product(*pools):
            yield self.element(combo)

    def order(self) -> int:
        out = 1
        for f in self.desc.factors:
            q = self.p**f.subdegree
            out *= (q + 1) if isinstance(f, NormOneFactor) else (q - 1)
        return out


def anti_invariant_unit(big: FieldDesc, subdeg: int) -> FieldElem:
    """Canonical unit C with C^(p^subdeg) = -C (first in element order)."""
    for x in big.units():
        if x.frobenius(subdeg) == -x:
            return x
    raise SymplecticError("no anti-invariant unit (unreachable for quadratic)")


def build_torus(desc: TorusDesc, space: SympSpace | None = None) -> BuiltTorus:
    """Embed the torus block-diagonally in its natural direct-sum space.

    Norm-one factor on k_i: gram of Tr(x tau(y) - tau(x) y); split factor on
    k_i^o + k_i^o: gram of Tr(x1 y2 - y1 x2).  If `space` is given it must
    equal the constructed direct sum (the embedding is canonical here; use
    conjugate_in_sp to move elements elsewhere)."""
    p = desc.p
    spaces = []
    for f in desc.factors:
        d = f.subdegree
        if isinstance(f, NormOneFactor):
            big = ffield.field(p, 2 * d)
            k = big.degree
            g = np.zeros((k, k), dtype=np.int64)
            basis = [big.gen() ** i for i in range(k)]
            f1 = ffield.field(p, 1)
            # form Tr(C x tau(y)) with tau(C) = -C: antisymmetric and
            # nondegenerate, preserved by norm-one multiplication
            c = anti_invariant_unit(big, d)
            for i in range(k):
                for j in range(k):
                    val = ffield.trace_to(c * basis[i] * basis[j].frobenius(d), f1)
                    g[i, j] = val.coeffs[0]
            spaces.append(SympSpace(p, tuple(tuple(int(x) for x in row) for row in g)))
        else:
            sub = ffield.field(p, d)
            f3 = ffield.field(p, 1)
            basis = [sub.gen() ** i for i in range(d)]
            tr = np.zeros((d, d), dtype=np.int64)
            for i in range(d):
                for j in range(d):
                    tr[i, j] = ffield.trace_to(basis[i] * basis[j], f3).coeffs[0]
            zero = np.zeros((d, d), dtype=np.int64)
            g = np.block([[zero, tr], [(-tr) % p, zero]])
            spaces.append(SympSpace(p, tuple(tuple(int(x) for x in row) for row in g)))
    total_space = direct_sum(spaces)
    n = total_space.dim // 2
    if sum(f.subdegree for f in desc.factors) != n:
        raise DegreeMismatch("factor degrees do not sum to n")
    if space is not None and space != total_space:
        raise DegreeMismatch("supplied space does not match the canonical torus space")
    offsets = tuple(b[0] for b in total_space.blocks)
    return BuiltTorus(desc, total_space, offsets)


# ---------------------------------------------------------------------------
# Weights of a torus


@dataclass(frozen=True)
class WeightOrbit:
    """A Gamma_{F_p}-orbit of weights of one torus factor.

    Represented by (factor index, sign); the orbit is {x -> sigma(x^sign)}.
    For a norm-one factor the sign is absorbed (tau acts as inversion), the
    orbit is symmetric of size 2d.  For a split factor sign=+1 and sign=-1
    are distinct asymmetric orbits of size d, swapped by negation."""

    factor: int
    sign: int
    size: int
    symmetric: bool

    def eval_at(self, t: TorusElement) -> FieldElem:
        x = t.coords[self.factor]
        return x if self.sign == 1 else x.inverse()


@dataclass(frozen=True)
class SigmaOrbit:
    """A Sigma_{F_p}-orbit: one symmetric Gamma-orbit or an asymmetric pair."""

    gamma_orbits: tuple[WeightOrbit, ...]
    symmetric: bool

    @property
    def size(self) -> int:
        return sum(o.size for o in self.gamma_orbits)


@dataclass(frozen=True)
class WeightOrbitData:
    torus: BuiltTorus
    gamma_orbits: tuple[WeightOrbit, ...]
    sigma_orbits: tuple[SigmaOrbit, ...]


def weights(torus: BuiltTorus) -> WeightOrbitData:
    gamma = []
    sigma = []
    for i, f in enumerate(torus.desc.factors):
        d = f.subdegree
        if isinstance(f, NormOneFactor):
            o = WeightOrbit(i, 1, 2 * d, True)
            gamma.append(o)
            sigma.append(SigmaOrbit((o,), True))
        else:
            plus = WeightOrbit(i, 1, d, False)
            minus = WeightOrbit(i, -1, d, False)
            gamma.extend([plus, minus])
            sigma.append(SigmaOrbit((plus, minus), False))
    return WeightOrbitData(torus, tuple(gamma), tuple(sigma))


def weight_charpoly_check(t: TorusElement) -> bool:
    """Char poly of the matrix equals the product over Gamma-orbits of the
    minimal polynomials of the weight values (exact, no closure needed)."""
    wd = weights(t.torus)
    p = t.torus.p
    acc = [1]
    for o in wd.gamma_orbits:
        val = o.eval_at(t)
        # mult-by-val on its field has char poly prod_{j < deg} (X - val^{p^j}),
        # exactly this orbit's weight values with multiplicity
        block = modp.charpoly(mult_matrix(val), p)
        acc = _poly_mul(acc, block, p)
    target = modp.charpoly(t.elem.mat_np, p)
    return acc == target


def _poly_mul(a, b, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            out[i + j] = (out[i + j] + ai * bj) % p
    return out


# ---------------------------------------------------------------------------
# Eigenvalues over the closure and conjugacy


def eigen_multiset(g: SpElem) -> list[FieldElem]:
    """Eigenvalues (with multiplicity) in the smallest splitting field of the
    characteristic polynomial, found by exhaustive root search."""
    p = g.space.p
    cp = modp.charpoly(g.mat_np, p)
    deg = len(cp) - 1
    for d in range(1, 13):
        try:
            desc = ffield.field(p, d)
        except ffield.FieldError:
            break
        roots = _poly_roots_in(cp, desc)
        if len(roots) == deg:
            return roots
    raise SymplecticError("splitting field exceeds the size cap")


def _poly_roots_in(cp: list[int], desc: FieldDesc) -> list[FieldElem]:
    """Roots with multiplicity of an F_p-coefficient polynomial in desc."""
    current = [desc.from_int(c) for c in cp]
    roots: list[FieldElem] = []
    for x in desc.elements():
        while len(current) > 1:
            acc = desc.zero()
            for c in reversed(current):
                acc = acc * x + c
            if not acc.is_zero():
                break
            current = _synth_div(current, x, desc)
            roots.append(x)
        if len(current) <= 1:
            break
    return sorted(roots, key=lambda r: r.index())


def _synth_div(coeffs: list[FieldElem], x: FieldElem, desc: FieldDesc) -> list[FieldElem]:
    """coeffs / (X - x), assuming exact division; low degree first."""
    n = len(coeffs) - 1
    out = [desc.zero()] * n
    carry = coeffs[n]
    for i in range(n - 1, -1, -1):
        out[i] = carry
        carry = coeffs[i] + carry * x
    assert carry.is_zero()
    return out


def eigen_multiset_key(vals: list[FieldElem]) -> tuple:
    return tuple(sorted(v.index() for v in vals))


@lru_cache(maxsize=None)
def sp_elements(space: SympSpace) -> tuple[SpElem, ...]:
    """All of Sp(V)(F_p) by closure from generators; refuses above the cap."""
    size = _sp_order(space.p, space.dim // 2)
    if size > SP_ENUM_CAP:
        raise SymplecticError("|Sp| = %d exceeds the enumeration cap %d" % (size, SP_ENUM_CAP))
    gens = sp_generators(space)
    seen = {sp_identity(space).mat}
    frontier = [sp_identity(space)]
    out = [sp_identity(space)]
    while frontier:
        nxt = []
        for g in frontier:
            for s in gens:
                h = g * s
                if h.mat not in seen:
                    seen.add(h.mat)
                    nxt.append(h)
                    out.append(h)
        frontier = nxt
    assert len(out) == size
    return tuple(out)


def _sp_order(p: int, n: int) -> int:
    out = p ** (n * n)
    for i in range(1, n + 1):
        out *= p ** (2 * i) - 1
    return out


def sp_generators(space: SympSpace) -> list[SpElem]:
    """Generators of Sp(V): in standard coordinates the Weyl rotation and the
    lower unipotents n_bar(B) for elementary symmetric B, transported back."""
    p = space.p
    n = space.dim // 2
    pmat = transport_to_standard(space)
    pinv = modp.mat_inv(pmat, p)
    gens_std = []
    ident = np.eye(n, dtype=np.int64)
    zero = np.zeros((n, n), dtype=np.int64)
    w = np.block([[zero, ident], [(-ident) % p, zero]])
    gens_std.append(w)
    for i in range(n):
        for j in range(i, n):
            b = np.zeros((n, n), dtype=np.int64)
            b[i, j] = 1
            b[j, i] = 1
            gens_std.append(np.block([[ident, zero], [b, ident]]))
    # a Levi generator keeps the closure shallow
    a = np.eye(n, dtype=np.int64)
    a[0, 0] = _primitive_root(p)
    ainv = modp.mat_inv(a, p)
    gens_std.append(np.block([[a, zero], [zero, ainv.T]]))
    return [sp_elem(space, pinv @ g @ pmat % p) for g in gens_std]


@lru_cache(maxsize=None)
def _primitive_root(p: int) -> int:
    f = ffield.field(p, 1)
    return f.multiplicative_generator().coeffs[0]


def conjugate_in_sp(g: SpElem, t: SpElem) -> SpElem | None:
    """A witness x with x t x^{-1} = g when the eigenvalue multisets agree,
    None otherwise; exhaustive within the enumeration cap."""
    if g.space != t.space:
        raise SpaceMismatch("elements from different spaces")
    if not g.is_semisimple() or not t.is_semisimple():
        raise NotSemisimple("conjugacy test requires semisimple elements")
    if eigen_multiset_key(eigen_multiset(g)) != eigen_multiset_key(eigen_multiset(t)):
        return None
    tm = t.mat_np
    gm = g.mat_np
    p = g.space.p
    for x in sp_elements(g.space):
        if not ((x.mat_np @ tm - gm @ x.mat_np) % p).any():
            return x
    return None

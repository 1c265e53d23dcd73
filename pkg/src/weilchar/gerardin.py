"""Closed-form character formulas for Weil representations of finite
symplectic groups, evaluated from torus/weight data or invariant subspaces.

All formulas return exact integers times p-powers (as floats/complex for
comparison against the matrix oracle); weight evaluations are compared to 1
exactly in the field, never numerically.
"""

from __future__ import annotations

import itertools

import numpy as np

from . import ffield, modp, symplectic as sym, weil
from .symplectic import SpElem, SympSpace, TorusElement, WeightOrbitData


class GerardinError(Exception):
    pass


class ElementNotInTorus(GerardinError):
    pass


class HasFixedPoint(GerardinError):
    pass


class NotIsotropic(GerardinError):
    pass


class LineNotFixed(GerardinError):
    pass


class NotInvariantPolarization(GerardinError):
    pass


# ---------------------------------------------------------------------------
# Semisimple formula from weight data


def char_semisimple(t: TorusElement, wd: WeightOrbitData) -> complex:
    """(-1)^{#orbits with eps(t) != 1} * p^{dim V^t / 2} * prod of quadratic
    characters over the Sigma-orbits of weights."""
    if not isinstance(t, TorusElement) or t.torus != wd.torus:
        raise ElementNotInTorus("element does not belong to the weight data's torus")
    p = wd.torus.p

    l_count = 0
    ones = 0
    for o in wd.gamma_orbits:
        val = o.eval_at(t)
        if val == 1:
            ones += o.size
        else:
            l_count += 1

    fixed_dim = t.elem.fixed_space_dim()
    if fixed_dim != ones:
        raise GerardinError("weight multiplicities disagree with the fixed space")
    if fixed_dim % 2:
        raise GerardinError("odd-dimensional fixed space (impossible for tori)")

    chi = 1
    for so in wd.sigma_orbits:
        rep = so.gamma_orbits[0]
        val = rep.eval_at(t)
        if so.symmetric:
            # val is norm-one in a quadratic extension; chi = sgn of k^1
            sub = ffield.field(p, val.parent.degree // 2)
            chi *= ffield.sgn_norm_one(val, sub)
        else:
            chi *= ffield.sgn_mult(val)

    return (-1) ** l_count * float(p) ** (fixed_dim // 2) * chi


# ---------------------------------------------------------------------------
# Subspace helpers (bases are lists of coordinate tuples)


def _basis_mat(basis) -> np.ndarray:
    return np.array(basis, dtype=np.int64)


def perp_basis(space: SympSpace, basis) -> list[tuple[int, ...]]:
    """Basis of {v : <b, v> = 0 for all b in basis}."""
    if not basis:
        return [tuple(int(x) for x in row) for row in np.eye(space.dim, dtype=np.int64)]
    m = _basis_mat(basis) @ space.gram_mat % space.p
    return [tuple(int(x) for x in v) for v in modp.kernel_basis(m, space.p)]


def restrict_map(g: SpElem, basis) -> np.ndarray:
    """Matrix of g on span(basis) in basis coordinates (must be invariant)."""
    p = g.space.p
    b = _basis_mat(basis).T  # columns
    cols = []
    for v in basis:
        img = np.array(g.apply(v), dtype=np.int64)
        sol = modp.solve(b, img, p)
        if sol is None:
            raise GerardinError("subspace is not invariant under the element")
        cols.append(sol)
    return np.array(cols, dtype=np.int64).T % p


def is_isotropic(space: SympSpace, basis) -> bool:
    return all(space.form(u, v) == 0 for u, v in itertools.combinations_with_replacement(basis, 2))


def subspace_gram(space: SympSpace, basis) -> np.ndarray:
    b = _basis_mat(basis)
    return b @ space.gram_mat @ b.T % space.p


def in_span(basis, v, p: int) -> bool:
    if not basis:
        return not any(int(x) % p for x in v)
    return modp.solve(_basis_mat(basis).T, np.array(v, dtype=np.int64), p) is not None


def complement_in(big_basis, small_basis, p: int) -> list[tuple[int, ...]]:
    """Extend small_basis to big_basis's span; returns the added vectors."""
    cur = list(small_basis)
    out = []
    for v in big_basis:
        if not in_span(cur, v, p):
            cur.append(tuple(int(x) for x in v))
            out.append(tuple(int(x) % p for x in v))
    return out


def _sgn_p(x: int, p: int) -> int:
    x %= p
    if x == 0:
        raise GerardinError("sgn of zero")
    return 1 if pow(x, (p - 1) // 2, p) == 1 else -1


# ---------------------------------------------------------------------------
# Fixed-point-free formula


def char_no_fixed_point(g: SpElem, vprime) -> int:
    """sgn((-1)^{dim V0/2} det(g|V') det(g-1|V0)) for V0 = V'^perp/V', where
    V' is a maximal g-invariant totally isotropic subspace and V^g = 0."""
    space = g.space
    p = space.p
    if g.fixed_space_dim() != 0:
        raise HasFixedPoint("element has nonzero fixed points")
    vprime = [tuple(int(x) % p for x in v) for v in vprime]
    if not is_isotropic(space, vprime):
        raise NotIsotropic("V' is not totally isotropic")
    det_vp = 1
    if vprime:
        det_vp = modp.det(restrict_map(g, vprime), p)  # raises if not invariant
    # V0 = V'^perp / V': compute a complement basis of V' inside V'^perp
    perp = perp_basis(space, vprime)
    v0 = complement_in(perp, vprime, p)
    # quotient action: reduce images modulo V'
    full = vprime + v0
    gq = restrict_map(g, full)  # block upper-triangular w.r.t. (V', V0)
    k = len(vprime)
    g_v0 = gq[k:, k:] % p
    # maximality: g on V0 must have no eigenvalue in F_p
    if len(v0):
        cp = modp.charpoly(g_v0, p)
        for lam in range(p):
            if _poly_eval(cp, lam, p) == 0:
                raise NotIsotropic("V' is not maximal (V0 has an eigenline)")
    det_v0_shift = modp.det((g_v0 - np.eye(len(v0), dtype=np.int64)) % p, p) if len(v0) else 1
    sign_arg = pow(p - 1, (len(v0) // 2) % 2, p) * det_vp * det_v0_shift % p
    return _sgn_p(sign_arg, p)


def _poly_eval(coeffs, x, p):
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % p
    return acc


# ---------------------------------------------------------------------------
# Fixed-line recursion


def char_fixed_line(g: SpElem, line, v0_basis) -> complex:
    """Theta_{omega_{V0}}(g|V0) * sum over V0^perp/L of theta(<gv, v>), for a
    pointwise-fixed line L and a g-invariant complement V0 of L in L^perp."""
    space = g.space
    p = space.p
    line = tuple(int(x) % p for x in line)
    if g.apply(line) != line or not any(line):
        raise LineNotFixed("the line is not fixed pointwise")
    v0_basis = [tuple(int(x) % p for x in v) for v in v0_basis]
    lperp = perp_basis(space, [line])
    if len(v0_basis) != len(lperp) - 1 or any(not in_span(lperp, v, p) for v in v0_basis):
        raise GerardinError("V0 is not a complement of L in L^perp")
    if in_span(v0_basis, line, p):
        raise GerardinError("V0 contains L")
    g_v0 = restrict_map(g, v0_basis)  # raises if not invariant

    # Gauss factor: sum over V0^perp / L
    v0perp = perp_basis(space, v0_basis)
    reps = complement_in(v0perp, [line], p)
    total = 0j
    for coeffs in itertools.product(range(p), repeat=len(reps)):
        v = np.zeros(space.dim, dtype=np.int64)
        for c, b in zip(coeffs, reps):
            v = (v + c * np.array(b, dtype=np.int64)) % p
        total += weil.theta_char(p, space.form(g.apply(v), v))

    if not v0_basis:
        return total
    sub = SympSpace(p, tuple(tuple(int(x) for x in row) for row in subspace_gram(space, v0_basis)))
    return weil_char(sym.sp_elem(sub, g_v0)) * total


def weil_char(g: SpElem) -> complex:
    """Recursive formula-side evaluation of the Weil character of a
    semisimple element: peel fixed lines via the fixed-line formula, finish
    with the fixed-point-free formula."""
    space = g.space
    p = space.p
    if space.dim == 0:
        return 1.0
    if not g.is_semisimple():
        raise GerardinError("recursive evaluation requires a semisimple element")
    fixed = modp.kernel_basis((g.mat_np - np.eye(space.dim, dtype=np.int64)) % p, p)
    if fixed:
        line = tuple(int(x) for x in fixed[0])
        v0 = invariant_complement_in_perp(g, line)
        return char_fixed_line(g, line, v0)
    vprime = maximal_invariant_isotropic(g)
    return float(char_no_fixed_point(g, vprime))


def invariant_complement_in_perp(g: SpElem, line) -> list[tuple[int, ...]]:
    """A g-invariant V0 with L^perp = L + V0 (g semisimple): the (g-1)-image
    of L^perp plus a complement of L inside the fixed part of L^perp."""
    space = g.space
    p = space.p
    lperp = perp_basis(space, [line])
    glp = restrict_map(g, lperp)
    k = len(lperp)
    ident = np.eye(k, dtype=np.int64)
    img = [(np.array(lperp, dtype=np.int64).T @ col) % p for col in ((glp - ident) % p).T]
    img_basis = _independent(img, p)
    fixed_cols = modp.kernel_basis((glp - ident) % p, p)
    fixed = [tuple(int(x) for x in (np.array(lperp, dtype=np.int64).T @ c) % p) for c in fixed_cols]
    fixed_rest = complement_in(fixed, [line], p)
    return [tuple(int(x) for x in v) for v in img_basis] + fixed_rest


def _independent(vectors, p: int) -> list[np.ndarray]:
    out = []
    for v in vectors:
        if not in_span(out, v, p):
            out.append(tuple(int(x) % p for x in v))
    return out


def maximal_invariant_isotropic(g: SpElem) -> list[tuple[int, ...]]:
    """Greedy maximal g-invariant totally isotropic subspace for fixed-point-
    free semisimple g: lift eigenlines of the successive V0 = V'^perp/V'."""
    space = g.space
    p = space.p
    vprime: list[tuple[int, ...]] = []
    while True:
        perp = perp_basis(space, vprime)
        v0 = complement_in(perp, vprime, p)
        if not v0:
            return vprime
        full = vprime + v0
        gq = restrict_map(g, full)
        k = len(vprime)
        g_v0 = gq[k:, k:] % p
        eig = None
        for lam in range(p):
            m = (g_v0 - lam * np.eye(len(v0), dtype=np.int64)) % p
            ker = modp.kernel_basis(m, p)
            if ker:
                eig = ker[0]
                break
        if eig is None:
            return vprime
        lift = np.zeros(space.dim, dtype=np.int64)
        for c, b in zip(eig, v0):
            lift = (lift + int(c) * np.array(b, dtype=np.int64)) % p
        # eigenline mod V' need not be an eigenline on the nose; make it one
        # by projecting to the g-eigenspace (semisimple: eigenspace splitting)
        lam_val = lam
        cand = _project_to_eigenspace(g, lift, lam_val)
        vprime.append(tuple(int(x) for x in cand))


def _project_to_eigenspace(g: SpElem, v: np.ndarray, lam: int) -> np.ndarray:
    """Component of v in ker(g - lam) under the semisimple splitting."""
    p = g.space.p
    n = g.space.dim
    cp = modp.charpoly(g.mat_np, p)
    # q(X) = charpoly / (X - lam)^mult; the eigenprojection is q(g) scaled
    mult = 0
    cur = cp
    while len(cur) > 1 and _poly_eval(cur, lam, p) == 0:
        cur = _deflate(cur, lam, p)
        mult += 1
    qg = _poly_apply(cur, g.mat_np, p)
    out = qg @ (v % p) % p
    # normalize: on ker(g - lam), q(g) acts by q(lam) != 0
    scale = pow(_poly_eval(cur, lam, p), p - 2, p)
    out = out * scale % p
    if not out.any() or ((g.mat_np @ out - lam * out) % p).any():
        raise GerardinError("eigenprojection failed (element not semisimple?)")
    return out


def _deflate(coeffs, lam, p):
    n = len(coeffs) - 1
    out = [0] * n
    carry = coeffs[n]
    for i in range(n - 1, -1, -1):
        out[i] = carry
        carry = (coeffs[i] + carry * lam) % p
    assert carry % p == 0
    return out


def _poly_apply(coeffs, m, p):
    n = m.shape[0]
    acc = np.zeros((n, n), dtype=np.int64)
    for c in reversed(coeffs):
        acc = (acc @ m + c * np.eye(n, dtype=np.int64)) % p
    return acc


# ---------------------------------------------------------------------------
# Polarization corollary


def char_polarized(g: SpElem, polarization) -> complex:
    """sgn(det(g|V+)) * |V^g|^{1/2} for semisimple g preserving a polarization."""
    space = g.space
    p = space.p
    vplus, vminus = polarization
    vplus = [tuple(int(x) % p for x in v) for v in vplus]
    vminus = [tuple(int(x) % p for x in v) for v in vminus]
    n = space.dim // 2
    if len(vplus) != n or len(vminus) != n:
        raise NotInvariantPolarization("polarization sides must have dimension n")
    if not is_isotropic(space, vplus) or not is_isotropic(space, vminus):
        raise NotInvariantPolarization("polarization sides must be Lagrangian")
    if modp.rank(np.array(vplus + vminus, dtype=np.int64), p) != 2 * n:
        raise NotInvariantPolarization("sides do not span")
    if not g.is_semisimple():
        raise sym.NotSemisimple("polarized formula requires a semisimple element")
    try:
        gp = restrict_map(g, vplus)
        restrict_map(g, vminus)
    except GerardinError as exc:
        raise NotInvariantPolarization(str(exc)) from exc
    fixed = g.fixed_space_dim()
    assert fixed % 2 == 0
    return _sgn_p(modp.det(gp, p), p) * float(p) ** (fixed // 2)


def invariant_polarizations(g: SpElem):
    """All g-invariant polarizations (V+, V-) of a small space, brute force."""
    space = g.space
    p = space.p
    n = space.dim // 2
    lagr = []
    for basis in _all_subspaces(space, n):
        if is_isotropic(space, basis):
            try:
                restrict_map(g, basis)
            except GerardinError:
                continue
            lagr.append(basis)
    for vp, vm in itertools.combinations(lagr, 2):
        if modp.rank(np.array(vp + vm, dtype=np.int64), p) == 2 * n:
            yield vp, vm
            yield vm, vp


def _all_subspaces(space: SympSpace, dim: int):
    """All dim-dimensional subspaces (as canonical RREF bases); small spaces."""
    p = space.p
    seen = set()
    vecs = [v for v in space.vectors() if any(v)]
    for combo in itertools.combinations(vecs, dim):
        m, piv = modp.rref(np.array(combo, dtype=np.int64), p)
        if len(piv) != dim:
            continue
        key = tuple(tuple(int(x) for x in row) for row in m[:dim])
        if key not in seen:
            seen.add(key)
            yield [tuple(int(x) for x in row) for row in m[:dim]]

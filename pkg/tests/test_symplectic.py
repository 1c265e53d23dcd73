import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from weilchar import ffield as ff, modp, symplectic as sym


V3 = sym.standard_space(3, 1)


def test_space_validation():
    with pytest.raises(sym.SymplecticError):
        sym.SympSpace(3, ((0, 1), (1, 0)))  # symmetric, not antisymmetric
    with pytest.raises(sym.SymplecticError):
        sym.SympSpace(3, ((0, 0), (0, 0)))  # degenerate
    with pytest.raises(sym.SymplecticError):
        sym.SympSpace(3, ((0, 1, 0), (2, 0, 0), (0, 0, 0)))  # odd size


def test_heis_examples():
    e = sym.heis_identity(V3)
    h = sym.HeisElem(V3, (1, 2), 1)
    assert sym.heis_mul(e, h) == h
    # (e1,0)(e2,0) = (e1+e2, 2): 1/2 = 2 mod 3
    a, b = sym.HeisElem(V3, (1, 0), 0), sym.HeisElem(V3, (0, 1), 0)
    assert sym.heis_mul(a, b) == sym.HeisElem(V3, (1, 1), 2)
    # commutator has v-part 0 and z-part <v1, v2>
    comm = sym.heis_mul(sym.heis_mul(a, b), sym.heis_mul(a.inverse(), b.inverse()))
    assert comm == sym.HeisElem(V3, (0, 0), V3.form((1, 0), (0, 1)))
    with pytest.raises(sym.SpaceMismatch):
        sym.heis_mul(a, sym.HeisElem(sym.standard_space(5, 1), (1, 0), 0))


@given(st.integers(0, 242), st.integers(0, 242), st.integers(0, 242))
@settings(max_examples=50, deadline=None)
def test_heis_associativity_sampled(i, j, k):
    space = sym.standard_space(3, 2)

    def elem(n):
        v = []
        for _ in range(4):
            v.append(n % 3)
            n //= 3
        return sym.HeisElem(space, tuple(v), n % 3)

    a, b, c = elem(i), elem(j), elem(k)
    assert sym.heis_mul(sym.heis_mul(a, b), c) == sym.heis_mul(a, sym.heis_mul(b, c))


def test_sp_elem_validation():
    with pytest.raises(sym.SymplecticError):
        sym.sp_elem(V3, [[1, 1], [1, 1]])
    g = sym.sp_elem(V3, [[2, 0], [0, 2]])
    assert g.order() == 2
    assert g.is_semisimple()


def test_build_torus_examples():
    split = sym.build_torus(sym.TorusDesc(3, (sym.SplitFactor(1),)))
    els = list(split.elements())
    assert len(els) == 2
    assert {e.elem.mat for e in els} == {((1, 0), (0, 1)), ((2, 0), (0, 2))}
    normone = sym.build_torus(sym.TorusDesc(3, (sym.NormOneFactor(1),)))
    els2 = list(normone.elements())
    assert len(els2) == 4
    assert sorted(e.elem.order() for e in els2) == [1, 2, 4, 4]
    mixed = sym.build_torus(sym.TorusDesc(3, (sym.NormOneFactor(1), sym.SplitFactor(1))))
    assert mixed.order() == 8
    assert len(list(mixed.elements())) == 8
    with pytest.raises(sym.DegreeMismatch):
        sym.build_torus(sym.TorusDesc(3, (sym.SplitFactor(1),)), sym.standard_space(3, 2))


def test_weights_examples():
    split = sym.build_torus(sym.TorusDesc(5, (sym.SplitFactor(1),)))
    wd = sym.weights(split)
    assert len(wd.gamma_orbits) == 2
    assert all(not o.symmetric for o in wd.gamma_orbits)
    assert len(wd.sigma_orbits) == 1 and not wd.sigma_orbits[0].symmetric
    normone = sym.build_torus(sym.TorusDesc(3, (sym.NormOneFactor(1),)))
    wd2 = sym.weights(normone)
    assert len(wd2.gamma_orbits) == 1 and wd2.gamma_orbits[0].symmetric
    # no identity weight: every weight evaluates nontrivially somewhere
    for o in wd2.gamma_orbits + wd.gamma_orbits:
        torus = normone if o.symmetric else split
        assert any(o.eval_at(t) != 1 for t in torus.elements())


def test_eigen_examples():
    v5 = sym.standard_polarized_space(5, 1)
    ident = sym.sp_identity(v5)
    assert [e.index() for e in sym.eigen_multiset(ident)] == [1, 1]
    g = sym.sp_elem(v5, [[2, 0], [0, 3]])
    assert sorted(e.index() for e in sym.eigen_multiset(g)) == [2, 3]
    # semisimple elements in Sp: multiset closed under inversion
    for h in list(sym.sp_elements(v5))[:40]:
        if h.is_semisimple():
            vals = sym.eigen_multiset(h)
            inv = sorted(v.inverse().index() for v in vals)
            assert sorted(v.index() for v in vals) == inv


def test_eigen_s_th_root_lemma_charpoly():
    # char poly of D . phi^r is prod_i (X^s - a_i a_{i+r} ... ), exact over Z
    rng = np.random.default_rng(5)
    for n, r in ((4, 2), (6, 2), (6, 3), (8, 4), (8, 2)):
        s = n // r
        a = [int(x) for x in rng.integers(-4, 5, size=n)]
        phi = np.zeros((n, n), dtype=np.int64)
        for i in range(n):
            phi[(i + 1) % n, i] = 1
        m = np.diag(a) @ np.linalg.matrix_power(phi, r)
        cp = modp.charpoly_int(m.astype(object))
        want = [1]
        for i in range(r):
            prod = 1
            for j in range(s):
                prod *= a[(i + j * r) % n]
            factor = [-prod] + [0] * (s - 1) + [1]
            new = [0] * (len(want) + s)
            for ii, x in enumerate(want):
                for jj, y in enumerate(factor):
                    new[ii + jj] += x * y
            want = new
        assert cp == want


def test_conjugacy_examples():
    v5 = sym.standard_polarized_space(5, 1)
    g = sym.sp_elem(v5, [[2, 0], [0, 3]])
    # g = t: some witness exists (identity works)
    w = sym.conjugate_in_sp(g, g)
    assert w is not None
    swapped = sym.sp_elem(v5, [[3, 0], [0, 2]])
    w2 = sym.conjugate_in_sp(g, swapped)
    assert w2 is not None and (w2 * swapped * w2.inverse()).mat == g.mat
    other = sym.sp_elem(v5, [[1, 0], [0, 1]])
    assert sym.conjugate_in_sp(g, other) is None
    unipotent = sym.sp_elem(v5, [[1, 1], [0, 1]])
    with pytest.raises(sym.NotSemisimple):
        sym.conjugate_in_sp(g, unipotent)


def test_sp_enumeration_cap():
    assert len(sym.sp_elements(sym.standard_polarized_space(3, 1))) == 24
    with pytest.raises(sym.SymplecticError):
        sym.sp_elements(sym.standard_polarized_space(3, 2))  # |Sp_4(F_3)| = 51840


def test_hyperbolic_basis_on_funny_forms():
    f9 = ff.field(3, 2)
    c = sym.anti_invariant_unit(f9, 1)
    f1 = ff.field(3, 1)
    basis = [f9.one(), f9.gen()]
    gram = [[ff.trace_to(c * x * y.frobenius(1), f1).coeffs[0] for y in basis] for x in basis]
    space = sym.SympSpace(3, tuple(tuple(r) for r in gram))
    es, fs = sym.hyperbolic_basis(space)
    assert space.form(es[0], fs[0]) == 1
    assert space.form(es[0], es[0]) == 0


def test_space_and_matrix_serialization():
    space = sym.standard_space(3, 1)
    doc = sym.space_to_json(space)
    assert doc == {"p": 3, "dim": 2, "gram": [[0, 1], [2, 0]], "blocks": None}
    assert sym.space_from_json(doc) == space
    g = sym.sp_elem(space, [[2, 0], [0, 2]])
    flat = sym.mat_to_json(g)
    assert flat == [2, 0, 0, 2]
    assert sym.mat_from_json(space, flat).mat == g.mat
    summed = sym.direct_sum([space, space])
    doc2 = sym.space_to_json(summed)
    assert sym.space_from_json(doc2) == summed

import numpy as np
import pytest

from weilchar import ffield as ff, gerardin as ger, symplectic as sym, weil


@pytest.fixture(scope="module")
def oracle5():
    m = weil.WeilModel(sym.standard_polarized_space(5, 1))
    m.build_group_model()
    return m


def test_char_semisimple_identity_is_p_to_n():
    torus = sym.build_torus(sym.TorusDesc(5, (sym.SplitFactor(1),)))
    wd = sym.weights(torus)
    one = torus.element((ff.field(5, 1).one(),))
    assert ger.char_semisimple(one, wd) == 5.0


def test_char_semisimple_vs_oracle_examples(oracle5):
    # diag(2,3) in Sp_2(F_5)
    torus = sym.build_torus(sym.TorusDesc(5, (sym.SplitFactor(1),)))
    wd = sym.weights(torus)
    t = torus.element((ff.field(5, 1).from_int(2),))
    assert t.elem.mat == ((2, 0), (0, 3))
    oracle = weil.WeilModel(torus.space).trace_omega(t.elem)
    assert abs(ger.char_semisimple(t, wd) - oracle) < 1e-8
    # order-4 element of the norm-one torus of Sp_2(F_3)
    torus3 = sym.build_torus(sym.TorusDesc(3, (sym.NormOneFactor(1),)))
    wd3 = sym.weights(torus3)
    model3 = weil.WeilModel(torus3.space)
    for t in torus3.elements():
        if t.elem.order() == 4:
            assert abs(ger.char_semisimple(t, wd3) - model3.trace_omega(t.elem)) < 1e-8


def test_char_semisimple_rejects_foreign_elements():
    torus = sym.build_torus(sym.TorusDesc(5, (sym.SplitFactor(1),)))
    other = sym.build_torus(sym.TorusDesc(5, (sym.NormOneFactor(1),)))
    wd = sym.weights(torus)
    t = next(iter(other.elements()))
    with pytest.raises(ger.ElementNotInTorus):
        ger.char_semisimple(t, wd)


def test_no_fixed_point_examples(oracle5):
    space = oracle5.space
    minus = sym.sp_elem(space, [[4, 0], [0, 4]])
    vals = set()
    for vp in ger._all_subspaces(space, 1):
        try:
            vals.add(ger.char_no_fixed_point(minus, vp))
        except ger.GerardinError:
            continue
    assert vals == {int(round(oracle5.trace_omega(minus).real))}
    # diag(a, a^{-1}) with the a-eigenline: V0 = 0, value sgn(a)
    g = sym.sp_elem(space, [[2, 0], [0, 3]])
    val = ger.char_no_fixed_point(g, [(1, 0)])
    assert val == -1  # sgn_5(2) = -1
    assert abs(val - oracle5.trace_omega(g)) < 1e-9
    with pytest.raises(ger.HasFixedPoint):
        ger.char_no_fixed_point(sym.sp_identity(space), [(1, 0)])
    with pytest.raises(ger.NotIsotropic):
        # a non-maximal V' (the zero space) while g has eigenlines
        ger.char_no_fixed_point(g, [])


def test_fixed_line_examples():
    # g = 1: recursion yields p^n
    for p in (3, 5):
        space = sym.standard_polarized_space(p, 1)
        assert abs(ger.weil_char(sym.sp_identity(space)) - p) < 1e-9
    # the Gauss-sum factor collapses to p when g fixes V0^perp/L pointwise
    p = 3
    v2 = sym.standard_polarized_space(p, 1)
    vsum = sym.direct_sum([v2, v2])
    g1 = sym.sp_elem(v2, [[0, 1], [2, 0]])  # order-4 Weyl element, no fixed points
    big = np.zeros((4, 4), dtype=np.int64)
    big[:2, :2] = g1.mat_np
    big[2:, 2:] = np.eye(2, dtype=np.int64)
    gbig = sym.sp_elem(vsum, big)
    line = (0, 0, 1, 0)
    v0 = [(1, 0, 0, 0), (0, 1, 0, 0)]
    val = ger.char_fixed_line(gbig, line, v0)
    m2 = weil.WeilModel(v2)
    m2.build_group_model()
    want = m2.trace_omega(g1) * p
    assert abs(val - want) < 1e-8
    with pytest.raises(ger.LineNotFixed):
        ger.char_fixed_line(gbig, (1, 0, 0, 0), v0)


def test_polarized_examples(oracle5):
    space = oracle5.space
    ident = sym.sp_identity(space)
    assert abs(ger.char_polarized(ident, ([(1, 0)], [(0, 1)])) - 5) < 1e-12
    g = sym.sp_elem(space, [[2, 0], [0, 3]])
    assert ger.char_polarized(g, ([(1, 0)], [(0, 1)])) == -1  # sgn(2) = -1
    # block diag(a, 1, a^{-1}, 1) in Sp_4(F_5): sgn(a) * p
    v2 = sym.standard_polarized_space(5, 1)
    vsum = sym.direct_sum([v2, v2])
    big = np.zeros((4, 4), dtype=np.int64)
    big[:2, :2] = g.mat_np
    big[2:, 2:] = np.eye(2, dtype=np.int64)
    gbig = sym.sp_elem(vsum, big)
    vplus = [(1, 0, 0, 0), (0, 0, 1, 0)]
    vminus = [(0, 1, 0, 0), (0, 0, 0, 1)]
    val = ger.char_polarized(gbig, (vplus, vminus))
    assert val == -1 * 5  # sgn(2) * p
    m2 = weil.WeilModel(v2)
    m2.build_group_model()
    oracle = np.trace(m2.omega(g)) * np.trace(m2.omega(sym.sp_identity(v2)))
    assert abs(val - oracle) < 1e-8
    with pytest.raises(ger.NotInvariantPolarization):
        ger.char_polarized(sym.sp_elem(space, [[0, 1], [4, 0]]), ([(1, 0)], [(0, 1)]))


def test_polarized_agrees_with_semisimple():
    # wherever both formulas apply they agree
    for p in (3, 5):
        torus = sym.build_torus(sym.TorusDesc(p, (sym.SplitFactor(1),)))
        wd = sym.weights(torus)
        for t in torus.elements():
            pols = list(ger.invariant_polarizations(t.elem))
            if not pols:
                continue
            a = ger.char_semisimple(t, wd)
            b = ger.char_polarized(t.elem, pols[0])
            assert abs(a - b) < 1e-9

import cmath

import numpy as np
import pytest

from weilchar import symplectic as sym, weil


@pytest.fixture(scope="module")
def model5():
    m = weil.WeilModel(sym.standard_polarized_space(5, 1))
    m.build_group_model()
    return m


def test_dimension_and_central_character():
    for p, n in ((3, 1), (5, 1), (3, 2)):
        m = weil.WeilModel(sym.standard_polarized_space(p, n))
        assert m.dim == p**n
        z = m.rho(sym.HeisElem(m.space, (0,) * 2 * n, 1))
        assert np.abs(z - weil.theta_char(p, 1) * np.eye(p**n)).max() < 1e-12


def test_rho_character_shape():
    # trace rho(v, z) = 0 for v != 0 and theta(z) p^n at v = 0
    m = weil.WeilModel(sym.standard_polarized_space(3, 1))
    for h in sym.heis_elements(m.space):
        tr = np.trace(m.rho(h))
        if any(h.v):
            assert abs(tr) < 1e-12
        else:
            assert abs(tr - weil.theta_char(3, h.z) * 3) < 1e-12


def test_rho_irreducible():
    m = weil.WeilModel(sym.standard_polarized_space(3, 1))
    total = sum(abs(np.trace(m.rho(h))) ** 2 for h in sym.heis_elements(m.space))
    assert abs(total - 27) < 1e-9


def test_polarization_validation():
    space = sym.standard_polarized_space(3, 1)
    with pytest.raises(weil.NotAPolarization):
        weil.WeilModel(space, ([(1, 0)], [(2, 0)]))  # not complementary
    m = weil.WeilModel(space, ([(0, 1)], [(1, 0)]))  # swapped Lagrangians: fine
    h = sym.HeisElem(space, (1, 2), 0)
    g = sym.sp_elements(space)[5]
    og = m.omega(g)
    assert np.abs(og @ m.rho(h) @ np.linalg.inv(og) - m.rho(g.apply_heis(h))).max() < 1e-9


def test_weil_operator_examples(model5):
    space = model5.space
    assert np.abs(model5.omega(sym.sp_identity(space)) - np.eye(5)).max() < 1e-12
    # trace of omega(diag(a, a^{-1})) = sgn(a) for a != +-1
    for a, sgn in ((2, -1), (3, -1)):
        g = sym.sp_elem(space, [[a, 0], [0, pow(a, 3, 5)]])
        assert abs(model5.trace_omega(g) - sgn) < 1e-9


def test_weil_operator_multiplicative_all_pairs(model5):
    els = sym.sp_elements(model5.space)
    ops = np.stack([model5.omega_group(g) for g in els])
    idx = {g.mat: i for i, g in enumerate(els)}
    worst = 0.0
    for i, g in enumerate(els):
        rhs = ops[np.array([idx[(g * h).mat] for h in els])]
        worst = max(worst, float(np.abs(ops[i] @ ops - rhs).max()))
    assert worst < 1e-8


def test_schur_intertwiner_examples(model5):
    space = model5.space
    t = weil.schur_intertwiner(model5, model5, sym.sp_identity(space), seed=3)
    # Schur: self-intertwiner is scalar
    assert np.abs(t - t[0, 0] * np.eye(5)).max() < 1e-9
    # two seeds give proportional intertwiners
    m2 = weil.WeilModel(space, ([(0, 1)], [(1, 0)]))
    t1 = weil.schur_intertwiner(model5, m2, sym.sp_identity(space), seed=0)
    t2 = weil.schur_intertwiner(model5, m2, sym.sp_identity(space), seed=99)
    ratio = t2 @ np.linalg.inv(t1)
    assert np.abs(ratio - ratio[0, 0] * np.eye(5)).max() < 1e-9
    # T conjugates the Weil operators with trivial character for p >= 5
    m2.build_group_model()
    for g in sym.sp_elements(space):
        lhs = t1 @ model5.omega(g) @ np.linalg.inv(t1)
        assert np.abs(lhs - m2.omega(g)).max() < 1e-8


def test_cyclic_tensor_trace_examples():
    rng = np.random.default_rng(0)
    single = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    big, comp = weil.cyclic_tensor_trace([single])
    assert abs(big - np.trace(single)) < 1e-12 and abs(comp - np.trace(single)) < 1e-12
    big2, comp2 = weil.cyclic_tensor_trace([np.eye(2), np.eye(2)])
    assert abs(big2 - 2) < 1e-12 and abs(comp2 - 2) < 1e-12
    for _ in range(20):
        maps = [rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)) for _ in range(5)]
        b, c = weil.cyclic_tensor_trace(maps)
        assert abs(b - c) < 1e-9 * max(1, abs(c))
    with pytest.raises(weil.DimensionMismatch):
        weil.cyclic_tensor_trace([np.eye(2), np.ones((3, 2))])


def _swapped_fixture(p, seed=0):
    v2 = sym.standard_polarized_space(p, 1)
    vsum = sym.direct_sum([v2, v2])
    swap = np.zeros((4, 4), dtype=np.int64)
    swap[:2, 2:] = np.eye(2, dtype=np.int64)
    swap[2:, :2] = np.eye(2, dtype=np.int64)
    return weil.block_twist(vsum, [(0, 1)], sym.sp_elem(vsum, swap), seed=seed), vsum


def test_twisted_trace_examples():
    # iota = identity on a single block: ordinary omega-character
    v2 = sym.standard_polarized_space(3, 1)
    vone = sym.direct_sum([v2])
    bt1 = weil.block_twist(vone, [(0,)], sym.sp_identity(vone), seed=0)
    m = weil.WeilModel(v2)
    m.build_group_model()
    for g in sym.sp_elements(v2)[:8]:
        big = sym.sp_elem(vone, g.mat_np)
        r = weil.twisted_trace(bt1, big)
        assert abs(r.product_value - m.trace_omega(g)) < 1e-8
        assert abs(r.direct_value - m.trace_omega(g)) < 1e-8

    # two swapped blocks, g = identity: trace of the composite intertwiner
    bt, vsum = _swapped_fixture(3)
    r = weil.twisted_trace(bt, sym.sp_identity(vsum))
    b0 = vsum.blocks[0]
    from weilchar import modp

    loop = sym.sp_elem(bt.models[0].space, modp.mat_pow(bt.iota.mat_np, 2, 3)[np.ix_(b0, b0)])
    want = np.trace(bt.models[0].omega(loop))
    assert abs(r.product_value - want) < 1e-9
    assert abs(r.direct_value - want) < 1e-9


def test_twisted_trace_block_mismatch():
    bt, vsum = _swapped_fixture(3)
    off_block = np.eye(4, dtype=np.int64)
    off_block[:2, 2:] = np.eye(2, dtype=np.int64)  # upper-triangular across blocks
    # make it symplectic? it is not block-preserving either way
    with pytest.raises((weil.BlockMismatch, sym.SymplecticError)):
        weil.twisted_trace(bt, sym.sp_elem(vsum, off_block))


def test_scalar_distribution_freedom():
    bt, vsum = _swapped_fixture(3)
    g = sym.sp_elements(sym.standard_polarized_space(3, 1))[7]
    big = np.zeros((4, 4), dtype=np.int64)
    big[:2, :2] = g.mat_np
    big[2:, 2:] = g.inverse().mat_np
    gbig = sym.sp_elem(vsum, big)
    before = weil.twisted_trace(bt, gbig)
    bt.redistribute(0, [cmath.exp(1.234j), cmath.exp(-1.234j)])
    after = weil.twisted_trace(bt, gbig)
    assert abs(before.product_value - after.product_value) < 1e-9
    assert abs(before.direct_value - after.direct_value) < 1e-9
    with pytest.raises(weil.NotNormalized):
        bt.redistribute(0, [2.0, 0.5j])


def test_word_model_beyond_group_cap():
    # Sp_4(F_3) exceeds the enumeration cap; the word model still evaluates
    p = 3
    v4 = sym.standard_polarized_space(p, 2)
    m = weil.WeilModel(v4)
    gens = sym.sp_generators(v4)
    g = gens[0] * gens[1] * gens[2]
    h = gens[3] * gens[0]
    err = np.abs(m.omega_word(g) @ m.omega_word(h) - m.omega_word(g * h)).max()
    assert err < 1e-9


def test_operator_dump_format():
    m = weil.WeilModel(sym.standard_polarized_space(3, 1))
    dump = weil.dump_operator(m.rho(sym.HeisElem(m.space, (0, 0), 1)))
    assert len(dump) == 9
    assert all(len(entry) == 2 for entry in dump)
    theta = weil.theta_char(3, 1)
    assert abs(dump[0][0] - theta.real) < 1e-9 and abs(dump[0][1] - theta.imag) < 1e-9


def test_sl2_f3_convention_real_on_order_4_torus():
    # the scalar convention for SL_2(F_3) (classical unipotent seed) gives a
    # character that is real on the norm-one torus of order 4, and agrees
    # with the generator word model everywhere
    from weilchar import ffield as ff

    torus = sym.build_torus(sym.TorusDesc(3, (sym.NormOneFactor(1),)))
    model = weil.WeilModel(torus.space)
    model.build_group_model()
    for t in torus.elements():
        tr = model.trace_omega(t.elem)
        assert abs(tr.imag) < 1e-9
    for g in sym.sp_elements(torus.space):
        assert np.abs(model.omega_group(g) - model.omega_word(g)).max() < 1e-8

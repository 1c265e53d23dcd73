import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from weilchar import lattice as lat


def snf_diag(m):
    u, d, v = lat.smith_normal_form(m)
    n = min(len(d), len(d[0]) if d else 0)
    return [d[i][i] for i in range(n)]


def test_snf_examples():
    assert snf_diag([[1, 0], [0, 1]]) == [1, 1]
    assert snf_diag([[2, 0], [0, 3]]) == [1, 6]
    assert snf_diag([[1, -1], [-1, 1]]) == [1, 0]


def test_snf_witnesses():
    m = [[2, 4, 4], [-6, 6, 12], [10, 4, 16]]
    u, d, v = lat.smith_normal_form(m)
    assert (np.array(u, dtype=object) @ np.array(m, dtype=object) @ np.array(v, dtype=object) == np.array(d, dtype=object)).all()
    assert abs(lat.det_int(u)) == 1
    assert abs(lat.det_int(v)) == 1


@given(st.integers(0, 10**6))
@settings(max_examples=60, deadline=None)
def test_snf_random_contract(seed):
    import random

    rng = random.Random(seed)
    rows = rng.randint(1, 6)
    cols = rng.randint(1, 6)
    m = [[rng.randint(-9, 9) for _ in range(cols)] for _ in range(rows)]
    u, d, v = lat.smith_normal_form(m)
    assert (np.array(u, dtype=object) @ np.array(m, dtype=object) @ np.array(v, dtype=object) == np.array(d, dtype=object)).all()
    assert abs(lat.det_int(u)) == 1 and abs(lat.det_int(v)) == 1
    diag = [d[i][i] for i in range(min(rows, cols))]
    for a, b in zip(diag, diag[1:]):
        assert not (a == 0 and b != 0)
        assert a == 0 or b % a == 0


def test_pi0_examples():
    assert lat.pi0_torsion([[-1]]) == [2]
    assert lat.pi0_torsion([[0, 1], [1, 0]]) == []
    # permutation 3-cycle on Z^3: image of 1-theta is the full sum-zero
    # sublattice, so the cokernel is free (Z); no torsion
    assert lat.pi0_torsion([[0, 0, 1], [1, 0, 0], [0, 1, 0]]) == []
    # the order-3 rotation on the rank-2 root lattice does carry the 3-torsion
    assert lat.pi0_torsion([[0, -1], [1, -1]]) == [3]
    with pytest.raises(lat.NotFiniteOrder):
        lat.pi0_torsion([[1, 1], [0, 1]])


def test_pi0_property_seeded():
    import random

    rng = random.Random(12345)
    from weilchar.checks import make_finite_order_matrix

    for _ in range(60):
        m = make_finite_order_matrix(rng)
        order = lat.matrix_order(m)
        for factor in lat.pi0_torsion(m):
            x = factor
            d = 2
            while d * d <= x:
                while x % d == 0:
                    assert order % d == 0
                    x //= d
                d += 1
            if x > 1:
                assert order % x == 0


def test_catalogue_membership_and_sizes():
    cat = lat.catalogue()
    assert {"A1", "A2", "A3", "A4", "B2", "C2", "D4", "A2.flip", "A3.flip", "A4.flip", "D4.swap", "D4.triality"} <= set(cat)
    assert len(cat["A2"].roots) == 6
    assert len(cat["B2"].roots) == 8
    assert len(cat["C2"].roots) == 8
    assert len(cat["D4"].roots) == 24
    assert cat["D4.triality"].order == 3


def test_restrict_examples():
    cat = lat.catalogue()
    # identity theta: Phi_res = Phi, all type 1
    res = lat.restrict_roots(cat["A3"])
    assert all(r.type_tag == 1 for r in res.restricted)
    assert len(res.restricted) == len(cat["A3"].roots)
    # A3 with the flip: all restricted roots type 1 (no A_{2n} component)
    res3 = lat.restrict_roots(cat["A3.flip"])
    assert all(r.type_tag == 1 for r in res3.restricted)
    # A2 with the flip: simple-root orbits restrict to type 2, highest to type 3
    res2 = lat.restrict_roots(cat["A2.flip"])
    tags = sorted(r.type_tag for r in res2.restricted)
    assert tags == [2, 2, 3, 3]
    by_tag = {r.vector: r.type_tag for r in res2.restricted}
    assert by_tag[res2.by_root[(1, 0)]] == 2
    assert by_tag[res2.by_root[(1, 1)]] == 3


def test_norm_sum_examples():
    cat = lat.catalogue()
    ident = cat["A2"]
    n, l, rho, sig = lat.norm_sum((1, 0), ident)
    assert (n, l, rho, sig) == ((1, 0), 1, 1, 1)
    flip = cat["A2.flip"]
    n, l, rho, sig = lat.norm_sum((1, 0), flip)
    assert n == (1, 1) and l == 2 and rho == 2 and sig == 1
    n, l, rho, sig = lat.norm_sum((1, 1), flip)
    assert n == (1, 1) and l == 1 and rho == 1 and sig == -1
    with pytest.raises(lat.RootNotInDatum):
        lat.norm_sum((5, 5), flip)


def test_descended_examples():
    cat = lat.catalogue()
    ident = cat["A2"]
    assert len(lat.descended_roots(ident, {a: 1 for a in ident.roots})) == 6
    flip = cat["A2.flip"]
    surviving = lat.descended_roots(flip, {a: 1 for a in flip.roots})
    res = lat.restrict_roots(flip)
    assert surviving == {r.vector for r in res.restricted if r.type_tag != 3}
    assert lat.descended_roots(flip, {a: 9 for a in flip.roots}) == set()
    with pytest.raises(lat.InconsistentEvaluation):
        lat.descended_roots(flip, {a: i for i, a in enumerate(flip.roots)})


def test_datum_json_round_trip():
    cat = lat.catalogue()
    d = cat["A2.flip"]
    assert lat.datum_from_json(lat.datum_to_json(d)) == d


def test_datum_validation():
    with pytest.raises(lat.LatticeError):
        lat.RootDatum(1, ((1,),), ((1,),), ((1,),))  # pairing != 2
    with pytest.raises(lat.LatticeError):
        # theta does not permute the roots
        lat.RootDatum(1, ((1,), (-1,)), ((2,), (-2,)), ((2,),))


def test_type_2_and_3_pair_up():
    # a type-2 restricted root doubles to a type-3 one and vice versa
    cat = lat.catalogue()
    for name in ("A2.flip", "A4.flip"):
        res = lat.restrict_roots(cat[name])
        by_vec = {r.vector: r.type_tag for r in res.restricted}
        for r in res.restricted:
            if r.type_tag == 2:
                doubled = tuple(2 * x for x in r.vector)
                assert by_vec.get(doubled) == 3
            if r.type_tag == 3:
                half = tuple(x // 2 for x in r.vector)
                assert by_vec.get(half) == 2

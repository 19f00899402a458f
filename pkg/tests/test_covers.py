from fractions import Fraction

import numpy as np
import pytest

from l2growth import (CongruenceSubgroup, CoverInstance, GroupRingElement,
                      LatticeSubgroup, betti, instantiate, quotient,
                      two_cell_complex, verify_trace_equality)
from l2growth.caps import Caps
from l2growth.errors import SizeCapExceeded
from l2growth.polynomials import Poly
from conftest import cyclic_quotient, diag_quotient


def test_instantiation_circulant(circle):
    cover = instantiate(circle, cyclic_quotient(3))
    lap = cover.laplacian(0).toarray()
    assert (np.diag(lap) == 2).all()
    assert lap.sum() == 0
    assert (lap == lap.T).all()


def test_instantiation_trivial_quotient_is_augmentation(circle, stripe_complex):
    cover = instantiate(circle, cyclic_quotient(1))
    assert cover.laplacian(0).toarray() == np.array([[0]])
    cover2 = instantiate(stripe_complex, diag_quotient(1, 1))
    # every entry collapses to its coefficient sum
    d4 = cover2.boundary(4).toarray()
    assert d4 == np.array([[0]])


def test_instantiation_torus_symmetric(torus2):
    cover = instantiate(torus2, diag_quotient(2, 3))
    lap = cover.laplacian(1).toarray()
    assert lap.shape == (12, 12)
    assert (lap == lap.T).all()


def test_betti_circle_covers(circle):
    for i in (1, 2, 5, 17, 50):
        cover = instantiate(circle, cyclic_quotient(i))
        assert cover.betti(0) == 1
        assert cover.betti(1) == 1


def test_betti_torus_covers(torus2, z_two):
    for mat in ([[2, 0], [0, 3]], [[3, 1], [0, 2]], [[4, 0], [0, 4]], [[1, 0], [0, 1]]):
        quot = quotient(z_two, LatticeSubgroup(mat))
        cover = instantiate(torus2, quot)
        assert [cover.betti(i) for i in range(3)] == [1, 2, 1]


def test_betti_stripe_cover(stripe_complex, z_two):
    quot = diag_quotient(2, 3)
    assert betti(stripe_complex, quot, 3) == 3


def test_eigenvalues_examples(circle, gap_complex, zero_complex):
    gc = instantiate(gap_complex, cyclic_quotient(4))
    assert np.allclose(gc.eigenvalues(1), [1, 5, 5, 9])
    cc = instantiate(circle, cyclic_quotient(2))
    assert np.allclose(cc.eigenvalues(0), [0, 4])
    zc = instantiate(zero_complex, cyclic_quotient(5))
    assert np.allclose(zc.eigenvalues(1), np.zeros(5))


def test_count_eigs_below(circle, gap_complex):
    gc = instantiate(gap_complex, cyclic_quotient(4))
    assert gc.count_eigs_below(1, 2.0) == 1
    assert gc.count_eigs_below(1, 0.5) == 0
    # anything at or above the norm bound captures the full dimension
    assert gc.count_eigs_below(1, 9.0) == 4
    cc = instantiate(circle, cyclic_quotient(2))
    assert cc.count_eigs_below(0, 0.0) == 1


def test_eigenvalue_size_cap(circle):
    cover = CoverInstance(circle, cyclic_quotient(60), Caps(eig=10))
    with pytest.raises(SizeCapExceeded):
        cover.eigenvalues(0)


def test_instantiation_order_cap(torus2):
    from l2growth.errors import OrderCapExceeded
    with pytest.raises(OrderCapExceeded):
        CoverInstance(torus2, diag_quotient(6, 6), Caps(order=50))


def test_normalized_trace_examples(circle):
    c3 = instantiate(circle, cyclic_quotient(3))
    assert c3.normalized_trace(Poly([0, 1]), 0) == 2
    assert c3.normalized_trace(Poly([1]), 0) == 1
    c1 = instantiate(circle, cyclic_quotient(1))
    assert c1.normalized_trace(Poly([0, 1]), 0) == 0


def test_trace_equality_reports(circle, gap_complex):
    rep = verify_trace_equality(circle, cyclic_quotient(3), 0, Poly([0, 1]))
    assert rep.condition_met and rep.equal and rep.lhs == 2
    rep1 = verify_trace_equality(circle, cyclic_quotient(1), 0, Poly([0, 1]))
    assert not rep1.condition_met and not rep1.equal
    assert rep1.lhs == 2 and rep1.rhs == 0
    rep7 = verify_trace_equality(gap_complex, cyclic_quotient(7), 1, Poly([0, 0, 1]))
    assert rep7.condition_met and rep7.equal and rep7.lhs == 33


def test_trace_equality_matrix_group(sanov_group):
    # nonabelian path: R = 1, short(mod 3) = 3, so degree 2 still qualifies
    gap_mat = two_cell_complex(
        sanov_group,
        GroupRingElement(sanov_group, {sanov_group.identity: 2,
                                       sanov_group.generators[0]: -1}))
    quot = quotient(sanov_group, CongruenceSubgroup(3))
    rep = verify_trace_equality(gap_mat, quot, 1, Poly([0, 0, 1]))
    assert rep.condition_met and rep.equal and rep.lhs == 33


def test_trace_equality_zero_support(zero_complex):
    # zero boundary: the symbol has empty support, so every degree qualifies
    rep = verify_trace_equality(zero_complex, cyclic_quotient(5), 1,
                                Poly([2, 3, 1]))
    assert rep.radius == 0 and rep.condition_met and rep.equal
    assert rep.lhs == 2  # p(0) times one cell


def test_trace_exact_rationals(gap_complex):
    cover = instantiate(gap_complex, cyclic_quotient(7))
    p = Poly([Fraction(1, 2), Fraction(-2, 3), Fraction(1, 6)])
    val = cover.normalized_trace(p, 1)
    assert isinstance(val, Fraction)
    # eigenvalues 5 - 4cos(2 pi k/7): mean = 5, mean of squares = 33
    assert val == Fraction(1, 2) - Fraction(2, 3) * 5 + Fraction(1, 6) * 33


def test_euler_characteristic_multiplicative(torus2, stripe_complex, z_two):
    for mat in ([[2, 0], [0, 3]], [[3, 1], [1, 2]]):
        quot = quotient(z_two, LatticeSubgroup(mat))
        assert instantiate(torus2, quot).euler_characteristic() == 0
        chi_w = sum((-1) ** q * a for q, a in enumerate(stripe_complex.cells))
        cover = instantiate(stripe_complex, quot)
        assert cover.euler_characteristic() == quot.order * chi_w


def test_luck_limit_shadow(circle, zero_complex):
    # normalized Betti numbers of the circle tower vanish like 1/i
    prev = None
    for i in (1, 2, 4, 8, 16, 32):
        cover = instantiate(circle, cyclic_quotient(i))
        ratio = Fraction(cover.betti(1), i)
        assert ratio == Fraction(1, i)
        if prev is not None:
            assert ratio < prev
        prev = ratio
    # zero Laplacian: linear growth regime
    for i in (1, 5, 20, 50):
        cover = instantiate(zero_complex, cyclic_quotient(i))
        assert cover.betti(1) == i


def test_betti_equals_nullity_and_eigcount(z_two):
    rng = np.random.default_rng(12)
    from l2growth.verify import random_complex, random_quotient
    from l2growth import exact
    for _ in range(25):
        cx = random_complex(rng)
        quot = random_quotient(rng, cx.group, max_index=60)
        cover = instantiate(cx, quot)
        for q in range(cx.top_dim + 1):
            if cx.cells[q] == 0:
                continue
            b = cover.betti(q)
            null = exact.kernel_certified(cover.laplacian(q))[0]
            assert b == null
            eigs = cover.eigenvalues(q)
            assert int(np.count_nonzero(np.abs(eigs) < 1e-7)) == b

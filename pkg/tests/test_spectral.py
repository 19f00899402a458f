import math
from fractions import Fraction

import numpy as np
import pytest

from l2growth import (CongruenceSubgroup, DensityEstimate, GroupRingElement,
                      LatticeSubgroup, betti_bound_general,
                      certify_gap, chebyshev, cosine_density_closed_form,
                      density_by_quotients, density_zn, eig_count_bound,
                      estimate_ns, gap_bound, j_bound, luck_polynomial,
                      ns_bound, quotient, sublog_bound, two_cell_complex,
                      uniform_gap_exponent)
from l2growth.errors import (DegenerateZ, FamilyNotLogUniform, GapNotVerified,
                             HypothesisUnverified, InsufficientGrid,
                             LambdaAboveGap, NotAbelian, ShortTooSmall)
from l2growth.polynomials import Poly, chebyshev_coefficients
from conftest import cyclic_quotient, diag_quotient


# -- chebyshev ---------------------------------------------------------------

def test_chebyshev_values():
    assert chebyshev(2, 0.3) == pytest.approx(-0.82, abs=1e-12)
    for n in range(31):
        assert chebyshev(n, 1.0) == pytest.approx(1.0, abs=1e-12)
    rng = np.random.default_rng(0)
    for theta in rng.uniform(0, np.pi, 100):
        n = int(rng.integers(0, 31))
        assert abs(chebyshev(n, math.cos(theta)) - math.cos(n * theta)) < 1e-10


def test_chebyshev_closed_form_matches_coefficients():
    for n in (1, 2, 7, 20, 40):
        poly = chebyshev_coefficients(n)
        for x in np.linspace(1.0, 10.0, 19):
            exact_val = float(poly(float(x)))
            assert chebyshev(n, float(x)) == pytest.approx(exact_val, rel=1e-10)


def test_chebyshev_explicit_coefficients():
    assert chebyshev_coefficients(0).coeffs == (1,)
    assert chebyshev_coefficients(1).coeffs == (0, 1)
    assert chebyshev_coefficients(2).coeffs == (-1, 0, 2)
    assert chebyshev_coefficients(3).coeffs == (0, -3, 0, 4)


# -- comparison polynomial ---------------------------------------------------

def test_luck_polynomial_degree_one():
    p = luck_polynomial(1, 0.5)
    assert p.coefficients() == Poly([1, -1])
    assert p.value(0.5) == pytest.approx(0.5)


def test_luck_polynomial_normalization_exact():
    for n, z in [(1, Fraction(1, 2)), (5, Fraction(1, 4)), (12, Fraction(3, 7)),
                 (8, 0.25)]:
        p = luck_polynomial(n, z)
        assert p.coefficients()(Fraction(0)) == 1


def test_luck_polynomial_nonnegative_and_small_on_window():
    rng = np.random.default_rng(1)
    for _ in range(20):
        n = int(rng.integers(1, 25))
        z = float(rng.uniform(0.05, 0.9))
        p = luck_polynomial(n, z)
        xs = np.linspace(0, 1, 201)
        vals = p.value(xs)
        assert np.all(vals >= -1e-12)
        assert p.value(0.0) == pytest.approx(1.0, abs=1e-9)
        window = vals[xs >= z]
        assert np.all(window <= p.value(z) + 1e-12)
        assert p.value(z) <= p.tail_bound() + 1e-12


def test_luck_polynomial_tail_example():
    p = luck_polynomial(8, 0.25)
    assert p.value(0.25) <= 4.0 * 3.0 ** -8 + 1e-12


def test_luck_polynomial_guards():
    with pytest.raises(DegenerateZ):
        luck_polynomial(4, 1.5)
    with pytest.raises(DegenerateZ):
        luck_polynomial(4, 0.0)


# -- j bound -----------------------------------------------------------------

def test_j_bound_formula():
    density = DensityEstimate.from_function(
        lambda lam: np.clip(np.asarray(lam, float) / 4.0, 0, 1), K=4.0, a=1)
    jb = j_bound(10, density, 0.25)
    assert jb.bound == pytest.approx(density.mu(0.25) + 4 * math.exp(-10.0))
    jb0 = j_bound(0, density, 0.3)
    assert jb0.bound == pytest.approx(density.mu(0.3) + 4.0)
    assert jb0.direct_integral == pytest.approx(1.0, abs=1e-3)


def test_j_bound_gap_density():
    gap_density = cosine_density_closed_form(5, 2)
    z = 1.0 / 9 - 1e-6
    jb = j_bound(7, gap_density, z)
    assert jb.mu_z == 0.0
    assert jb.bound == pytest.approx(4 * math.exp(-14 * math.sqrt(z)))


def test_j_bound_dominates_direct_integral(circle, gap_complex):
    rng = np.random.default_rng(2)
    densities = [cosine_density_closed_form(2, 1), cosine_density_closed_form(5, 2),
                 density_zn(circle, 0, 4096, seed=7)]
    for _ in range(30):
        n = int(rng.integers(0, 30))
        z = float(rng.uniform(0.02, 0.95))
        density = densities[int(rng.integers(0, len(densities)))]
        jb = j_bound(n, density, z)
        assert jb.direct_integral <= jb.bound + 1e-9


# -- densities ---------------------------------------------------------------

def test_density_zn_examples(circle, gap_complex):
    d = density_zn(circle, 0, sample_count=32768, seed=1)
    assert d.F(2.0) == pytest.approx(0.5, abs=0.02)
    assert d.F(4.0) == 1.0
    dg = density_zn(gap_complex, 1, sample_count=4096, seed=1)
    assert dg.F(0.9) == 0.0


def test_density_zn_guards(circle, sanov_group):
    with pytest.raises(ValueError):
        density_zn(circle, 0, sample_count=10)
    mat_cx = two_cell_complex(sanov_group, GroupRingElement.one(sanov_group))
    with pytest.raises(NotAbelian):
        density_zn(mat_cx, 0)


def test_density_zn_deterministic(circle):
    d1 = density_zn(circle, 0, sample_count=2048, seed=9)
    d2 = density_zn(circle, 0, sample_count=2048, seed=9)
    grid = np.linspace(0, 4, 17)
    assert np.array_equal(d1.to_grid(grid), d2.to_grid(grid))


def test_density_by_quotients_examples(circle, gap_complex, zero_complex):
    quots = [cyclic_quotient(i) for i in (10, 100, 1000)]
    d = density_by_quotients(circle, 0, quots)
    assert d.F(2.0) == pytest.approx(0.5, abs=0.05)
    assert [order for order, _ in d.members] == [10, 100, 1000]
    dg = density_by_quotients(gap_complex, 1, [cyclic_quotient(100)])
    assert dg.F(0.5) == 0.0
    dz = density_by_quotients(zero_complex, 1, [cyclic_quotient(9)])
    assert dz.F(0.0) == 1.0


def test_density_by_quotients_converges_to_closed_form(circle):
    closed = cosine_density_closed_form(2, 1)
    for i in (20, 80, 320):
        d = density_by_quotients(circle, 0, [cyclic_quotient(i)])
        grid = np.linspace(0.1, 3.9, 77)
        err = np.max(np.abs(d.to_grid(grid) - closed.to_grid(grid)))
        assert err <= 2.0 / i + 1e-12


# -- gap regime ---------------------------------------------------------------

def test_gap_bound_constants(gap_complex):
    dg = cosine_density_closed_form(5, 2)
    for i in (3, 12, 30):
        rep = gap_bound(gap_complex, cyclic_quotient(i), 1, 1.0, density=dg)
        assert rep.constants["M"] == pytest.approx(2.0 / 3)
        assert rep.bound == pytest.approx(4 * i * math.exp(-2 * i / 3))
        assert rep.betti == 0 and rep.satisfied
    rep3 = gap_bound(gap_complex, cyclic_quotient(3), 1, 1.0, density=dg)
    assert rep3.bound == pytest.approx(1.624, abs=1e-3)


def test_gap_bound_vacuous_at_zero(gap_complex):
    dg = cosine_density_closed_form(5, 2)
    rep = gap_bound(gap_complex, cyclic_quotient(5), 1, 1e-12, density=dg)
    assert rep.bound == pytest.approx(4 * 5, rel=1e-4)  # 4 a index, vacuous


def test_gap_not_verified(circle):
    d = cosine_density_closed_form(2, 1)
    with pytest.raises(GapNotVerified):
        gap_bound(circle, cyclic_quotient(5), 0, 1.0, density=d)


def test_certify_gap(gap_complex, circle):
    cert = certify_gap(gap_complex, 1, grid_per_dim=4096)
    assert 0.99 <= cert.certified_level < 1.0
    rep = gap_bound(gap_complex, cyclic_quotient(6), 1, 0.9, certificate=cert)
    assert rep.constants["gap_mode"] == "certified"
    cert_c = certify_gap(circle, 0, grid_per_dim=512)
    assert cert_c.certified_level <= 0.0


def test_eig_count_bound(gap_complex):
    dg = cosine_density_closed_form(5, 2)
    rep = eig_count_bound(gap_complex, cyclic_quotient(12), 1, 2.0, 1.0, density=dg)
    assert rep.betti == 3 and rep.satisfied
    assert not rep.constants["lambda_below_gap"]
    rep2 = eig_count_bound(gap_complex, cyclic_quotient(4), 1, 0.5, 1.0, density=dg)
    assert rep2.betti == 0 and rep2.satisfied
    assert rep2.constants["lambda_below_gap"]
    # lam just below the gap: ratio tends to one, bound to the index
    rep3 = eig_count_bound(gap_complex, cyclic_quotient(10), 1, 1.0 - 1e-9, 1.0,
                           density=dg)
    assert rep3.bound == pytest.approx(10.0, rel=1e-3)
    with pytest.raises(LambdaAboveGap):
        eig_count_bound(gap_complex, cyclic_quotient(10), 1, 9.5, 1.0, density=dg)


# -- power / log decay regimes ------------------------------------------------

def test_ns_bound_circle(circle):
    closed = cosine_density_closed_form(2, 1)
    for i in (5, 40, 500):
        rep = ns_bound(circle, cyclic_quotient(i), 1, beta=0.5, c_density=0.5,
                       density=closed)
        assert rep.satisfied and rep.betti == 1
        assert rep.bound >= 1.0


def test_ns_bound_torus(torus2):
    density = density_zn(torus2, 1, sample_count=65536, seed=3)
    grid = np.geomspace(8e-6, 8.0, 200)
    c = float(np.max(density.to_grid(grid) / grid)) * 1.05
    for mat in ([[3, 0], [0, 3]], [[5, 0], [0, 4]], [[7, 1], [0, 6]]):
        quot = quotient(torus2.group, LatticeSubgroup(mat))
        rep = ns_bound(torus2, quot, 1, beta=1.0, c_density=c, density=density)
        assert rep.satisfied and rep.betti == 2


def test_ns_bound_hypothesis_rejected(circle):
    closed = cosine_density_closed_form(2, 1)
    with pytest.raises(HypothesisUnverified):
        ns_bound(circle, cyclic_quotient(9), 1, beta=2.0, c_density=0.01,
                 density=closed)


def test_ns_bound_short_guard(torus2):
    density = density_zn(torus2, 1, sample_count=4096, seed=4)
    quot = quotient(torus2.group, LatticeSubgroup([[1, 0], [0, 9]]))
    with pytest.raises(ShortTooSmall):
        ns_bound(torus2, quot, 1, beta=1.0, c_density=1.0, density=density)


def test_sublog_bound(circle, stripe_complex):
    closed = cosine_density_closed_form(2, 1)
    rep = sublog_bound(circle, cyclic_quotient(100), 1, closed)
    assert rep.satisfied and rep.betti == 1 and rep.bound >= 1
    with pytest.raises(ShortTooSmall):
        sublog_bound(circle, cyclic_quotient(2), 1, closed)
    dw = density_zn(stripe_complex, 3, sample_count=8192, seed=5)
    rep_w = sublog_bound(stripe_complex, diag_quotient(5, 7), 3, dw)
    assert rep_w.betti == 7 and rep_w.satisfied


def test_sublog_rejects_vanishing_determinant(zero_complex):
    dz = DensityEstimate.from_function(
        lambda lam: np.ones_like(np.asarray(lam, float)), K=2.0, a=1)
    with pytest.raises(HypothesisUnverified):
        sublog_bound(zero_complex, cyclic_quotient(50), 1, dz)


def test_betti_bound_general_stripe(stripe_complex):
    d = density_zn(stripe_complex, 3, sample_count=4096, seed=6)
    rep = betti_bound_general(stripe_complex, diag_quotient(2, 3), 3, d, z=0.25)
    assert rep.betti == 3 and rep.satisfied


# -- decay estimation ----------------------------------------------------------

def test_estimate_ns_synthetic():
    for beta in (0.25, 0.5, 1.0, 1.5):
        fn = (lambda b: lambda lam: np.clip(np.asarray(lam, float), 0, 1) ** b)(beta)
        est = estimate_ns(DensityEstimate.from_function(fn, K=1.0, a=1))
        assert est.alpha_hat == pytest.approx(2 * beta, abs=0.05)


def test_estimate_ns_gap_detected(gap_complex):
    d = density_zn(gap_complex, 1, sample_count=4096, seed=7)
    est = estimate_ns(d)
    assert est.gap_detected and est.alpha_hat is None


def test_estimate_ns_guards():
    fn = lambda lam: np.sqrt(np.clip(np.asarray(lam, float), 0, 1))
    d = DensityEstimate.from_function(fn, K=1.0, a=1)
    with pytest.raises(InsufficientGrid):
        estimate_ns(d, lo=1e-3, hi=1e-2)
    with pytest.raises(InsufficientGrid):
        estimate_ns(d, lo=1e-6, hi=0.5)


# -- uniform families ----------------------------------------------------------

def test_uniform_gap_exponent_matrix_family(sanov_group):
    gap_mat = two_cell_complex(
        sanov_group, GroupRingElement(sanov_group, {sanov_group.identity: 2,
                                                    sanov_group.generators[0]: -1}))
    dg = cosine_density_closed_form(5, 2)
    rep = uniform_gap_exponent(sanov_group,
                               [CongruenceSubgroup(m) for m in (3, 5, 7)],
                               1.0, gap_mat, 1, density=dg)
    assert 0 < rep.exponent < 1
    assert rep.all_satisfied
    assert all(m["betti"] == 0 for m in rep.members)


def test_uniform_gap_exponent_rejects_polynomial_growth(z_two):
    gap2 = two_cell_complex(z_two, GroupRingElement(z_two, {(0, 0): 2, (1, 0): -1}))
    dg = cosine_density_closed_form(5, 2)
    with pytest.raises(FamilyNotLogUniform):
        uniform_gap_exponent(z_two, [LatticeSubgroup([[i, 0], [0, i]])
                                     for i in (2, 8, 60)],
                             1.0, gap2, 1, density=dg)

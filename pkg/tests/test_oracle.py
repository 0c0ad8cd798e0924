import math

import numpy as np
import pytest
import scipy.special as ss

from wallsep import oracle as O

INV_2_SQRT_PI = 1.0 / (2.0 * math.sqrt(math.pi))     # 0.2820947917738781
INV_4_SQRT_PI = 1.0 / (4.0 * math.sqrt(math.pi))     # 0.1410473958869391


class TestWalkPmf:
    def test_point_mass_at_zero_time(self):
        p = O.walk_pmf(0.0)
        assert p.at(0) == 1.0 and p.at(1) == 0.0

    def test_small_time_values(self):
        # frozen from an independent series summation; also e^{-1} I_k(1)
        p = O.walk_pmf(1.0)
        assert p.at(0) == pytest.approx(0.46575960759364043, abs=1e-13)
        assert p.at(1) == pytest.approx(0.20791041534970844, abs=1e-13)

    @pytest.mark.parametrize("t", [0.5, 4.0, 29.0, 35.0, 120.0, 400.0])
    def test_against_scipy_bessel(self, t):
        # independent library route for e^{-t} I_k(t)
        p = O.walk_pmf(t)
        ks = [0, 1, 2, 5, int(math.sqrt(t)) + 3]
        for k in ks:
            assert p.at(k) == pytest.approx(float(ss.ive(k, t)), rel=1e-11)

    def test_symmetry_and_mass(self):
        p = O.walk_pmf(17.0)
        assert np.array_equal(p.p, p.p[::-1])
        assert p.mass >= 1.0 - 1e-12

    def test_insufficient_radius_raises(self):
        with pytest.raises(O.TruncationError):
            O.walk_pmf(100.0, M=12)


class TestVTerm:
    def test_zero_time(self):
        assert O.v_term_exact(0.0) == 0.0

    def test_two_routes_agree(self):
        for t in (1.0, 25.0, 400.0):
            a, b = O.v_term_two_ways(t)
            assert abs(a - b) < 1e-10

    def test_approaches_half_inv_sqrt_pi(self):
        v400 = O.v_term_exact(400.0) / math.sqrt(400.0)
        assert abs(v400 / INV_2_SQRT_PI - 1.0) < 0.02
        devs = [abs(O.v_term_exact(t) / math.sqrt(t) - INV_2_SQRT_PI)
                for t in (25.0, 100.0, 400.0)]
        assert devs[0] > devs[1] > devs[2]

    def test_deterministic(self):
        assert O.v_term_exact(13.0) == O.v_term_exact(13.0)


class TestPairSemigroup:
    def test_zero_time_point_mass(self):
        s = O.pair_distribution(2, -1, 0.0, M=10)
        assert s.dist[2 + 10, -1 + 10] == 1.0

    def test_row_stochastic(self):
        s = O.pair_distribution(0, 1, 7.0)
        assert abs(s.row_sum() - 1.0) < 1e-10

    def test_u_factorizes(self):
        u = O.pair_distribution(1, -2, 3.0, M=40, which="U")
        w = O.walk_pmf(3.0, 40)
        prod = np.outer(np.roll(w.p, 1), np.roll(w.p, -2))
        assert np.abs(u.dist - prod).max() < 1e-8

    @pytest.mark.parametrize("i,j,t", [(0, 1, 2.0), (0, 1, 8.0), (-2, 3, 5.0)])
    def test_interacting_pair_negatively_correlated(self, i, j, t):
        # the interacting pair puts less mass on {both >= 0} than the
        # independent pair with the same marginals
        v = O.pair_distribution(i, j, t, which="V").both_at_least(0, 0)
        w = O.walk_pmf(t)
        pu = float(w.tail(-i)[0]) * float(w.tail(-j)[0])
        assert v - pu <= 1e-12

    def test_relabel_reflection_symmetry(self):
        a = O.pair_distribution(0, 1, 4.0, M=30, which="V").dist
        b = O.pair_distribution(1, 0, 4.0, M=30, which="V").dist
        assert np.abs(a - b.T).max() < 1e-12

    def test_parity_limit(self):
        s = O.pair_distribution(0, 1, 50.0, which="V")
        assert s.parity_mass(0) == pytest.approx(0.25, abs=0.02)
        assert s.parity_mass(1) == pytest.approx(0.25, abs=0.02)

    def test_leakage_raises(self):
        with pytest.raises(O.TruncationError):
            O.pair_distribution(0, 1, 30.0, M=12)


class TestFluxVariance:
    def test_zero_time(self):
        assert O.flux_variance_exact(0.0).value == 0.0

    def test_cross_validates_against_exact_ring(self):
        # two fully independent routes: lattice quadrature vs uniformized
        # flux-augmented ring (wrap effects at these t are < 1e-7)
        for t, tol in ((0.25, 2e-8), (0.5, 2e-8), (1.0, 1e-7)):
            fv = O.flux_variance_exact(t, rel_tol=1e-6)
            ring = O.exact_ring_transient(10, t)
            assert abs(fv.value - ring.flux_variance()) < tol

    def test_trend_toward_limit(self):
        ratios = [O.flux_variance_exact(t, rel_tol=1e-4).value / math.sqrt(t)
                  for t in (5.0, 10.0, 20.0, 30.0)]
        assert all(r > INV_4_SQRT_PI for r in ratios)
        assert ratios == sorted(ratios, reverse=True)

    def test_deterministic(self):
        a = O.flux_variance_exact(6.0)
        b = O.flux_variance_exact(6.0)
        assert a.value == b.value


class TestExactRing:
    def test_alternating_marginal_is_analytic(self):
        # flat start: site marginal p(x) = 1/2 - (-1)^x e^{-2t} / 2 exactly
        for L in (4, 6, 8):
            ring = O.exact_ring_transient(L, 0.7)
            p = ring.occupation_marginals()
            expect = 0.5 - 0.5 * math.exp(-1.4)
            assert p[0] == pytest.approx(expect, abs=1e-9)
            assert p[1] == pytest.approx(1.0 - expect, abs=1e-9)

    def test_density_conserved(self):
        ring = O.exact_ring_transient(6, 2.0)
        assert ring.occupation_marginals().sum() == pytest.approx(3.0, abs=1e-9)

    def test_flux_mean_is_analytic(self):
        # E J_t = (1 - e^{-2t})/4 on any even ring
        for L, t in ((6, 1.0), (8, 2.5), (4, 0.3)):
            ring = O.exact_ring_transient(L, t)
            assert ring.flux_mean() == pytest.approx(
                0.25 * (1.0 - math.exp(-2.0 * t)), abs=1e-9)

    def test_mean_height_average_conserved(self):
        for t in (0.5, 2.0):
            ring = O.exact_ring_transient(6, t)
            assert ring.mean_height_average() == pytest.approx(0.5, abs=1e-9)

    def test_height_marginal_parity_and_mass(self):
        ring = O.exact_ring_transient(6, 1.0)
        law0 = ring.height_marginal(0)
        assert sum(law0.values()) == pytest.approx(1.0, abs=1e-9)
        assert all(v % 2 == 0 for v in law0)         # site 0 keeps even parity
        law1 = ring.height_marginal(1)
        assert all(v % 2 == 1 for v in law1)

    def test_leakage_guard(self):
        with pytest.raises(O.TruncationError):
            O.exact_ring_transient(6, 4.0, J_max=2)

    def test_discrete_two_steps_hand_enumeration(self):
        # L=4, two uniform marks from the flat start: P(eta(0)=1) = 1/2,
        # frozen from enumerating all 16 site sequences by hand
        ring = O.exact_ring_discrete(4, 2)
        assert ring.occupation_marginals()[0] == pytest.approx(0.5, abs=1e-12)

    def test_rejects_bad_sizes(self):
        with pytest.raises(ValueError):
            O.exact_ring_transient(5, 1.0)
        with pytest.raises(ValueError):
            O.exact_ring_transient(12, 1.0)

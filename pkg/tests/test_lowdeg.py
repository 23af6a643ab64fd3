"""Tests for Hermite evaluation, moments, sphere moments, the composition
dynamic program, and the advantage computation against its brute-force oracle."""

import math

import numpy as np
import pytest

from pvlab.lowdeg import (
    HermiteEvaluator,
    advantage,
    advantage_bruteforce,
    composition_sum,
    count_admissible,
    hermite_eval,
    hermite_moment,
    hermite_moment_br,
    log_sphere_moment,
    sphere_moment,
)


class TestHermiteEval:
    def test_first_few_values(self):
        assert hermite_eval(0, 3.7) == 1.0
        assert hermite_eval(1, 3.7) == 3.7
        assert hermite_eval(2, 1.0) == pytest.approx(0.0, abs=1e-15)
        assert hermite_eval(3, 2.0) == pytest.approx(2.0 / math.sqrt(6), rel=1e-12)
        assert hermite_eval(4, 0.0) == pytest.approx(3.0 / math.sqrt(24), rel=1e-12)

    def test_degree_guard(self):
        ev = HermiteEvaluator(max_degree=8)
        with pytest.raises(ValueError):
            ev.eval(9, 0.0)

    def test_recurrence_matches_exact_coefficients(self):
        # the monic coefficients are exact integers; evaluating them in
        # integer arithmetic gives an independent reference
        ev = HermiteEvaluator(max_degree=64)
        for k in (5, 12, 31, 64):
            for z in (0.5, -3.0, 17.0, 1000.0):
                monic = sum(
                    c * int(z) ** r if z == int(z) else c * z**r
                    for r, c in enumerate(HermiteEvaluator.monic_coefficients(k))
                )
                expected = float(monic) / math.sqrt(math.factorial(k))
                assert ev.eval(k, z) == pytest.approx(expected, rel=1e-9)

    def test_orthonormality_by_exact_integration(self):
        ev = HermiteEvaluator()
        for j in range(13):
            for k in range(13):
                target = 1.0 if j == k else 0.0
                assert abs(ev.gaussian_product_moment(j, k) - target) <= 1e-8

    def test_all_values_consistent_with_eval(self):
        ev = HermiteEvaluator(max_degree=20)
        vals = ev.all_values(1.3)
        for k in (0, 7, 20):
            assert vals[k] == pytest.approx(ev.eval(k, 1.3), rel=1e-14)


class TestHermiteMoments:
    def test_low_order_values(self):
        for rho in (0.1, 0.5, 1.0):
            assert hermite_moment_br(0, rho) == 1.0
            assert hermite_moment_br(2, rho) == pytest.approx(0.0, abs=1e-14)

    def test_odd_orders_vanish(self):
        for k in (1, 3, 5, 17):
            assert hermite_moment_br(k, 0.3) == 0.0

    def test_fourth_moment_formula(self):
        for rho in (0.05, 1.0 / 3.0, 0.9, 1.0):
            expected = (1.0 / rho - 3.0) / math.sqrt(24)
            assert hermite_moment_br(4, rho) == pytest.approx(expected, abs=1e-12)
        assert hermite_moment_br(4, 1.0) == pytest.approx(-2.0 / math.sqrt(24), rel=1e-12)

    def test_general_atoms_reduce_to_br(self):
        rho = 0.4
        a = 1.0 / math.sqrt(rho)
        atoms = [(0.0, 1.0 - rho), (a, rho / 2.0), (-a, rho / 2.0)]
        for k in (0, 2, 4, 6, 8):
            assert hermite_moment(k, atoms) == pytest.approx(
                hermite_moment_br(k, rho), rel=1e-12, abs=1e-14
            )

    def test_general_atoms_custom_distribution(self):
        # uniform on {-1, +1} equals BR(1)
        atoms = [(1.0, 0.5), (-1.0, 0.5)]
        assert hermite_moment(4, atoms) == pytest.approx(
            hermite_moment_br(4, 1.0), rel=1e-12
        )

    def test_squared_moment_bound(self):
        # (E[h_k])^2 <= 20^k rho^(2-k) for k in [4, 40]
        for rho in (0.01, 0.1, 1.0):
            for k in range(4, 41):
                m = hermite_moment_br(k, rho)
                if m == 0.0:
                    continue
                log_bound = k * math.log(20.0) + (2.0 - k) * math.log(rho)
                assert 2.0 * math.log(abs(m)) <= log_bound

    def test_rejects_bad_rho(self):
        with pytest.raises(ValueError):
            hermite_moment_br(4, 0.0)


class TestSphereMoment:
    def test_one_dimension_is_one(self):
        for d in (0, 2, 4, 10):
            assert sphere_moment(1, d) == pytest.approx(1.0, rel=1e-12)

    def test_two_dimensions_quadratic(self):
        assert sphere_moment(2, 2) == pytest.approx(0.5, rel=1e-12)

    def test_odd_degrees_vanish(self):
        for n in (1, 3, 12):
            assert sphere_moment(n, 7) == 0.0
            assert log_sphere_moment(n, 7) == -math.inf

    def test_degree_zero_is_one(self):
        for n in (1, 2, 50):
            assert sphere_moment(n, 0) == pytest.approx(1.0, rel=1e-14)

    def test_monte_carlo_agreement(self):
        n, draws = 5, 10**5
        rng = np.random.default_rng(0)
        u = rng.normal(size=(draws, n))
        w = rng.normal(size=(draws, n))
        u /= np.linalg.norm(u, axis=1, keepdims=True)
        w /= np.linalg.norm(w, axis=1, keepdims=True)
        dots = np.einsum("ij,ij->i", u, w)
        for d in (2, 4, 6):
            sample = dots**d
            se = sample.std() / math.sqrt(draws)
            assert abs(sample.mean() - sphere_moment(n, d)) <= 4 * se


class TestCompositionSum:
    def test_single_part(self):
        for rho in (0.25, 1.0):
            assert composition_sum(4, 1, rho) == pytest.approx(
                hermite_moment_br(4, rho) ** 2, rel=1e-12
            )
        assert composition_sum(4, 1, 1.0) == pytest.approx(1.0 / 6.0, rel=1e-12)

    def test_unique_two_part_composition(self):
        m4 = hermite_moment_br(4, 0.5)
        assert composition_sum(8, 2, 0.5) == pytest.approx(m4**4, rel=1e-12)

    def test_two_part_mixed_composition(self):
        m4 = hermite_moment_br(4, 0.5)
        m6 = hermite_moment_br(6, 0.5)
        expected = 2.0 * m4**2 * m6**2
        assert composition_sum(10, 2, 0.5) == pytest.approx(expected, rel=1e-12)

    def test_empty_cases(self):
        assert composition_sum(7, 1, 0.5) == 0.0  # odd total
        assert composition_sum(6, 2, 0.5) == 0.0  # d < 4m


class TestAdvantage:
    def test_degree_three_is_trivial(self):
        for N, n, rho in ((5, 3, 0.5), (100, 10, 0.02), (7, 7, 1.0)):
            b = advantage(N, n, rho, 3)
            assert b.adv == 1.0
            assert b.adv_squared == 1.0

    def test_hand_value(self):
        b = advantage(2, 2, 1.0, 4)
        assert abs(b.adv_squared - 1.125) <= 1e-12

    def test_breakdown_structure(self):
        b = advantage(4, 3, 0.5, 8)
        degrees = [row.d for row in b.per_degree]
        assert degrees == [0, 2, 4, 6, 8]
        assert b.per_degree[0].contribution == 1.0
        assert b.per_degree[1].contribution == 0.0  # d = 2 vanishes
        total = sum(row.contribution for row in b.per_degree)
        assert b.adv_squared == pytest.approx(total, rel=1e-12)

    def test_alpha_sum_at_degree_four(self):
        N, n, rho = 6, 4, 0.25
        b = advantage(N, n, rho, 4)
        expected = N * hermite_moment_br(4, rho) ** 2
        assert b.per_degree[2].alpha_sum == pytest.approx(expected, rel=1e-12)

    def test_monotone_in_degree(self):
        values = [advantage(5, 4, 0.5, D).adv_squared for D in range(0, 13, 2)]
        for a, b in zip(values, values[1:]):
            assert b >= a
        assert all(v >= 1.0 for v in values)

    def test_rho_one_third_kills_degree_four(self):
        b = advantage(50, 10, 1.0 / 3.0, 4)
        assert b.per_degree[2].contribution <= 1e-30

    def test_oracle_equivalence_sample(self):
        for N, n, rho, D in ((3, 4, 0.5, 10), (4, 2, 0.25, 8), (2, 3, 1.0, 12)):
            a = advantage(N, n, rho, D).adv_squared
            b = advantage_bruteforce(N, n, rho, D)
            assert a == pytest.approx(b, rel=1e-10)

    def test_bruteforce_degree_zero(self):
        assert advantage_bruteforce(3, 2, 0.5, 0) == pytest.approx(1.0, rel=1e-14)

    def test_bruteforce_guard(self):
        with pytest.raises(ValueError):
            advantage_bruteforce(6, 2, 0.5, 4)
        with pytest.raises(ValueError):
            advantage_bruteforce(2, 2, 0.5, 13)

    def test_rho_guard(self):
        with pytest.raises(ValueError):
            advantage(10, 5, 1e-9, 4)

    def test_large_parameters_log_space(self):
        # far beyond linear-space range: C(10^4, 5) * rho^(2-k) terms
        b = advantage(10**4, 20, 0.01, 24)
        assert math.isfinite(b.log_adv_squared)
        assert b.adv >= 1.0


class TestAdmissibleCount:
    def test_exact_small_counts(self):
        # d=4, m=1: only (4); support choices = C(N, 1)
        assert count_admissible(3, 4, 1) == 3
        # d=10, m=2: compositions (4,6) and (6,4)
        assert count_admissible(5, 10, 2) == math.comb(5, 2) * 2
        # d=8, m=2: only (4,4)
        assert count_admissible(4, 8, 2) == math.comb(4, 2)
        assert count_admissible(2, 8, 3) == 0  # m > N

    def test_cardinality_upper_bound(self):
        for N in (2, 4, 8):
            for d in (4, 8, 12):
                for m in range(1, d // 4 + 1):
                    assert count_admissible(N, d, m) <= N**m * d ** (d / 2)

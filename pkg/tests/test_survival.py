import math
from fractions import Fraction

import numpy as np
import pytest

from mnsurv import (
    CostGuardError,
    QuadratureSpec,
    build_instance,
    compare_routes,
    survival_dirichlet,
    survival_exact,
    survival_gaussian,
    survival_mc,
)
from mnsurv.checks import random_instance


def binomial_tail(n, p_float, k):
    """Exact-rational tail P(Bin(n, p) >= k) for the binary value of p."""
    p = Fraction(p_float)
    q = 1 - p
    return float(sum(Fraction(math.comb(n, x)) * p**x * q ** (n - x) for x in range(k, n + 1)))


class TestExact:
    def test_vacuous_thresholds(self):
        assert survival_exact(build_instance(5, [0.3, 0.3], [0, 0])) == 1.0

    def test_single_cell(self):
        assert survival_exact(build_instance(2, [0.5], [1])) == pytest.approx(0.75, rel=1e-14)

    def test_two_cells_one_active(self):
        inst = build_instance(2, [0.3, 0.3], [1, 0])
        assert survival_exact(inst) == pytest.approx(0.51, rel=1e-13)

    def test_impossible(self):
        assert survival_exact(build_instance(2, [0.5], [5])) == 0.0

    def test_binomial_reduction_random(self):
        rng = np.random.default_rng(41)
        for _ in range(50):
            n = int(rng.integers(1, 60))
            p = float(rng.uniform(0.05, 0.9))
            k = int(rng.integers(0, n + 2))
            inst = build_instance(n, [p], [k])
            oracle = binomial_tail(n, p, k)
            assert survival_exact(inst) == pytest.approx(oracle, rel=1e-12, abs=1e-300)

    def test_cost_guard(self):
        with pytest.raises(CostGuardError):
            survival_exact(build_instance(10_000, [0.2, 0.2, 0.2], [2, 2, 2]))


class TestDirichlet:
    def test_linear_case(self):
        inst = build_instance(2, [0.5], [1])
        assert abs(survival_dirichlet(inst, QuadratureSpec(nodes=16)) - 0.75) <= 1e-12

    def test_binomial_case(self):
        inst = build_instance(4, [0.5], [2])
        assert survival_dirichlet(inst, QuadratureSpec(nodes=16)) == pytest.approx(
            11 / 16, rel=1e-13
        )

    def test_matches_enumeration(self):
        inst = build_instance(10, [0.3, 0.3], [2, 3])
        exact = survival_exact(inst)
        diri = survival_dirichlet(inst, QuadratureSpec(nodes=48))
        assert abs(diri - exact) / exact <= 1e-8

    def test_rejects_unreduced_thresholds(self):
        with pytest.raises(ValueError):
            survival_dirichlet(build_instance(5, [0.3, 0.3], [0, 2]))

    def test_impossible_short_circuit(self):
        assert survival_dirichlet(build_instance(2, [0.5], [5])) == 0.0

    def test_minimal_sample_size(self):
        # n = d with all thresholds 1: constant integrand, still exact
        inst = build_instance(2, [0.3, 0.3], [1, 1])
        exact = survival_exact(inst)
        diri = survival_dirichlet(inst, QuadratureSpec(nodes=8))
        assert diri == pytest.approx(exact, rel=1e-12)
        assert exact == pytest.approx(0.27, rel=1e-12)


class TestGaussian:
    def test_binomial_case(self):
        inst = build_instance(4, [0.5], [2])
        val = survival_gaussian(inst, QuadratureSpec(nodes=32))
        assert abs(val - 0.6875) / 0.6875 <= 1e-9

    def test_matches_enumeration(self):
        inst = build_instance(12, [0.3, 0.3], [3, 4])
        exact = survival_exact(inst)
        val = survival_gaussian(inst, QuadratureSpec(nodes=48))
        assert abs(val - exact) / exact <= 1e-6

    def test_matches_dirichlet_at_equal_nodes(self):
        rng = np.random.default_rng(42)
        spec = QuadratureSpec(nodes=24)
        for _ in range(20):
            d = int(rng.integers(1, 4))
            n = int(rng.integers(3 * d, 30))
            raw = rng.gamma(2.0, size=d + 1)
            p = (0.6 * raw / raw.sum() + 0.4 / (d + 1))[:d]
            k = rng.integers(2, max(3, n // d), size=d)
            if k.sum() > n - 1:
                continue
            inst = build_instance(n, p, k)
            a = survival_dirichlet(inst, spec)
            b = survival_gaussian(inst, spec)
            assert abs(a - b) / max(a, b) <= 1e-9

    def test_inapplicable_raises(self):
        inst = build_instance(2, [0.5], [1])  # J_1 = 0
        with pytest.raises(ValueError, match="inapplicable"):
            survival_gaussian(inst)

    def test_impossible_short_circuit(self):
        assert survival_gaussian(build_instance(2, [0.5], [5])) == 0.0


class TestMonteCarlo:
    def test_vacuous(self):
        est, se = survival_mc(build_instance(5, [0.3], [0]), 2000, 1)
        assert est == 1.0 and se == 0.0

    def test_impossible(self):
        est, se = survival_mc(build_instance(2, [0.5], [5]), 2000, 1)
        assert est == 0.0 and se == 0.0

    def test_binomial_consistency(self):
        inst = build_instance(2, [0.5], [1])
        est, se = survival_mc(inst, 100_000, 314)
        assert abs(est - 0.75) <= 4 * se

    def test_deterministic(self):
        inst = build_instance(10, [0.3, 0.3], [2, 3])
        assert survival_mc(inst, 5000, 7) == survival_mc(inst, 5000, 7)

    def test_rejects_small_replications(self):
        with pytest.raises(ValueError):
            survival_mc(build_instance(2, [0.5], [1]), 100, 1)

    def test_panel_consistency(self):
        rng = np.random.default_rng(43)
        hits = total = 0
        for _ in range(20):
            inst = random_instance(rng, n_range=(2, 12))
            exact = survival_exact(inst)
            est, se = survival_mc(inst, 10**6, int(rng.integers(1, 2**31)))
            if se == 0.0:
                hits += est == pytest.approx(exact, abs=1e-12)
            else:
                hits += abs(est - exact) <= 4 * se
            total += 1
        assert hits >= 0.95 * total

    def test_counting_equals_order_statistics(self):
        # the two descriptions of the event coincide draw by draw
        rng = np.random.default_rng(46)
        inst = build_instance(9, [0.25, 0.3], [2, 5])
        prefix = inst.weights.prefix
        kappa = inst.kappa
        u = rng.random((500, inst.n))
        by_counting = np.ones(500, dtype=bool)
        for i in range(inst.d):
            by_counting &= np.count_nonzero(u <= prefix[i], axis=1) >= kappa[i]
        u_sorted = np.sort(u, axis=1)
        by_order_stats = np.ones(500, dtype=bool)
        for i in range(inst.d):
            if kappa[i] >= 1:
                by_order_stats &= u_sorted[:, kappa[i] - 1] <= prefix[i]
        np.testing.assert_array_equal(by_counting, by_order_stats)


class TestCompareRoutes:
    def test_full_report(self):
        inst = build_instance(10, [0.3, 0.3], [2, 3])
        report = compare_routes(
            inst,
            QuadratureSpec(nodes=48),
            mc_spec=QuadratureSpec(mode="monte-carlo", replications=100_000, seed=11),
        )
        assert report.max_rel_diff <= 1e-6
        assert report.gaussian is not None
        assert report.delta_n is not None and report.gamma_tilde is not None
        assert abs(report.mc.estimate - report.exact) <= 4 * report.mc.stderr
        for value in (report.exact, report.dirichlet, report.gaussian):
            assert -1e-12 <= value <= 1 + 1e-12

    def test_vacuous_thresholds(self):
        report = compare_routes(build_instance(6, [0.3, 0.3], [0, 0]))
        assert report.exact == report.dirichlet == report.gaussian == 1.0
        assert report.max_rel_diff == 0.0

    def test_impossible(self):
        report = compare_routes(build_instance(4, [0.5], [9]))
        assert report.exact == report.dirichlet == report.gaussian == 0.0

    def test_reduction_is_internal(self):
        # zero thresholds are fine: routes see the reduced instance
        report = compare_routes(build_instance(10, [0.2, 0.3, 0.1], [2, 0, 3]))
        merged = compare_routes(build_instance(10, [0.2, 0.4], [2, 3]))
        assert report.exact == pytest.approx(merged.exact, rel=1e-13)
        assert report.dirichlet == pytest.approx(merged.dirichlet, rel=1e-12)

    def test_gaussian_inapplicable_is_reported(self):
        report = compare_routes(build_instance(10, [0.3, 0.3], [1, 3]))
        assert report.gaussian is None
        assert "J_i" in report.gaussian_reason
        assert report.exact is not None and report.dirichlet is not None
        assert report.max_rel_diff is not None  # exact vs dirichlet still compared

    def test_route_subset(self):
        report = compare_routes(
            build_instance(10, [0.3], [3]), routes=["exact", "dirichlet"]
        )
        assert report.gaussian is None and report.mc is None
        assert report.exact is not None and report.dirichlet is not None

    def test_unknown_route(self):
        with pytest.raises(ValueError):
            compare_routes(build_instance(10, [0.3], [3]), routes=["exact", "bayes"])

    def test_mc_needs_spec(self):
        with pytest.raises(ValueError):
            compare_routes(build_instance(10, [0.3], [3]), routes=["mc"])


class TestMonotonicity:
    def test_raising_a_threshold_never_helps(self):
        rng = np.random.default_rng(44)
        for _ in range(60):
            inst = random_instance(rng, n_range=(2, 14))
            axis = int(rng.integers(0, inst.d))
            k2 = inst.k.copy()
            k2[axis] += 1
            bumped = build_instance(inst.n, inst.p, k2)
            assert survival_exact(bumped) <= survival_exact(inst) + 1e-12

    def test_all_routes_in_unit_interval(self):
        rng = np.random.default_rng(45)
        spec = QuadratureSpec(nodes=24)
        for _ in range(25):
            inst = random_instance(rng, n_range=(2, 16))
            report = compare_routes(inst, spec)
            for value in (report.exact, report.dirichlet, report.gaussian):
                if value is not None:
                    assert -1e-12 <= value <= 1 + 1e-12

import numpy as np
import pytest

from oracles import posted_revenue_oracle
from pricelab.errors import InstanceFormatError
from pricelab.instances import (gen_hypergraph_lb, gen_lb_standard,
                                gen_numerical_example, gen_random)
from pricelab.mechanisms import (RevenueReport, best_separate_free, brev,
                                 bundle_pricing, evaluate_menu_revenue,
                                 evaluate_revenue, monopoly_reserve,
                                 proxy_revenue, separate_free, srev_additive)
from pricelab.model import (BoostStructure, DiscreteDistribution, Instance,
                            fully_boosted)

ATOL = 1e-9


class TestMonopolyReserve:
    def test_half_half_low(self):
        res = monopoly_reserve(DiscreteDistribution(((0.0, 0.5), (2.0, 0.5))))
        assert (res.reserve, res.revenue) == (2.0, 1.0)

    def test_half_half_high(self):
        res = monopoly_reserve(DiscreteDistribution(((0.0, 0.5), (4.0, 0.5))))
        assert (res.reserve, res.revenue) == (4.0, 2.0)

    def test_point_mass(self):
        res = monopoly_reserve(DiscreteDistribution(((3.5, 1.0),)))
        assert (res.reserve, res.revenue) == (3.5, 3.5)

    def test_empty_distribution_rejected(self):
        with pytest.raises(InstanceFormatError):
            DiscreteDistribution(())

    def test_tie_takes_smallest_price(self):
        # Prices 1 and 2 both earn revenue 1.
        res = monopoly_reserve(DiscreteDistribution(((1.0, 0.5), (2.0, 0.5))))
        assert (res.reserve, res.revenue) == (1.0, 1.0)

    def test_scaling_by_powers_of_two_is_exact(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            size = int(rng.integers(2, 5))
            vals = np.sort(rng.choice(np.arange(10.0), size=size, replace=False))
            probs = rng.uniform(0.1, 1, size=size)
            probs /= probs.sum()
            dist = DiscreteDistribution(tuple(zip(vals.tolist(), probs.tolist())))
            base = monopoly_reserve(dist)
            for c in (0.5, 2.0, 8.0):
                scaled = monopoly_reserve(dist.scaled(c))
                assert scaled.reserve == c * base.reserve
                assert scaled.revenue == c * base.revenue


class TestSrevAdditive:
    def test_ring_raw(self):
        assert srev_additive(gen_numerical_example()) == pytest.approx(6.0, abs=ATOL)

    def test_ring_fully_boosted(self):
        hat = fully_boosted(gen_numerical_example())
        assert srev_additive(hat) == pytest.approx(12.0, abs=ATOL)

    def test_lb_instance(self):
        for n in (2, 5, 9):
            assert srev_additive(gen_lb_standard(n)) == pytest.approx(n, abs=ATOL)


class TestBrev:
    def test_ring_price_and_revenue(self):
        price, rep = brev(gen_numerical_example())
        assert price == pytest.approx(12.0, abs=ATOL)
        assert rep.revenue == pytest.approx(7.5, abs=ATOL)
        assert rep.mode == "exact"

    def test_single_item_equals_monopoly_reserve(self):
        d = DiscreteDistribution(((0.0, 0.25), (1.0, 0.25), (4.0, 0.5)))
        inst = Instance(BoostStructure(1, 1, ()), (d,))
        price, rep = brev(inst)
        res = monopoly_reserve(d)
        assert price == res.reserve and rep.revenue == pytest.approx(res.revenue, abs=ATOL)

    def test_invariant_under_full_boost(self):
        insts = [gen_numerical_example()]
        insts += [gen_random(3, 2, supports=2, edge_density=0.6, seed=s,
                             max_source_size=2) for s in range(6)]
        for inst in insts:
            p1, r1 = brev(inst)
            p2, r2 = brev(fully_boosted(inst))
            assert r1.revenue == r2.revenue
            assert p1 == p2

    def test_monte_carlo_agrees_with_exact(self):
        inst = gen_numerical_example()
        _, exact = brev(inst)
        price, mc = brev(inst, profile_cap=4, mc_samples=40_000, seed=9)
        assert mc.mode == "monte-carlo" and mc.std_error is not None
        assert abs(mc.revenue - exact.revenue) < 6 * mc.std_error + 0.2


class TestSeparateFree:
    def test_ring_partition(self):
        part = separate_free(gen_numerical_example(), {0, 2})
        assert part.prices.tolist() == [0.0, 8.0, 0.0, 8.0]
        assert part.lower_bound == pytest.approx(8.0, abs=ATOL)

    def test_everything_free(self):
        part = separate_free(gen_numerical_example(), range(4))
        assert part.prices.tolist() == [0.0] * 4
        assert part.lower_bound == 0.0

    def test_lb_instance_free_first_item(self):
        n = 7
        part = separate_free(gen_lb_standard(n), {0})
        for i in range(1, n):
            assert part.prices[i] == pytest.approx((1 + n) * 2.0 ** (i + 1), abs=ATOL)
        assert part.lower_bound == pytest.approx((n - 1) * (n + 1), abs=ATOL)


class TestEvaluateRevenue:
    def test_ring_free_set_revenue(self):
        inst = gen_numerical_example()
        part = separate_free(inst, {0, 2})
        rep = evaluate_revenue(inst, part.prices)
        assert rep.revenue == pytest.approx(8.0, abs=ATOL)
        # Independent oracle: full profile x subset enumeration.
        assert rep.revenue == pytest.approx(
            posted_revenue_oracle(inst, part.prices), abs=ATOL)

    def test_all_free_earns_nothing(self):
        inst = gen_numerical_example()
        assert evaluate_revenue(inst, np.zeros(4)).revenue == 0.0

    def test_plain_reserves_beat_their_bound(self):
        inst = gen_numerical_example()
        part = separate_free(inst, frozenset())
        rep = evaluate_revenue(inst, part.prices)
        assert rep.revenue >= 6.0 - ATOL
        assert rep.revenue == pytest.approx(
            posted_revenue_oracle(inst, part.prices), abs=ATOL)

    def test_matches_oracle_on_random_instances(self):
        rng = np.random.default_rng(23)
        for seed in range(8):
            inst = gen_random(3, 2, supports=2, edge_density=0.5, seed=seed,
                              max_source_size=2)
            prices = rng.uniform(0, 4, size=3)
            prices[rng.random(3) < 0.3] = 0.0
            assert evaluate_revenue(inst, prices).revenue == pytest.approx(
                posted_revenue_oracle(inst, prices), abs=ATOL)

    def test_revenue_meets_free_set_bound_everywhere(self):
        for seed in range(10):
            inst = gen_random(4, 1, supports=2, edge_density=0.4, seed=seed)
            for mask in range(16):
                part = separate_free(inst, {i for i in range(4) if mask >> i & 1})
                rev = evaluate_revenue(inst, part.prices).revenue
                assert rev >= part.lower_bound - ATOL

    def test_monte_carlo_reproducible_and_consistent(self):
        inst = gen_numerical_example()
        part = separate_free(inst, {0, 2})
        a = evaluate_revenue(inst, part.prices, "mc", mc_samples=50_000, seed=42)
        b = evaluate_revenue(inst, part.prices, "mc", mc_samples=50_000, seed=42)
        assert a.revenue == b.revenue and a.std_error == b.std_error
        exact = evaluate_revenue(inst, part.prices).revenue
        assert abs(a.revenue - exact) < 5 * a.std_error

    def test_report_invariant(self):
        with pytest.raises(ValueError):
            RevenueReport("x", 1.0, "exact", std_error=0.1)
        with pytest.raises(ValueError):
            RevenueReport("x", 1.0, "monte-carlo")


class TestBundlePricing:
    def test_grand_bundle_reproduces_brev(self):
        inst = gen_numerical_example()
        menu = bundle_pricing(inst, frozenset(), (frozenset(range(4)),))
        price, rep = brev(inst)
        assert menu.prices[0] == price
        assert proxy_revenue(inst, menu) == pytest.approx(rep.revenue, abs=ATOL)

    def test_singletons_reproduce_free_set_prices(self):
        for seed in range(6):
            inst = gen_random(4, 1, supports=2, edge_density=0.5, seed=seed)
            free = frozenset({0})
            part = separate_free(inst, free)
            menu = bundle_pricing(inst, free,
                                  tuple(frozenset({i}) for i in range(1, 4)))
            for j, i in enumerate(range(1, 4)):
                assert menu.prices[j] == pytest.approx(part.prices[i], abs=ATOL)

    def test_complete_hypergraph_singleton_prices(self):
        # m=6, k=2, free {1,2,3}: each singleton gets C(3,2) * 0.3 of boost.
        inst = gen_hypergraph_lb(6, 2)
        menu = bundle_pricing(inst, frozenset({0, 1, 2}),
                              (frozenset({3}), frozenset({4}), frozenset({5})))
        for j, reserve in enumerate((16.0, 32.0, 64.0)):
            assert menu.prices[j] == pytest.approx(1.9 * reserve, abs=1e-6)

    def test_ring_proxy_equals_cut_bound(self):
        inst = gen_numerical_example()
        menu = bundle_pricing(inst, frozenset({0, 2}),
                              (frozenset({1}), frozenset({3})))
        assert proxy_revenue(inst, menu) == pytest.approx(8.0, abs=ATOL)

    def test_proxy_never_exceeds_actual_menu_revenue(self):
        rng = np.random.default_rng(31)
        for seed in range(8):
            inst = gen_random(4, 1, supports=2, edge_density=0.5, seed=seed)
            items = list(rng.permutation(4))
            free = frozenset(items[:1])
            bundles = (frozenset(items[1:3]), frozenset(items[3:]))
            menu = bundle_pricing(inst, free, bundles)
            proxy = proxy_revenue(inst, menu)
            actual = evaluate_menu_revenue(inst, menu).revenue
            assert proxy <= actual + ATOL


class TestBestSeparateFree:
    def test_ring_optimum_is_alternating_set(self):
        part, rep = best_separate_free(gen_numerical_example())
        assert part.free_set == frozenset({0, 2})
        assert rep.revenue == pytest.approx(8.0, abs=ATOL)

    def test_never_worse_than_plain_reserves(self):
        for seed in range(6):
            inst = gen_random(3, 1, supports=3, edge_density=0.5, seed=seed)
            _, best = best_separate_free(inst)
            plain = evaluate_revenue(inst, separate_free(inst, ()).prices)
            assert best.revenue >= plain.revenue - ATOL

import numpy as np
import pytest

from oracles import cut_weight_oracle, degree_expectation_oracle, max_dicut_oracle
from pricelab.dicut import (CutGraph, build_graph, cut_weight, exact_max_dicut,
                            expected_cut_weight, local_search_dicut,
                            sample_free_set_degree, sample_free_set_pairwise,
                            sample_free_set_rank)
from pricelab.errors import CapExceeded
from pricelab.instances import gen_numerical_example, gen_random
from pricelab.mechanisms import monopoly_reserve, separate_free
from pricelab.model import (BoostStructure, DiscreteDistribution, Hyperedge,
                            Instance, full_boost_vector)

ATOL = 1e-9


def complete_bidirected_graph(m=4):
    """Unit reserves, every ordered pair carries a unit edge."""
    sources, targets = [], []
    for i in range(m):
        for j in range(m):
            if i != j:
                sources.append(frozenset({j}))
                targets.append(i)
    return CutGraph(num_items=m, source_weights=np.ones(m),
                    edge_sources=tuple(sources), edge_targets=tuple(targets),
                    edge_weights=np.ones(len(sources)))


class TestBuildGraph:
    def test_ring_weights(self):
        g = build_graph(gen_numerical_example())
        assert g.source_weights.tolist() == [1.0, 2.0, 1.0, 2.0]
        got = {(tuple(sorted(s)), t): w for s, t, w in
               zip(g.edge_sources, g.edge_targets, g.edge_weights)}
        assert got == {((0,), 1): 2.0, ((1,), 2): 1.0,
                       ((2,), 3): 2.0, ((3,), 0): 1.0}
        assert g.total_weight == pytest.approx(12.0, abs=ATOL)

    def test_edge_free_instance(self):
        inst = gen_random(4, 1, supports=3, edge_density=0.0, seed=2)
        g = build_graph(inst)
        assert len(g.edge_sources) == 0
        expected = [monopoly_reserve(d).revenue for d in inst.marginals]
        assert g.source_weights.tolist() == pytest.approx(expected, abs=ATOL)

    def test_only_winning_layer_kept(self):
        d = DiscreteDistribution(((0.0, 0.5), (2.0, 0.5)))
        edges = (Hyperedge(frozenset({1}), 0, 0, 0.5),
                 Hyperedge(frozenset({1}), 0, 1, 3.0))
        inst = Instance(BoostStructure(2, 2, edges), (d, d))
        g = build_graph(inst)
        assert len(g.edge_sources) == 1
        assert g.edge_weights[0] == pytest.approx(3.0 * 1.0, abs=ATOL)

    def test_zero_boost_edges_dropped(self):
        d = DiscreteDistribution(((0.0, 0.5), (2.0, 0.5)))
        edges = (Hyperedge(frozenset({1}), 0, 0, 0.0),)
        inst = Instance(BoostStructure(2, 1, edges), (d, d))
        assert len(build_graph(inst).edge_sources) == 0

    def test_per_item_weight_identity(self):
        # Source weight plus incoming hyperedge weight recovers eta_i([m]) R_i.
        for seed in range(8):
            inst = gen_random(5, 2, supports=2, edge_density=0.4, seed=seed,
                              max_source_size=2)
            g = build_graph(inst)
            eta = full_boost_vector(inst)
            for i in range(5):
                incoming = sum(w for t, w in zip(g.edge_targets, g.edge_weights)
                               if t == i)
                assert g.source_weights[i] + incoming == pytest.approx(
                    eta[i] * g.source_weights[i], abs=1e-8)


class TestCutWeight:
    def test_ring_alternating_cut(self):
        g = build_graph(gen_numerical_example())
        assert cut_weight(g, {0, 2}) == pytest.approx(8.0, abs=ATOL)

    def test_extremes(self):
        g = build_graph(gen_numerical_example())
        assert cut_weight(g, range(4)) == 0.0
        assert cut_weight(g, ()) == pytest.approx(6.0, abs=ATOL)

    def test_single_layer_matches_free_set_bound(self):
        for seed in range(8):
            inst = gen_random(4, 1, supports=2, edge_density=0.5, seed=seed,
                              max_source_size=2)
            g = build_graph(inst)
            for mask in range(16):
                free = frozenset(i for i in range(4) if mask >> i & 1)
                assert cut_weight(g, free) == pytest.approx(
                    separate_free(inst, free).lower_bound, abs=ATOL)

    def test_multi_layer_cut_is_a_lower_bound(self):
        for seed in range(8):
            inst = gen_random(4, 2, supports=2, edge_density=0.5, seed=seed,
                              max_source_size=2)
            g = build_graph(inst)
            for mask in range(16):
                free = frozenset(i for i in range(4) if mask >> i & 1)
                assert (cut_weight(g, free)
                        <= separate_free(inst, free).lower_bound + ATOL)


class TestExactMaxDicut:
    def test_ring_optimum(self):
        free, weight = exact_max_dicut(build_graph(gen_numerical_example()))
        assert free == frozenset({0, 2})
        assert weight == pytest.approx(8.0, abs=ATOL)

    def test_edge_free_prices_everything(self):
        inst = gen_random(4, 1, supports=3, edge_density=0.0, seed=1)
        g = build_graph(inst)
        free, weight = exact_max_dicut(g)
        assert free == frozenset()
        assert weight == pytest.approx(float(g.source_weights.sum()), abs=ATOL)

    def test_complete_bidirected_matches_oracle(self):
        g = complete_bidirected_graph(4)
        free, weight = exact_max_dicut(g)
        o_free, o_weight = max_dicut_oracle(g)
        assert weight == pytest.approx(o_weight, abs=ATOL)
        assert free == o_free

    def test_matches_oracle_on_random_graphs(self):
        for seed in range(10):
            inst = gen_random(5, 2, supports=2, edge_density=0.4, seed=seed,
                              max_source_size=2)
            g = build_graph(inst)
            free, weight = exact_max_dicut(g)
            o_free, o_weight = max_dicut_oracle(g)
            assert weight == pytest.approx(o_weight, abs=ATOL)
            assert free == o_free
            assert weight == pytest.approx(cut_weight_oracle(g, free), abs=ATOL)

    def test_size_cap(self):
        g = CutGraph(num_items=25, source_weights=np.ones(25),
                     edge_sources=(), edge_targets=(), edge_weights=np.zeros(0))
        with pytest.raises(CapExceeded):
            exact_max_dicut(g)


class TestSamplers:
    def test_rank_one_matches_pairwise(self):
        for seed in range(5):
            a = sample_free_set_pairwise(np.random.default_rng(seed), 6)
            b = sample_free_set_rank(np.random.default_rng(seed), 6, 1)
            assert a == b

    def test_degree_without_edges_prices_everything(self):
        g = build_graph(gen_random(4, 1, supports=2, edge_density=0.0, seed=0))
        assert sample_free_set_degree(np.random.default_rng(0), g, 1) == frozenset()

    def test_reproducible_from_seed(self):
        g = build_graph(gen_numerical_example())
        draws_a = [sample_free_set_pairwise(np.random.default_rng(99), 4)
                   for _ in range(3)]
        draws_b = [sample_free_set_pairwise(np.random.default_rng(99), 4)
                   for _ in range(3)]
        assert draws_a[0] == draws_b[0]
        assert sample_free_set_degree(np.random.default_rng(5), g, 2) == \
            sample_free_set_degree(np.random.default_rng(5), g, 2)

    def test_empirical_mean_matches_exact_expectation(self):
        g = build_graph(gen_numerical_example())
        rng = np.random.default_rng(12345)
        n = 100_000
        draws = np.array([cut_weight(g, sample_free_set_pairwise(rng, 4))
                          for _ in range(n)])
        exact = expected_cut_weight(g, "pairwise").value
        assert abs(draws.mean() - exact) < 3 * draws.std(ddof=1) / np.sqrt(n)

    def test_invalid_parameters(self):
        g = build_graph(gen_numerical_example())
        with pytest.raises(ValueError):
            sample_free_set_rank(np.random.default_rng(0), 4, 0)
        with pytest.raises(ValueError):
            sample_free_set_degree(np.random.default_rng(0), g, 0)


class TestExpectedCutWeight:
    def test_ring_pairwise_value(self):
        # Source edges cross w.p. 1/2 (total 3), unit-boost edges w.p. 1/4
        # (total 1.5); the quarter-of-total bound (3) is strictly below.
        g = build_graph(gen_numerical_example())
        exp = expected_cut_weight(g, "pairwise")
        assert exp.value == pytest.approx(4.5, abs=ATOL)
        assert exp.std_error is None
        assert exp.value >= g.total_weight / 4 - ATOL

    def test_edge_free_pairwise(self):
        inst = gen_random(4, 1, supports=3, edge_density=0.0, seed=4)
        g = build_graph(inst)
        assert expected_cut_weight(g, "pairwise").value == pytest.approx(
            float(g.source_weights.sum()) / 2, abs=ATOL)

    def test_rank_guarantee(self):
        for seed in range(10):
            inst = gen_random(5, 1, supports=2, edge_density=0.4, seed=seed,
                              max_source_size=2)
            k = max(inst.rank, 1)
            g = build_graph(inst)
            exp = expected_cut_weight(g, "rank", k=k)
            assert exp.value >= g.total_weight / (4 * k) - ATOL

    def test_degree_enumeration_matches_inclusion_exclusion(self):
        for seed in range(10):
            inst = gen_random(4, 1, supports=2, edge_density=0.35, seed=seed,
                              max_source_size=2)
            g = build_graph(inst)
            if len(g.edge_sources) > 10:
                continue
            d = max(inst.max_out_degree, 1)
            exp = expected_cut_weight(g, "degree", d=d)
            assert exp.std_error is None
            assert exp.value == pytest.approx(
                degree_expectation_oracle(g, 0.5 / d), abs=1e-9)

    def test_degree_monte_carlo_fallback(self):
        inst = gen_random(6, 1, supports=2, edge_density=0.9, seed=7,
                          max_source_size=2)
        g = build_graph(inst)
        assert len(g.edge_sources) > 20
        d = inst.max_out_degree
        exp = expected_cut_weight(g, "degree", d=d, mc_samples=20_000, seed=3)
        assert exp.std_error is not None
        exact = degree_expectation_oracle(g, 0.5 / d)
        assert abs(exp.value - exact) < 5 * exp.std_error

    def test_unknown_construction(self):
        g = build_graph(gen_numerical_example())
        with pytest.raises(ValueError):
            expected_cut_weight(g, "nope")


class TestLocalSearch:
    def test_ring_landscape_climbs_to_optimum_from_any_start(self):
        g = build_graph(gen_numerical_example())
        for mask in range(16):
            free = {i for i in range(4) if mask >> i & 1}
            weight = cut_weight(g, free)
            moves = 0
            while True:
                flips = [(cut_weight(g, free ^ {i}), i) for i in range(4)]
                best_w, best_i = max(flips)
                if best_w <= weight:
                    break
                free ^= {best_i}
                weight = best_w
                moves += 1
            assert weight == pytest.approx(8.0, abs=ATOL)
            assert moves <= 4

    def test_ring_search_finds_optimum(self):
        _, weight = local_search_dicut(build_graph(gen_numerical_example()),
                                       rng=np.random.default_rng(0))
        assert weight == pytest.approx(8.0, abs=ATOL)

    def test_edge_free_converges_to_empty_set(self):
        g = build_graph(gen_random(5, 1, supports=2, edge_density=0.0, seed=6))
        free, weight = local_search_dicut(g, rng=np.random.default_rng(1))
        assert free == frozenset()
        assert weight == pytest.approx(float(g.source_weights.sum()), abs=ATOL)

    def test_local_optimality_and_start_dominance(self):
        for seed in range(5):
            inst = gen_random(6, 1, supports=2, edge_density=0.3, seed=seed,
                              max_source_size=2)
            g = build_graph(inst)
            free, weight = local_search_dicut(g, restarts=4,
                                              rng=np.random.default_rng(seed))
            for i in range(6):
                assert weight >= cut_weight(g, set(free) ^ {i}) - ATOL

    def test_large_graph_beats_random_cut_expectation(self):
        inst = gen_random(30, 1, supports=2, edge_density=0.08, seed=9)
        g = build_graph(inst)
        _, weight = local_search_dicut(g, restarts=8,
                                       rng=np.random.default_rng(2))
        assert weight >= expected_cut_weight(g, "pairwise").value - ATOL

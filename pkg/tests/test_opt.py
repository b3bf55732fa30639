import numpy as np
import pytest

from oracles import posted_price_revenue_curve
from pricelab.errors import CapExceeded
from pricelab.instances import gen_numerical_example, gen_random
from pricelab.mechanisms import brev, monopoly_reserve, srev_additive
from pricelab.model import (BoostStructure, DiscreteDistribution, Instance,
                            fully_boosted)
from pricelab.opt import (build_lp, mechanism_residuals, optimal_revenue,
                          posted_price_solution, solve_opt)

LP_TOL = 1e-7


def one_item(atoms):
    return Instance(BoostStructure(1, 1, ()),
                    (DiscreteDistribution(atoms),))


class TestBuildLp:
    def test_variable_counts_single_item(self):
        lp = build_lp(one_item(((0.0, 0.5), (2.0, 0.5))))
        assert lp.num_profiles == 2
        assert lp.bundle_values.shape == (2, 2)

    def test_variable_counts_ring(self):
        lp = build_lp(gen_numerical_example())
        assert lp.num_profiles == 16
        assert lp.bundle_values.shape == (16, 16)  # 256 allocation variables

    def test_additive_valuations_are_sums(self):
        inst = gen_random(2, 1, supports=3, edge_density=0.0, seed=8)
        lp = build_lp(inst)
        for t in range(lp.num_profiles):
            for mask in range(4):
                expected = sum(lp.values[t, i] for i in range(2) if mask >> i & 1)
                assert lp.bundle_values[t, mask] == pytest.approx(expected, abs=1e-12)

    def test_variable_cap(self):
        inst = gen_random(6, 1, supports=4, edge_density=0.0, seed=0)
        with pytest.raises(CapExceeded):
            build_lp(inst)


class TestSolveOpt:
    def test_single_item_equals_posted_price_oracle(self):
        inst = one_item(((0.0, 0.5), (2.0, 0.5)))
        res = solve_opt(build_lp(inst))
        assert res.opt_revenue == pytest.approx(1.0, abs=LP_TOL)
        assert res.opt_revenue == pytest.approx(
            posted_price_revenue_curve(inst.marginals[0]), abs=LP_TOL)

    def test_single_item_three_atoms(self):
        inst = one_item(((0.0, 0.2), (1.0, 0.5), (3.0, 0.3)))
        res = solve_opt(build_lp(inst))
        assert res.opt_revenue == pytest.approx(
            posted_price_revenue_curve(inst.marginals[0]), abs=LP_TOL)

    def test_zero_value_instance(self):
        inst = one_item(((0.0, 1.0),))
        assert optimal_revenue(inst) == pytest.approx(0.0, abs=LP_TOL)

    def test_feasibility_and_nonnegative_payments(self):
        for seed in range(6):
            inst = gen_random(2, 1, supports=3, edge_density=0.5, seed=seed)
            res = solve_opt(build_lp(inst))
            assert max(res.residuals["simplex"], res.residuals["ir"],
                       res.residuals["ic"]) <= LP_TOL
            assert res.residuals["negative_payment"] <= LP_TOL

    def test_deterministic(self):
        inst = gen_random(2, 1, supports=3, edge_density=0.5, seed=4)
        assert optimal_revenue(inst) == optimal_revenue(inst)


class TestOptDominatesSimpleMechanisms:
    def test_additive_pair_beats_separate_and_bundle(self):
        for seed in range(6):
            inst = gen_random(2, 1, supports=3, edge_density=0.0, seed=seed)
            opt = optimal_revenue(inst)
            _, bundle = brev(inst)
            assert opt >= srev_additive(inst) - LP_TOL
            assert opt >= bundle.revenue - LP_TOL

    def test_posted_prices_are_feasible_and_dominated(self):
        rng = np.random.default_rng(19)
        for seed in range(6):
            inst = gen_random(2, 2, supports=3, edge_density=0.5, seed=seed)
            lp = build_lp(inst)
            opt = solve_opt(lp).opt_revenue
            for _ in range(4):
                prices = rng.uniform(0, 4, size=2)
                x, p = posted_price_solution(inst, lp, prices)
                res = mechanism_residuals(lp, x, p)
                assert max(res["simplex"], res["ir"], res["ic"]) <= 1e-9
                assert float(lp.probs @ p) <= opt + LP_TOL

    def test_reserve_prices_are_dominated_on_the_ring(self):
        inst = gen_numerical_example()
        lp = build_lp(inst)
        opt = solve_opt(lp).opt_revenue
        reserves = [monopoly_reserve(d).reserve for d in inst.marginals]
        x, p = posted_price_solution(inst, lp, reserves)
        assert float(lp.probs @ p) <= opt + LP_TOL


class TestBoostDominance:
    def test_fully_boosted_oracle_dominates(self):
        for seed in range(10):
            inst = gen_random(2, 2, supports=3, edge_density=0.6, seed=seed,
                              max_source_size=1)
            assert (optimal_revenue(inst)
                    <= optimal_revenue(fully_boosted(inst)) + 1e-6)

"""Named verification suites behind ``pricelab verify``.

Each suite returns a list of :class:`Assertion` records.  For an equality
check the margin is ``tolerance - |actual - expected|``; for an inequality
``lhs >= rhs`` it is ``lhs - rhs`` (possibly shifted by the stated
tolerance).  A non-negative margin passes.

Batches are generated deterministically from the suite seed; ``jobs`` bounds
the worker-thread count and never changes results or their order.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .additive_bounds import (check_better_of_bound, check_tail_brev,
                              check_variance_and_cantelli, cube_root_4)
from .dicut import (FIRE_ENUM_CAP, build_graph, exact_max_dicut,
                    expected_cut_weight)
from .instances import (gen_hypergraph_lb, gen_lb_standard,
                        gen_numerical_example, gen_random)
from .mechanisms import (best_separate_free, brev, bundle_proxy_distribution,
                         evaluate_revenue, monopoly_reserve, separate_free,
                         srev_additive)
from .model import MONEY_ATOL, Instance, boost_factor, full_boost_vector, fully_boosted
from .opt import optimal_revenue

LP_SLACK = 1e-6


@dataclass(frozen=True)
class Assertion:
    name: str
    passed: bool
    margin: float
    detail: str = ""


def _close(name: str, actual: float, expected: float,
           tol: float = MONEY_ATOL) -> Assertion:
    margin = tol - abs(actual - expected)
    return Assertion(name, margin >= 0, margin,
                     f"actual={actual!r} expected={expected!r}")


def _at_least(name: str, lhs: float, rhs: float, tol: float = MONEY_ATOL,
              detail: str = "") -> Assertion:
    margin = lhs - rhs
    return Assertion(name, margin >= -tol, margin,
                     detail or f"lhs={lhs!r} rhs={rhs!r}")


def _map_ordered(fn, items, jobs: int) -> list:
    if jobs <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _flatten(groups) -> list[Assertion]:
    return [a for group in groups for a in group]


# ---------------------------------------------------------------------------
# Golden-instance suites


def suite_numerical_example(**_) -> list[Assertion]:
    """Golden constants of the 4-item ring example."""
    inst = gen_numerical_example()
    out = []
    reserves = [monopoly_reserve(d) for d in inst.marginals]
    for i, (res, want_r, want_rev) in enumerate(
            zip(reserves, (2.0, 4.0, 2.0, 4.0), (1.0, 2.0, 1.0, 2.0))):
        out.append(_close(f"reserve[{i + 1}]", res.reserve, want_r))
        out.append(_close(f"reserve-revenue[{i + 1}]", res.revenue, want_rev))
    out.append(_close("sum-of-reserve-revenues", srev_additive(inst), 6.0))
    free, weight = exact_max_dicut(build_graph(inst))
    out.append(Assertion("max-dicut-free-set", free == frozenset({0, 2}),
                         0.0, f"free set (1-indexed) {sorted(j + 1 for j in free)}"))
    out.append(_close("max-dicut-weight", weight, 8.0))
    part = separate_free(inst, free)
    out.append(_close("free-set-exact-revenue",
                      evaluate_revenue(inst, part.prices).revenue, 8.0))
    price, rep = brev(inst)
    out.append(_close("grand-bundle-price", price, 12.0))
    out.append(_close("grand-bundle-revenue", rep.revenue, 7.5))
    return out


def suite_lb_standard(ns=(6, 8, 10, 12), **_) -> list[Assertion]:
    """Free-item scaling: giving item 1 away beats separate sale and
    bundling by a factor that grows linearly with the item count."""
    out = []
    prev_ratio = None
    for n in ns:
        inst = gen_lb_standard(n)
        s = srev_additive(inst)
        out.append(_close(f"n={n}: separate-revenue", s, float(n)))
        part = separate_free(inst, {0})
        rev = evaluate_revenue(inst, part.prices).revenue
        out.append(_at_least(f"n={n}: free-item-revenue >= n^2-1", rev, n * n - 1.0))
        _, b = brev(inst)
        ratio = rev / max(s, b.revenue)
        out.append(_at_least(f"n={n}: ratio >= n/4", ratio, n / 4.0,
                             detail=f"ratio={ratio:.4f} brev={b.revenue:.4f}"))
        if prev_ratio is not None:
            out.append(Assertion(f"n={n}: ratio strictly increasing",
                                 ratio > prev_ratio, ratio - prev_ratio,
                                 f"{prev_ratio:.4f} -> {ratio:.4f}"))
        prev_ratio = ratio
    return out


def suite_hypergraph_lb(m: int = 6, k: int = 2, **_) -> list[Assertion]:
    """Complete rank-k boost hypergraph: the rank-rule free set already
    earns the guaranteed share, and no bundle's proxy revenue beats the
    per-bundle cap."""
    inst = gen_hypergraph_lb(m, k)
    c = m / (2 * math.comb(m - 1, k))
    out = [
        _close("full-boost-factor", boost_factor(inst, 0, range(m)), 1 + m / 2),
        _close("rank", float(inst.rank), float(k), tol=0.0),
        _close("max-out-degree", float(inst.max_out_degree),
               float(math.comb(m - 1, k - 1) * (m - k)), tol=0.0),
    ]
    exp = expected_cut_weight(build_graph(inst), "rank", k=k)
    out.append(_at_least("rank-rule expected proxy revenue",
                         exp.value, (1 + m / 2) * m / (4 * k),
                         detail=f"exact={exp.value:.6f}"))
    worst = None
    pairs = 0
    for assign in itertools.product(range(3), repeat=m):
        bundle = [i for i, a in enumerate(assign) if a == 0]
        free = [i for i, a in enumerate(assign) if a == 1]
        if not bundle:
            continue
        pairs += 1
        res = monopoly_reserve(bundle_proxy_distribution(inst, bundle, free))
        cap = 4 * (1 + (math.comb(len(bundle) - 1, k) + math.comb(len(free), k)) * c)
        slack = cap - res.revenue
        if worst is None or slack < worst[0]:
            worst = (slack, bundle, free, res.revenue, cap)
    slack, bundle, free, rev, cap = worst
    out.append(Assertion(
        "per-bundle proxy revenue cap", slack >= -MONEY_ATOL, slack,
        f"{pairs} bundle/free pairs; tightest: bundle={bundle} free={free} "
        f"proxy={rev:.6f} cap={cap:.6f}"))
    return out


# ---------------------------------------------------------------------------
# Randomized batch suites


def _spawn_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def cut_expectation_batch(trials: int, seed: int) -> list[Instance]:
    """Random instances (m <= 6, K <= 2) whose cut graphs keep at most
    FIRE_ENUM_CAP hyperedges so the firing expectation stays exact."""
    out = []
    for i in range(trials):
        rng = np.random.default_rng(np.random.SeedSequence([seed, i]))
        for attempt in range(64):
            m = int(rng.integers(2, 7))
            layers = int(rng.integers(1, 3))
            max_source = int(rng.integers(1, 3))
            density = float(rng.uniform(0.05, 0.25))
            inst = gen_random(m, layers, supports=int(rng.integers(2, 4)),
                              edge_density=density,
                              boost_scale=float(rng.choice([0.5, 1.0, 2.0])),
                              seed=_spawn_seed(seed, 1000 * i + attempt),
                              max_source_size=max_source)
            if len(build_graph(inst).edge_sources) <= FIRE_ENUM_CAP:
                out.append(inst)
                break
        else:
            raise RuntimeError("could not draw a small enough instance")
    return out


def suite_cut_expectations(trials: int = 100, seed: int = 1, jobs: int = 1,
                           **_) -> list[Assertion]:
    """Every random free-set rule earns its guaranteed share of the total
    weight, and the exact max cut dominates all of them."""
    instances = cut_expectation_batch(trials, seed)

    def check(pair) -> list[Assertion]:
        idx, inst = pair
        graph = build_graph(inst)
        total = float(full_boost_vector(inst)
                      @ [monopoly_reserve(d).revenue for d in inst.marginals])
        k_eff = max(inst.rank, 1)
        d_eff = max(inst.max_out_degree, 1)
        rank_e = expected_cut_weight(graph, "rank", k=k_eff).value
        deg_e = expected_cut_weight(graph, "degree", d=d_eff).value
        _, best = exact_max_dicut(graph)
        margins = {
            f"rank >= total/{4 * k_eff}": rank_e - total / (4 * k_eff),
            f"degree >= total/{4 * d_eff}": deg_e - total / (4 * d_eff),
            "max-dicut >= rank expectation": best - rank_e,
            "max-dicut >= degree expectation": best - deg_e,
        }
        if inst.rank <= 1:
            pair_e = expected_cut_weight(graph, "pairwise").value
            margins["pairwise >= total/4"] = pair_e - total / 4
            margins["max-dicut >= pairwise expectation"] = best - pair_e
        tight = min(margins, key=margins.get)
        label = (f"instance {idx:03d} (m={inst.num_items} K={inst.num_layers} "
                 f"k={inst.rank} d={inst.max_out_degree} "
                 f"edges={len(graph.edge_sources)})")
        return [Assertion(label, min(margins.values()) >= -MONEY_ATOL,
                          min(margins.values()), f"tightest: {tight}")]

    return _flatten(_map_ordered(check, list(enumerate(instances)), jobs))


def dominance_batch(count: int, seed: int) -> list[Instance]:
    """Tiny two-item instances for the LP-oracle comparisons."""
    out = []
    for i in range(count):
        rng = np.random.default_rng(np.random.SeedSequence([seed, i]))
        out.append(gen_random(
            2, int(rng.integers(1, 3)),
            supports=[int(rng.integers(2, 4)), int(rng.integers(2, 4))],
            edge_density=float(rng.choice([0.25, 0.5, 1.0])),
            boost_scale=float(rng.choice([0.5, 1.0, 2.0])),
            seed=_spawn_seed(seed, i), max_source_size=1))
    return out


def suite_boost_dominance(count: int = 50, seed: int = 2025, jobs: int = 1,
                          **_) -> list[Assertion]:
    """Optimal revenue never exceeds optimal revenue of the fully boosted
    additive companion."""
    instances = dominance_batch(count, seed)

    def check(pair) -> list[Assertion]:
        idx, inst = pair
        opt = optimal_revenue(inst)
        opt_boosted = optimal_revenue(fully_boosted(inst))
        return [_at_least(f"instance {idx:03d}: boosted OPT dominates",
                          opt_boosted, opt, tol=LP_SLACK,
                          detail=f"opt={opt:.8f} boosted={opt_boosted:.8f}")]

    return _flatten(_map_ordered(check, list(enumerate(instances)), jobs))


def suite_pairwise_ratio(count: int = 50, seed: int = 2025, jobs: int = 1,
                         **_) -> list[Assertion]:
    """With pairwise boosts, the better of grand bundling and the best free
    set is a 12-approximation to the LP optimum."""
    instances = [(i, inst) for i, inst in enumerate(dominance_batch(count, seed))
                 if inst.rank == 1]

    def check(pair) -> list[Assertion]:
        idx, inst = pair
        opt = optimal_revenue(inst)
        _, bundle = brev(inst)
        _, sf = best_separate_free(inst)
        bound = 12 * max(bundle.revenue, sf.revenue)
        return [_at_least(f"instance {idx:03d}: 12x simple bound", bound, opt,
                          tol=LP_SLACK,
                          detail=f"opt={opt:.6f} brev={bundle.revenue:.6f} "
                                 f"best-free-set={sf.revenue:.6f}")]

    return _flatten(_map_ordered(check, instances, jobs))


def hypergraph_ratio_batch(count: int, seed: int) -> list[Instance]:
    """Three-item instances carrying at least one hyperedge, rank 1 or 2."""
    out = []
    for i in range(count):
        rng = np.random.default_rng(np.random.SeedSequence([seed, i]))
        for attempt in range(64):
            inst = gen_random(
                3, int(rng.integers(1, 3)), supports=int(rng.integers(2, 4)),
                edge_density=float(rng.uniform(0.2, 0.5)),
                boost_scale=float(rng.choice([0.5, 1.0, 2.0])),
                seed=_spawn_seed(seed, 1000 * i + attempt),
                max_source_size=int(rng.integers(1, 3)))
            if inst.rank >= 1:
                out.append(inst)
                break
        else:
            raise RuntimeError("could not draw an instance with edges")
    return out


def suite_hypergraph_ratio(count: int = 30, seed: int = 2025, jobs: int = 1,
                           **_) -> list[Assertion]:
    """Hypergraph boosts: the simple pair is an (8 min(d,k) + 4)-approximation."""
    instances = hypergraph_ratio_batch(count, seed)

    def check(pair) -> list[Assertion]:
        idx, inst = pair
        opt = optimal_revenue(inst)
        _, bundle = brev(inst)
        _, sf = best_separate_free(inst)
        coeff = 8 * min(inst.rank, inst.max_out_degree) + 4
        bound = coeff * max(bundle.revenue, sf.revenue)
        return [_at_least(
            f"instance {idx:03d}: {coeff}x simple bound", bound, opt,
            tol=LP_SLACK,
            detail=f"k={inst.rank} d={inst.max_out_degree} opt={opt:.6f} "
                   f"brev={bundle.revenue:.6f} best-free-set={sf.revenue:.6f}")]

    return _flatten(_map_ordered(check, list(enumerate(instances)), jobs))


def additive_batch(count: int, seed: int) -> list[Instance]:
    out = []
    for i in range(count):
        rng = np.random.default_rng(np.random.SeedSequence([seed, i]))
        m = int(rng.integers(2, 4))
        out.append(gen_random(
            m, 1, supports=[int(rng.integers(2, 5)) for _ in range(m)],
            edge_density=0.0, seed=_spawn_seed(seed, i)))
    return out


def suite_additive_bounds(count: int = 50, seed: int = 2025, jobs: int = 1,
                          a: float | None = None, **_) -> list[Assertion]:
    """Core/tail decomposition checks plus the parameterized better-of bound
    on edge-free instances (a defaults to {1, cube root of 4})."""
    a_values = (1.0, cube_root_4()) if a is None else (float(a),)
    instances = additive_batch(count, seed)

    def check(pair) -> list[Assertion]:
        idx, inst = pair
        out = []
        tail = check_tail_brev(inst)
        out.append(_at_least(f"instance {idx:03d}: tail <= bundle revenue",
                             tail.brev, tail.tail,
                             detail=f"tail={tail.tail:.6f} brev={tail.brev:.6f}"))
        opt = optimal_revenue(inst)
        for av in a_values:
            cant = check_variance_and_cantelli(inst, av)
            out.append(Assertion(
                f"instance {idx:03d}: variance+tail bound at a={av:.4f}",
                cant.passed,
                min(cant.var_margin, cant.cantelli_margin, cant.unit_margin),
                f"var={cant.var_core:.6f} cap={cant.var_cap:.6f} "
                f"tail-prob={cant.tail_prob:.6f} bound={cant.cantelli_bound:.6f}"))
            better = check_better_of_bound(inst, av, opt=opt, tol=LP_SLACK)
            margin = better.margin
            if abs(av - cube_root_4()) < 1e-12:
                margin = min(margin, better.max_form_margin)
            out.append(Assertion(
                f"instance {idx:03d}: better-of bound at a={av:.4f}",
                better.passed, margin,
                f"opt={better.opt:.6f} srev={better.srev:.6f} "
                f"brev={better.brev:.6f} bound={better.bound:.6f} "
                f"max-form={better.max_form_bound:.6f}"))
        return out

    return _flatten(_map_ordered(check, list(enumerate(instances)), jobs))


SUITES = {
    "numerical-example": suite_numerical_example,
    "lb-standard": suite_lb_standard,
    "hypergraph-lb": suite_hypergraph_lb,
    "lemma-4-2": suite_boost_dominance,
    "theorem-4-1": suite_pairwise_ratio,
    "theorem-5-1": suite_hypergraph_ratio,
    "appendix-a": suite_additive_bounds,
    "cut-expectations": suite_cut_expectations,
}

"""Pricing mechanisms and exact / Monte-Carlo revenue evaluation.

Covers monopoly reserves, separate sale, grand bundling, the free-set
mechanism (give a set away, price the rest at boost-inflated reserves), and
bundle-menu pricing with its proxy revenue undercount.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .buyer import BundleMenu, as_prices, best_response_bundles
from .errors import CapExceeded
from .model import (PROFILE_CAP, DiscreteDistribution, Instance, boost_factor,
                    enumerate_profiles, full_boost_vector, sample_profiles,
                    subset_boost_table)

MC_DEFAULT_SAMPLES = 10**6
MC_BLOCK = 1 << 16
TABLE_CAP_ITEMS = 20


@dataclass(frozen=True)
class ReserveResult:
    """Monopoly reserve price and its revenue for one distribution."""

    reserve: float
    revenue: float


@dataclass(frozen=True)
class FreeSetPartition:
    """A free set, the boost-inflated prices it induces, and the revenue
    lower bound sum(eta_i(free) * R_i) over the priced items."""

    free_set: frozenset[int]
    prices: np.ndarray
    lower_bound: float


@dataclass(frozen=True)
class RevenueReport:
    mechanism: str
    revenue: float
    mode: str = "exact"
    samples: int | None = None
    seed: int | None = None
    std_error: float | None = None

    def __post_init__(self):
        if (self.mode == "monte-carlo") != (self.std_error is not None):
            raise ValueError("std_error is reported exactly for monte-carlo mode")


def monopoly_reserve(dist: DiscreteDistribution) -> ReserveResult:
    """Best posted price restricted to the support (ties -> smallest price).

    For a discrete distribution an optimal posted price always sits on a
    support value, so nothing is lost by the restriction.
    """
    probs = np.array(dist.probs)
    survival = probs[::-1].cumsum()[::-1]
    best_v, best_r = 0.0, -1.0
    for v, s in zip(dist.values, survival):
        r = v * s
        if r > best_r:
            best_v, best_r = v, r
    return ReserveResult(reserve=best_v, revenue=float(best_r))


def srev_additive(inst: Instance) -> float:
    """Sum of per-item monopoly revenues (edges ignored).

    On an edge-free instance this is the exact revenue guarantee of selling
    separately at reserves; pass the fully boosted companion to price the
    inflated marginals instead.
    """
    return float(sum(monopoly_reserve(d).revenue for d in inst.marginals))


def _aggregate(values: np.ndarray, weights: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    uniq, inverse = np.unique(values, return_inverse=True)
    agg = np.zeros(uniq.size, dtype=np.float64)
    np.add.at(agg, inverse, weights)
    return uniq, agg


def _reserve_on(values: np.ndarray, probs: np.ndarray) -> ReserveResult:
    survival = probs[::-1].cumsum()[::-1]
    best_v, best_r = 0.0, -1.0
    for v, s in zip(values, survival):
        r = v * s
        if r > best_r:
            best_v, best_r = float(v), float(r)
    return ReserveResult(best_v, best_r)


def brev(inst: Instance, *, profile_cap: int = PROFILE_CAP,
         mc_samples: int = MC_DEFAULT_SAMPLES, seed: int = 0) -> tuple[float, RevenueReport]:
    """Optimal grand-bundle price and its revenue.

    The buyer values the grand bundle at sum(eta_i([m]) * t_i); the bundle
    price is the monopoly reserve of that one-dimensional distribution,
    computed exactly when the profile cap permits, else by Monte Carlo.
    """
    eta = full_boost_vector(inst)
    try:
        values, probs = enumerate_profiles(inst, cap=profile_cap)
    except CapExceeded:
        rng = np.random.default_rng(np.random.SeedSequence([seed]))
        draws = sample_profiles(inst, rng, mc_samples) @ eta
        uniq, counts = _aggregate(draws, np.ones(draws.size))
        res = _reserve_on(uniq, counts / draws.size)
        q = float((draws >= res.reserve).mean())
        err = res.reserve * math.sqrt(max(q * (1 - q), 0.0) / mc_samples)
        return res.reserve, RevenueReport("bundle", res.revenue, "monte-carlo",
                                          samples=mc_samples, seed=seed, std_error=err)
    uniq, agg = _aggregate(values @ eta, probs)
    res = _reserve_on(uniq, agg)
    return res.reserve, RevenueReport("bundle", res.revenue)


def separate_free(inst: Instance, free_set) -> FreeSetPartition:
    """Give ``free_set`` away and price each remaining item at its reserve
    inflated by the boost it receives from the free set alone."""
    free = frozenset(int(j) for j in free_set)
    prices = np.zeros(inst.num_items, dtype=np.float64)
    lower = 0.0
    for i in range(inst.num_items):
        if i in free:
            continue
        res = monopoly_reserve(inst.marginals[i])
        eta = boost_factor(inst, i, free)
        prices[i] = eta * res.reserve
        lower += eta * res.revenue
    return FreeSetPartition(free_set=free, prices=prices, lower_bound=lower)


def _exact_payment_expectation(inst: Instance, prices: np.ndarray,
                               values: np.ndarray, probs: np.ndarray) -> float:
    m = inst.num_items
    if m <= TABLE_CAP_ITEMS:
        table = subset_boost_table(inst)
        masks = kernels.best_responses(table, prices, values)
        bits = np.uint64(1) << np.arange(m, dtype=np.uint64)
        paysum = ((np.arange(1 << m, dtype=np.uint64)[:, None] & bits) != 0) @ prices
        return float(probs @ paysum[masks])
    ea = inst.boosts.edge_arrays()
    total = 0.0
    for t, p in zip(values, probs):
        mask, _, pay = kernels.best_response_stream(m, inst.num_layers, *ea, prices, t)
        total += p * pay
    return float(total)


def evaluate_revenue(inst: Instance, prices, mode: str = "exact", *,
                     mc_samples: int = MC_DEFAULT_SAMPLES, seed: int = 0,
                     profile_cap: int = PROFILE_CAP) -> RevenueReport:
    """Expected buyer payment under item prices and exact best response.

    ``mode='exact'`` enumerates the product distribution (CapExceeded when
    over the profile cap); ``mode='mc'`` averages over ``mc_samples`` seeded
    draws, streamed in fixed blocks whose RNGs derive from (seed, block), so
    the estimate is reproducible and reduction-order independent.
    """
    prices = as_prices(inst, prices)
    if mode == "exact":
        values, probs = enumerate_profiles(inst, cap=profile_cap)
        revenue = _exact_payment_expectation(inst, prices, values, probs)
        return RevenueReport("posted-prices", revenue)
    if mode != "mc":
        raise ValueError(f"unknown mode {mode!r}")
    m = inst.num_items
    if m > TABLE_CAP_ITEMS:
        raise CapExceeded(f"Monte Carlo path needs m <= {TABLE_CAP_ITEMS}")
    table = subset_boost_table(inst)
    bits = np.uint64(1) << np.arange(m, dtype=np.uint64)
    paysum = ((np.arange(1 << m, dtype=np.uint64)[:, None] & bits) != 0) @ prices
    total = 0.0
    total_sq = 0.0
    done = 0
    block_idx = 0
    while done < mc_samples:
        count = min(MC_BLOCK, mc_samples - done)
        rng = np.random.default_rng(np.random.SeedSequence([seed, block_idx]))
        draws = sample_profiles(inst, rng, count)
        pays = paysum[kernels.best_responses(table, prices, draws)]
        total += float(pays.sum())
        total_sq += float((pays * pays).sum())
        done += count
        block_idx += 1
    mean = total / mc_samples
    var = max(total_sq - mc_samples * mean * mean, 0.0) / max(mc_samples - 1, 1)
    return RevenueReport("posted-prices", mean, "monte-carlo", samples=mc_samples,
                         seed=seed, std_error=math.sqrt(var / mc_samples))


def bundle_proxy_distribution(inst: Instance, bundle, free_set,
                              cap: int = PROFILE_CAP) -> DiscreteDistribution:
    """Distribution of a bundle's proxy value: each member's base value scaled
    by the boost it gets from the bundle plus the free set, summed over the
    bundle (boosts from anywhere else are ignored)."""
    bundle = sorted(int(j) for j in bundle)
    context = frozenset(bundle) | frozenset(int(j) for j in free_set)
    count = math.prod(len(inst.marginals[i].atoms) for i in bundle)
    if count > cap:
        raise CapExceeded(f"bundle support product {count} exceeds {cap}")
    coeff = {i: boost_factor(inst, i, context) for i in bundle}
    values = np.zeros(1)
    probs = np.ones(1)
    for i in bundle:
        v = coeff[i] * np.array(inst.marginals[i].values)
        p = np.array(inst.marginals[i].probs)
        values = (values[:, None] + v[None, :]).ravel()
        probs = (probs[:, None] * p[None, :]).ravel()
    uniq, agg = _aggregate(values, probs)
    return DiscreteDistribution(tuple(zip(uniq.tolist(), agg.tolist())))


def bundle_pricing(inst: Instance, free_set, bundles, *,
                   cap: int = PROFILE_CAP) -> BundleMenu:
    """Menu pricing each bundle at the monopoly reserve of its proxy-value
    distribution (singleton bundles reproduce the free-set item prices)."""
    prices = tuple(
        monopoly_reserve(bundle_proxy_distribution(inst, b, free_set, cap)).reserve
        for b in bundles)
    return BundleMenu(bundles=tuple(frozenset(b) for b in bundles),
                      prices=prices, free_set=frozenset(free_set))


def proxy_revenue(inst: Instance, menu: BundleMenu, *, cap: int = PROFILE_CAP) -> float:
    """Sum over bundles of price times the probability that the bundle's
    proxy value meets its price (each bundle treated as sold independently);
    undercounts the true menu revenue."""
    total = 0.0
    for b, q in zip(menu.bundles, menu.prices):
        dist = bundle_proxy_distribution(inst, b, menu.free_set, cap)
        sell = sum(p for v, p in dist.atoms if v >= q)
        total += q * sell
    return float(total)


def evaluate_menu_revenue(inst: Instance, menu: BundleMenu, *,
                          profile_cap: int = PROFILE_CAP) -> RevenueReport:
    """Exact expected payment for a bundle menu under full-valuation buyer
    best response (the buyer may combine bundles to unlock cross boosts)."""
    values, probs = enumerate_profiles(inst, cap=profile_cap)
    total = 0.0
    for t, p in zip(values, probs):
        chosen = best_response_bundles(inst, menu, t)
        total += p * sum(menu.prices[j] for j in chosen)
    return RevenueReport("bundle-menu", float(total))


def best_separate_free(inst: Instance, *, profile_cap: int = PROFILE_CAP
                       ) -> tuple[FreeSetPartition, RevenueReport]:
    """Exhaustively best free set by exact revenue (first maximizer in mask
    order on ties).  Intended for oracle-scale instances."""
    m = inst.num_items
    values, probs = enumerate_profiles(inst, cap=profile_cap)
    table = subset_boost_table(inst)
    bits = np.uint64(1) << np.arange(m, dtype=np.uint64)
    member = (np.arange(1 << m, dtype=np.uint64)[:, None] & bits) != 0
    best: tuple[FreeSetPartition, float] | None = None
    for fmask in range(1 << m):
        part = separate_free(inst, [i for i in range(m) if fmask >> i & 1])
        paysum = member @ part.prices
        masks = kernels.best_responses(table, part.prices, values)
        revenue = float(probs @ paysum[masks])
        if best is None or revenue > best[1]:
            best = (part, revenue)
    part, revenue = best
    return part, RevenueReport("separate-free", revenue)

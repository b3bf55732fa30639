"""Weighted digraph whose directed cuts lower-bound free-set revenue, plus
exact and randomized free-set selection.

The graph has a virtual source s with an edge (s, i) of weight R_i for every
item, and a hyperedge (T, i) of weight boost * R_i for every boost edge kept
by the per-item active layer on the grand bundle.  The weight of the cut
from {s} + F to the priced side equals the free-set mechanism's revenue
lower bound when there is a single layer (and is at most it otherwise).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import kernels
from .errors import CapExceeded
from .model import Instance, active_layer, mask_of, set_of
from .mechanisms import monopoly_reserve

DICUT_ENUM_CAP = 24
FIRE_ENUM_CAP = 20


@dataclass(frozen=True)
class CutGraph:
    num_items: int
    source_weights: np.ndarray
    edge_sources: tuple[frozenset[int], ...]
    edge_targets: tuple[int, ...]
    edge_weights: np.ndarray
    edge_masks: np.ndarray = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "source_weights",
                           np.asarray(self.source_weights, dtype=np.float64))
        object.__setattr__(self, "edge_weights",
                           np.asarray(self.edge_weights, dtype=np.float64))
        object.__setattr__(self, "edge_masks",
                           np.array([mask_of(s) for s in self.edge_sources],
                                    dtype=np.uint64))

    @property
    def total_weight(self) -> float:
        """Sum of all edge weights = sum_i eta_i([m]) * R_i (single layer)."""
        return float(self.source_weights.sum() + self.edge_weights.sum())


def build_graph(inst: Instance) -> CutGraph:
    """Cut graph for an instance; multi-layer boosts keep only each target's
    active layer on the grand bundle, and zero-boost edges are dropped."""
    full = range(inst.num_items)
    l_star = [active_layer(inst, i, full) for i in range(inst.num_items)]
    reserves = [monopoly_reserve(d).revenue for d in inst.marginals]
    sources, targets, weights = [], [], []
    for e in inst.boosts.edges:
        if e.layer == l_star[e.target] and e.boost > 0:
            sources.append(e.source)
            targets.append(e.target)
            weights.append(e.boost * reserves[e.target])
    return CutGraph(num_items=inst.num_items,
                    source_weights=np.array(reserves, dtype=np.float64),
                    edge_sources=tuple(sources), edge_targets=tuple(targets),
                    edge_weights=np.array(weights, dtype=np.float64))


def cut_weight(graph: CutGraph, free_set) -> float:
    """Weight of the cut from {s} + free_set to the priced items: a hyperedge
    crosses iff its whole source is free and its target priced."""
    free = frozenset(int(j) for j in free_set)
    total = sum(w for i, w in enumerate(graph.source_weights) if i not in free)
    for src, tgt, w in zip(graph.edge_sources, graph.edge_targets, graph.edge_weights):
        if tgt not in free and src <= free:
            total += w
    return float(total)


def exact_max_dicut(graph: CutGraph, cap: int = DICUT_ENUM_CAP) -> tuple[frozenset[int], float]:
    """Best free set over all 2^m, ties to the set-lex smallest."""
    if graph.num_items > cap:
        raise CapExceeded(f"exact dicut enumerates 2^m sets; m={graph.num_items} > {cap}")
    mask, weight = kernels.max_dicut(
        graph.num_items, graph.source_weights, graph.edge_masks,
        np.asarray(graph.edge_targets, dtype=np.int64), graph.edge_weights)
    return set_of(mask), float(weight)


def sample_free_set_pairwise(rng: np.random.Generator, num_items: int) -> frozenset[int]:
    """Each item free independently with probability 1/2."""
    return frozenset(np.flatnonzero(rng.random(num_items) < 0.5).tolist())


def sample_free_set_rank(rng: np.random.Generator, num_items: int, k: int) -> frozenset[int]:
    """Each item free independently with probability 1 - 1/(2k); at k = 1
    this is the pairwise rule."""
    if k < 1:
        raise ValueError("rank must be at least 1")
    return frozenset(np.flatnonzero(rng.random(num_items) < 1 - 0.5 / k).tolist())


def sample_free_set_degree(rng: np.random.Generator, graph: CutGraph, d: int) -> frozenset[int]:
    """Walk the hyperedges in declaration order; each fires with probability
    1/(2d) and moves its whole source set to the free side.  Items left
    unassigned are priced."""
    if d < 1:
        raise ValueError("degree must be at least 1")
    free: set[int] = set()
    fire = rng.random(len(graph.edge_sources)) < 0.5 / d
    for src, hit in zip(graph.edge_sources, fire):
        if hit:
            free |= src
    return frozenset(free)


class CutExpectation(NamedTuple):
    value: float
    std_error: float | None


def expected_cut_weight(graph: CutGraph, construction: str, *,
                        k: int | None = None, d: int | None = None,
                        fire_cap: int = FIRE_ENUM_CAP,
                        mc_samples: int = 200_000, seed: int = 0) -> CutExpectation:
    """Exact expected cut weight under a random free-set construction.

    ``pairwise``/``rank`` use per-edge crossing probabilities (items are
    independent); ``degree`` enumerates all 2^E edge-fire outcomes up to
    ``fire_cap`` edges and falls back to seeded Monte Carlo (with a reported
    standard error) beyond it.
    """
    if construction == "pairwise":
        free_p, priced_p = 0.5, 0.5
    elif construction == "rank":
        if k is None or k < 1:
            raise ValueError("rank construction needs k >= 1")
        free_p, priced_p = 1 - 0.5 / k, 0.5 / k
    elif construction == "degree":
        if d is None or d < 1:
            raise ValueError("degree construction needs d >= 1")
        n_edges = len(graph.edge_sources)
        if n_edges <= fire_cap:
            value = kernels.degree_fire_expectation(
                graph.num_items, graph.source_weights, graph.edge_masks,
                np.asarray(graph.edge_targets, dtype=np.int64),
                graph.edge_weights, 0.5 / d)
            return CutExpectation(float(value), None)
        rng = np.random.default_rng(np.random.SeedSequence([seed]))
        draws = np.array([cut_weight(graph, sample_free_set_degree(rng, graph, d))
                          for _ in range(mc_samples)])
        return CutExpectation(float(draws.mean()),
                              float(draws.std(ddof=1) / math.sqrt(mc_samples)))
    else:
        raise ValueError(f"unknown construction {construction!r}")
    total = float(graph.source_weights.sum() * priced_p)
    for src, w in zip(graph.edge_sources, graph.edge_weights):
        total += float(w) * free_p ** len(src) * priced_p
    return CutExpectation(total, None)


def local_search_dicut(graph: CutGraph, restarts: int = 16,
                       rng: np.random.Generator | None = None) -> tuple[frozenset[int], float]:
    """Single-item-flip hill climbing from the empty set plus random starts;
    the result is at least every one-flip neighbor and every start."""
    rng = rng or np.random.default_rng(0)
    m = graph.num_items
    best: tuple[float, frozenset[int]] | None = None
    for attempt in range(max(restarts, 1)):
        free = set() if attempt == 0 else set(sample_free_set_pairwise(rng, m))
        weight = cut_weight(graph, free)
        improved = True
        while improved:
            improved = False
            for i in range(m):
                flipped = free ^ {i}
                w = cut_weight(graph, flipped)
                if w > weight:
                    free, weight = flipped, w
                    improved = True
        if best is None or weight > best[0]:
            best = (weight, frozenset(free))
    return best[1], best[0]

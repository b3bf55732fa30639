"""Core data model: item value distributions, the boost hypergraph, and
valuation evaluation.

A buyer's value for a bundle S is ``sum_{i in S} eta_i(S) * t_i`` where the
boost factor ``eta_i(S)`` is 1 plus the best single-layer total of boosts
whose source sets lie inside S minus i.  Items and layers are 0-indexed
throughout the package; serialization converts to 1-indexed external form.

Everything here is immutable after construction and safe to share across
workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import CapExceeded, InstanceFormatError

MONEY_ATOL = 1e-9
PROFILE_CAP = 10**6


@dataclass(frozen=True)
class DiscreteDistribution:
    """Finite value distribution: ((value, prob), ...) sorted by value.

    Values are distinct, nonnegative and strictly ascending; probabilities
    are in (0, 1] and sum to 1 within 1e-9.  Zero-probability atoms are
    rejected rather than dropped so file round-trips stay exact.
    """

    atoms: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if not self.atoms:
            raise InstanceFormatError("distribution needs at least one atom")
        atoms = tuple((float(v), float(p)) for v, p in self.atoms)
        object.__setattr__(self, "atoms", atoms)
        total = 0.0
        prev = -1.0
        for v, p in atoms:
            if v < 0:
                raise InstanceFormatError(f"negative value {v}")
            if v <= prev:
                raise InstanceFormatError("values must be distinct and ascending")
            if not 0.0 < p <= 1.0:
                raise InstanceFormatError(f"atom probability {p} outside (0, 1]")
            prev = v
            total += p
        if abs(total - 1.0) > MONEY_ATOL:
            raise InstanceFormatError(f"probabilities sum to {total!r}, not 1")

    @property
    def values(self) -> tuple[float, ...]:
        return tuple(v for v, _ in self.atoms)

    @property
    def probs(self) -> tuple[float, ...]:
        return tuple(p for _, p in self.atoms)

    def expectation(self) -> float:
        return float(sum(v * p for v, p in self.atoms))

    def scaled(self, factor: float) -> "DiscreteDistribution":
        """Distribution of ``factor * X`` (factor > 0 keeps atoms ordered)."""
        if factor <= 0:
            raise ValueError("scale factor must be positive")
        return DiscreteDistribution(tuple((factor * v, p) for v, p in self.atoms))


@dataclass(frozen=True)
class Hyperedge:
    """Directed boost: owning all of ``source`` boosts ``target`` by ``boost``
    inside layer ``layer``."""

    source: frozenset[int]
    target: int
    layer: int
    boost: float

    def __post_init__(self):
        object.__setattr__(self, "source", frozenset(int(j) for j in self.source))
        object.__setattr__(self, "boost", float(self.boost))
        if not self.source:
            raise InstanceFormatError("hyperedge source must be nonempty")
        if self.target in self.source:
            raise InstanceFormatError(
                f"edge target {self.target} inside its own source {sorted(self.source)}")
        if self.boost < 0:
            raise InstanceFormatError(f"negative boost {self.boost}")

    @property
    def source_mask(self) -> int:
        return sum(1 << j for j in self.source)


@dataclass(frozen=True)
class BoostStructure:
    """Layered boost hypergraph on ``num_items`` items.

    ``rank`` is the largest source-set size (0 with no edges) and
    ``max_out_degree`` the largest number of edges whose source contains a
    fixed item.  Edge declaration order is preserved; the degree-rule
    sampler consumes edges in this order.
    """

    num_items: int
    num_layers: int
    edges: tuple[Hyperedge, ...]
    rank: int = field(init=False, compare=False)
    max_out_degree: int = field(init=False, compare=False)

    def __post_init__(self):
        if self.num_items < 1:
            raise InstanceFormatError("need at least one item")
        if self.num_layers < 1:
            raise InstanceFormatError("need at least one layer")
        if self.num_items > 63:
            raise InstanceFormatError("bitmask kernels support at most 63 items")
        object.__setattr__(self, "edges", tuple(self.edges))
        seen = set()
        out_deg = [0] * self.num_items
        rank = 0
        for e in self.edges:
            if not 0 <= e.target < self.num_items:
                raise InstanceFormatError(f"edge target {e.target} out of range")
            if any(not 0 <= j < self.num_items for j in e.source):
                raise InstanceFormatError(f"edge source {sorted(e.source)} out of range")
            if not 0 <= e.layer < self.num_layers:
                raise InstanceFormatError(f"edge layer {e.layer} out of range")
            key = (e.source, e.target, e.layer)
            if key in seen:
                raise InstanceFormatError(
                    f"duplicate edge ({sorted(e.source)} -> {e.target}, layer {e.layer})")
            seen.add(key)
            rank = max(rank, len(e.source))
            for j in e.source:
                out_deg[j] += 1
        object.__setattr__(self, "rank", rank)
        object.__setattr__(self, "max_out_degree", max(out_deg, default=0))
        object.__setattr__(self, "_source_masks",
                           np.array([e.source_mask for e in self.edges], dtype=np.uint64))
        object.__setattr__(self, "_targets",
                           np.array([e.target for e in self.edges], dtype=np.int64))
        object.__setattr__(self, "_layers",
                           np.array([e.layer for e in self.edges], dtype=np.int64))
        object.__setattr__(self, "_boosts",
                           np.array([e.boost for e in self.edges], dtype=np.float64))

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """(source masks, targets, layers, boosts) in declaration order."""
        return self._source_masks, self._targets, self._layers, self._boosts


@dataclass(frozen=True)
class Instance:
    """A boost structure plus the product distribution of base values."""

    boosts: BoostStructure
    marginals: tuple[DiscreteDistribution, ...]

    def __post_init__(self):
        object.__setattr__(self, "marginals", tuple(self.marginals))
        if len(self.marginals) != self.boosts.num_items:
            raise InstanceFormatError(
                f"{len(self.marginals)} marginals for {self.boosts.num_items} items")

    @property
    def num_items(self) -> int:
        return self.boosts.num_items

    @property
    def num_layers(self) -> int:
        return self.boosts.num_layers

    @property
    def rank(self) -> int:
        return self.boosts.rank

    @property
    def max_out_degree(self) -> int:
        return self.boosts.max_out_degree

    def support_sizes(self) -> tuple[int, ...]:
        return tuple(len(d.atoms) for d in self.marginals)


def _check_item(inst: Instance, i: int) -> None:
    if not 0 <= i < inst.num_items:
        raise IndexError(f"item {i} out of range for {inst.num_items} items")


def _as_item_set(inst: Instance, items) -> frozenset[int]:
    s = frozenset(int(j) for j in items)
    for j in s:
        _check_item(inst, j)
    return s


def boost_factor(inst: Instance, i: int, items) -> float:
    """eta_i(S): 1 plus the best single-layer boost total from sources inside
    S minus i.  Independent of whether i itself is in S."""
    _check_item(inst, i)
    s = _as_item_set(inst, items) - {i}
    sums = [0.0] * inst.num_layers
    for e in inst.boosts.edges:
        if e.target == i and e.source <= s:
            sums[e.layer] += e.boost
    return 1.0 + max(sums)


def active_layer(inst: Instance, i: int, items) -> int:
    """Smallest (0-based) layer index achieving the boost-factor maximum."""
    _check_item(inst, i)
    s = _as_item_set(inst, items) - {i}
    sums = [0.0] * inst.num_layers
    for e in inst.boosts.edges:
        if e.target == i and e.source <= s:
            sums[e.layer] += e.boost
    return max(range(inst.num_layers), key=lambda l: (sums[l], -l))


def full_boost_vector(inst: Instance) -> np.ndarray:
    """eta_i([m]) for every item: the largest boost factor each item can get."""
    full = range(inst.num_items)
    return np.array([boost_factor(inst, i, full) for i in range(inst.num_items)])


def valuation(inst: Instance, t, items) -> float:
    """v(t, S) = sum over i in S of eta_i(S) * t_i (0 for the empty set)."""
    t = np.asarray(t, dtype=np.float64)
    if t.shape != (inst.num_items,):
        raise ValueError(f"type profile must have {inst.num_items} coordinates")
    s = _as_item_set(inst, items)
    return float(sum(boost_factor(inst, i, s) * t[i] for i in sorted(s)))


def fully_boosted(inst: Instance) -> Instance:
    """The additive companion instance: every support value of item i is
    scaled by eta_i([m]) and all edges are removed (idempotent up to the
    trivial unit boost)."""
    eta = full_boost_vector(inst)
    marginals = []
    for i, dist in enumerate(inst.marginals):
        if eta[i] == 1.0:
            marginals.append(dist)
        else:
            marginals.append(DiscreteDistribution(
                tuple((eta[i] * v, p) for v, p in dist.atoms)))
    return Instance(BoostStructure(inst.num_items, 1, ()), tuple(marginals))


def profile_count(inst: Instance) -> int:
    return math.prod(inst.support_sizes())


def enumerate_profiles(inst: Instance, cap: int = PROFILE_CAP) -> tuple[np.ndarray, np.ndarray]:
    """Materialize the product distribution: (values (P, m), probs (P,)).

    Raises :class:`CapExceeded` when the support product exceeds ``cap``
    (the caller should switch to Monte Carlo).
    """
    count = profile_count(inst)
    if count > cap:
        raise CapExceeded(f"{count} profiles exceed the cap of {cap}")
    m = inst.num_items
    values = np.empty((count, m), dtype=np.float64)
    probs = np.ones(count, dtype=np.float64)
    rep = count
    for i, dist in enumerate(inst.marginals):
        k = len(dist.atoms)
        rep //= k
        tile = count // (rep * k)
        col_vals = np.repeat(np.array(dist.values), rep)
        col_probs = np.repeat(np.array(dist.probs), rep)
        values[:, i] = np.tile(col_vals, tile)
        probs *= np.tile(col_probs, tile)
    return values, probs


def sample_profiles(inst: Instance, rng: np.random.Generator, count: int) -> np.ndarray:
    """Draw ``count`` independent type profiles as a (count, m) array."""
    out = np.empty((count, inst.num_items), dtype=np.float64)
    for i, dist in enumerate(inst.marginals):
        vals = np.array(dist.values)
        out[:, i] = vals[rng.choice(len(vals), size=count, p=np.array(dist.probs))]
    return out


def subset_boost_table(inst: Instance) -> np.ndarray:
    """(2^m, m) table of eta_i(S) for every bundle mask S (kernel-backed)."""
    masks, targets, layers, boosts = inst.boosts.edge_arrays()
    return kernels.boost_table(inst.num_items, inst.num_layers,
                               masks, targets, layers, boosts)


def mask_of(items) -> int:
    return sum(1 << int(j) for j in set(items))


def set_of(mask: int) -> frozenset[int]:
    return frozenset(i for i in range(64) if mask >> i & 1)

"""Canonical and random instance generators plus the on-disk format.

Files are UTF-8 JSON with 1-indexed items and layers:

    {"schema": 1, "m": 4, "K": 1,
     "marginals": [[[value, prob], ...], ...],
     "edges": [{"source": [1], "target": 2, "layer": 1, "boost": 1.0}, ...],
     "meta": {...}}

Numbers round-trip at full double precision; loading re-validates every
invariant.  Edge order is preserved (the degree-rule sampler walks edges in
declaration order).
"""

from __future__ import annotations

import hashlib
import itertools
import json
import math
from pathlib import Path

import numpy as np

from .errors import InstanceFormatError
from .model import BoostStructure, DiscreteDistribution, Hyperedge, Instance

SCHEMA_VERSION = 1
DEFAULT_VALUE_GRID = tuple(float(v) for v in range(10))
EDGE_BUDGET = 200_000


def gen_numerical_example() -> Instance:
    """Four items in a ring of unit boosts: 1 boosts 2, 2 boosts 3, 3 boosts
    4, 4 boosts 1 (1-indexed); odd items are worth 2 and even items 4, each
    with probability one half."""
    low = DiscreteDistribution(((0.0, 0.5), (2.0, 0.5)))
    high = DiscreteDistribution(((0.0, 0.5), (4.0, 0.5)))
    edges = (
        Hyperedge(frozenset({0}), 1, 0, 1.0),
        Hyperedge(frozenset({1}), 2, 0, 1.0),
        Hyperedge(frozenset({2}), 3, 0, 1.0),
        Hyperedge(frozenset({3}), 0, 0, 1.0),
    )
    return Instance(BoostStructure(4, 1, edges), (low, high, low, high))


def gen_lb_standard(n: int) -> Instance:
    """n items where item i is worth 2^i with probability 2^-i and item 1
    boosts every other item by a factor n: separate sale and grand bundling
    both earn O(n) while giving item 1 away earns about n^2."""
    if n < 2:
        raise ValueError("need at least two items")
    marginals = tuple(
        DiscreteDistribution(((0.0, 1.0 - 2.0 ** -i), (2.0 ** i, 2.0 ** -i)))
        for i in range(1, n + 1))
    edges = tuple(Hyperedge(frozenset({0}), i, 0, float(n)) for i in range(1, n))
    return Instance(BoostStructure(n, 1, edges), marginals)


def gen_hypergraph_lb(m: int, k: int, *, edge_budget: int = EDGE_BUDGET) -> Instance:
    """Same heavy-tailed marginals as :func:`gen_lb_standard`, with the
    complete rank-k hypergraph of boosts c = m / (2 C(m-1, k)) so that every
    item's full boost factor is exactly 1 + m/2."""
    if not 1 <= k <= m - 1:
        raise ValueError("need 1 <= k <= m - 1")
    count = m * math.comb(m - 1, k)
    if count > edge_budget:
        raise ValueError(f"{count} edges exceed the budget of {edge_budget}")
    c = m / (2 * math.comb(m - 1, k))
    marginals = tuple(
        DiscreteDistribution(((0.0, 1.0 - 2.0 ** -i), (2.0 ** i, 2.0 ** -i)))
        for i in range(1, m + 1))
    edges = []
    for target in range(m):
        others = [j for j in range(m) if j != target]
        for source in itertools.combinations(others, k):
            edges.append(Hyperedge(frozenset(source), target, 0, c))
    return Instance(BoostStructure(m, 1, tuple(edges)), marginals)


def gen_random(num_items: int, num_layers: int = 1, supports=2,
               edge_density: float = 0.3, boost_scale: float = 1.0,
               seed: int = 0, *, max_source_size: int = 1,
               value_grid=DEFAULT_VALUE_GRID) -> Instance:
    """Seed-reproducible random instance: marginals with the given support
    sizes on a bounded value grid, and each candidate hyperedge (source size
    up to ``max_source_size``) included independently with probability
    ``edge_density`` and a quarter-step boost scaled by ``boost_scale``."""
    if num_items < 1 or num_layers < 1 or max_source_size < 1:
        raise ValueError("parameters must be positive")
    rng = np.random.default_rng(np.random.SeedSequence([seed]))
    sizes = ([int(supports)] * num_items if np.isscalar(supports)
             else [int(s) for s in supports])
    if len(sizes) != num_items:
        raise ValueError("one support size per item required")
    grid = np.asarray(sorted(set(float(v) for v in value_grid)))
    marginals = []
    for s in sizes:
        if not 1 <= s <= grid.size:
            raise ValueError(f"support size {s} not in [1, {grid.size}]")
        vals = np.sort(rng.choice(grid, size=s, replace=False))
        probs = rng.uniform(0.1, 1.0, size=s)
        probs /= probs.sum()
        marginals.append(DiscreteDistribution(tuple(zip(vals.tolist(), probs.tolist()))))
    edges = []
    for layer in range(num_layers):
        for target in range(num_items):
            others = [j for j in range(num_items) if j != target]
            for size in range(1, min(max_source_size, len(others)) + 1):
                for source in itertools.combinations(others, size):
                    if rng.random() < edge_density:
                        boost = float(rng.integers(1, 5)) * 0.25 * boost_scale
                        edges.append(Hyperedge(frozenset(source), target, layer, boost))
    return Instance(BoostStructure(num_items, num_layers, tuple(edges)), tuple(marginals))


def _payload(inst: Instance) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "m": inst.num_items,
        "K": inst.num_layers,
        "marginals": [[[v, p] for v, p in d.atoms] for d in inst.marginals],
        "edges": [{"source": sorted(j + 1 for j in e.source),
                   "target": e.target + 1,
                   "layer": e.layer + 1,
                   "boost": e.boost} for e in inst.boosts.edges],
    }


def canonical_dumps(inst: Instance) -> str:
    """Canonical serialized form (no metadata): the content-hash input."""
    return json.dumps(_payload(inst), sort_keys=True, separators=(",", ":"))


def fingerprint(inst: Instance) -> str:
    return hashlib.sha256(canonical_dumps(inst).encode()).hexdigest()


def save(inst: Instance, path, meta: dict | None = None) -> None:
    payload = _payload(inst)
    payload["meta"] = meta or {}
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def _parse(payload: dict) -> tuple[Instance, dict]:
    if not isinstance(payload, dict):
        raise InstanceFormatError("instance file must hold a JSON object")
    if payload.get("schema") != SCHEMA_VERSION:
        raise InstanceFormatError(
            f"unsupported schema version {payload.get('schema')!r} "
            f"(expected {SCHEMA_VERSION})")
    try:
        m = int(payload["m"])
        num_layers = int(payload["K"])
        raw_marginals = payload["marginals"]
        raw_edges = payload.get("edges", [])
    except (KeyError, TypeError, ValueError) as exc:
        raise InstanceFormatError(f"malformed instance file: {exc}") from exc
    marginals = []
    for i, atoms in enumerate(raw_marginals):
        try:
            marginals.append(DiscreteDistribution(tuple((float(v), float(p))
                                                        for v, p in atoms)))
        except (InstanceFormatError, TypeError, ValueError) as exc:
            raise InstanceFormatError(f"marginal of item {i + 1}: {exc}") from exc
    edges = []
    for idx, e in enumerate(raw_edges):
        try:
            edges.append(Hyperedge(frozenset(int(j) - 1 for j in e["source"]),
                                   int(e["target"]) - 1, int(e["layer"]) - 1,
                                   float(e["boost"])))
        except (InstanceFormatError, KeyError, TypeError, ValueError) as exc:
            raise InstanceFormatError(f"edge #{idx + 1} ({e!r}): {exc}") from exc
    try:
        inst = Instance(BoostStructure(m, num_layers, tuple(edges)), tuple(marginals))
    except InstanceFormatError as exc:
        raise InstanceFormatError(f"invalid instance: {exc}") from exc
    meta = payload.get("meta") or {}
    return inst, meta


def load(path) -> Instance:
    return load_with_meta(path)[0]


def load_with_meta(path) -> tuple[Instance, dict]:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"not valid JSON: {exc}") from exc
    return _parse(payload)

"""Vectorized NumPy implementations of the subset-enumeration kernels.

Semantics (tie-breaks, exact float comparisons, iteration order) match the
compiled backend bit for bit; see tests/test_kernels.py for the parity suite.

Conventions shared by both backends:
  * item sets are bitmasks (``uint64``), item ``i`` at bit ``i``;
  * a hyperedge is (source mask, target item, layer, boost) with the target
    never inside the source mask;
  * "lex-smaller" compares two sets as ascending tuples of their elements,
    so {0,1} < {1} and a strict prefix precedes its extensions.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

# Profile rows processed per block in the bulk best-response sweep; bounds
# peak memory at roughly three (block x 2^m) float64 panels.
_BLOCK_CELLS = 1 << 22
_MASK_CHUNK = 1 << 16


def _as_u64(a) -> np.ndarray:
    return np.ascontiguousarray(np.asarray(a, dtype=np.uint64))


def _as_f64(a) -> np.ndarray:
    return np.ascontiguousarray(np.asarray(a, dtype=np.float64))


def _as_i64(a) -> np.ndarray:
    return np.ascontiguousarray(np.asarray(a, dtype=np.int64))


def _membership(masks: np.ndarray, m: int) -> np.ndarray:
    """Boolean (len(masks), m) matrix: item i present in each mask."""
    bits = np.uint64(1) << np.arange(m, dtype=np.uint64)
    return (masks[:, None] & bits[None, :]) != 0


@lru_cache(maxsize=8)
def lex_order(m: int) -> np.ndarray:
    """All masks over m items, sorted by the set-lex order (ascending)."""
    orders: list[np.ndarray | None] = [None] * (m + 1)
    orders[m] = np.zeros(1, dtype=np.int64)
    for p in range(m - 1, -1, -1):
        parts = [np.zeros(1, dtype=np.int64)]
        for e in range(p, m):
            parts.append(orders[e + 1] | np.int64(1 << e))
        orders[p] = np.concatenate(parts)
    return orders[0]


@lru_cache(maxsize=8)
def lex_rank(m: int) -> np.ndarray:
    """rank[mask] = position of the mask in set-lex order."""
    order = lex_order(m)
    rank = np.empty(1 << m, dtype=np.int64)
    rank[order] = np.arange(1 << m, dtype=np.int64)
    return rank


def lex_less(a: int, b: int) -> bool:
    """Set-lex comparison of two masks (see module docstring)."""
    a, b = int(a), int(b)
    while True:
        if a == b:
            return False
        if a == 0:
            return True
        if b == 0:
            return False
        la = a & -a
        lb = b & -b
        if la != lb:
            return la < lb
        a ^= la
        b ^= lb


def _layer_sums(sub: np.ndarray, m: int, num_layers: int, edge_masks, edge_targets,
                edge_layers, edge_boosts) -> np.ndarray:
    """(len(sub), m, K) per-layer boost totals for each mask in ``sub``."""
    ls = np.zeros((sub.size, m, num_layers), dtype=np.float64)
    for emask, tgt, lay, boo in zip(edge_masks, edge_targets, edge_layers, edge_boosts):
        sel = (sub & emask) == emask
        ls[sel, tgt, lay] += boo
    return ls


def boost_table(num_items: int, num_layers: int, edge_masks, edge_targets,
                edge_layers, edge_boosts) -> np.ndarray:
    """(2^m, m) table of boost factors: table[S, i] = 1 + best layer total
    of boosts whose source sets lie inside S (sources never contain their
    target, so S vs S\\{i} makes no difference)."""
    m = num_items
    n = 1 << m
    edge_masks = _as_u64(edge_masks)
    edge_targets = _as_i64(edge_targets)
    edge_layers = _as_i64(edge_layers)
    edge_boosts = _as_f64(edge_boosts)
    table = np.empty((n, m), dtype=np.float64)
    if edge_masks.size == 0:
        table.fill(1.0)
        return table
    all_masks = np.arange(n, dtype=np.uint64)
    for lo in range(0, n, _MASK_CHUNK):
        sub = all_masks[lo:lo + _MASK_CHUNK]
        ls = _layer_sums(sub, m, num_layers, edge_masks, edge_targets,
                         edge_layers, edge_boosts)
        table[lo:lo + _MASK_CHUNK] = 1.0 + ls.max(axis=2)
    return table


def _zero_price_mask(prices: np.ndarray) -> int:
    z = 0
    for i, p in enumerate(prices):
        if p == 0.0:
            z |= 1 << i
    return z


def best_responses(table: np.ndarray, prices, values) -> np.ndarray:
    """Utility-maximizing bundle mask per profile row.

    Candidates are the bundles containing every zero-priced item; ties go
    first to the larger payment, then to the set-lex smaller bundle.  All
    comparisons are exact float comparisons.
    """
    prices = _as_f64(prices)
    values = np.atleast_2d(_as_f64(values))
    n, m = table.shape
    member = _membership(np.arange(n, dtype=np.uint64), m)
    weighted = np.where(member, table, 0.0)
    pay = member @ prices
    zmask = np.uint64(_zero_price_mask(prices))
    invalid = (np.arange(n, dtype=np.uint64) & zmask) != zmask
    rank = lex_rank(m).astype(np.float64)
    out = np.empty(values.shape[0], dtype=np.int64)
    block = max(1, _BLOCK_CELLS // n)
    for lo in range(0, values.shape[0], block):
        vb = values[lo:lo + block]
        util = vb @ weighted.T
        util -= pay
        util[:, invalid] = -np.inf
        best_u = util.max(axis=1)
        tied = util == best_u[:, None]
        pay_t = np.where(tied, pay, -1.0)
        best_p = pay_t.max(axis=1)
        tied &= pay_t == best_p[:, None]
        ranks = np.where(tied, rank, np.inf)
        out[lo:lo + vb.shape[0]] = ranks.argmin(axis=1)
    return out


def best_response_stream(num_items: int, num_layers: int, edge_masks, edge_targets,
                         edge_layers, edge_boosts, prices, values) -> tuple[int, float, float]:
    """Single-profile best response streamed over all masks (no table).

    Returns (mask, utility, payment) under the same tie-breaks as
    :func:`best_responses`.
    """
    m = num_items
    n = 1 << m
    prices = _as_f64(prices)
    t = _as_f64(values)
    edge_masks = _as_u64(edge_masks)
    edge_targets = _as_i64(edge_targets)
    edge_layers = _as_i64(edge_layers)
    edge_boosts = _as_f64(edge_boosts)
    zmask = np.uint64(_zero_price_mask(prices))
    best: tuple[float, float, int] | None = None
    for lo in range(0, n, _MASK_CHUNK):
        sub = np.arange(lo, min(lo + _MASK_CHUNK, n), dtype=np.uint64)
        sub = sub[(sub & zmask) == zmask]
        if sub.size == 0:
            continue
        member = _membership(sub, m)
        if edge_masks.size:
            ls = _layer_sums(sub, m, num_layers, edge_masks, edge_targets,
                             edge_layers, edge_boosts)
            eta = 1.0 + ls.max(axis=2)
        else:
            eta = np.ones((sub.size, m))
        value = (np.where(member, eta, 0.0) * t).sum(axis=1)
        pay = member @ prices
        util = value - pay
        u = util.max()
        cand = util == u
        p = pay[cand].max()
        cand &= pay == p
        mask = min((int(s) for s in sub[cand]), key=_lex_key)
        if (best is None or u > best[0]
                or (u == best[0] and (p > best[1]
                                      or (p == best[1] and lex_less(mask, best[2]))))):
            best = (u, p, mask)
    assert best is not None
    return best[2], best[0], best[1]


def _lex_key(mask: int):
    return tuple(i for i in range(64) if mask >> i & 1)


def max_dicut(num_items: int, source_weights, edge_masks, edge_targets,
              edge_weights) -> tuple[int, float]:
    """Exact maximum directed cut over all 2^m free-set masks.

    A hyperedge crosses iff its whole source lies in the free set and its
    target is priced; source-node edges cross iff the item is priced.  Ties
    go to the set-lex smallest free set.
    """
    m = num_items
    n = 1 << m
    sw = _as_f64(source_weights)
    edge_masks = _as_u64(edge_masks)
    edge_targets = _as_i64(edge_targets)
    edge_weights = _as_f64(edge_weights)
    best_w = -np.inf
    best_mask = 0
    for lo in range(0, n, _MASK_CHUNK):
        sub = np.arange(lo, min(lo + _MASK_CHUNK, n), dtype=np.uint64)
        member = _membership(sub, m)
        cut = (~member) @ sw
        for emask, tgt, w in zip(edge_masks, edge_targets, edge_weights):
            crosses = ((sub & emask) == emask) & ~member[:, tgt]
            cut += w * crosses
        w = cut.max()
        cand = sub[cut == w]
        mask = min((int(s) for s in cand), key=_lex_key)
        if w > best_w or (w == best_w and lex_less(mask, best_mask)):
            best_w = float(w)
            best_mask = mask
    return best_mask, best_w


def degree_fire_expectation(num_items: int, source_weights, edge_masks,
                            edge_targets, edge_weights, fire_prob: float) -> float:
    """Exact expected cut weight of the edge-firing free-set rule.

    Enumerates all 2^E fire vectors: each edge independently fires with
    probability ``fire_prob`` and moves its whole source set to the free
    side; unassigned items are priced.
    """
    m = num_items
    sw = _as_f64(source_weights)
    edge_masks = _as_u64(edge_masks)
    edge_targets = _as_i64(edge_targets)
    edge_weights = _as_f64(edge_weights)
    n_edges = edge_masks.size
    if n_edges == 0:
        return float(sw.sum())
    n = 1 << n_edges
    fire = np.arange(n, dtype=np.uint64)
    free = np.zeros(n, dtype=np.uint64)
    for e in range(n_edges):
        free[(fire >> np.uint64(e)) & np.uint64(1) == 1] |= edge_masks[e]
    fired = np.bitwise_count(fire).astype(np.float64)
    prob = fire_prob ** fired * (1.0 - fire_prob) ** (n_edges - fired)
    member = _membership(free, m)
    cut = (~member) @ sw
    for emask, tgt, w in zip(edge_masks, edge_targets, edge_weights):
        cut += w * (((free & emask) == emask) & ~member[:, tgt])
    return float(prob @ cut)

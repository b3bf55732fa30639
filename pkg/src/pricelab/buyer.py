"""Exact utility-maximizing buyer behavior against item or bundle prices.

Indifference resolves toward buying: among utility-maximizing choices the
buyer picks the one with the larger payment (then the set-lex smallest set),
and every zero-priced item/bundle is always taken.  Revenue lower bounds in
the mechanisms module rely on this purchase-at-indifference convention.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import chain

import numpy as np

from . import kernels
from .errors import CapExceeded
from .model import Instance, boost_factor, mask_of, set_of

SUBSET_SEARCH_CAP = 24
BUNDLE_SEARCH_CAP = 20


def as_prices(inst: Instance, prices) -> np.ndarray:
    p = np.ascontiguousarray(np.asarray(prices, dtype=np.float64))
    if p.shape != (inst.num_items,):
        raise ValueError(f"price vector must have {inst.num_items} entries")
    if (p < 0).any():
        raise ValueError("prices must be nonnegative")
    return p


@dataclass(frozen=True)
class BundleMenu:
    """Disjoint priced bundles plus a free set handed over unconditionally."""

    bundles: tuple[frozenset[int], ...]
    prices: tuple[float, ...]
    free_set: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "bundles", tuple(frozenset(b) for b in self.bundles))
        object.__setattr__(self, "prices", tuple(float(q) for q in self.prices))
        object.__setattr__(self, "free_set", frozenset(self.free_set))
        if len(self.bundles) != len(self.prices):
            raise ValueError("one price per bundle required")
        if any(q < 0 for q in self.prices):
            raise ValueError("bundle prices must be nonnegative")
        if any(not b for b in self.bundles):
            raise ValueError("bundles must be nonempty")
        seen: set[int] = set()
        for b in chain(self.bundles, [self.free_set]):
            if seen & b:
                raise ValueError("bundles and free set must be disjoint")
            seen |= b


def best_response_items(inst: Instance, prices, t) -> frozenset[int]:
    """The bundle maximizing v(t, S) - sum of item prices over S.

    Exhaustive over all 2^m bundles (m <= 24); ties resolved toward larger
    payment, then the set-lex smallest bundle, and all zero-priced items are
    always included.
    """
    if inst.num_items > SUBSET_SEARCH_CAP:
        raise CapExceeded(
            f"best response enumerates 2^m bundles; m={inst.num_items} exceeds "
            f"{SUBSET_SEARCH_CAP}")
    p = as_prices(inst, prices)
    t = np.asarray(t, dtype=np.float64)
    masks, targets, layers, boosts = inst.boosts.edge_arrays()
    mask, _, _ = kernels.best_response_stream(
        inst.num_items, inst.num_layers, masks, targets, layers, boosts, p, t)
    return set_of(mask)


def best_response_bundles(inst: Instance, menu: BundleMenu, t) -> frozenset[int]:
    """Indices of the priced bundles the buyer adds on top of the free set.

    The buyer receives the free set unconditionally and maximizes
    v(t, free + chosen bundles) minus the chosen bundle prices, with the
    same tie-breaks as :func:`best_response_items`.
    """
    y = len(menu.bundles)
    if y > BUNDLE_SEARCH_CAP:
        raise CapExceeded(f"menu has {y} bundles; cap is {BUNDLE_SEARCH_CAP}")
    t = np.asarray(t, dtype=np.float64)
    zero = sum(1 << j for j, q in enumerate(menu.prices) if q == 0.0)
    bundle_masks = [mask_of(b) for b in menu.bundles]
    free_mask = mask_of(menu.free_set)
    best = None
    for choice in range(1 << y):
        if choice & zero != zero:
            continue
        got = free_mask
        pay = 0.0
        for j in range(y):
            if choice >> j & 1:
                got |= bundle_masks[j]
                pay += menu.prices[j]
        items = set_of(got)
        util = sum(boost_factor(inst, i, items) * t[i] for i in items) - pay
        key = (util, pay)
        if best is None or key > best[0] or (
                key == best[0] and kernels.lex_less(choice, best[1])):
            best = (key, choice)
    return set_of(best[1])

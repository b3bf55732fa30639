"""Pricing laboratory for a single buyer whose item values carry
proportional complementarity boosts.

Build instances (value distributions plus a boost hypergraph), price them
with simple mechanisms (separate sale, grand bundling, free-set pricing,
bundle menus), select free sets via exact or randomized directed cuts, and
compare everything against a brute-force optimal-revenue LP oracle.
"""

from .buyer import BundleMenu, best_response_bundles, best_response_items
from .dicut import (CutGraph, build_graph, cut_weight, exact_max_dicut,
                    expected_cut_weight, local_search_dicut,
                    sample_free_set_degree, sample_free_set_pairwise,
                    sample_free_set_rank)
from .errors import CapExceeded, InstanceFormatError
from .mechanisms import (FreeSetPartition, ReserveResult, RevenueReport,
                         best_separate_free, brev, bundle_pricing,
                         evaluate_menu_revenue, evaluate_revenue,
                         monopoly_reserve, proxy_revenue, separate_free,
                         srev_additive)
from .model import (BoostStructure, DiscreteDistribution, Hyperedge, Instance,
                    active_layer, boost_factor, enumerate_profiles,
                    full_boost_vector, fully_boosted, valuation)
from .opt import MechanismLP, OptResult, build_lp, optimal_revenue, solve_opt

__version__ = "0.1.0"

__all__ = [
    "BoostStructure", "BundleMenu", "CapExceeded", "CutGraph",
    "DiscreteDistribution", "FreeSetPartition", "Hyperedge", "Instance",
    "InstanceFormatError", "MechanismLP", "OptResult", "ReserveResult",
    "RevenueReport", "active_layer", "best_response_bundles",
    "best_response_items", "best_separate_free", "boost_factor", "brev",
    "build_graph", "build_lp", "bundle_pricing", "cut_weight",
    "enumerate_profiles", "evaluate_menu_revenue", "evaluate_revenue",
    "exact_max_dicut", "expected_cut_weight", "full_boost_vector",
    "fully_boosted", "local_search_dicut", "monopoly_reserve",
    "optimal_revenue", "proxy_revenue", "sample_free_set_degree",
    "sample_free_set_pairwise", "sample_free_set_rank", "separate_free",
    "solve_opt", "srev_additive", "valuation",
]

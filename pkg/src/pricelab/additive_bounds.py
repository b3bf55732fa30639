"""Revenue-decomposition checks for additive (edge-free) instances.

Splits value mass at the cutoff R = sum of per-item monopoly revenues into a
CORE (mass at or below R) and a TAIL (mass above R on all but the highest
item), bounds the core variance, and verifies the parameterized
better-of-separate-or-bundle guarantee
``OPT <= (2 + 2/a^2) BREV + (a + 1) SREV`` via the LP oracle.
All quantities here are exact arithmetic over enumeration; no sampling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InstanceFormatError
from .mechanisms import brev, srev_additive
from .model import MONEY_ATOL, Instance, enumerate_profiles
from .opt import optimal_revenue

# Coefficient of the max-form bound at the optimizing parameter a = 4^(1/3):
# 3 + 1.5 * 4^(1/3) rounded up.
MAX_FORM_COEFF = 5.382


@dataclass(frozen=True)
class Decomposition:
    srev: float
    tail: float
    core: float
    var_core: float


def _require_additive(inst: Instance) -> None:
    if inst.boosts.edges:
        raise InstanceFormatError("decomposition applies to edge-free instances only")


def decompose(inst: Instance) -> Decomposition:
    """CORE/TAIL split at R = srev, plus the variance of the truncated total
    V = sum_j t_j * 1[t_j <= R] (exact; items are independent).

    Atoms exactly at R belong to the core.
    """
    _require_additive(inst)
    r = srev_additive(inst)
    tail = 0.0
    core = 0.0
    var = 0.0
    for j, dist in enumerate(inst.marginals):
        mean_w = 0.0
        mean_w2 = 0.0
        for v, p in dist.atoms:
            if v > r:
                pr_other = 1.0
                for l, other in enumerate(inst.marginals):
                    if l != j:
                        pr_other *= sum(q for u, q in other.atoms if u < v)
                tail += p * v * (1.0 - pr_other if inst.num_items > 1 else 0.0)
            else:
                core += p * v
                mean_w += p * v
                mean_w2 += p * v * v
        var += mean_w2 - mean_w * mean_w
    return Decomposition(srev=r, tail=tail, core=core, var_core=var)


@dataclass(frozen=True)
class TailCheck:
    passed: bool
    margin: float
    tail: float
    brev: float


def check_tail_brev(inst: Instance) -> TailCheck:
    """TAIL never exceeds the grand-bundle revenue."""
    tail = decompose(inst).tail
    _, report = brev(inst)
    margin = report.revenue - tail
    return TailCheck(passed=margin >= -MONEY_ATOL, margin=margin,
                     tail=tail, brev=report.revenue)


@dataclass(frozen=True)
class CantelliCheck:
    passed: bool
    var_core: float
    var_cap: float
    var_margin: float
    tail_prob: float
    cantelli_bound: float
    cantelli_margin: float
    unit_bound: float
    unit_margin: float


def check_variance_and_cantelli(inst: Instance, a: float) -> CantelliCheck:
    """Var[V] <= 2 R^2, and the exact probability Pr[V >= E[V] - aR] meets
    the one-sided (Cantelli) bound tau^2 / (tau^2 + Var[V]) at tau = aR.

    ``unit_bound`` is the same bound with the money unit normalized so R
    plays no role, a^2 / (a^2 + Var[V]); it is implied whenever R >= 1.
    """
    if a <= 0:
        raise ValueError("a must be positive")
    dec = decompose(inst)
    r = dec.srev
    values, probs = enumerate_profiles(inst)
    v_real = np.where(values <= r, values, 0.0).sum(axis=1)
    threshold = dec.core - a * r
    tail_prob = float(probs[v_real >= threshold - MONEY_ATOL].sum())
    tau2 = (a * r) ** 2
    cant = tau2 / (tau2 + dec.var_core) if tau2 > 0 else 1.0
    unit = a * a / (a * a + dec.var_core)
    var_margin = 2 * r * r - dec.var_core
    return CantelliCheck(
        passed=(var_margin >= -MONEY_ATOL
                and tail_prob >= cant - MONEY_ATOL
                and tail_prob >= unit - MONEY_ATOL),
        var_core=dec.var_core, var_cap=2 * r * r, var_margin=var_margin,
        tail_prob=tail_prob, cantelli_bound=cant, cantelli_margin=tail_prob - cant,
        unit_bound=unit, unit_margin=tail_prob - unit)


@dataclass(frozen=True)
class BetterOfCheck:
    passed: bool
    opt: float
    srev: float
    brev: float
    a: float
    bound: float
    margin: float
    max_form_bound: float
    max_form_margin: float


def check_better_of_bound(inst: Instance, a: float, *,
                          opt: float | None = None,
                          tol: float = 1e-6) -> BetterOfCheck:
    """OPT <= (2 + 2/a^2) BREV + (a + 1) SREV on an additive instance, and
    the max form OPT <= 5.382 max(SREV, BREV)."""
    _require_additive(inst)
    if a <= 0:
        raise ValueError("a must be positive")
    if opt is None:
        opt = optimal_revenue(inst)
    s = srev_additive(inst)
    _, b_report = brev(inst)
    b = b_report.revenue
    bound = (2 + 2 / (a * a)) * b + (a + 1) * s
    max_bound = MAX_FORM_COEFF * max(s, b)
    return BetterOfCheck(
        passed=(opt <= bound + tol and opt <= max_bound + tol),
        opt=opt, srev=s, brev=b, a=a, bound=bound, margin=bound - opt,
        max_form_bound=max_bound, max_form_margin=max_bound - opt)


def cube_root_4() -> float:
    """The parameter value optimizing the max-form coefficient."""
    return 4 ** (1.0 / 3.0)


def core_sum_distribution(inst: Instance) -> tuple[np.ndarray, np.ndarray]:
    """Exact distribution (values, probs) of V = sum_j t_j * 1[t_j <= R]."""
    _require_additive(inst)
    r = srev_additive(inst)
    values, probs = enumerate_profiles(inst)
    v_real = np.where(values <= r, values, 0.0).sum(axis=1)
    uniq, inverse = np.unique(v_real, return_inverse=True)
    agg = np.zeros(uniq.size)
    np.add.at(agg, inverse, probs)
    return uniq, agg

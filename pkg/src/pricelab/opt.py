"""Brute-force optimal-revenue oracle for tiny instances.

Solves the direct-revelation LP over randomized bundle allocations: variables
x_S(t) for every bundle S (including the empty one) and a payment p(t) per
enumerated type profile, maximizing expected payment subject to incentive
compatibility and individual rationality.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from . import kernels
from .errors import CapExceeded
from .model import Instance, enumerate_profiles, subset_boost_table

LP_VAR_CAP = 100_000
LP_TOL = 1e-7


@dataclass(frozen=True)
class MechanismLP:
    """Enumerated profiles plus the (P, 2^m) matrix of bundle valuations."""

    num_items: int
    values: np.ndarray
    probs: np.ndarray
    bundle_values: np.ndarray

    @property
    def num_profiles(self) -> int:
        return self.probs.size

    @property
    def num_bundles(self) -> int:
        return 1 << self.num_items

    def payment_sums(self, prices: np.ndarray) -> np.ndarray:
        """Total price of every bundle mask."""
        bits = np.uint64(1) << np.arange(self.num_items, dtype=np.uint64)
        member = (np.arange(self.num_bundles, dtype=np.uint64)[:, None] & bits) != 0
        return member @ np.asarray(prices, dtype=np.float64)


@dataclass(frozen=True)
class OptResult:
    opt_revenue: float
    allocation: np.ndarray
    payments: np.ndarray
    residuals: dict[str, float]


def build_lp(inst: Instance, *, var_cap: int = LP_VAR_CAP) -> MechanismLP:
    values, probs = enumerate_profiles(inst)
    n = 1 << inst.num_items
    if probs.size * n > var_cap:
        raise CapExceeded(
            f"{probs.size} profiles x {n} bundles exceeds the {var_cap}-variable cap")
    table = subset_boost_table(inst)
    bits = np.uint64(1) << np.arange(inst.num_items, dtype=np.uint64)
    member = (np.arange(n, dtype=np.uint64)[:, None] & bits) != 0
    weighted = np.where(member, table, 0.0)
    return MechanismLP(num_items=inst.num_items, values=values, probs=probs,
                       bundle_values=values @ weighted.T)


def mechanism_residuals(lp: MechanismLP, allocation: np.ndarray,
                        payments: np.ndarray) -> dict[str, float]:
    """Worst constraint violations of a candidate mechanism (all <= 0 means
    feasible): allocation simplex gap, IR gap, and IC gap."""
    x = np.asarray(allocation, dtype=np.float64)
    p = np.asarray(payments, dtype=np.float64)
    simplex = float(np.abs(x.sum(axis=1) - 1.0).max())
    truthful = (x * lp.bundle_values).sum(axis=1) - p
    ir = float((-truthful).max())
    misreport = lp.bundle_values @ x.T - p[None, :]
    ic = float((misreport - truthful[:, None]).max())
    return {"simplex": simplex, "ir": ir, "ic": ic,
            "negative_allocation": float((-x).max()),
            "negative_payment": float((-p).max())}


def solve_opt(lp: MechanismLP, *, tol: float = LP_TOL) -> OptResult:
    """Maximize expected revenue over IC/IR randomized mechanisms.

    Deterministic given the instance; raises on solver failure or when the
    returned point violates feasibility beyond ``tol`` (never silently
    approximates).
    """
    num_p = lp.num_profiles
    n = lp.num_bundles
    nx = num_p * n

    rows, cols, data = [], [], []
    rhs = []
    row = 0

    def add_entry(r, c, v):
        rows.append(r)
        cols.append(c)
        data.append(v)

    # IR: p(t) - sum_S x_S(t) v(t,S) <= 0
    for t in range(num_p):
        for s in range(n):
            add_entry(row, t * n + s, -lp.bundle_values[t, s])
        add_entry(row, nx + t, 1.0)
        rhs.append(0.0)
        row += 1
    # IC: for all t != t', truthful utility at least misreport utility
    for t in range(num_p):
        vt = lp.bundle_values[t]
        for t2 in range(num_p):
            if t2 == t:
                continue
            for s in range(n):
                add_entry(row, t * n + s, -vt[s])
                add_entry(row, t2 * n + s, vt[s])
            add_entry(row, nx + t, 1.0)
            add_entry(row, nx + t2, -1.0)
            rhs.append(0.0)
            row += 1
    a_ub = sparse.coo_matrix((data, (rows, cols)), shape=(row, nx + num_p)).tocsr()

    eq_rows = np.repeat(np.arange(num_p), n)
    eq_cols = np.arange(nx)
    a_eq = sparse.coo_matrix((np.ones(nx), (eq_rows, eq_cols)),
                             shape=(num_p, nx + num_p)).tocsr()

    c = np.zeros(nx + num_p)
    c[nx:] = -lp.probs
    bounds = [(0.0, 1.0)] * nx + [(None, None)] * num_p
    res = linprog(c, A_ub=a_ub, b_ub=np.array(rhs), A_eq=a_eq,
                  b_eq=np.ones(num_p), bounds=bounds, method="highs")
    if not res.success:
        raise RuntimeError(f"LP solver failed: {res.message}")
    x = res.x[:nx].reshape(num_p, n)
    p = res.x[nx:]
    residuals = mechanism_residuals(lp, x, p)
    worst = max(residuals["simplex"], residuals["ir"], residuals["ic"])
    if worst > tol:
        raise RuntimeError(f"LP solution violates feasibility by {worst:.3e}")
    if residuals["negative_payment"] > tol:
        raise RuntimeError("optimal mechanism returned a negative payment")
    opt = float(lp.probs @ p)
    if abs(opt + res.fun) > max(tol, 1e-9 * abs(opt)):
        raise RuntimeError("objective mismatch between solver and recomputation")
    return OptResult(opt_revenue=opt, allocation=x, payments=p, residuals=residuals)


def optimal_revenue(inst: Instance, *, var_cap: int = LP_VAR_CAP) -> float:
    """Convenience wrapper: build and solve the oracle LP."""
    return solve_opt(build_lp(inst, var_cap=var_cap)).opt_revenue


def posted_price_solution(inst: Instance, lp: MechanismLP,
                          prices) -> tuple[np.ndarray, np.ndarray]:
    """Encode the deterministic posted-price outcome as an (x, p) pair for
    feasibility checks: per profile, the best-response bundle gets
    probability 1 and the payment is its price total."""
    prices = np.asarray(prices, dtype=np.float64)
    table = subset_boost_table(inst)
    masks = kernels.best_responses(table, prices, lp.values)
    paysum = lp.payment_sums(prices)
    x = np.zeros((lp.num_profiles, lp.num_bundles))
    x[np.arange(lp.num_profiles), masks] = 1.0
    return x, paysum[masks]

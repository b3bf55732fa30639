# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled subset-enumeration kernels.

Mirrors pricelab.kernels.numpy_backend exactly (tie-breaks, float
comparisons, iteration order); see that module for the shared conventions.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY
from libc.stdint cimport int64_t, uint64_t
from libc.string cimport memset

cnp.import_array()


cdef inline bint _lex_less(uint64_t a, uint64_t b) nogil:
    # Set-lex order on bitmasks: compare ascending element tuples.
    cdef uint64_t la, lb
    while True:
        if a == b:
            return False
        if a == 0:
            return True
        if b == 0:
            return False
        la = a & (~a + 1)
        lb = b & (~b + 1)
        if la != lb:
            return la < lb
        a ^= la
        b ^= lb


cdef inline uint64_t _zero_mask(const double[::1] prices) nogil:
    cdef uint64_t z = 0
    cdef Py_ssize_t i
    for i in range(prices.shape[0]):
        if prices[i] == 0.0:
            z |= (<uint64_t> 1) << i
    return z


def boost_table(int num_items, int num_layers, edge_masks, edge_targets,
                edge_layers, edge_boosts):
    """(2^m, m) table of boost factors for every bundle mask."""
    cdef const uint64_t[::1] masks = np.ascontiguousarray(edge_masks, dtype=np.uint64)
    cdef const int64_t[::1] targets = np.ascontiguousarray(edge_targets, dtype=np.int64)
    cdef const int64_t[::1] layers = np.ascontiguousarray(edge_layers, dtype=np.int64)
    cdef const double[::1] boosts = np.ascontiguousarray(edge_boosts, dtype=np.float64)
    cdef Py_ssize_t n = (<Py_ssize_t> 1) << num_items
    cdef cnp.ndarray[double, ndim=2] out = np.empty((n, num_items), dtype=np.float64)
    cdef double[:, ::1] table = out
    cdef double[::1] scratch = np.zeros(num_items * num_layers, dtype=np.float64)
    cdef Py_ssize_t s, e, i, l
    cdef Py_ssize_t n_edges = masks.shape[0]
    cdef uint64_t sm
    cdef double best
    with nogil:
        for s in range(n):
            sm = <uint64_t> s
            if n_edges:
                memset(&scratch[0], 0, num_items * num_layers * sizeof(double))
                for e in range(n_edges):
                    if (sm & masks[e]) == masks[e]:
                        scratch[targets[e] * num_layers + layers[e]] += boosts[e]
                for i in range(num_items):
                    best = scratch[i * num_layers]
                    for l in range(1, num_layers):
                        if scratch[i * num_layers + l] > best:
                            best = scratch[i * num_layers + l]
                    table[s, i] = 1.0 + best
            else:
                for i in range(num_items):
                    table[s, i] = 1.0
    return out


def best_responses(table, prices, values):
    """Utility-maximizing bundle mask per profile row (see numpy_backend)."""
    cdef const double[:, ::1] tab = np.ascontiguousarray(table, dtype=np.float64)
    cdef const double[::1] price = np.ascontiguousarray(prices, dtype=np.float64)
    cdef const double[:, ::1] vals = np.ascontiguousarray(
        np.atleast_2d(np.asarray(values, dtype=np.float64)))
    cdef Py_ssize_t n = tab.shape[0]
    cdef int m = tab.shape[1]
    cdef Py_ssize_t num_profiles = vals.shape[0]
    cdef cnp.ndarray[int64_t, ndim=1] out = np.empty(num_profiles, dtype=np.int64)
    cdef int64_t[::1] chosen = out
    cdef double[::1] paysum = np.empty(n, dtype=np.float64)
    cdef uint64_t zmask
    cdef Py_ssize_t s, t
    cdef int i
    cdef uint64_t sm, best_mask
    cdef double u, pay, best_u, best_pay
    with nogil:
        zmask = _zero_mask(price)
        paysum[0] = 0.0
        for s in range(1, n):
            i = 0
            while not (s >> i) & 1:
                i += 1
            paysum[s] = paysum[s & (s - 1)] + price[i]
        for t in range(num_profiles):
            best_u = -INFINITY
            best_pay = -1.0
            best_mask = 0
            for s in range(n):
                sm = <uint64_t> s
                if (sm & zmask) != zmask:
                    continue
                u = 0.0
                for i in range(m):
                    if (sm >> i) & 1:
                        u += tab[s, i] * vals[t, i]
                pay = paysum[s]
                u -= pay
                if (u > best_u
                        or (u == best_u
                            and (pay > best_pay
                                 or (pay == best_pay and _lex_less(sm, best_mask))))):
                    best_u = u
                    best_pay = pay
                    best_mask = sm
            chosen[t] = <int64_t> best_mask
    return out


def best_response_stream(int num_items, int num_layers, edge_masks, edge_targets,
                         edge_layers, edge_boosts, prices, values):
    """Single-profile best response streamed over all masks (no table)."""
    cdef const uint64_t[::1] masks = np.ascontiguousarray(edge_masks, dtype=np.uint64)
    cdef const int64_t[::1] targets = np.ascontiguousarray(edge_targets, dtype=np.int64)
    cdef const int64_t[::1] layers = np.ascontiguousarray(edge_layers, dtype=np.int64)
    cdef const double[::1] boosts = np.ascontiguousarray(edge_boosts, dtype=np.float64)
    cdef const double[::1] price = np.ascontiguousarray(prices, dtype=np.float64)
    cdef const double[::1] t = np.ascontiguousarray(values, dtype=np.float64)
    cdef Py_ssize_t n = (<Py_ssize_t> 1) << num_items
    cdef Py_ssize_t n_edges = masks.shape[0]
    cdef double[::1] scratch = np.zeros(num_items * num_layers, dtype=np.float64)
    cdef uint64_t zmask, sm, best_mask = 0
    cdef Py_ssize_t s, e
    cdef int i, l
    cdef double u, pay, eta, best_u = -INFINITY, best_pay = -1.0
    with nogil:
        zmask = _zero_mask(price)
        for s in range(n):
            sm = <uint64_t> s
            if (sm & zmask) != zmask:
                continue
            if n_edges:
                memset(&scratch[0], 0, num_items * num_layers * sizeof(double))
                for e in range(n_edges):
                    if (sm & masks[e]) == masks[e]:
                        scratch[targets[e] * num_layers + layers[e]] += boosts[e]
            u = 0.0
            pay = 0.0
            for i in range(num_items):
                if (sm >> i) & 1:
                    if n_edges:
                        eta = scratch[i * num_layers]
                        for l in range(1, num_layers):
                            if scratch[i * num_layers + l] > eta:
                                eta = scratch[i * num_layers + l]
                    else:
                        eta = 0.0
                    u += (1.0 + eta) * t[i]
                    pay += price[i]
            u -= pay
            if (u > best_u
                    or (u == best_u
                        and (pay > best_pay
                             or (pay == best_pay and _lex_less(sm, best_mask))))):
                best_u = u
                best_pay = pay
                best_mask = sm
    return int(best_mask), best_u, best_pay


def max_dicut(int num_items, source_weights, edge_masks, edge_targets, edge_weights):
    """Exact maximum directed cut; ties to the set-lex smallest free set.

    Builds the full cut-weight table: priced source weight via a subset-sum
    recurrence, then one crossing sweep per hyperedge.
    """
    cdef const double[::1] sw = np.ascontiguousarray(source_weights, dtype=np.float64)
    cdef const uint64_t[::1] masks = np.ascontiguousarray(edge_masks, dtype=np.uint64)
    cdef const int64_t[::1] targets = np.ascontiguousarray(edge_targets, dtype=np.int64)
    cdef const double[::1] weights = np.ascontiguousarray(edge_weights, dtype=np.float64)
    cdef Py_ssize_t n = (<Py_ssize_t> 1) << num_items
    cdef Py_ssize_t n_edges = masks.shape[0]
    cdef double[::1] cut = np.empty(n, dtype=np.float64)
    cdef Py_ssize_t f, e
    cdef int i
    cdef uint64_t fm, emask, tbit, best_mask = 0
    cdef double total = 0.0, w, best_cut = -INFINITY
    with nogil:
        for i in range(num_items):
            total += sw[i]
        cut[0] = total
        for f in range(1, n):
            i = 0
            while not (f >> i) & 1:
                i += 1
            cut[f] = cut[f & (f - 1)] - sw[i]
        for e in range(n_edges):
            emask = masks[e]
            tbit = (<uint64_t> 1) << targets[e]
            w = weights[e]
            for f in range(n):
                fm = <uint64_t> f
                if (fm & emask) == emask and not fm & tbit:
                    cut[f] += w
        for f in range(n):
            if cut[f] > best_cut or (cut[f] == best_cut
                                     and _lex_less(<uint64_t> f, best_mask)):
                best_cut = cut[f]
                best_mask = <uint64_t> f
    return int(best_mask), best_cut


def degree_fire_expectation(int num_items, source_weights, edge_masks,
                            edge_targets, edge_weights, double fire_prob):
    """Exact expected cut weight of the edge-firing rule over 2^E outcomes."""
    cdef const double[::1] sw = np.ascontiguousarray(source_weights, dtype=np.float64)
    cdef const uint64_t[::1] masks = np.ascontiguousarray(edge_masks, dtype=np.uint64)
    cdef const int64_t[::1] targets = np.ascontiguousarray(edge_targets, dtype=np.int64)
    cdef const double[::1] weights = np.ascontiguousarray(edge_weights, dtype=np.float64)
    cdef Py_ssize_t n_edges = masks.shape[0]
    cdef double total_sw = 0.0
    cdef Py_ssize_t v, e
    cdef int i, fired
    cdef uint64_t free
    cdef double cut, expect = 0.0
    cdef double[::1] p_pow = np.empty(n_edges + 1, dtype=np.float64)
    cdef double[::1] q_pow = np.empty(n_edges + 1, dtype=np.float64)
    for i in range(num_items):
        total_sw += sw[i]
    if n_edges == 0:
        return total_sw
    cdef Py_ssize_t n = (<Py_ssize_t> 1) << n_edges
    with nogil:
        p_pow[0] = 1.0
        q_pow[0] = 1.0
        for e in range(n_edges):
            p_pow[e + 1] = p_pow[e] * fire_prob
            q_pow[e + 1] = q_pow[e] * (1.0 - fire_prob)
        for v in range(n):
            free = 0
            fired = 0
            for e in range(n_edges):
                if (v >> e) & 1:
                    free |= masks[e]
                    fired += 1
            cut = 0.0
            for i in range(num_items):
                if not (free >> i) & 1:
                    cut += sw[i]
            for e in range(n_edges):
                if (free & masks[e]) == masks[e] and not (free >> targets[e]) & 1:
                    cut += weights[e]
            expect += p_pow[fired] * q_pow[n_edges - fired] * cut
    return expect

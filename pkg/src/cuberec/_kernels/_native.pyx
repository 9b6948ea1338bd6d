# cython: language_level=3
"""Compiled kernels. Semantics mirror ``_py`` exactly; see that module for
the shared conventions (lexicographic enumeration, first-improvement scan
order, strict-only pruning). Given identical inputs the two backends return
identical outputs."""

import numpy as np

from libc.stdint cimport int64_t, int8_t, uint8_t
from posix.time cimport clock_gettime, timespec, CLOCK_MONOTONIC

BACKEND = "native"

DEF TIME_CHECK = 256
DEF NODE_TIME_CHECK = 1024


cdef inline double _now() noexcept nogil:
    cdef timespec ts
    clock_gettime(CLOCK_MONOTONIC, &ts)
    return ts.tv_sec + ts.tv_nsec / 1e9


cdef inline int64_t _iabs(int64_t v) noexcept nogil:
    return -v if v < 0 else v


cdef inline int64_t _pen(int8_t v, int x) noexcept nogil:
    # ternary penalty of one coordinate: (item 1, model -1) or (item 0, model +1)
    if x == -1:
        return 1 if v == 1 else 0
    if x == 1:
        return 1 if v == 0 else 0
    return 0


def brute_force_binary(const int8_t[:, ::1] vmat, const int64_t[::1] tgt,
                       int64_t denom):
    cdef Py_ssize_t m = vmat.shape[0], n = vmat.shape[1]
    cdef Py_ssize_t i, j
    x_arr = np.zeros(n, dtype=np.uint8)
    best_arr = np.zeros(n, dtype=np.uint8)
    d_arr = np.zeros(m, dtype=np.int64)
    cdef uint8_t[::1] x = x_arr
    cdef uint8_t[::1] best = best_arr
    cdef int64_t[::1] d = d_arr
    cdef int64_t obj = 0, best_val, e, nd
    with nogil:
        for i in range(m):
            d[i] = 0
            for j in range(n):
                d[i] += vmat[i, j]
            obj += _iabs(denom * d[i] - tgt[i])
        best_val = obj
        for j in range(n):
            best[j] = 0
        while True:
            j = n - 1
            while j >= 0 and x[j] == 1:
                # flip back to 0
                for i in range(m):
                    e = 1 if vmat[i, j] == 1 else -1
                    nd = d[i] + e
                    obj += _iabs(denom * nd - tgt[i]) - _iabs(denom * d[i] - tgt[i])
                    d[i] = nd
                x[j] = 0
                j -= 1
            if j < 0:
                break
            for i in range(m):
                e = 1 if vmat[i, j] == 0 else -1
                nd = d[i] + e
                obj += _iabs(denom * nd - tgt[i]) - _iabs(denom * d[i] - tgt[i])
                d[i] = nd
            x[j] = 1
            if obj < best_val:
                best_val = obj
                for i in range(n):
                    best[i] = x[i]
    return best_arr, int(best_val)


def brute_force_ternary(const int8_t[:, ::1] vmat, const int64_t[::1] tgt,
                        int64_t denom):
    cdef Py_ssize_t m = vmat.shape[0], n = vmat.shape[1]
    cdef Py_ssize_t i, j
    x_arr = np.full(n, -1, dtype=np.int8)
    best_arr = np.full(n, -1, dtype=np.int8)
    d_arr = np.zeros(m, dtype=np.int64)
    cdef int8_t[::1] x = x_arr
    cdef int8_t[::1] best = best_arr
    cdef int64_t[::1] d = d_arr
    cdef int64_t obj = 0, best_val, g, nd
    cdef int old
    with nogil:
        for i in range(m):
            d[i] = 0
            for j in range(n):
                d[i] += _pen(vmat[i, j], -1)
            obj += _iabs(denom * d[i] - tgt[i])
        best_val = obj
        while True:
            j = n - 1
            while j >= 0 and x[j] == 1:
                for i in range(m):
                    g = _pen(vmat[i, j], -1) - _pen(vmat[i, j], 1)
                    nd = d[i] + g
                    obj += _iabs(denom * nd - tgt[i]) - _iabs(denom * d[i] - tgt[i])
                    d[i] = nd
                x[j] = -1
                j -= 1
            if j < 0:
                break
            old = x[j]
            for i in range(m):
                g = _pen(vmat[i, j], old + 1) - _pen(vmat[i, j], old)
                nd = d[i] + g
                obj += _iabs(denom * nd - tgt[i]) - _iabs(denom * d[i] - tgt[i])
                d[i] = nd
            x[j] = old + 1
            if obj < best_val:
                best_val = obj
                for i in range(n):
                    best[i] = x[i]
    return best_arr, int(best_val)


def descend_binary(const int8_t[:, ::1] vmat, const int64_t[::1] tgt,
                   int64_t denom, uint8_t[::1] x, int64_t max_evals,
                   double deadline):
    cdef Py_ssize_t m = vmat.shape[0], n = vmat.shape[1]
    cdef Py_ssize_t i, j = 0
    d_arr = np.zeros(m, dtype=np.int64)
    cdef int64_t[::1] d = d_arr
    cdef int64_t obj = 0, evals = 0, stale = 0, delta, e, nd
    cdef bint timed_out = False
    with nogil:
        for i in range(m):
            d[i] = 0
            for j in range(n):
                if vmat[i, j] != x[j]:
                    d[i] += 1
            obj += _iabs(denom * d[i] - tgt[i])
        j = 0
        while obj > 0 and stale < n and evals < max_evals:
            if deadline >= 0 and evals % TIME_CHECK == 0 and _now() >= deadline:
                timed_out = True
                break
            delta = 0
            for i in range(m):
                e = 1 if vmat[i, j] == x[j] else -1
                nd = d[i] + e
                delta += _iabs(denom * nd - tgt[i]) - _iabs(denom * d[i] - tgt[i])
            evals += 1
            if delta < 0:
                for i in range(m):
                    d[i] += 1 if vmat[i, j] == x[j] else -1
                x[j] ^= 1
                obj += delta
                stale = 0
            else:
                stale += 1
            j = (j + 1) % n
    return int(obj), int(evals), bool(stale >= n or obj == 0)


def descend_ternary(const int8_t[:, ::1] vmat, const int64_t[::1] tgt,
                    int64_t denom, int8_t[::1] x, int64_t max_evals,
                    double deadline):
    cdef Py_ssize_t m = vmat.shape[0], n = vmat.shape[1]
    cdef Py_ssize_t i, j = 0
    d_arr = np.zeros(m, dtype=np.int64)
    cdef int64_t[::1] d = d_arr
    cdef int64_t obj = 0, evals = 0, stale = 0, delta, g, nd
    cdef int cur, alt, k
    cdef bint improved, timed_out = False
    with nogil:
        for i in range(m):
            d[i] = 0
            for j in range(n):
                d[i] += _pen(vmat[i, j], x[j])
            obj += _iabs(denom * d[i] - tgt[i])
        j = 0
        while obj > 0 and stale < n and evals < max_evals:
            if deadline >= 0 and evals % TIME_CHECK == 0 and _now() >= deadline:
                timed_out = True
                break
            cur = x[j]
            improved = False
            for k in range(3):
                alt = k - 1
                if alt == cur or evals >= max_evals:
                    continue
                delta = 0
                for i in range(m):
                    g = _pen(vmat[i, j], alt) - _pen(vmat[i, j], cur)
                    nd = d[i] + g
                    delta += _iabs(denom * nd - tgt[i]) - _iabs(denom * d[i] - tgt[i])
                evals += 1
                if delta < 0:
                    for i in range(m):
                        d[i] += _pen(vmat[i, j], alt) - _pen(vmat[i, j], cur)
                    x[j] = alt
                    obj += delta
                    improved = True
                    break
            if improved:
                stale = 0
            else:
                stale += 1
            j = (j + 1) % n
    return int(obj), int(evals), bool(stale >= n or obj == 0)


def tabu_binary(const int8_t[:, ::1] vmat, const int64_t[::1] tgt,
                int64_t denom, uint8_t[::1] x, int64_t max_evals,
                double deadline, int64_t tenure, int64_t patience):
    cdef Py_ssize_t m = vmat.shape[0], n = vmat.shape[1]
    cdef Py_ssize_t i, j, best_j
    d_arr = np.zeros(m, dtype=np.int64)
    tabu_arr = np.zeros(n, dtype=np.int64)
    best_arr = np.zeros(n, dtype=np.uint8)
    cdef int64_t[::1] d = d_arr
    cdef int64_t[::1] tabu_until = tabu_arr
    cdef uint8_t[::1] best_x = best_arr
    cdef int64_t obj = 0, best, cand, delta, e, nd
    cdef int64_t evals = 0, since = 0, it = 0, best_cand
    cdef bint have
    with nogil:
        for i in range(m):
            d[i] = 0
            for j in range(n):
                if vmat[i, j] != x[j]:
                    d[i] += 1
            obj += _iabs(denom * d[i] - tgt[i])
        best = obj
        for j in range(n):
            best_x[j] = x[j]
        while best > 0 and since < patience and evals + n <= max_evals:
            if deadline >= 0 and _now() >= deadline:
                break
            it += 1
            best_j = -1
            best_cand = 0
            have = False
            for j in range(n):
                delta = 0
                for i in range(m):
                    e = 1 if vmat[i, j] == x[j] else -1
                    nd = d[i] + e
                    delta += _iabs(denom * nd - tgt[i]) - _iabs(denom * d[i] - tgt[i])
                cand = obj + delta
                if tabu_until[j] >= it and not cand < best:
                    continue
                if not have or cand < best_cand:
                    best_cand = cand
                    best_j = j
                    have = True
            evals += n
            if best_j < 0:
                break
            for i in range(m):
                d[i] += 1 if vmat[i, best_j] == x[best_j] else -1
            x[best_j] ^= 1
            obj = best_cand
            tabu_until[best_j] = it + tenure
            if obj < best:
                best = obj
                for j in range(n):
                    best_x[j] = x[j]
                since = 0
            else:
                since += 1
        for j in range(n):
            x[j] = best_x[j]
    return int(best), int(evals)


def tabu_ternary(const int8_t[:, ::1] vmat, const int64_t[::1] tgt,
                 int64_t denom, int8_t[::1] x, int64_t max_evals,
                 double deadline, int64_t tenure, int64_t patience):
    cdef Py_ssize_t m = vmat.shape[0], n = vmat.shape[1]
    cdef Py_ssize_t i, j, best_j
    d_arr = np.zeros(m, dtype=np.int64)
    tabu_arr = np.zeros(n, dtype=np.int64)
    best_arr = np.zeros(n, dtype=np.int8)
    cdef int64_t[::1] d = d_arr
    cdef int64_t[::1] tabu_until = tabu_arr
    cdef int8_t[::1] best_x = best_arr
    cdef int64_t obj = 0, best, cand, delta, g, nd
    cdef int64_t evals = 0, since = 0, it = 0, best_cand
    cdef int k, alt, best_val, cur
    cdef bint have
    with nogil:
        for i in range(m):
            d[i] = 0
            for j in range(n):
                d[i] += _pen(vmat[i, j], x[j])
            obj += _iabs(denom * d[i] - tgt[i])
        best = obj
        for j in range(n):
            best_x[j] = x[j]
        while best > 0 and since < patience and evals + 2 * n <= max_evals:
            if deadline >= 0 and _now() >= deadline:
                break
            it += 1
            best_j = -1
            best_val = 0
            best_cand = 0
            have = False
            for j in range(n):
                cur = x[j]
                for k in range(3):
                    alt = k - 1
                    if alt == cur:
                        continue
                    delta = 0
                    for i in range(m):
                        g = _pen(vmat[i, j], alt) - _pen(vmat[i, j], cur)
                        nd = d[i] + g
                        delta += _iabs(denom * nd - tgt[i]) - _iabs(denom * d[i] - tgt[i])
                    cand = obj + delta
                    evals += 1
                    if tabu_until[j] >= it and not cand < best:
                        continue
                    if not have or cand < best_cand:
                        best_cand = cand
                        best_j = j
                        best_val = alt
                        have = True
            if best_j < 0:
                break
            cur = x[best_j]
            for i in range(m):
                d[i] += _pen(vmat[i, best_j], best_val) - _pen(vmat[i, best_j], cur)
            x[best_j] = best_val
            obj = best_cand
            tabu_until[best_j] = it + tenure
            if obj < best:
                best = obj
                for j in range(n):
                    best_x[j] = x[j]
                since = 0
            else:
                since += 1
        for j in range(n):
            x[j] = best_x[j]
    return int(best), int(evals)


cdef inline int64_t _mismatch_b(int8_t v, int x) noexcept nogil:
    return 1 if v != x else 0


def _bnb_impl(const int8_t[:, ::1] vmat, const int64_t[::1] tgt, int64_t denom,
              const int8_t[:, ::1] orders, int8_t[::1] inc0, int64_t inc_val,
              int64_t max_nodes, double deadline, bint ternary):
    cdef Py_ssize_t m = vmat.shape[0], n = vmat.shape[1]
    cdef Py_ssize_t kids = orders.shape[1]
    cdef Py_ssize_t i, t
    x_arr = np.zeros(n, dtype=np.int8)
    inc_arr = np.array(inc0, dtype=np.int8, copy=True)
    child_arr = np.zeros(n, dtype=np.int64)
    c_arr = np.zeros(m, dtype=np.int64)
    cdef int8_t[::1] x = x_arr
    cdef int8_t[::1] inc = inc_arr
    cdef int64_t[::1] child = child_arr
    cdef int64_t[::1] c = c_arr
    cdef int64_t nodes = 0, lb, lo, hi, u
    cdef int val
    cdef bint completed = True, lex_smaller
    with nogil:
        t = 0
        while True:
            if child[t] >= kids:
                t -= 1
                if t < 0:
                    break
                val = x[t]
                for i in range(m):
                    c[i] -= _pen(vmat[i, t], val) if ternary else _mismatch_b(vmat[i, t], val)
                child[t] += 1
                continue
            if nodes >= max_nodes or (
                deadline >= 0 and nodes % NODE_TIME_CHECK == 0 and _now() >= deadline
            ):
                completed = False
                break
            val = orders[t, child[t]]
            x[t] = val
            for i in range(m):
                c[i] += _pen(vmat[i, t], val) if ternary else _mismatch_b(vmat[i, t], val)
            nodes += 1
            u = n - t - 1
            lb = 0
            for i in range(m):
                lo = tgt[i] - denom * (c[i] + u)
                hi = denom * c[i] - tgt[i]
                if lo > hi:
                    hi = lo
                if hi > 0:
                    lb += hi
            if t == n - 1:
                lex_smaller = False
                if lb == inc_val:
                    for i in range(n):
                        if x[i] != inc[i]:
                            lex_smaller = x[i] < inc[i]
                            break
                if lb < inc_val or lex_smaller:
                    inc_val = lb
                    for i in range(n):
                        inc[i] = x[i]
                for i in range(m):
                    c[i] -= _pen(vmat[i, t], val) if ternary else _mismatch_b(vmat[i, t], val)
                child[t] += 1
                continue
            if lb > inc_val:
                for i in range(m):
                    c[i] -= _pen(vmat[i, t], val) if ternary else _mismatch_b(vmat[i, t], val)
                child[t] += 1
                continue
            t += 1
            child[t] = 0
    return inc_arr, int(inc_val), int(nodes), bool(completed)


def bnb_binary(const int8_t[:, ::1] vmat, const int64_t[::1] tgt, int64_t denom,
               orders, inc, inc_val, max_nodes, deadline):
    orders8 = np.ascontiguousarray(orders, dtype=np.int8)
    inc8 = np.ascontiguousarray(inc, dtype=np.int8)
    coords, val, nodes, completed = _bnb_impl(
        vmat, tgt, denom, orders8, inc8, inc_val, max_nodes, deadline, False)
    return coords.astype(np.uint8), val, nodes, completed


def bnb_ternary(const int8_t[:, ::1] vmat, const int64_t[::1] tgt, int64_t denom,
                orders, inc, inc_val, max_nodes, deadline):
    orders8 = np.ascontiguousarray(orders, dtype=np.int8)
    inc8 = np.ascontiguousarray(inc, dtype=np.int8)
    return _bnb_impl(vmat, tgt, denom, orders8, inc8, inc_val, max_nodes,
                     deadline, True)

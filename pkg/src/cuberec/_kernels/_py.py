"""Pure-python (numpy) kernels: the reference semantics for the hot loops.

The compiled extension in ``_native.pyx`` mirrors these functions exactly;
given the same inputs both backends return identical results.  All
arithmetic is integer: callers pre-scale rational fit targets by a common
denominator, so objective values here are ``denom`` times the true rational
objective and comparisons are exact.

Conventions shared by both backends:

* item matrix ``vmat``: int8, shape (m, n), C order, entries 0/1
* scaled targets ``tgt``: int64, shape (m,)
* binary model coordinates: uint8; ternary: int8 with values -1/0/1
* enumeration visits vertices in lexicographic coordinate order
  (ternary order -1 < 0 < 1), so "first strict improvement" equals
  "lexicographically smallest optimum"
* ``deadline`` is an absolute ``time.monotonic()`` value, or a negative
  number for "no wall-clock limit"
"""

from __future__ import annotations

import time

import numpy as np

BACKEND = "python"

_CHUNK = 1 << 13
_TIME_CHECK = 256


def _lex_less(a, b) -> bool:
    for ai, bi in zip(a.tolist(), b.tolist()):
        if ai != bi:
            return ai < bi
    return False


def brute_force_binary(vmat, tgt, denom):
    """Exhaustive minimization over {0,1}^n; returns (coords, scaled objective)."""
    m, n = vmat.shape
    v64 = vmat.astype(np.int64)
    base = v64.sum(axis=1)              # distance from the all-zero vertex
    coef = (1 - 2 * v64).T              # (n, m): effect of setting a coordinate to 1
    shifts = np.arange(n - 1, -1, -1, dtype=np.uint64)
    total = 1 << n
    best_val = None
    best_coords = None
    for start in range(0, total, _CHUNK):
        ks = np.arange(start, min(start + _CHUNK, total), dtype=np.uint64)
        bits = ((ks[:, None] >> shifts[None, :]) & 1).astype(np.int64)
        dist = base[None, :] + bits @ coef
        obj = np.abs(denom * dist - tgt[None, :]).sum(axis=1)
        idx = int(np.argmin(obj))
        val = int(obj[idx])
        if best_val is None or val < best_val:
            best_val = val
            best_coords = bits[idx].astype(np.uint8)
    return best_coords, best_val


def brute_force_ternary(vmat, tgt, denom):
    """Exhaustive minimization over {-1,0,1}^n; returns (coords, scaled objective)."""
    m, n = vmat.shape
    v64 = vmat.astype(np.int64)
    like_pen = (1 - v64).T              # (n, m): penalty of +1 at coordinate j
    dislike_pen = v64.T                 # (n, m): penalty of -1 at coordinate j
    powers = 3 ** np.arange(n - 1, -1, -1, dtype=np.int64)
    total = 3 ** n
    best_val = None
    best_coords = None
    for start in range(0, total, _CHUNK):
        ks = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        digits = (ks[:, None] // powers[None, :]) % 3   # 0,1,2 -> -1,0,+1
        plus = (digits == 2).astype(np.int64)
        minus = (digits == 0).astype(np.int64)
        dist = plus @ like_pen + minus @ dislike_pen
        obj = np.abs(denom * dist - tgt[None, :]).sum(axis=1)
        idx = int(np.argmin(obj))
        val = int(obj[idx])
        if best_val is None or val < best_val:
            best_val = val
            best_coords = (digits[idx] - 1).astype(np.int8)
    return best_coords, best_val


def _binary_distances(vmat, x):
    return (vmat != x[None, :].astype(np.int8)).sum(axis=1, dtype=np.int64)


def _ternary_distances(vmat, x):
    pen = ((vmat == 1) & (x[None, :] == -1)) | ((vmat == 0) & (x[None, :] == 1))
    return pen.sum(axis=1, dtype=np.int64)


def descend_binary(vmat, tgt, denom, x, max_evals, deadline):
    """First-improvement 1-flip descent from ``x`` (modified in place).

    Scans coordinates cyclically and flips as soon as a flip strictly
    lowers the objective.  Returns (scaled objective, candidate evaluations
    used, locally_optimal flag).  Stops early at objective 0, at
    ``max_evals`` candidate evaluations, or at the wall-clock deadline.
    """
    m, n = vmat.shape
    d = _binary_distances(vmat, x)
    obj = int(np.abs(denom * d - tgt).sum())
    evals = 0
    stale = 0
    j = 0
    while obj > 0 and stale < n and evals < max_evals:
        if deadline >= 0 and evals % _TIME_CHECK == 0 and time.monotonic() >= deadline:
            break
        e = np.where(vmat[:, j] == x[j], 1, -1).astype(np.int64)
        nd = d + e
        delta = int(np.abs(denom * nd - tgt).sum()) - obj
        evals += 1
        if delta < 0:
            x[j] ^= 1
            d = nd
            obj += delta
            stale = 0
        else:
            stale += 1
        j = (j + 1) % n
    return obj, evals, stale >= n or obj == 0


def _ternary_penalty_column(vcol, value):
    if value == -1:
        return vcol.astype(np.int64)
    if value == 1:
        return (1 - vcol).astype(np.int64)
    return np.zeros(vcol.shape[0], dtype=np.int64)


def descend_ternary(vmat, tgt, denom, x, max_evals, deadline):
    """First-improvement 1-coordinate reassignment descent (ternary alphabet).

    At each coordinate the two alternative values are tried in ascending
    order (-1 < 0 < 1) and the first strictly improving one is taken.
    """
    m, n = vmat.shape
    d = _ternary_distances(vmat, x)
    obj = int(np.abs(denom * d - tgt).sum())
    evals = 0
    stale = 0
    j = 0
    while obj > 0 and stale < n and evals < max_evals:
        if deadline >= 0 and evals % _TIME_CHECK == 0 and time.monotonic() >= deadline:
            break
        cur = int(x[j])
        cur_pen = _ternary_penalty_column(vmat[:, j], cur)
        improved = False
        for alt in (-1, 0, 1):
            if alt == cur or evals >= max_evals:
                continue
            g = _ternary_penalty_column(vmat[:, j], alt) - cur_pen
            nd = d + g
            delta = int(np.abs(denom * nd - tgt).sum()) - obj
            evals += 1
            if delta < 0:
                x[j] = alt
                d = nd
                obj += delta
                improved = True
                break
        if improved:
            stale = 0
        else:
            stale += 1
        j = (j + 1) % n
    return obj, evals, stale >= n or obj == 0


_I64_MAX = np.iinfo(np.int64).max


def tabu_binary(vmat, tgt, denom, x, max_evals, deadline, tenure, patience):
    """Steepest 1-flip walk with coordinate tabu and aspiration.

    Each move rescans every coordinate (n candidate evaluations) and takes
    the smallest resulting objective among non-tabu candidates, allowing
    tabu ones that would beat the best seen (aspiration); ties go to the
    smallest coordinate index.  Stops at objective 0, after ``patience``
    moves without a new best, when no candidate is admissible, at the eval
    budget, or at the deadline.  ``x`` is overwritten with the best vertex;
    returns (best objective, evaluations used).
    """
    m, n = vmat.shape
    v64 = vmat.astype(np.int64)
    d = _binary_distances(vmat, x)
    obj = int(np.abs(denom * d - tgt).sum())
    best = obj
    best_x = x.copy()
    tabu_until = np.zeros(n, dtype=np.int64)
    since = 0
    evals = 0
    it = 0
    while best > 0 and since < patience and evals + n <= max_evals:
        if deadline >= 0 and time.monotonic() >= deadline:
            break
        it += 1
        flip = np.where(v64 == x[None, :].astype(np.int64), 1, -1)
        newobj = np.abs(denom * (d[:, None] + flip) - tgt[:, None]).sum(axis=0)
        evals += n
        cand = np.where((tabu_until < it) | (newobj < best), newobj, _I64_MAX)
        j = int(np.argmin(cand))
        if cand[j] == _I64_MAX:
            break
        d = d + flip[:, j]
        x[j] ^= 1
        obj = int(newobj[j])
        tabu_until[j] = it + tenure
        if obj < best:
            best = obj
            best_x = x.copy()
            since = 0
        else:
            since += 1
    x[:] = best_x
    return best, evals


def tabu_ternary(vmat, tgt, denom, x, max_evals, deadline, tenure, patience):
    """Ternary counterpart of ``tabu_binary``: moves reassign one coordinate
    to one of its two alternative values; ties prefer the smaller coordinate,
    then the smaller value."""
    m, n = vmat.shape
    d = _ternary_distances(vmat, x)
    obj = int(np.abs(denom * d - tgt).sum())
    best = obj
    best_x = x.copy()
    tabu_until = np.zeros(n, dtype=np.int64)
    since = 0
    evals = 0
    it = 0
    while best > 0 and since < patience and evals + 2 * n <= max_evals:
        if deadline >= 0 and time.monotonic() >= deadline:
            break
        it += 1
        best_obj = None
        best_j = -1
        best_val = 0
        for j in range(n):
            cur_pen = _ternary_penalty_column(vmat[:, j], int(x[j]))
            for alt in (-1, 0, 1):
                if alt == int(x[j]):
                    continue
                g = _ternary_penalty_column(vmat[:, j], alt) - cur_pen
                cand_obj = int(np.abs(denom * (d + g) - tgt).sum())
                evals += 1
                if tabu_until[j] >= it and not cand_obj < best:
                    continue
                if best_obj is None or cand_obj < best_obj:
                    best_obj = cand_obj
                    best_j = j
                    best_val = alt
        if best_j < 0:
            break
        g = _ternary_penalty_column(vmat[:, best_j], best_val) - \
            _ternary_penalty_column(vmat[:, best_j], int(x[best_j]))
        d = d + g
        x[best_j] = best_val
        obj = best_obj
        tabu_until[best_j] = it + tenure
        if obj < best:
            best = obj
            best_x = x.copy()
            since = 0
        else:
            since += 1
    x[:] = best_x
    return best, evals


def _mismatch_binary(vcol, value):
    return (vcol != value).astype(np.int64)


def _bnb(vmat, tgt, denom, orders, inc, inc_val, max_nodes, deadline, penalty_col):
    m, n = vmat.shape
    kids = orders.shape[1]
    x = np.zeros(n, dtype=inc.dtype)
    child = np.zeros(n, dtype=np.int64)
    c = np.zeros(m, dtype=np.int64)
    inc = inc.copy()
    inc_val = int(inc_val)
    nodes = 0
    completed = True
    t = 0
    while True:
        if child[t] >= kids:
            t -= 1
            if t < 0:
                break
            c -= penalty_col(vmat[:, t], int(x[t]))
            child[t] += 1
            continue
        if nodes >= max_nodes or (
            deadline >= 0 and nodes % 1024 == 0 and time.monotonic() >= deadline
        ):
            completed = False
            break
        val = int(orders[t, child[t]])
        x[t] = val
        c += penalty_col(vmat[:, t], val)
        nodes += 1
        u = n - t - 1
        lo = tgt - denom * (c + u)
        hi = denom * c - tgt
        lb = int(np.maximum(np.maximum(lo, hi), 0).sum())
        if t == n - 1:
            if lb < inc_val or (lb == inc_val and _lex_less(x, inc)):
                inc_val = lb
                inc = x.copy()
            c -= penalty_col(vmat[:, t], val)
            child[t] += 1
            continue
        if lb > inc_val:
            c -= penalty_col(vmat[:, t], val)
            child[t] += 1
            continue
        t += 1
        child[t] = 0
    return inc, inc_val, nodes, completed


def _ternary_penalty(vcol, value):
    if value == -1:
        return (vcol == 1).astype(np.int64)
    if value == 1:
        return (vcol == 0).astype(np.int64)
    return np.zeros(vcol.shape[0], dtype=np.int64)


def bnb_binary(vmat, tgt, denom, orders, inc, inc_val, max_nodes, deadline):
    """Depth-first branch and bound over {0,1}^n.

    ``orders`` gives the per-depth child exploration order.  Subtrees are
    pruned only when their lower bound strictly exceeds the incumbent, so
    every optimal vertex is visited and the returned optimum is the
    lexicographically smallest one.  Returns (coords, scaled objective,
    nodes expanded, completed flag).
    """
    return _bnb(vmat, tgt, denom, orders, inc, inc_val, max_nodes, deadline,
                _mismatch_binary)


def bnb_ternary(vmat, tgt, denom, orders, inc, inc_val, max_nodes, deadline):
    """Depth-first branch and bound over {-1,0,1}^n (see ``bnb_binary``)."""
    return _bnb(vmat, tgt, denom, orders, inc, inc_val, max_nodes, deadline,
                _ternary_penalty)

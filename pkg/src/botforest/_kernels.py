"""Numba kernels for tree growth and forest application.

_kernels_py.py is the reference implementation of the same contracts; the
two must produce bit-identical outputs for identical rng streams (covered
by tests). Gini arithmetic keeps a fixed operation order so results match
the pure-Python oracle exactly.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def bootstrap_orders(global_sorted, boot):
    """Per-feature sorted orders of the bootstrap sample.

    global_sorted: (d, n) int32, row r = argsort of feature r over the
    original n rows. boot: (nb,) int64 original-row draws. Returns (d, nb)
    int32 of bootstrap-local positions, sorted per feature (counting sort,
    so duplicated draws stay adjacent).
    """
    d, n = global_sorted.shape
    nb = boot.size
    start = np.zeros(n + 1, np.int64)
    for p in range(nb):
        start[boot[p] + 1] += 1
    for g in range(n):
        start[g + 1] += start[g]
    cursor = start[:n].copy()
    pos_store = np.empty(nb, np.int32)
    for p in range(nb):
        g = boot[p]
        pos_store[cursor[g]] = p
        cursor[g] += 1
    out = np.empty((d, nb), np.int32)
    for r in range(d):
        w = 0
        for i in range(n):
            g = global_sorted[r, i]
            for q in range(start[g], start[g + 1]):
                out[r, w] = pos_store[q]
                w += 1
    return out


@njit(cache=True, nogil=True)
def scan_best_split(XT, y, sorted_rows, cand):
    """Best Gini split over candidate features given presorted sample ids.

    XT: (d, n) float64 feature values (transposed); y: (n,) float64 in
    {0, 1}; sorted_rows: (k, m) int32 sample ids, row j sorted by feature
    cand[j]; cand: (k,) int64 global feature indices. Returns
    (feature, threshold, gain) with feature == -1 when no split has
    positive gain. Ties break to the lowest feature index, then the lowest
    threshold.
    """
    k, m = sorted_rows.shape
    pos = 0.0
    for i in range(m):
        pos += y[sorted_rows[0, i]]
    mf = float(m)
    npos = int(pos)
    ph = (m - npos) / mf
    pb = npos / mf
    g_parent = 1.0 - ph * ph - pb * pb
    best_gain = 0.0
    best_f = -1
    best_t = 0.0
    found = False
    for j in range(k):
        f = cand[j]
        row = XT[f]
        lp = 0.0
        prev = row[sorted_rows[j, 0]]
        for i in range(m - 1):
            lp += y[sorted_rows[j, i]]
            cur = row[sorted_rows[j, i + 1]]
            if cur == prev:
                continue
            nl = float(i + 1)
            nr = mf - nl
            rp = pos - lp
            lh = (nl - lp) / nl
            lb = lp / nl
            gl = 1.0 - lh * lh - lb * lb
            rh = (nr - rp) / nr
            rb = rp / nr
            gr = 1.0 - rh * rh - rb * rb
            gain = g_parent - (nl / mf) * gl - (nr / mf) * gr
            if gain > 0.0:
                thr = (prev + cur) / 2.0
                if (not found) or gain > best_gain or (
                    gain == best_gain and (f < best_f or (f == best_f and thr < best_t))
                ):
                    best_gain = gain
                    best_f = f
                    best_t = thr
                    found = True
            prev = cur
    return best_f, best_t, best_gain


@njit(cache=True, nogil=True)
def grow_tree(XT, y, smat, rng, mtry, min_split, max_depth):
    """Grow one CART tree to purity (or the given limits).

    Nodes are created in pre-order (left subtree first); each internal node
    draws mtry candidate features without replacement from `rng` via a
    partial Fisher-Yates shuffle, which fixes the stream consumption order.
    smat is mutated in place. max_depth < 0 means unlimited. Returns flat
    parallel arrays (feature, threshold, left, right, counts); feature -1
    marks leaves, counts row = (n_human, n_bot) training samples at the node.
    """
    d, nb = XT.shape
    max_nodes = 2 * nb + 1
    feature = np.full(max_nodes, -1, np.int32)
    threshold = np.full(max_nodes, np.nan, np.float64)
    left = np.full(max_nodes, -1, np.int32)
    right = np.full(max_nodes, -1, np.int32)
    counts = np.zeros((max_nodes, 2), np.int64)
    s_lo = np.empty(max_nodes, np.int64)
    s_hi = np.empty(max_nodes, np.int64)
    s_par = np.empty(max_nodes, np.int64)
    s_isl = np.empty(max_nodes, np.uint8)
    s_dep = np.empty(max_nodes, np.int64)
    tmp = np.empty(nb, np.int32)
    flags = np.empty(nb, np.uint8)
    pool = np.empty(d, np.int64)
    s_lo[0], s_hi[0], s_par[0], s_isl[0], s_dep[0] = 0, nb, -1, 0, 0
    top = 1
    n_nodes = 0
    k = mtry if mtry < d else d
    while top > 0:
        top -= 1
        lo, hi, parent, isl, dep = s_lo[top], s_hi[top], s_par[top], s_isl[top], s_dep[top]
        node = n_nodes
        n_nodes += 1
        if parent >= 0:
            if isl == 1:
                left[parent] = node
            else:
                right[parent] = node
        m = hi - lo
        pos = 0.0
        for i in range(lo, hi):
            pos += y[smat[0, i]]
        npos = int(pos)
        counts[node, 0] = m - npos
        counts[node, 1] = npos
        if npos == 0 or npos == m or m < min_split or (max_depth >= 0 and dep >= max_depth):
            continue
        for i in range(d):
            pool[i] = i
        for i in range(k):
            j = i + rng.integers(0, d - i)
            t = pool[i]
            pool[i] = pool[j]
            pool[j] = t
        mf = float(m)
        ph = (m - npos) / mf
        pb = npos / mf
        g_parent = 1.0 - ph * ph - pb * pb
        best_gain = 0.0
        best_f = -1
        best_t = 0.0
        found = False
        for j in range(k):
            f = pool[j]
            row = XT[f]
            lp = 0.0
            prev = row[smat[f, lo]]
            for i in range(m - 1):
                lp += y[smat[f, lo + i]]
                cur = row[smat[f, lo + i + 1]]
                if cur == prev:
                    continue
                nl = float(i + 1)
                nr = mf - nl
                rp = pos - lp
                lh = (nl - lp) / nl
                lb = lp / nl
                gl = 1.0 - lh * lh - lb * lb
                rh = (nr - rp) / nr
                rb = rp / nr
                gr = 1.0 - rh * rh - rb * rb
                gain = g_parent - (nl / mf) * gl - (nr / mf) * gr
                if gain > 0.0:
                    thr = (prev + cur) / 2.0
                    if (not found) or gain > best_gain or (
                        gain == best_gain and (f < best_f or (f == best_f and thr < best_t))
                    ):
                        best_gain = gain
                        best_f = f
                        best_t = thr
                        found = True
                prev = cur
        if not found:
            continue
        fbest = best_f
        tbest = best_t
        n_left = 0
        for i in range(lo, hi):
            sid = smat[0, i]
            if XT[fbest, sid] <= tbest:
                flags[sid] = 1
                n_left += 1
            else:
                flags[sid] = 0
        for r in range(d):
            w1 = lo
            w2 = 0
            for i in range(lo, hi):
                sid = smat[r, i]
                if flags[sid] == 1:
                    smat[r, w1] = sid
                    w1 += 1
                else:
                    tmp[w2] = sid
                    w2 += 1
            for i in range(w2):
                smat[r, w1 + i] = tmp[i]
        feature[node] = fbest
        threshold[node] = tbest
        mid = lo + n_left
        s_lo[top], s_hi[top], s_par[top], s_isl[top], s_dep[top] = mid, hi, node, 0, dep + 1
        top += 1
        s_lo[top], s_hi[top], s_par[top], s_isl[top], s_dep[top] = lo, mid, node, 1, dep + 1
        top += 1
    return (
        feature[:n_nodes].copy(),
        threshold[:n_nodes].copy(),
        left[:n_nodes].copy(),
        right[:n_nodes].copy(),
        counts[:n_nodes].copy(),
    )


@njit(cache=True, nogil=True)
def apply_packed(feat, thr, left, right, vote, roots, X):
    """Count bot votes per sample over a packed forest.

    Packed arrays concatenate every tree's nodes; roots holds each tree's
    root offset. vote is the per-node leaf decision (1 = bot).
    """
    n = X.shape[0]
    out = np.zeros(n, np.int64)
    for b in range(roots.size):
        root = roots[b]
        for s in range(n):
            node = root
            while feat[node] >= 0:
                if X[s, feat[node]] <= thr[node]:
                    node = left[node]
                else:
                    node = right[node]
            out[s] += vote[node]
    return out

"""NumPy reference implementation of the _kernels contracts.

Used when numba is unavailable, and as the cross-check target for the
compiled kernels: identical rng consumption, identical float operation
order, therefore bit-identical trees.
"""

from __future__ import annotations

import numpy as np


def bootstrap_orders(global_sorted, boot):
    d, n = global_sorted.shape
    nb = boot.size
    order = np.argsort(boot, kind="stable").astype(np.int32)
    sorted_boot = boot[order]
    # start[g]:start[g+1] slices `order` into the positions drawing row g
    start = np.searchsorted(sorted_boot, np.arange(n + 1))
    out = np.empty((d, nb), np.int32)
    for r in range(d):
        w = 0
        for g in global_sorted[r]:
            s, e = start[g], start[g + 1]
            if e > s:
                out[r, w:w + (e - s)] = order[s:e]
                w += e - s
    return out


def _scan_rows(XT, y, sorted_rows, cand, pos, m):
    """Shared gain scan; mirrors the compiled kernel's arithmetic order."""
    mf = float(m)
    npos = int(pos)
    ph = (m - npos) / mf
    pb = npos / mf
    g_parent = 1.0 - ph * ph - pb * pb
    best = None  # (gain, f, t) with max-gain / min-(f, t) preference
    for j in range(sorted_rows.shape[0]):
        f = int(cand[j])
        ids = sorted_rows[j]
        xs = XT[f][ids]
        ys = y[ids]
        lp = np.cumsum(ys)[:-1]
        nl = np.arange(1, m, dtype=np.float64)
        nr = mf - nl
        rp = pos - lp
        lh = (nl - lp) / nl
        lb = lp / nl
        gl = 1.0 - lh * lh - lb * lb
        rh = (nr - rp) / nr
        rb = rp / nr
        gr = 1.0 - rh * rh - rb * rb
        gain = g_parent - (nl / mf) * gl - (nr / mf) * gr
        valid = (xs[1:] != xs[:-1]) & (gain > 0.0)
        if not valid.any():
            continue
        gmax = gain[valid].max()
        for i in np.nonzero(valid & (gain == gmax))[0]:
            t = (xs[i] + xs[i + 1]) / 2.0
            key = (gmax, f, t)
            if (
                best is None
                or key[0] > best[0]
                or (key[0] == best[0] and (f < best[1] or (f == best[1] and t < best[2])))
            ):
                best = key
    if best is None:
        return -1, 0.0, 0.0
    return best[1], best[2], best[0]


def scan_best_split(XT, y, sorted_rows, cand):
    m = sorted_rows.shape[1]
    pos = float(y[sorted_rows[0]].sum())
    f, t, g = _scan_rows(XT, y, sorted_rows, cand, pos, m)
    return f, t, g


def grow_tree(XT, y, smat, rng, mtry, min_split, max_depth):
    d, nb = XT.shape
    feature, threshold, left, right, counts = [], [], [], [], []
    flags = np.empty(nb, dtype=bool)
    k = min(mtry, d)
    stack = [(0, nb, -1, 0, 0)]
    while stack:
        lo, hi, parent, isl, dep = stack.pop()
        node = len(feature)
        if parent >= 0:
            if isl == 1:
                left[parent] = node
            else:
                right[parent] = node
        m = hi - lo
        ids = smat[0, lo:hi]
        pos = float(y[ids].sum())
        npos = int(pos)
        counts.append((m - npos, npos))
        feature.append(-1)
        threshold.append(np.nan)
        left.append(-1)
        right.append(-1)
        if npos == 0 or npos == m or m < min_split or (max_depth >= 0 and dep >= max_depth):
            continue
        pool = list(range(d))
        for i in range(k):
            j = i + int(rng.integers(0, d - i))
            pool[i], pool[j] = pool[j], pool[i]
        cand = np.asarray(pool[:k], dtype=np.int64)
        f, t, _gain = _scan_rows(XT, y, smat[cand, lo:hi], cand, pos, m)
        if f < 0:
            continue
        go_left = XT[f][ids] <= t
        flags[ids] = go_left
        n_left = int(go_left.sum())
        for r in range(d):
            seg = smat[r, lo:hi]
            mask = flags[seg]
            smat[r, lo:hi] = np.concatenate([seg[mask], seg[~mask]])
        feature[node] = f
        threshold[node] = t
        mid = lo + n_left
        stack.append((mid, hi, node, 0, dep + 1))
        stack.append((lo, mid, node, 1, dep + 1))
    return (
        np.asarray(feature, dtype=np.int32),
        np.asarray(threshold, dtype=np.float64),
        np.asarray(left, dtype=np.int32),
        np.asarray(right, dtype=np.int32),
        np.asarray(counts, dtype=np.int64).reshape(len(counts), 2),
    )


def apply_packed(feat, thr, left, right, vote, roots, X):
    n = X.shape[0]
    out = np.zeros(n, np.int64)
    for root in roots:
        nodes = np.full(n, root, dtype=np.int64)
        active = feat[nodes] >= 0
        while active.any():
            cur = nodes[active]
            f = feat[cur]
            go_left = X[np.nonzero(active)[0], f] <= thr[cur]
            nodes[active] = np.where(go_left, left[cur], right[cur])
            active = feat[nodes] >= 0
        out += vote[nodes]
    return out

"""Pure-Python kernel: reference implementations of the hot search loops.

The compiled Cython kernel (_cykernel) mirrors disc_min and
efc_search_binary step for step, so results AND node counts match
between backends. lemma_sweep is the one function where the two
backends take different routes to the same answer: the compiled kernel
walks every (family, allocation) pair directly, while this module
factors the per-set quantities out of the family loop and batches the
checks with numpy. Both count the same pairs and the same violations.

All masks are int bitmasks, all arithmetic is exact integer arithmetic.
Discrepancy values are handled as integer numerators over the fixed
denominator k (resp. n), which keeps comparisons exact.
"""

from __future__ import annotations

from itertools import product

import numpy as np

_NO_BUDGET = 1 << 62

# pykernel grids hold 2^(n*m) int64 entries; beyond this cap the sweep
# would not fit in memory anyway.
LEMMA_SWEEP_MAX_BITS = 22


class _State:
    __slots__ = ("nodes", "limit", "aborted", "best", "best_vec")

    def __init__(self, limit):
        self.nodes = 0
        self.limit = limit
        self.aborted = False
        self.best = None
        self.best_vec = None

    def update(self, val, vec):
        # the incumbent may only improve; a regression means the search is broken
        assert self.best is None or val < self.best
        self.best = val
        self.best_vec = vec


# ---------------------------------------------------------------------------
# exact minimum discrepancy over k-colorings


def disc_min(m, k, sets, budget=None):
    """Branch-and-bound minimum of the discrepancy numerator over colorings.

    Items are assigned colors in index order; color c+1 may first appear
    only after color c (color classes are interchangeable, so this loses
    no minima). The bound at a partial assignment uses the already
    determined intersection counts: a count already above size/k can
    only grow, and one that cannot reach size/k even if every remaining
    member joins the class stays short.

    Returns (found, best_num, best_coloring, nodes, complete) where the
    discrepancy value is best_num / k and best_coloring uses colors
    0..k-1. A node is one item-color assignment; `budget` caps nodes.
    """
    n = len(sets)
    limit = _NO_BUDGET if budget is None else int(budget)
    sizes = [a.bit_count() for a in sets]
    if m == 0:
        return True, 0, [], 0, True

    rem = [[0] * (m + 1) for _ in range(n)]
    for i, a in enumerate(sets):
        for x in range(m - 1, -1, -1):
            rem[i][x] = rem[i][x + 1] + ((a >> x) & 1)

    cnt = [[0] * k for _ in range(n)]
    color = [-1] * m
    st = _State(limit)

    def leaf_num():
        best = 0
        for i in range(n):
            si = sizes[i]
            row = cnt[i]
            for l in range(k):
                d = k * row[l] - si
                if d < 0:
                    d = -d
                if d > best:
                    best = d
        return best

    def lower_bound(x):
        lb = 0
        for i in range(n):
            si = sizes[i]
            ri = rem[i][x]
            row = cnt[i]
            for l in range(k):
                hi = k * row[l] - si
                if hi > lb:
                    lb = hi
                lo = si - k * (row[l] + ri)
                if lo > lb:
                    lb = lo
        return lb

    def descend(x, used):
        if x == m:
            num = leaf_num()
            if st.best is None or num < st.best:
                st.update(num, color.copy())
            return
        top = used if used < k else k - 1
        for l in range(top + 1):
            if st.nodes >= st.limit:
                st.aborted = True
                return
            st.nodes += 1
            color[x] = l
            for i in range(n):
                if (sets[i] >> x) & 1:
                    cnt[i][l] += 1
            lb = lower_bound(x + 1)
            if st.best is None or lb < st.best:
                descend(x + 1, used + 1 if l == used else used)
            for i in range(n):
                if (sets[i] >> x) & 1:
                    cnt[i][l] -= 1
            color[x] = -1
            if st.aborted:
                return

    descend(0, 0)
    found = st.best is not None
    return found, (st.best if found else -1), st.best_vec, st.nodes, not st.aborted


# ---------------------------------------------------------------------------
# exact minimum EFc over allocations of a binary instance


def default_classes(amasks, bmasks):
    """Symmetry classes: couples are interchangeable only when their
    valuation pairs are literally identical."""
    classes = []
    for i, pair in enumerate(zip(amasks, bmasks)):
        for j in range(i + 1):
            if (amasks[j], bmasks[j]) == pair:
                classes.append(j)
                break
    return classes


def efc_search_binary(m, n, amasks, bmasks, budget=None, classes=None):
    """Branch-and-bound minimum c_star over all n^m allocations.

    Couple i's agents value the item sets amasks[i] and bmasks[i]; the
    removal count of a binary agent a against bundle pair (own, other)
    is max(0, |a & other| - |a & own|). Items are branched in descending
    total value (number of agents valuing them), ties toward the lower
    index; children try couples with the smallest current bundle first.
    The bound assumes every unassigned item of an agent's set lands in
    its own bundle, which can only shrink the final counts, so pruning
    is sound. A first item may go to couple i only if no identical
    lower-indexed couple is still empty.

    Returns (found, best_c, best_owner, nodes, complete).
    """
    limit = _NO_BUDGET if budget is None else int(budget)
    if classes is None:
        classes = default_classes(amasks, bmasks)
    if m == 0:
        return True, 0, [], 0, True

    totval = [
        sum(((amasks[i] >> x) & 1) + ((bmasks[i] >> x) & 1) for i in range(n))
        for x in range(m)
    ]
    order = sorted(range(m), key=lambda x: (-totval[x], x))
    rem_a = [[0] * (m + 1) for _ in range(n)]
    rem_b = [[0] * (m + 1) for _ in range(n)]
    for i in range(n):
        for p in range(m - 1, -1, -1):
            x = order[p]
            rem_a[i][p] = rem_a[i][p + 1] + ((amasks[i] >> x) & 1)
            rem_b[i][p] = rem_b[i][p + 1] + ((bmasks[i] >> x) & 1)

    ca = [[0] * n for _ in range(n)]
    cb = [[0] * n for _ in range(n)]
    bsize = [0] * n
    owner = [-1] * m
    st = _State(limit)

    def leaf_c():
        c = 0
        for i in range(n):
            rowa = ca[i]
            rowb = cb[i]
            oa = rowa[i]
            ob = rowb[i]
            for j in range(n):
                if j == i:
                    continue
                d = rowa[j] - oa
                if d > c:
                    c = d
                d = rowb[j] - ob
                if d > c:
                    c = d
        return c

    def lower_bound(p):
        lb = 0
        for i in range(n):
            rowa = ca[i]
            rowb = cb[i]
            besta = rowa[i] + rem_a[i][p]
            bestb = rowb[i] + rem_b[i][p]
            for j in range(n):
                if j == i:
                    continue
                d = rowa[j] - besta
                if d > lb:
                    lb = d
                d = rowb[j] - bestb
                if d > lb:
                    lb = d
        return lb

    def descend(p):
        if p == m:
            c = leaf_c()
            if st.best is None or c < st.best:
                st.update(c, owner.copy())
            return
        x = order[p]
        children = sorted(range(n), key=lambda j: (bsize[j], j))
        for j in children:
            if bsize[j] == 0:
                blocked = False
                for j2 in range(j):
                    if classes[j2] == classes[j] and bsize[j2] == 0:
                        blocked = True
                        break
                if blocked:
                    continue
            if st.nodes >= st.limit:
                st.aborted = True
                return
            st.nodes += 1
            owner[x] = j
            bsize[j] += 1
            for i in range(n):
                ca[i][j] += (amasks[i] >> x) & 1
                cb[i][j] += (bmasks[i] >> x) & 1
            lb = lower_bound(p + 1)
            if st.best is None or lb < st.best:
                descend(p + 1)
            for i in range(n):
                ca[i][j] -= (amasks[i] >> x) & 1
                cb[i][j] -= (bmasks[i] >> x) & 1
            bsize[j] -= 1
            owner[x] = -1
            if st.aborted:
                return

    descend(0)
    found = st.best is not None
    return found, (st.best if found else -1), st.best_vec, st.nodes, not st.aborted


# ---------------------------------------------------------------------------
# exhaustive reduction check over all families x all allocations


def _outer_max(vecs):
    grid = vecs[0]
    for v in vecs[1:]:
        grid = np.maximum(grid[..., None], v)
    return grid


def lemma_sweep(n, m):
    """Run the reduction checks on every pair (family, allocation) at (n, m).

    For each of the n^m allocations and each of the 2^(n*m) families this
    evaluates, with c = the allocation's exact c_star on the induced
    binary instance:

      1. every agent's value for any bundle is within c of its own;
      2. bundle sizes pairwise within 2c and each within m/n +- 2c;
      3. | |A_i| - n*|A_i & S_j| | <= 6*n*c for every i, j (numerators
         over the denominator n);
      4. the induced coloring's discrepancy is at most 6c.

    Returns (pairs, violations, first_violation). first_violation is
    None when everything holds, else (owner, family_masks, check_name).
    """
    if n < 1 or m < 0:
        raise ValueError("need n >= 1 and m >= 0")
    if n * m > LEMMA_SWEEP_MAX_BITS:
        raise ValueError(
            f"lemma_sweep grids need 2^(n*m) entries; n*m = {n * m} is too large"
        )
    nmask = 1 << m
    idx = np.arange(nmask, dtype=np.int64)
    pc = np.zeros(nmask, dtype=np.int64)
    for b in range(m):
        pc += (idx >> b) & 1

    pairs = 0
    violations = 0
    first = None
    for owner in product(range(n), repeat=m):
        bundle = [0] * n
        for x, j in enumerate(owner):
            bundle[j] |= 1 << x
        szs = [s.bit_count() for s in bundle]
        smin = min(szs)
        smax = max(szs)

        inter = np.empty((nmask, n), dtype=np.int64)
        for j in range(n):
            inter[:, j] = pc[idx & bundle[j]]

        margin_cols = []
        cstar_cols = []
        for i in range(n):
            others = [j for j in range(n) if j != i]
            if others:
                comp = np.array(szs, dtype=np.int64)[others][None, :] - inter[:, others]
                m1 = inter[:, others].max(axis=1) - inter[:, i]
                m2 = comp.max(axis=1) - (szs[i] - inter[:, i])
                margin = np.maximum(m1, m2)
            else:
                margin = np.full(nmask, -(1 << 40), dtype=np.int64)
            margin_cols.append(margin)
            cstar_cols.append(np.maximum(margin, 0))
        dnum = np.abs(pc[:, None] - n * inter).max(axis=1)

        c_grid = _outer_max(cstar_cols)
        margin_grid = _outer_max(margin_cols)
        dnum_grid = _outer_max([dnum] * n)

        ok1 = margin_grid <= c_grid
        ok2 = (
            (smax - smin <= 2 * c_grid)
            & (n * smin >= m - 2 * n * c_grid)
            & (n * smax <= m + 2 * n * c_grid)
        )
        ok34 = dnum_grid <= 6 * n * c_grid
        ok = ok1 & ok2 & ok34

        pairs += nmask**n
        bad = int(ok.size - np.count_nonzero(ok))
        if bad:
            violations += bad
            if first is None:
                flat = int(np.flatnonzero(~ok.reshape(-1))[0])
                masks = np.unravel_index(flat, (nmask,) * n)
                which = (
                    "claim1"
                    if not ok1.reshape(-1)[flat]
                    else ("claim2" if not ok2.reshape(-1)[flat] else "disc_bound")
                )
                first = (tuple(owner), tuple(int(a) for a in masks), which)
    return pairs, violations, first

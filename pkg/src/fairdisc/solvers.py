"""Exact minimum-EFc allocation search plus baseline allocation generators.

solve_min_efc realizes the "for every allocation" quantifier by
branch-and-bound over all n^m item-to-couple maps. Binary instances run
on the bitmask kernel (compiled when available); general exact-valued
instances use the same search written over value sums. Couples are
treated as interchangeable only when their valuation pairs are
literally identical, so family-induced instances with distinct sets get
a full enumeration.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from fairdisc import _kernel
from fairdisc.envy import min_efc, removal_count
from fairdisc.model import (
    Allocation,
    Instance,
    Numeric,
    require_valid,
)

_NO_BUDGET = 1 << 62


@dataclass(frozen=True)
class SolveResult:
    """Best allocation found; exhaustive means no allocation beats it.

    best_alloc is None only when the node budget ran out before the
    search completed its first allocation.
    """

    best_c: int
    best_alloc: Allocation | None
    nodes: int
    exhaustive: bool

    def to_json_dict(self) -> dict:
        return {
            "best_c": self.best_c if self.best_alloc is not None else None,
            "best_alloc": self.best_alloc.to_json_dict()
            if self.best_alloc is not None
            else None,
            "nodes": self.nodes,
            "exhaustive": self.exhaustive,
        }


def _identity_classes(inst: Instance) -> list[int]:
    pairs = [(c.agent1.values, c.agent2.values) for c in inst.couples]
    classes = []
    for i, pair in enumerate(pairs):
        for j in range(i + 1):
            if pairs[j] == pair:
                classes.append(j)
                break
    return classes


class _GeneralState:
    __slots__ = ("nodes", "limit", "aborted", "best", "best_vec")

    def __init__(self, limit):
        self.nodes = 0
        self.limit = limit
        self.aborted = False
        self.best = None
        self.best_vec = None


def _search_general(inst: Instance, budget: int | None):
    """Branch-and-bound over allocations for arbitrary exact valuations.

    Same search shape as the binary kernel: items in descending total
    value over all agents, children ordered by the owning couple's
    current bundle value, pruning from the sound bound that sends every
    unassigned item to the envier's own bundle.
    """
    m, n = inst.m, inst.n
    limit = _NO_BUDGET if budget is None else int(budget)
    classes = _identity_classes(inst)
    agents = [(c.agent1.values, c.agent2.values) for c in inst.couples]

    totval = [
        sum(a1[x] + a2[x] for a1, a2 in agents) for x in range(m)
    ]
    order = sorted(range(m), key=lambda x: (-totval[x], x))

    # own_rest[i][r][p]: value agent (i, r) assigns to the still-unassigned
    # items at position p of the branching order.
    own_rest = [
        [[0] * (m + 1) for _ in range(2)] for _ in range(n)
    ]
    for i, (a1, a2) in enumerate(agents):
        for p in range(m - 1, -1, -1):
            x = order[p]
            own_rest[i][0][p] = own_rest[i][0][p + 1] + a1[x]
            own_rest[i][1][p] = own_rest[i][1][p + 1] + a2[x]

    # val[i][r][j]: value agent (i, r) assigns to the assigned part of bundle j.
    val = [[[0] * n for _ in range(2)] for _ in range(n)]
    # items[j]: assigned items of bundle j in assignment order (for removal counts).
    items: list[list[int]] = [[] for _ in range(n)]
    bval = [0] * n  # own couple's total value of its assigned bundle
    bsize = [0] * n
    owner = [-1] * m
    st = _GeneralState(limit)

    def greedy_count(vals: Sequence[Numeric], own_total, other_items) -> int:
        other_vals = sorted((vals[x] for x in other_items), reverse=True)
        deficit = sum(other_vals)
        t = 0
        while own_total < deficit:
            deficit -= other_vals[t]
            t += 1
        return t

    def leaf_c() -> int:
        c = 0
        for i in range(n):
            for r in range(2):
                vals = agents[i][r]
                own_total = val[i][r][i]
                for j in range(n):
                    if j == i:
                        continue
                    t = greedy_count(vals, own_total, items[j])
                    if t > c:
                        c = t
        return c

    def lower_bound(p: int) -> int:
        lb = 0
        for i in range(n):
            for r in range(2):
                vals = agents[i][r]
                own_max = val[i][r][i] + own_rest[i][r][p]
                for j in range(n):
                    if j == i:
                        continue
                    t = greedy_count(vals, own_max, items[j])
                    if t > lb:
                        lb = t
        return lb

    def descend(p: int):
        if p == m:
            c = leaf_c()
            if st.best is None or c < st.best:
                st.best = c
                st.best_vec = owner.copy()
            return
        x = order[p]
        children = sorted(range(n), key=lambda j: (bval[j], j))
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
            items[j].append(x)
            bval[j] += agents[j][0][x] + agents[j][1][x]
            for i in range(n):
                val[i][0][j] += agents[i][0][x]
                val[i][1][j] += agents[i][1][x]
            lb = lower_bound(p + 1)
            if st.best is None or lb < st.best:
                descend(p + 1)
            for i in range(n):
                val[i][0][j] -= agents[i][0][x]
                val[i][1][j] -= agents[i][1][x]
            bval[j] -= agents[j][0][x] + agents[j][1][x]
            items[j].pop()
            bsize[j] -= 1
            owner[x] = -1
            if st.aborted:
                return

    descend(0)
    found = st.best is not None
    return found, (st.best if found else -1), st.best_vec, st.nodes, not st.aborted


def solve_min_efc(
    inst: Instance, budget: int | None = None, threads: int = 1
) -> SolveResult:
    """Minimum c_star over all allocations of the instance.

    With a node budget, an exhausted search reports the best allocation
    found so far with exhaustive=False. `threads` is accepted for
    interface symmetry with the sweep; the search itself is
    single-threaded (its result is scheduling-independent by contract).
    """
    require_valid(inst)
    del threads
    m, n = inst.m, inst.n
    if m == 0:
        return SolveResult(0, Allocation((), n), 0, True)
    if inst.binary_flag:
        amasks = [c.agent1.mask() for c in inst.couples]
        bmasks = [c.agent2.mask() for c in inst.couples]
        classes = _identity_classes(inst)
        found, best_c, best_vec, nodes, complete = _kernel.efc_search_binary(
            m, n, amasks, bmasks, budget, classes
        )
    else:
        found, best_c, best_vec, nodes, complete = _search_general(inst, budget)
    if not found:
        return SolveResult(0, None, nodes, False)
    alloc = Allocation(tuple(best_vec), n)
    assert min_efc(inst, alloc).c_star == best_c
    return SolveResult(best_c, alloc, nodes, complete)


def round_robin(inst: Instance, order: Sequence[int] | None = None) -> Allocation:
    """Baseline allocation: couples take turns picking items.

    `order` is one round of couple indices, repeated until the items run
    out (default 0..n-1). On its turn a couple takes the remaining item
    its agent 1 values most, ties toward the lower item index.
    """
    require_valid(inst)
    if order is None:
        order = list(range(inst.n))
    order = list(order)
    if not order:
        raise ValueError("pick order must be nonempty")
    for j in order:
        if not 0 <= j < inst.n:
            raise ValueError(f"pick order entry {j} out of range for n = {inst.n}")
    owner = [-1] * inst.m
    remaining = set(range(inst.m))
    turn = 0
    while remaining:
        j = order[turn % len(order)]
        vals = inst.couples[j].agent1.values
        pick = max(remaining, key=lambda x: (vals[x], -x))
        owner[pick] = j
        remaining.remove(pick)
        turn += 1
    alloc = Allocation(tuple(owner), inst.n)
    require_valid(alloc)
    return alloc


def enumerate_c_star(inst: Instance):
    """Plain unpruned n^m enumeration of every allocation's c_star.

    Test oracle for the branch-and-bound search; exponential, keep m small.
    """
    from itertools import product as _product

    require_valid(inst)
    best = None
    for owner in _product(range(inst.n), repeat=inst.m):
        alloc = Allocation(owner, inst.n)
        c = min_efc(inst, alloc).c_star
        if best is None or c < best[0]:
            best = (c, alloc)
    if best is None:
        return 0, Allocation((), inst.n)
    return best

"""Envy measurement: the minimum c for which an allocation is EFc.

An allocation is EFc when for every ordered couple pair (i, j) and each
of couple i's two agents, removing at most c items from bundle j kills
that agent's envy. The per-agent removal sets are allowed to differ.
For additive non-negative valuations, removing the t highest-valued
items of the other bundle is the optimal removal of size t, so a greedy
scan computes the exact count; removal_count_bruteforce keeps the
definition-level subset minimization around as a reference oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from fairdisc.model import (
    Allocation,
    Instance,
    Numeric,
    Valuation,
    bundles,
    indices_from_mask,
    require_valid,
    value,
)


def _values_of(v) -> Sequence[Numeric]:
    return v.values if isinstance(v, Valuation) else v


def removal_count(v: Valuation | Sequence[Numeric], own: int, other: int) -> int:
    """Smallest t such that dropping t items from `other` removes envy.

    Returns the least t >= 0 with value(own) >= value(other) minus the t
    largest values among `other`'s items. `own` and `other` are disjoint
    bundle bitmasks. Ties between equally valued items are broken toward
    the lower index; the count itself is tie-invariant.
    """
    if own & other:
        raise ValueError("own and other bundles must be disjoint")
    vals = _values_of(v)
    own_total: Numeric = 0
    other_vals: list[Numeric] = []
    for x in indices_from_mask(own):
        own_total += vals[x]
    for x in indices_from_mask(other):
        other_vals.append(vals[x])
    other_vals.sort(reverse=True)
    deficit: Numeric = sum(other_vals)
    t = 0
    while own_total < deficit:
        deficit -= other_vals[t]
        t += 1
    return t


def removal_count_binary(a: int, own: int, other: int) -> int:
    """removal_count for the indicator valuation of bitmask a.

    Closed form: max(0, |a intersect other| - |a intersect own|).
    """
    if own & other:
        raise ValueError("own and other bundles must be disjoint")
    return max(0, (a & other).bit_count() - (a & own).bit_count())


def removal_count_bruteforce(
    v: Valuation | Sequence[Numeric], own: int, other: int
) -> int:
    """Reference oracle: exhaustive minimization over removal subsets.

    Tries every R subset of `other` in increasing size until
    value(own) >= value(other \\ R). Exponential in |other|; test use only.
    """
    if own & other:
        raise ValueError("own and other bundles must be disjoint")
    vals = _values_of(v)
    items = indices_from_mask(other)
    own_total: Numeric = sum(vals[x] for x in indices_from_mask(own))
    other_total: Numeric = sum(vals[x] for x in items)
    for t in range(len(items) + 1):
        for removed in combinations(items, t):
            if own_total >= other_total - sum(vals[x] for x in removed):
                return t
    raise AssertionError("unreachable: removing everything always works")


@dataclass(frozen=True)
class EnvyReport:
    """Exact EFc diagnosis of one allocation.

    per_pair[i][j] holds the removal counts (agent 1, agent 2) couple i
    needs against bundle j; the diagonal is zero. c_star is the maximum
    entry, so the allocation is EFc exactly for c >= c_star.
    """

    c_star: int
    per_pair: tuple[tuple[tuple[int, int], ...], ...]

    def to_json_dict(self) -> dict:
        return {
            "c_star": self.c_star,
            "per_pair": [[list(cell) for cell in row] for row in self.per_pair],
        }


def min_efc(inst: Instance, alloc: Allocation) -> EnvyReport:
    """Compute the exact minimum c for which `alloc` is EFc on `inst`."""
    require_valid(inst)
    require_valid(alloc)
    if alloc.m != inst.m:
        raise ValueError(
            f"dimension mismatch: allocation covers {alloc.m} items, "
            f"instance has {inst.m}"
        )
    if alloc.n != inst.n:
        raise ValueError(
            f"dimension mismatch: allocation has {alloc.n} couples, "
            f"instance has {inst.n}"
        )
    parts = bundles(alloc)
    per_pair = []
    c_star = 0
    for i, couple in enumerate(inst.couples):
        row = []
        for j in range(inst.n):
            if i == j:
                row.append((0, 0))
                continue
            c1 = removal_count(couple.agent1, parts[i], parts[j])
            c2 = removal_count(couple.agent2, parts[i], parts[j])
            row.append((c1, c2))
            if c1 > c_star:
                c_star = c1
            if c2 > c_star:
                c_star = c2
        per_pair.append(tuple(row))
    return EnvyReport(c_star, tuple(per_pair))

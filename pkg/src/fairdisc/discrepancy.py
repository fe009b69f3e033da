"""Multicolor discrepancy of a set family.

The discrepancy of a coloring is the worst imbalance
| |A_i|/k - |A_i intersect class(ell)| | over all sets i and colors ell;
the discrepancy of the family at k colors is the minimum over all k^m
colorings. Values carry the denominator k, so everything is kept as
exact rationals (integer numerators over k internally).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterator

from fairdisc import _kernel
from fairdisc.model import Coloring, SetFamily, require_valid

# 2^(n*m) families is the exhaustive-enumeration regime; beyond this the
# caller must opt into sampling.
MAX_EXHAUSTIVE_FAMILY_BITS = 16


@dataclass(frozen=True)
class DiscrepancyValue:
    """A discrepancy value together with the set and color attaining it."""

    value: Fraction
    witness_set: int
    witness_color: int

    def to_json_dict(self) -> dict:
        return {
            "value": f"{self.value.numerator}/{self.value.denominator}"
            if self.value.denominator != 1
            else str(self.value.numerator),
            "witness": {"set": self.witness_set, "color": self.witness_color},
        }


@dataclass(frozen=True)
class DiscResult:
    """Outcome of an exact search: value is None only when the node budget
    ran out before the first complete coloring."""

    value: DiscrepancyValue | None
    coloring: Coloring | None
    nodes: int
    complete: bool


@dataclass(frozen=True)
class HeuristicResult:
    value: DiscrepancyValue
    coloring: Coloring
    restarts: int
    moves: int


@dataclass(frozen=True)
class MaxDiscResult:
    """Best family found by max_disc_search; a lower bound on the true
    maximum unless `exhaustive` is set."""

    family: SetFamily
    value: DiscrepancyValue
    families_examined: int
    nodes: int
    exhaustive: bool


def coloring_disc(fam: SetFamily, chi: Coloring) -> DiscrepancyValue:
    """Exact discrepancy of one coloring.

    Ties among maximizing (set, color) pairs resolve to the smallest
    (set, color) lexicographically.
    """
    require_valid(fam)
    require_valid(chi)
    if chi.m != fam.m:
        raise ValueError(
            f"ground-set mismatch: coloring covers {chi.m} items, family has {fam.m}"
        )
    k = chi.k
    class_masks = [chi.class_mask(ell) for ell in range(1, k + 1)]
    best_num = -1
    witness = (0, 1)
    for i, a in enumerate(fam.members):
        size = a.bit_count()
        for ell in range(1, k + 1):
            num = abs(size - k * (a & class_masks[ell - 1]).bit_count())
            if num > best_num:
                best_num = num
                witness = (i, ell)
    return DiscrepancyValue(Fraction(best_num, k), witness[0], witness[1])


def exact_disc(fam: SetFamily, k: int, budget: int | None = None) -> DiscResult:
    """Exact minimum discrepancy over all k-colorings of the ground set.

    Runs the branch-and-bound kernel (items in index order, bounds from
    the already determined intersection counts, colors canonicalized by
    first appearance). With a node budget, an exhausted search returns
    the best coloring found so far and complete=False.
    """
    require_valid(fam)
    if k < 1:
        raise ValueError(f"color count must be at least 1, got k = {k}")
    found, best_num, best_vec, nodes, complete = _kernel.disc_min(
        fam.m, k, list(fam.members), budget
    )
    if not found:
        return DiscResult(None, None, nodes, False)
    chi = Coloring(k, tuple(c + 1 for c in best_vec))
    dv = coloring_disc(fam, chi)
    assert dv.value == Fraction(best_num, k)
    return DiscResult(dv, chi, nodes, complete)


def _disc_num(members, sizes, k, color) -> int:
    """Discrepancy numerator (value * k) of a 1-based color vector."""
    cnt = [[0] * k for _ in range(len(members))]
    for x, c in enumerate(color):
        bit = 1 << x
        for i, a in enumerate(members):
            if a & bit:
                cnt[i][c - 1] += 1
    best = 0
    for i, size in enumerate(sizes):
        for ell in range(k):
            d = abs(size - k * cnt[i][ell])
            if d > best:
                best = d
    return best


def heuristic_disc(
    fam: SetFamily, k: int, seed: int, restarts: int = 1
) -> HeuristicResult:
    """Random-restart local search; an upper bound on exact_disc.

    Each restart draws a uniform coloring and repeatedly applies the
    first strictly improving single-item recolor (items scanned in index
    order, colors in ascending order) until none exists. Deterministic
    for a fixed seed.
    """
    require_valid(fam)
    if k < 1:
        raise ValueError(f"color count must be at least 1, got k = {k}")
    if restarts < 1:
        raise ValueError(f"need at least one restart, got {restarts}")
    rng = random.Random(seed)
    members = list(fam.members)
    sizes = [a.bit_count() for a in members]
    m = fam.m
    best_num = None
    best_color = tuple([1] * m)
    moves = 0
    for _ in range(restarts):
        color = [rng.randrange(1, k + 1) for _ in range(m)]
        cur = _disc_num(members, sizes, k, color)
        improved = True
        while improved:
            improved = False
            for x in range(m):
                old = color[x]
                for c in range(1, k + 1):
                    if c == old:
                        continue
                    color[x] = c
                    cand = _disc_num(members, sizes, k, color)
                    if cand < cur:
                        cur = cand
                        moves += 1
                        improved = True
                        break
                    color[x] = old
                if improved:
                    break
        if best_num is None or cur < best_num:
            best_num = cur
            best_color = tuple(color)
    chi = Coloring(k, best_color)
    dv = coloring_disc(fam, chi)
    assert dv.value == Fraction(best_num, k)
    return HeuristicResult(dv, chi, restarts, moves)


def _all_families(n: int, m: int) -> Iterator[tuple[int, ...]]:
    return product(range(1 << m), repeat=n)


def _sampled_families(n, m, seed, samples) -> Iterator[tuple[int, ...]]:
    rng = random.Random(seed)
    for _ in range(samples):
        yield tuple(rng.getrandbits(m) for _ in range(n))


def max_disc_search(
    n: int,
    m: int,
    k: int,
    mode: str = "exhaustive",
    seed=None,
    samples: int = 64,
    budget: int | None = None,
) -> MaxDiscResult:
    """Family of n subsets of [m] maximizing exact_disc at k colors.

    Exhaustive mode enumerates all 2^(n*m) families and needs
    n*m <= MAX_EXHAUSTIVE_FAMILY_BITS; sampled mode draws `samples`
    families with independent fair bits per (set, item) and reports an
    empirical lower bound. Ties go to the first family in enumeration
    (resp. draw) order. `budget` caps nodes per exact_disc call.
    """
    if n < 1 or m < 0:
        raise ValueError("need n >= 1 and m >= 0")
    if k < 1:
        raise ValueError(f"color count must be at least 1, got k = {k}")
    if mode == "exhaustive":
        if n * m > MAX_EXHAUSTIVE_FAMILY_BITS:
            raise ValueError(
                f"2^(n*m) families with n*m = {n * m} is beyond exhaustive "
                "enumeration; use mode='sampled'"
            )
        candidates = _all_families(n, m)
        exhaustive = True
    elif mode == "sampled":
        if seed is None:
            raise ValueError("sampled mode requires a seed")
        if samples < 1:
            raise ValueError(f"need at least one sample, got {samples}")
        candidates = _sampled_families(n, m, seed, samples)
        exhaustive = False
    else:
        raise ValueError(f"mode must be 'exhaustive' or 'sampled', got {mode!r}")

    best: tuple[SetFamily, DiscrepancyValue] | None = None
    examined = 0
    nodes = 0
    for masks in candidates:
        fam = SetFamily(n, m, masks)
        res = exact_disc(fam, k, budget)
        examined += 1
        nodes += res.nodes
        if res.value is None or not res.complete:
            exhaustive = False
            if res.value is None:
                continue
        if best is None or res.value.value > best[1].value:
            best = (fam, res.value)
    if best is None:
        raise ValueError("node budget too small to evaluate any family")
    return MaxDiscResult(best[0], best[1], examined, nodes, exhaustive)

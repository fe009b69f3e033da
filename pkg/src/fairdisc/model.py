"""Shared domain types for couple allocation and set-family discrepancy.

Conventions used throughout the package:

* items are indexed 0..m-1 and bundles / sets are passed around as
  bitmask ints (bit x set means item x is in);
* couples and family sets are zero-indexed, in memory and in JSON;
* colors are the 1-based labels 1..k, matching coloring notation;
* every value is an exact int or fractions.Fraction, never a float.

All types are immutable after construction; operations are pure
functions, so everything here is safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

Numeric = Union[int, Fraction]

# Exact reduced-fraction arithmetic with a total order and
# cross-multiplied comparisons is exactly what fractions.Fraction
# provides, so it backs the exact-rational type directly.
ExactRational = Fraction


# ---------------------------------------------------------------------------
# bitmask helpers


def mask_from_indices(indices: Iterable[int]) -> int:
    mask = 0
    for x in indices:
        mask |= 1 << x
    return mask


def indices_from_mask(mask: int) -> list[int]:
    out = []
    x = 0
    while mask:
        if mask & 1:
            out.append(x)
        mask >>= 1
        x += 1
    return out


# ---------------------------------------------------------------------------
# exact numbers in JSON: plain ints, or "p/q" strings for non-integers


def parse_numeric(raw) -> Numeric:
    """Parse a JSON number field: an integer or a "p/q" string."""
    if isinstance(raw, bool):
        raise ValueError(f"expected integer or 'p/q' string, got {raw!r}")
    if isinstance(raw, int):
        return raw
    if isinstance(raw, str):
        parts = raw.split("/")
        if len(parts) != 2:
            raise ValueError(f"malformed rational {raw!r}, expected 'p/q'")
        try:
            p, q = int(parts[0]), int(parts[1])
        except ValueError:
            raise ValueError(f"malformed rational {raw!r}, expected 'p/q'") from None
        if q <= 0:
            raise ValueError(f"rational {raw!r} must have a positive denominator")
        frac = Fraction(p, q)
        return int(frac) if frac.denominator == 1 else frac
    raise ValueError(f"expected integer or 'p/q' string, got {raw!r}")


def numeric_to_json(x: Numeric):
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return int(x)
        return f"{x.numerator}/{x.denominator}"
    return int(x)


def rat_str(x: Numeric) -> str:
    """Exact decimal-free rendering: "p" for integers, else "p/q"."""
    f = Fraction(x)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


# ---------------------------------------------------------------------------
# domain types


@dataclass(frozen=True)
class ItemSet:
    """The ground set of items, identified by the dense indices 0..m-1."""

    m: int


@dataclass(frozen=True)
class Valuation:
    """Additive valuation: one exact non-negative value per item."""

    values: tuple[Numeric, ...]

    @property
    def m(self) -> int:
        return len(self.values)

    def is_binary(self) -> bool:
        return all(v == 0 or v == 1 for v in self.values)

    def mask(self) -> int:
        """Bitmask of the positively valued items (the indicator support)."""
        return mask_from_indices(x for x, v in enumerate(self.values) if v != 0)

    @classmethod
    def indicator(cls, mask: int, m: int) -> "Valuation":
        return cls(tuple((mask >> x) & 1 for x in range(m)))


@dataclass(frozen=True)
class Couple:
    """Two agents sharing one bundle, each with their own valuation."""

    agent1: Valuation
    agent2: Valuation


@dataclass(frozen=True)
class Instance:
    """n couples over a common item set.

    binary_flag must be true iff every valuation entry is 0 or 1; use
    Instance.create to derive it instead of setting it by hand.
    """

    items: ItemSet
    couples: tuple[Couple, ...]
    binary_flag: bool

    @property
    def m(self) -> int:
        return self.items.m

    @property
    def n(self) -> int:
        return len(self.couples)

    @classmethod
    def create(cls, m: int, couples: Sequence[Couple]) -> "Instance":
        couples = tuple(couples)
        binary = all(
            c.agent1.is_binary() and c.agent2.is_binary() for c in couples
        )
        return cls(ItemSet(m), couples, binary)

    def to_json_dict(self) -> dict:
        return {
            "m": self.m,
            "couples": [
                {
                    "agent1": [numeric_to_json(v) for v in c.agent1.values],
                    "agent2": [numeric_to_json(v) for v in c.agent2.values],
                }
                for c in self.couples
            ],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "Instance":
        try:
            m = data["m"]
            raw_couples = data["couples"]
        except (KeyError, TypeError):
            raise ValueError("instance JSON needs 'm' and 'couples'") from None
        couples = []
        for c in raw_couples:
            couples.append(
                Couple(
                    Valuation(tuple(parse_numeric(v) for v in c["agent1"])),
                    Valuation(tuple(parse_numeric(v) for v in c["agent2"])),
                )
            )
        inst = cls.create(m, couples)
        require_valid(inst)
        return inst


@dataclass(frozen=True)
class Allocation:
    """Items mapped to owning couples: owner[x] is the couple of item x.

    Storing the item-to-couple map makes the induced bundles a partition
    by construction, so disjointness and coverage never need re-checking.
    """

    owner: tuple[int, ...]
    n: int

    @property
    def m(self) -> int:
        return len(self.owner)

    def to_json_dict(self) -> dict:
        return {"owner": list(self.owner)}

    @classmethod
    def from_json_dict(cls, data: dict, n: int | None = None) -> "Allocation":
        try:
            owner = tuple(int(x) for x in data["owner"])
        except (KeyError, TypeError, ValueError):
            raise ValueError("allocation JSON needs an integer list 'owner'") from None
        if n is None:
            n = max(owner) + 1 if owner else 1
        alloc = cls(owner, n)
        require_valid(alloc)
        return alloc


@dataclass(frozen=True)
class SetFamily:
    """n subsets of the ground set, stored as bitmasks of width m."""

    n: int
    m: int
    members: tuple[int, ...]

    def size(self, i: int) -> int:
        return self.members[i].bit_count()

    def complement(self, i: int) -> int:
        return ((1 << self.m) - 1) & ~self.members[i]

    @classmethod
    def from_masks(cls, m: int, masks: Sequence[int]) -> "SetFamily":
        fam = cls(len(masks), m, tuple(masks))
        require_valid(fam)
        return fam

    @classmethod
    def from_index_lists(cls, m: int, sets: Sequence[Iterable[int]]) -> "SetFamily":
        return cls.from_masks(m, [mask_from_indices(s) for s in sets])

    def to_json_dict(self) -> dict:
        return {"m": self.m, "sets": [indices_from_mask(a) for a in self.members]}

    @classmethod
    def from_json_dict(cls, data: dict) -> "SetFamily":
        try:
            m = data["m"]
            sets = data["sets"]
        except (KeyError, TypeError):
            raise ValueError("set-family JSON needs 'm' and 'sets'") from None
        masks = []
        for s in sets:
            masks.append(mask_from_indices(int(x) for x in s))
        fam = cls(len(masks), m, tuple(masks))
        require_valid(fam)
        return fam


@dataclass(frozen=True)
class Coloring:
    """Assignment of each item to one of the colors 1..k."""

    k: int
    color: tuple[int, ...]

    @property
    def m(self) -> int:
        return len(self.color)

    def class_mask(self, ell: int) -> int:
        """Bitmask of the items colored ell."""
        return mask_from_indices(x for x, c in enumerate(self.color) if c == ell)

    def to_json_dict(self) -> dict:
        return {"k": self.k, "color": list(self.color)}

    @classmethod
    def from_json_dict(cls, data: dict) -> "Coloring":
        try:
            k = int(data["k"])
            color = tuple(int(c) for c in data["color"])
        except (KeyError, TypeError, ValueError):
            raise ValueError("coloring JSON needs 'k' and a 'color' list") from None
        chi = cls(k, color)
        require_valid(chi)
        return chi


# ---------------------------------------------------------------------------
# operations


def bundle_of(alloc: Allocation, i: int) -> int:
    """Bitmask of the items owned by couple i."""
    if not 0 <= i < alloc.n:
        raise IndexError(f"couple index {i} out of range for n = {alloc.n}")
    mask = 0
    for x, j in enumerate(alloc.owner):
        if j == i:
            mask |= 1 << x
    return mask


def bundles(alloc: Allocation) -> list[int]:
    """All n bundle bitmasks; they partition the item set by construction."""
    out = [0] * alloc.n
    for x, j in enumerate(alloc.owner):
        out[j] |= 1 << x
    return out


def value(v: Valuation, bundle: int) -> Numeric:
    """Additive value of a bundle bitmask; value of the empty bundle is 0."""
    if bundle >> v.m:
        raise ValueError("bundle contains items outside the ground set")
    total: Numeric = 0
    x = 0
    mask = bundle
    while mask:
        if mask & 1:
            total += v.values[x]
        mask >>= 1
        x += 1
    return total


# ---------------------------------------------------------------------------
# validation: each checker reports the first violated invariant, or None


def validate_item_set(items: ItemSet) -> str | None:
    if items.m < 0:
        return f"item count must be non-negative, got m = {items.m}"
    return None


def validate_valuation(v: Valuation, m: int | None = None) -> str | None:
    if m is not None and v.m != m:
        return f"valuation length {v.m} does not match item count {m}"
    for x, entry in enumerate(v.values):
        if not isinstance(entry, (int, Fraction)) or isinstance(entry, bool):
            return f"valuation entry {x} is not an exact numeric"
        if entry < 0:
            return f"valuation entry {x} is negative ({entry})"
    return None


def validate_instance(inst: Instance) -> str | None:
    bad = validate_item_set(inst.items)
    if bad:
        return bad
    if inst.n < 1:
        return "instance needs at least one couple"
    for i, c in enumerate(inst.couples):
        for r, agent in enumerate((c.agent1, c.agent2), start=1):
            bad = validate_valuation(agent, inst.m)
            if bad:
                return f"couple {i} agent {r}: {bad}"
    all_binary = all(
        c.agent1.is_binary() and c.agent2.is_binary() for c in inst.couples
    )
    if inst.binary_flag and not all_binary:
        return "binary_flag is set but some valuation entry is not in {0,1}"
    if not inst.binary_flag and all_binary:
        return "binary_flag is unset but every valuation entry is in {0,1}"
    return None


def validate_allocation(alloc: Allocation) -> str | None:
    if alloc.n < 1:
        return "allocation needs at least one couple"
    for x, j in enumerate(alloc.owner):
        if not 0 <= j < alloc.n:
            return f"owner index out of range: owner[{x}] = {j} with n = {alloc.n}"
    return None


def validate_set_family(fam: SetFamily) -> str | None:
    if fam.n < 1:
        return "set family needs at least one member set"
    if fam.m < 0:
        return f"ground-set size must be non-negative, got m = {fam.m}"
    if len(fam.members) != fam.n:
        return f"family says n = {fam.n} but has {len(fam.members)} member sets"
    for i, a in enumerate(fam.members):
        if a < 0 or a >> fam.m:
            return f"set {i} is not a bitset of width {fam.m}"
    return None


def validate_coloring(chi: Coloring) -> str | None:
    if chi.k < 1:
        return f"color count must be at least 1, got k = {chi.k}"
    for x, c in enumerate(chi.color):
        if not 1 <= c <= chi.k:
            return f"item {x} has color {c} outside 1..{chi.k}"
    return None


_VALIDATORS = {
    ItemSet: validate_item_set,
    Valuation: validate_valuation,
    Instance: validate_instance,
    Allocation: validate_allocation,
    SetFamily: validate_set_family,
    Coloring: validate_coloring,
}


def validate(obj) -> str | None:
    """Check every invariant of a domain object.

    Returns None when the object is well formed, otherwise a report
    naming the first violated invariant. Never raises on bad data.
    """
    checker = _VALIDATORS.get(type(obj))
    if checker is None:
        return f"no validator for objects of type {type(obj).__name__}"
    return checker(obj)


def require_valid(obj) -> None:
    bad = validate(obj)
    if bad:
        raise ValueError(bad)

"""Finite set systems over an indexed ground set, in canonical bitmask form.

The ground set is {0, ..., n-1} and every member set is a bitmask over those
indices. Families are deduplicated and stored in ascending mask order, so two
systems are equal exactly when they describe the same family of sets. All
operations are pure functions; nothing here mutates a system in place.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Iterable


def indices_to_mask(ground_size: int, indices: Iterable[int]) -> int:
    """Pack a collection of distinct indices into a bitmask, validating range."""
    mask = 0
    for i in indices:
        if not isinstance(i, int) or isinstance(i, bool):
            raise ValueError(f"set element {i!r} is not an integer index")
        if not 0 <= i < ground_size:
            raise ValueError(f"index {i} out of range for ground size {ground_size}")
        bit = 1 << i
        if mask & bit:
            raise ValueError(f"duplicate index {i} within a set")
        mask |= bit
    return mask


def mask_to_indices(mask: int) -> list[int]:
    return [i for i in range(mask.bit_length()) if (mask >> i) & 1]


@dataclass(frozen=True)
class SetSystem:
    """A finite family of subsets of {0, ..., ground_size - 1}.

    ``sets`` must be strictly ascending bitmasks; use :meth:`from_masks` or
    :meth:`from_members` to canonicalize arbitrary input. The family may be
    empty, and the empty set may be a member.
    """

    ground_size: int
    sets: tuple[int, ...]

    def __post_init__(self) -> None:
        if not isinstance(self.ground_size, int) or self.ground_size < 1:
            raise ValueError("ground_size must be a positive integer")
        limit = 1 << self.ground_size
        prev = -1
        for mask in self.sets:
            if not 0 <= mask < limit:
                raise ValueError(
                    f"set mask {mask} out of range for ground size {self.ground_size}"
                )
            if mask <= prev:
                raise ValueError("sets must be strictly ascending; build via from_masks()")
            prev = mask

    @classmethod
    def from_masks(cls, ground_size: int, masks: Iterable[int]) -> "SetSystem":
        return cls(ground_size, tuple(sorted(set(masks))))

    @classmethod
    def from_members(cls, ground_size: int, members: Iterable[Iterable[int]]) -> "SetSystem":
        return cls.from_masks(
            ground_size, (indices_to_mask(ground_size, member) for member in members)
        )

    def member_lists(self) -> list[list[int]]:
        """The family as sorted index lists, in canonical order."""
        return [mask_to_indices(m) for m in self.sets]

    def __len__(self) -> int:
        return len(self.sets)


def _validate_subset(system: SetSystem, elements: Iterable[int]) -> tuple[int, ...]:
    ys = tuple(sorted(set(elements)))
    for y in ys:
        if not isinstance(y, int) or isinstance(y, bool) or not 0 <= y < system.ground_size:
            raise ValueError(f"element {y!r} out of range for ground size {system.ground_size}")
    return ys


def _projected_masks(system: SetSystem, ys: tuple[int, ...], stop_at: int | None = None) -> set[int]:
    """Project every member onto ys, re-indexed by position in ys.

    ``stop_at`` allows early exit once that many distinct projections exist.
    """
    out: set[int] = set()
    for mask in system.sets:
        small = 0
        for pos, y in enumerate(ys):
            if (mask >> y) & 1:
                small |= 1 << pos
        out.add(small)
        if stop_at is not None and len(out) >= stop_at:
            break
    return out


def project(system: SetSystem, elements: Iterable[int]) -> SetSystem:
    """The system induced on ``elements``: { Y ∩ R : R in the family }, re-indexed."""
    ys = _validate_subset(system, elements)
    if not ys:
        # Ground sets must be nonempty, so projection onto the empty set is
        # represented on a one-element ground set (only the empty set can occur).
        return SetSystem.from_masks(1, (0,) if system.sets else ())
    return SetSystem.from_masks(len(ys), _projected_masks(system, ys))


def shatters(system: SetSystem, elements: Iterable[int]) -> bool:
    """True iff every subset of ``elements`` arises as Y ∩ R for some member R."""
    ys = _validate_subset(system, elements)
    want = 1 << len(ys)
    return len(_projected_masks(system, ys, stop_at=want)) == want


def vc_dim(system: SetSystem) -> tuple[int, tuple[int, ...]]:
    """The VC-dimension and a lexicographically smallest witness of that size.

    Walks the subset lattice level by level, extending only shattered sets:
    the shattered family is downward closed, so the first empty level ends the
    search. Raises ValueError for the empty family, whose VC-dimension is
    undefined here.
    """
    if not system.sets:
        raise ValueError("VC-dimension of an empty family is undefined")
    n = system.ground_size
    level: list[tuple[int, ...]] = [()]
    best: tuple[int, ...] = ()
    while True:
        nxt: list[tuple[int, ...]] = []
        for ys in level:
            start = ys[-1] + 1 if ys else 0
            for j in range(start, n):
                cand = ys + (j,)
                want = 1 << len(cand)
                if len(_projected_masks(system, cand, stop_at=want)) == want:
                    nxt.append(cand)
        if not nxt:
            return len(best), best
        level = nxt
        best = level[0]


def k_fold_union(system: SetSystem, k: int) -> SetSystem:
    """Unions of k (not necessarily distinct) members; contains the input family."""
    if k < 1:
        raise ValueError("fold count k must be >= 1")
    base = system.sets
    acc = set(base)
    for _ in range(k - 1):
        acc = {a | b for a in acc for b in base}
    return SetSystem.from_masks(system.ground_size, acc)


def k_fold_intersection(system: SetSystem, k: int) -> SetSystem:
    """Intersections of k (not necessarily distinct) members."""
    if k < 1:
        raise ValueError("fold count k must be >= 1")
    base = system.sets
    acc = set(base)
    for _ in range(k - 1):
        acc = {a & b for a in acc for b in base}
    return SetSystem.from_masks(system.ground_size, acc)


def complement_system(system: SetSystem) -> SetSystem:
    """Replace every member by its complement within the ground set."""
    full = (1 << system.ground_size) - 1
    return SetSystem.from_masks(system.ground_size, (full ^ m for m in system.sets))


def growth_function(system: SetSystem, m: int) -> int:
    """Max number of distinct projections onto any m-element subset.

    Cost is C(ground_size, m) * len(sets); intended for small ground sets.
    """
    if not isinstance(m, int) or m < 0:
        raise ValueError("m must be a non-negative integer")
    if m > system.ground_size:
        raise ValueError(f"m={m} exceeds ground size {system.ground_size}")
    best = 0
    for ys in combinations(range(system.ground_size), m):
        best = max(best, len(_projected_masks(system, ys)))
        if best == 1 << m:
            break
    return best


def sauer_shelah_bound(n: int, d: int) -> int:
    """Sum of C(n, i) for i = 0..d, the maximum family size at VC-dimension d."""
    return sum(comb(n, i) for i in range(min(d, n) + 1))

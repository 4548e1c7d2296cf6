"""Order ideals of class posets and their (k, C)-closed members."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .bf_core import closure_C
from .poset import ConsistencyError, Poset, enumerate_classes

MAX_IDEAL_POSET = 40


@dataclass(frozen=True, eq=False)
class Ideal:
    poset: Poset
    members: int

    def __eq__(self, other):
        return isinstance(other, Ideal) and self.poset is other.poset and self.members == other.members

    def __hash__(self):
        return hash((id(self.poset), self.members))

    def __contains__(self, i: int) -> bool:
        return bool((self.members >> i) & 1)

    def __le__(self, other: "Ideal") -> bool:
        return self.members & ~other.members == 0

    def __lt__(self, other: "Ideal") -> bool:
        return self <= other and self.members != other.members

    def __len__(self) -> int:
        return self.members.bit_count()

    def __or__(self, other: "Ideal") -> "Ideal":
        return Ideal(self.poset, self.members | other.members)

    def __and__(self, other: "Ideal") -> "Ideal":
        return Ideal(self.poset, self.members & other.members)

    @property
    def maxima(self) -> list[int]:
        return self.poset.maxima(self.members)

    def indices(self) -> list[int]:
        return [i for i in range(len(self.poset)) if (self.members >> i) & 1]

    def is_downset(self) -> bool:
        return all(self.poset.down[i] & ~self.members == 0 for i in self.indices())

    def label(self) -> str:
        labels = self.poset.labels() if self.poset.k <= 3 else {}
        names = [labels.get(i, str(self.poset.elements[i])) for i in self.maxima]
        return "{" + ", ".join(names) + "}"

    def __repr__(self) -> str:
        return f"Ideal(k={self.poset.k}, maxima={self.label()})"


def downset(p: Poset, X) -> Ideal:
    """The ideal generated by X (element indices or names)."""
    idx = [p.index_by_name(x) if isinstance(x, str) else x for x in X]
    return Ideal(p, p.downset_mask(idx))


def _guard(p: Poset) -> None:
    if len(p) > MAX_IDEAL_POSET:
        raise ValueError(f"poset has {len(p)} elements; ideal enumeration is limited to {MAX_IDEAL_POSET}")


def all_ideals(p: Poset) -> list[Ideal]:
    """Every ideal, found by depth-first search over antichains.

    Antichains are extended only by elements of larger index that are
    incomparable to everything chosen so far, so each is visited once.
    """
    _guard(p)
    n = len(p)
    incomparable = [p.full & ~(p.down[i] | p.up[i]) for i in range(n)]
    out: list[int] = []

    def dfs(ideal: int, allowed: int) -> None:
        out.append(ideal)
        while allowed:
            low = allowed & -allowed
            i = low.bit_length() - 1
            allowed ^= low
            dfs(ideal | p.down[i], allowed & incomparable[i])

    dfs(0, p.full)
    return [Ideal(p, m) for m in sorted(out, key=lambda m: (m.bit_count(), m))]


def count_ideals_by_filters(p: Poset) -> int:
    """Independent count: split on a maximal undecided element, which is
    either in the ideal (with its downset) or out of it (with its upset)."""
    _guard(p)

    @lru_cache(maxsize=None)
    def count(undecided: int) -> int:
        if not undecided:
            return 1
        # a maximal undecided element: nothing undecided above it
        i = next(i for i in range(len(p)) if (undecided >> i) & 1
                 and not (p.up[i] & undecided & ~(1 << i)))
        return count(undecided & ~p.down[i]) + count(undecided & ~p.up[i])

    return count(p.full)


# -- closedness --------------------------------------------------------------------

@lru_cache(maxsize=None)
def closure_requirements(p: Poset, C: str, k: int | None = None) -> tuple[int, ...]:
    """For each element e, the classes of chi_T with T inside the true points
    of the C-closure of e's representative and |T| <= k (as a mask)."""
    base = p if p.closure is None else p.base
    return tuple(base.required(closure_C(f, C), k) for f in base.elements)


def is_kC_closed(theta: Ideal, C: str, k: int | None = None) -> bool:
    p = theta.poset
    req = closure_requirements(p, C, k)
    return all(req[i] & ~theta.members == 0 for i in theta.indices())


def closed_ideals(p: Poset, C: str, k: int | None = None, cross_check: bool = True) -> list[Ideal]:
    out = [t for t in all_ideals(p) if is_kC_closed(t, C, k)]
    if cross_check and (k is None or k == p.k):
        q = enumerate_classes(p.k, C)
        lifted = set()
        for t in all_ideals(q):
            m = 0
            for b in t.indices():
                for i in q.blocks[b]:
                    m |= 1 << i
            lifted.add(m)
        if lifted != {t.members for t in out}:
            raise ConsistencyError(f"({p.k},{C})-closed ideals differ from the ideals of the quotient poset")
    return out


def largest_closed_subset(theta: Ideal, C: str, k: int | None = None) -> Ideal:
    """Greatest fixpoint: drop elements whose closure needs a class outside
    the current set, together with everything above them."""
    p = theta.poset
    req = closure_requirements(p, C, k)
    cur = theta.members
    changed = True
    while changed:
        changed = False
        for i in range(len(p)):
            if (cur >> i) & 1 and req[i] & ~cur:
                cur &= ~p.up[i]
                changed = True
    return Ideal(p, cur)


def ideal_covers(ideals: list[Ideal], complete: bool = False) -> list[tuple[int, int]]:
    """Covering pairs (i, j) of the inclusion order on a list of ideals.

    With complete=True the list must be the whole ideal lattice, where a
    cover adds exactly one element.
    """
    masks = [t.members for t in ideals]
    if complete:
        pos = {m: i for i, m in enumerate(masks)}
        out = []
        for i, a in enumerate(masks):
            for x in range(len(ideals[i].poset) if ideals else 0):
                b = a | (1 << x)
                if b != a and b in pos:
                    out.append((i, pos[b]))
        return sorted(out)
    n = len(masks)
    sub = np.array([[a != b and a & ~b == 0 for b in masks] for a in masks], dtype=bool).reshape(n, n)
    between = (sub.astype(np.int64) @ sub.astype(np.int64)) > 0
    return [tuple(map(int, ij)) for ij in np.argwhere(sub & ~between)]

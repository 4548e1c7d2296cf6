"""Equivalence classes of functions with at most k true points, ordered by
the minorant-minor order (or its C-closed variant)."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from math import comb

import numpy as np

from .bf_core import CLASS_NAMES_LEQ3, BoolFn, CapacityError, closure_C, named_fn
from .order import canonical_columns, columns, from_columns, minmin_equiv, minmin_le

log = logging.getLogger(__name__)

MAX_RANK = 4


class ConsistencyError(RuntimeError):
    """Two independent computations of the same object disagree."""


def _rows_distinct(p: int, cols: list[int]) -> bool:
    rows = {tuple((c >> r) & 1 for c in cols) for r in range(p)}
    return len(rows) == p


def column_sets(k: int):
    """Every (p, colmask) with p <= k describing p distinct points.

    colmask has bit v set when the p-bit vector v occurs as a column.
    """
    for p in range(k + 1):
        for cm in range(1 << (1 << p)):
            cols = [v for v in range(1 << p) if (cm >> v) & 1]
            if p and not cols:
                continue
            if _rows_distinct(p, cols):
                yield p, cm, cols


@dataclass(eq=False)
class Poset:
    k: int
    closure: str | None
    elements: list[BoolFn]
    leq: np.ndarray
    covers: list[tuple[int, int]]
    # lut[p][colmask] = element index of chi_T for a p-point T
    lut: list[np.ndarray] = field(repr=False)
    # for C-quotients: blocks of base-poset element indices, one per element
    blocks: list[tuple[int, ...]] | None = None
    base: "Poset | None" = field(default=None, repr=False)

    def __post_init__(self):
        self.leq.setflags(write=False)
        n = len(self.elements)
        self.down = [sum(1 << j for j in range(n) if self.leq[j, i]) for i in range(n)]
        self.up = [sum(1 << j for j in range(n) if self.leq[i, j]) for i in range(n)]

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def full(self) -> int:
        return (1 << len(self.elements)) - 1

    def index_of_points(self, points: list[int], n: int) -> int:
        p = len(points)
        if p > self.k:
            raise CapacityError(f"{p} true points exceed rank {self.k}")
        cm = 0
        for c in columns(points, n):
            cm |= 1 << c
        if p == 0:
            cm = 1
        return int(self.lut[p][cm])

    def class_index(self, f: BoolFn) -> int:
        """Element whose class contains f (f has at most k true points)."""
        return self.index_of_points(f.true_points(), f.arity)

    def required(self, f: BoolFn, k: int | None = None) -> int:
        """Bitmask of the classes of chi_T for T a subset of the true points
        of f of size min(k, #true points).

        f lies in K_k(Theta) for an ideal Theta iff this mask is inside Theta:
        smaller subsets give minorants, which an ideal contains anyway.
        """
        k = self.k if k is None else k
        if k > self.k:
            raise CapacityError(f"rank {k} exceeds poset rank {self.k}")
        pts = f.true_points()
        r = min(k, len(pts))
        if r == len(pts):
            return 1 << self.index_of_points(pts, f.arity)
        if comb(len(pts), r) <= 4000:
            return self._required_small(pts, f.arity, r)
        return self._required_numpy(pts, f.arity, r)

    def _required_small(self, pts, n, r) -> int:
        bits = [[(a >> (n - 1 - j)) & 1 for j in range(n)] for a in pts]
        lut = self.lut[r]
        seen = set()
        out = 0
        for c in combinations(range(len(pts)), r):
            cm = 0
            for j in range(n):
                v = 0
                for i, row in enumerate(c):
                    v |= bits[row][j] << i
                cm |= 1 << v
            if cm not in seen:
                seen.add(cm)
                out |= 1 << int(lut[cm])
        return out

    def _required_numpy(self, pts, n, r) -> int:
        P = np.array(pts, dtype=np.int64)
        shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
        B = (P[:, None] >> shifts[None, :]) & 1
        idx = np.array(list(combinations(range(len(pts)), r)), dtype=np.int64)
        V = np.zeros((len(idx), n), dtype=np.int64)
        for i in range(r):
            V |= B[idx[:, i]] << i
        cm = np.bitwise_or.reduce(np.left_shift(np.int64(1), V), axis=1)
        out = 0
        for e in np.unique(self.lut[r][np.unique(cm)]):
            out |= 1 << int(e)
        return out

    def downset_mask(self, idx) -> int:
        m = 0
        for i in idx:
            m |= self.down[i]
        return m

    def maxima(self, mask: int) -> list[int]:
        out = []
        for i in range(len(self.elements)):
            if (mask >> i) & 1 and not (self.up[i] & mask & ~(1 << i)):
                out.append(i)
        return out

    def index_by_name(self, name: str) -> int:
        return self.class_index(named_fn(name))

    def labels(self) -> dict[int, str]:
        return label_paper_names(self)

    def bottom(self) -> int:
        return self.class_index(BoolFn(1, 0))


def _transitive_reduction(leq: np.ndarray) -> list[tuple[int, int]]:
    n = leq.shape[0]
    lt = leq & ~np.eye(n, dtype=bool)
    out = []
    for i in range(n):
        for j in range(n):
            if lt[i, j] and not (lt[i, :] & lt[:, j]).any():
                out.append((i, j))
    return out


def covers(p: Poset) -> list[tuple[int, int]]:
    """Covering pairs (i, j): i < j with nothing strictly between."""
    return list(p.covers)


def _check_partial_order(leq: np.ndarray) -> None:
    n = leq.shape[0]
    if not leq.diagonal().all():
        raise ConsistencyError("order is not reflexive")
    off = leq & leq.T & ~np.eye(n, dtype=bool)
    if off.any():
        i, j = map(int, np.argwhere(off)[0])
        raise ConsistencyError(f"distinct classes {i} and {j} compare both ways")
    li = leq.astype(np.int64)
    if ((li @ li > 0) & ~leq).any():
        raise ConsistencyError("order is not transitive")


@lru_cache(maxsize=None)
def enumerate_classes(k: int, closure: str | None = None, verify: bool = True) -> Poset:
    """The poset of classes of functions with at most k true points.

    Candidates come from column sets: one chi_T per set of distinct columns
    over p <= k rows.  With a closure C the order is the C-closed variant and
    classes of the plain poset that become equivalent are merged.
    """
    if not 1 <= k <= MAX_RANK:
        raise ValueError(f"rank must be in 1..{MAX_RANK}, got {k}")
    if closure is not None:
        return _closed_poset(enumerate_classes(k, None, verify), closure)

    groups: dict[tuple, list[tuple[int, int, list[int]]]] = {}
    for p, cm, cols in column_sets(k):
        groups.setdefault(canonical_columns(p, frozenset(cols)), []).append((p, cm, cols))
    keys = sorted(groups, key=lambda key: (key[0], len(key[1]), key[1]))
    elements = [from_columns(q, cols) for q, cols in keys]
    log.info("rank %d: %d candidates, %d classes", k, sum(map(len, groups.values())), len(keys))

    lut = [np.full(1 << (1 << p), -1, dtype=np.int64) for p in range(k + 1)]
    for idx, key in enumerate(keys):
        for p, cm, cols in groups[key]:
            lut[p][cm] = idx
            if verify and not minmin_equiv(from_columns(p, cols), elements[idx]):
                raise ConsistencyError(f"candidate {from_columns(p, cols)} not equivalent to {elements[idx]}")
    n = len(elements)
    leq = np.zeros((n, n), dtype=bool)
    for i in range(n):
        for j in range(n):
            leq[i, j] = i == j or minmin_le(elements[i], elements[j])
    _check_partial_order(leq)
    return Poset(k, None, elements, leq, _transitive_reduction(leq), lut)


def _closed_poset(base: Poset, C: str) -> Poset:
    n = len(base)
    closed = [closure_C(f, C) for f in base.elements]
    pre = np.zeros((n, n), dtype=bool)
    for i in range(n):
        for j in range(n):
            pre[i, j] = i == j or minmin_le(base.elements[i], closed[j])
    li = pre.astype(np.int64)
    if ((li @ li > 0) & ~pre).any():
        raise ConsistencyError(f"{C}-closed order is not transitive")
    block_of = [-1] * n
    blocks: list[tuple[int, ...]] = []
    for i in range(n):
        if block_of[i] < 0:
            members = tuple(j for j in range(n) if pre[i, j] and pre[j, i])
            for j in members:
                block_of[j] = len(blocks)
            blocks.append(members)
    m = len(blocks)
    leq = np.zeros((m, m), dtype=bool)
    for a in range(m):
        for b in range(m):
            leq[a, b] = pre[blocks[a][0], blocks[b][0]]
    _check_partial_order(leq)
    bmap = np.array(block_of, dtype=np.int64)
    lut = [np.where(t >= 0, bmap[np.maximum(t, 0)], -1) for t in base.lut]
    elements = [base.elements[b[0]] for b in blocks]
    return Poset(base.k, C, elements, leq, _transitive_reduction(leq), lut, blocks, base)


def label_paper_names(p: Poset) -> dict[int, str]:
    """Label elements with the names of the listed small functions.

    Merged classes of a C-quotient get all their names joined by '='.
    """
    if p.k > 3:
        raise ValueError("names are only available for rank at most 3")
    names: dict[int, list[str]] = {}
    for name in CLASS_NAMES_LEQ3:
        f = named_fn(name)
        if f.count_true() > p.k:
            continue
        names.setdefault(p.class_index(f), []).append(name)
    if p.closure is None:
        dup = {i: v for i, v in names.items() if len(v) > 1}
        if dup:
            raise ConsistencyError(f"several names map to one class: {dup}")
        missing = [i for i in range(len(p)) if i not in names]
        if missing:
            raise ConsistencyError(f"unlabelled classes: {[str(p.elements[i]) for i in missing]}")
    return {i: "=".join(v) for i, v in sorted(names.items())}

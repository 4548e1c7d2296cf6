"""Minorant, minor and minorant-minor comparisons; canonical class keys."""

from __future__ import annotations

from functools import lru_cache
from itertools import permutations, product

from .bf_core import BoolFn, CapacityError, ArityError, closure_C, from_true_points

K_MAX = 4


def minorant_le(f: BoolFn, g: BoolFn) -> bool:
    if f.arity != g.arity:
        raise ArityError(f"minorant comparison needs equal arities, got {f.arity} and {g.arity}")
    return f.table & ~g.table == 0


def columns(points: list[int], n: int) -> list[int]:
    """Column j of the true-point matrix as a bit vector over the rows."""
    cols = []
    for j in range(n):
        shift = n - 1 - j
        c = 0
        for r, a in enumerate(points):
            c |= ((a >> shift) & 1) << r
        cols.append(c)
    return cols


def minmin_le(f: BoolFn, g: BoolFn) -> bool:
    """f is below g in the minorant-minor order: f <= g_sigma for some sigma.

    sigma assigns to every argument of g one argument of f.  We fill sigma
    left to right; each choice appends one column to the images of the true
    points of f, and a branch dies as soon as some image stops being a prefix
    of a true point of g.
    """
    pts = f.true_points()
    if not pts:
        return True
    gpts = g.true_points()
    if not gpts:
        return False
    n = g.arity
    cols = sorted(set(columns(pts, f.arity)))
    p = len(pts)
    # prefixes[j] = set of length-j prefixes of true points of g
    prefixes = [{a >> (n - j) for a in gpts} for j in range(n + 1)]
    dead = set()

    def extend(j: int, images: tuple[int, ...]) -> bool:
        if j == n:
            return True
        if (j, images) in dead:
            return False
        ok = prefixes[j + 1]
        for c in cols:
            nxt = tuple((images[r] << 1) | ((c >> r) & 1) for r in range(p))
            if all(x in ok for x in nxt) and extend(j + 1, nxt):
                return True
        dead.add((j, images))
        return False

    return extend(0, (0,) * p)


def minmin_le_closed(f: BoolFn, g: BoolFn, C: str) -> bool:
    return minmin_le(f, closure_C(g, C))


def minmin_equiv(f: BoolFn, g: BoolFn) -> bool:
    return minmin_le(f, g) and minmin_le(g, f)


# -- canonical forms -----------------------------------------------------------
#
# A function with p true points is determined up to equivalence by the set
# of distinct columns of its true-point matrix, read as p-bit vectors.  Two
# such column sets describe equivalent functions exactly when there are row
# maps phi in both directions such that every column pulled back along phi
# is again a column.  Shrinking a column set along a non-injective self map
# gives an equivalent smaller one; the smallest ones are unique up to row
# renaming, so a lex-least renaming of that core is a complete invariant.

def _pull(c: int, phi: tuple[int, ...]) -> int:
    out = 0
    for r, s in enumerate(phi):
        out |= ((c >> s) & 1) << r
    return out


def _restrict(c: int, rows: tuple[int, ...]) -> int:
    return _pull(c, rows)


def core(p: int, cols: frozenset[int]) -> tuple[int, frozenset[int]]:
    """Shrink (p, column set) along a self map with the smallest image."""
    best = None
    for phi in product(range(p), repeat=p):
        img = set(phi)
        if len(img) == p or (best is not None and len(img) >= len(best)):
            continue
        if all(_pull(c, phi) in cols for c in cols):
            best = img
            if len(img) <= 1:
                break
    if best is None:
        return p, cols
    rows = tuple(sorted(best))
    return core(len(rows), frozenset(_restrict(c, rows) for c in cols))


def _lexmin(p: int, cols: frozenset[int]) -> tuple[int, ...]:
    best = None
    for perm in permutations(range(p)):
        key = tuple(sorted(_pull(c, perm) for c in cols))
        if best is None or key < best:
            best = key
    return best


def from_columns(p: int, cols) -> BoolFn:
    """chi_T for the T whose matrix has the given columns (in that order)."""
    cols = list(cols)
    if p == 0 or not cols:
        return BoolFn(1, 0)
    n = len(cols)
    pts = []
    for r in range(p):
        a = 0
        for c in cols:
            a = (a << 1) | ((c >> r) & 1)
        pts.append(a)
    return from_true_points(n, pts)


def canonical_columns(p: int, cols: frozenset[int]) -> tuple[int, tuple[int, ...]]:
    if p == 0:
        return 0, ()
    # renaming rows first lets all renamings share one core computation
    return _canonical_sorted(p, _lexmin(p, cols))


@lru_cache(maxsize=None)
def _canonical_sorted(p: int, cols: tuple[int, ...]) -> tuple[int, tuple[int, ...]]:
    q, c = core(p, frozenset(cols))
    return q, _lexmin(q, c)


def canonical_class(f: BoolFn, k_max: int = K_MAX) -> BoolFn:
    """Canonical representative of the equivalence class of f.

    Its text serialization is the class key: two functions get the same key
    exactly when each is below the other.
    """
    pts = f.true_points()
    if len(pts) > k_max:
        raise CapacityError(f"{f} has {len(pts)} true points; canonical forms need at most {k_max}")
    q, cols = canonical_columns(len(pts), frozenset(columns(pts, f.arity)))
    return from_columns(q, cols)


def canonical_key(f: BoolFn, k_max: int = K_MAX) -> str:
    return str(canonical_class(f, k_max))

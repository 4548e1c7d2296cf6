"""Truth-table Boolean functions.

A function of arity n is stored as an integer bitmask of length 2**n.  Bit i
holds f(a) where i is the big-endian index of the tuple a, so a_1 is the most
significant bit and the rows run 00..0, 00..1, ..., 11..1.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

MAX_ARITY = 16


class CapacityError(ValueError):
    """Raised when a result would exceed a configured size cap."""


class ArityError(ValueError):
    pass


def _full(n: int) -> int:
    return (1 << (1 << n)) - 1


@dataclass(frozen=True, slots=True)
class BoolFn:
    arity: int
    table: int

    def __post_init__(self):
        if not 1 <= self.arity <= MAX_ARITY:
            raise CapacityError(f"arity {self.arity} outside 1..{MAX_ARITY}")
        if self.table < 0 or self.table >> (1 << self.arity):
            raise ValueError(f"table does not fit arity {self.arity}")

    # -- text format "n:hex" --------------------------------------------
    def __str__(self) -> str:
        return f"{self.arity}:{self.table:x}"

    def __repr__(self) -> str:
        return f"BoolFn({self})"

    @classmethod
    def parse(cls, text: str) -> "BoolFn":
        m = re.fullmatch(r"\s*(\d+):([0-9a-fA-F]+)\s*", text)
        if not m:
            raise ValueError(f"malformed truth table {text!r}; expected 'n:hex'")
        return cls(int(m.group(1)), int(m.group(2), 16))

    # -- evaluation -----------------------------------------------------
    def __call__(self, *bits: int) -> int:
        if len(bits) != self.arity:
            raise ArityError(f"expected {self.arity} arguments, got {len(bits)}")
        return (self.table >> point_index(bits)) & 1

    def at(self, index: int) -> int:
        return (self.table >> index) & 1

    @property
    def size(self) -> int:
        return 1 << self.arity

    def true_points(self) -> list[int]:
        t, out, i = self.table, [], 0
        while t:
            if t & 1:
                out.append(i)
            t >>= 1
            i += 1
        return out

    def false_points(self) -> list[int]:
        return BoolFn(self.arity, self.table ^ _full(self.arity)).true_points()

    def count_true(self) -> int:
        return self.table.bit_count()

    @property
    def f0(self) -> int:
        return self.table & 1

    @property
    def f1(self) -> int:
        return (self.table >> (self.size - 1)) & 1

    def is_constant(self) -> bool:
        return self.table in (0, _full(self.arity))

    def __invert__(self) -> "BoolFn":
        return negation(self)

    def rows(self) -> list[tuple[int, ...]]:
        return [index_point(i, self.arity) for i in range(self.size)]


# -- points ---------------------------------------------------------------

def point_index(bits: Sequence[int]) -> int:
    i = 0
    for b in bits:
        i = (i << 1) | (1 if b else 0)
    return i


def index_point(i: int, n: int) -> tuple[int, ...]:
    return tuple((i >> (n - 1 - j)) & 1 for j in range(n))


def _as_index(p, n: int) -> int:
    if isinstance(p, str):
        if len(p) != n or set(p) - {"0", "1"}:
            raise ArityError(f"point {p!r} is not a {n}-bit string")
        return int(p, 2)
    if isinstance(p, int):
        if not 0 <= p < (1 << n):
            raise ArityError(f"point index {p} out of range for arity {n}")
        return p
    p = tuple(p)
    if len(p) != n:
        raise ArityError(f"point {p} has arity {len(p)}, expected {n}")
    return point_index(p)


def from_true_points(n: int, points: Iterable) -> BoolFn:
    """chi_T: the n-ary function whose true points are exactly T.

    Points may be given as bit tuples, bit strings such as "011", or row
    indices.
    """
    t = 0
    for p in points:
        t |= 1 << _as_index(p, n)
    return BoolFn(n, t)


def constant(c: int, n: int = 1) -> BoolFn:
    return BoolFn(n, _full(n) if c else 0)


@lru_cache(maxsize=None)
def _proj_table(i: int, n: int) -> int:
    shift = n - i
    t = 0
    for a in range(1 << n):
        if (a >> shift) & 1:
            t |= 1 << a
    return t


def projection(i: int, n: int) -> BoolFn:
    """pr_i^(n), with 1-based i."""
    if not 1 <= i <= n:
        raise ArityError(f"projection index {i} out of range for arity {n}")
    return BoolFn(n, _proj_table(i, n))


# -- structural operations -------------------------------------------------

def minor_apply(g: BoolFn, sigma: Sequence[int], n: int) -> BoolFn:
    """The n-ary minor g_sigma(a) = g(a sigma), (a sigma)_j = a_{sigma(j)}.

    sigma is 1-based and has one entry per argument of g.
    """
    if len(sigma) != g.arity:
        raise ArityError(f"minor map has length {len(sigma)}, g has arity {g.arity}")
    if any(not 1 <= s <= n for s in sigma):
        raise ArityError(f"minor map {tuple(sigma)} leaves range 1..{n}")
    if n > MAX_ARITY:
        raise CapacityError(f"arity {n} exceeds cap {MAX_ARITY}")
    cols = [_proj_table(s, n) for s in sigma]
    t = 0
    gt = g.table
    for a in range(1 << n):
        j = 0
        for c in cols:
            j = (j << 1) | ((c >> a) & 1)
        if (gt >> j) & 1:
            t |= 1 << a
    return BoolFn(n, t)


def compose(f: BoolFn, gs: Sequence[BoolFn]) -> BoolFn:
    """f(g_1, ..., g_n) on the common arity m of the g_i."""
    if len(gs) != f.arity:
        raise ArityError(f"{f} needs {f.arity} inner functions, got {len(gs)}")
    m = gs[0].arity
    if any(g.arity != m for g in gs):
        raise ArityError("inner functions must share one arity")
    full = _full(m)
    return BoolFn(m, compose_tables(f, [g.table for g in gs], full))


def compose_tables(f: BoolFn, tables: Sequence[int], full: int) -> int:
    out = 0
    n = f.arity
    for t in f.true_points():
        acc = full
        for j, g in enumerate(tables):
            acc &= g if (t >> (n - 1 - j)) & 1 else full ^ g
            if not acc:
                break
        out |= acc
    return out


def star(f: BoolFn, g: BoolFn) -> BoolFn:
    """(f * g)(a_1..a_{m+n-1}) = f(g(a_1..a_m), a_{m+1}, ..., a_{m+n-1})."""
    m, n = g.arity, f.arity
    r = m + n - 1
    if r > MAX_ARITY:
        raise CapacityError(f"f * g would have arity {r} > {MAX_ARITY}")
    inner = [minor_apply(g, range(1, m + 1), r)]
    inner += [projection(m + j, r) for j in range(1, n)]
    return compose(f, inner)


def negation(f: BoolFn) -> BoolFn:
    return BoolFn(f.arity, f.table ^ _full(f.arity))


def inner_negation(f: BoolFn) -> BoolFn:
    """f^n(a) = f(complement of a): reverse the row order."""
    size = f.size
    bits = format(f.table, f"0{size}b")
    return BoolFn(f.arity, int(bits[::-1], 2))


def dual(f: BoolFn) -> BoolFn:
    return negation(inner_negation(f))


TRANSFORMS = {
    "negation": negation,
    "inner_negation": inner_negation,
    "dual": dual,
}


def transform(f: BoolFn, mode: str) -> BoolFn:
    try:
        return TRANSFORMS[mode](f)
    except KeyError:
        raise ValueError(f"unknown transform {mode!r}") from None


def threshold_fn(n: int, t: int) -> BoolFn:
    """th^n_t: true iff at least t arguments are 1."""
    if not 0 <= t <= n + 1:
        raise ValueError(f"threshold {t} outside 0..{n + 1}")
    if n > MAX_ARITY:
        raise CapacityError(f"arity {n} exceeds cap {MAX_ARITY}")
    return from_true_points(n, (i for i in range(1 << n) if i.bit_count() >= t))


def restrict_to(f: BoolFn, points: Iterable[int]) -> BoolFn:
    """Minorant of f keeping only the given rows."""
    mask = 0
    for p in points:
        mask |= 1 << p
    return BoolFn(f.arity, f.table & mask)


# -- closures ----------------------------------------------------------------

def closure_XI(f: BoolFn) -> BoolFn:
    return BoolFn(f.arity, f.table | (1 << (f.size - 1)))


def closure_IX(f: BoolFn) -> BoolFn:
    return BoolFn(f.arity, f.table | 1)


def _up_closure(table: int, n: int, up: bool) -> int:
    # propagate along each coordinate direction; n passes reach every b >= a
    for j in range(n):
        step = 1 << j
        mask = _proj_table(n - j, n)  # rows whose bit j is set
        if up:
            table |= (table << step) & mask
        else:
            table |= (table & mask) >> step
    return table


def closure_M(f: BoolFn) -> BoolFn:
    return BoolFn(f.arity, _up_closure(f.table, f.arity, True))


def closure_Mneg(f: BoolFn) -> BoolFn:
    return BoolFn(f.arity, _up_closure(f.table, f.arity, False))


def closure_R(f: BoolFn) -> BoolFn:
    return BoolFn(f.arity, f.table | inner_negation(f).table)


CLOSURES = {
    "XI": closure_XI,
    "IX": closure_IX,
    "M": closure_M,
    "Mneg": closure_Mneg,
    "R": closure_R,
}


def closure_C(f: BoolFn, C: str) -> BoolFn:
    """Least majorant of f lying in the class named by C."""
    try:
        return CLOSURES[C](f)
    except KeyError:
        raise ValueError(f"unknown closure {C!r}; expected one of {sorted(CLOSURES)}") from None


# -- named functions -----------------------------------------------------------

# name -> (arity, true points, description)
_NAMED_POINTS: dict[str, tuple[int, tuple[str, ...], str]] = {
    "0": (1, (), "constant 0"),
    "1": (1, ("0", "1"), "constant 1"),
    "id": (1, ("1",), "identity"),
    "neg": (1, ("0",), "negation"),
    "and": (2, ("11",), "conjunction"),
    "or": (2, ("01", "10", "11"), "disjunction"),
    "plus": (2, ("01", "10"), "exclusive or"),
    "iff": (2, ("00", "11"), "biconditional"),
    "nimp": (2, ("10",), "nonimplication x and not y"),
    "imp": (2, ("00", "01", "11"), "implication"),
    "nand": (2, ("00", "01", "10"), "Sheffer stroke"),
    "nor": (2, ("00",), "Peirce arrow"),
    "mu": (3, ("011", "101", "110", "111"), "majority"),
    "oplus3": (3, ("001", "010", "100", "111"), "ternary exclusive or"),
    "lambda30": (3, ("001", "010"), ""),
    "lambda31": (3, ("110", "101"), ""),
    "Gamma0": (3, ("000", "110", "101"), ""),
    "Gamma1": (3, ("111", "001", "010"), ""),
    "Gamma01": (4, ("1001", "0111", "0010"), ""),
    "delta0": (3, ("110", "101", "011"), ""),
    "delta0_0": (4, ("1100", "1010", "0110"), ""),
    "delta0_1": (4, ("1101", "1011", "0111"), ""),
    "delta0_p": (4, ("1101", "1010", "0110"), ""),
    "delta0_0p": (5, ("11010", "10100", "01100"), ""),
    "lambda10": (5, ("10011", "01101", "00110"), ""),
    "lambda10_0": (6, ("100110", "011010", "001100"), ""),
    "delta1": (3, ("001", "010", "100"), ""),
    "delta1_0": (4, ("0010", "0100", "1000"), ""),
    "delta1_1": (4, ("0011", "0101", "1001"), ""),
    "delta1_p": (4, ("0010", "0101", "1001"), ""),
    "delta1_1p": (5, ("00101", "01011", "10011"), ""),
    "lambda11": (5, ("10001", "01010", "00111"), ""),
    "lambda11_1": (6, ("100011", "010101", "001111"), ""),
    "lambda2": (6, ("100011", "010101", "001110"), ""),
    "lambda2_0": (7, ("1000110", "0101010", "0011100"), ""),
    "lambda2_1": (7, ("1000111", "0101011", "0011101"), ""),
    "A0": (3, ("110", "100", "010"), ""),
    "A0p": (4, ("1110", "0100", "0010"), ""),
    "A1": (3, ("001", "011", "101"), ""),
    "A1p": (4, ("0001", "1011", "1101"), ""),
}

# Names of the classes of functions with at most three true points, one per
# class (the remaining registry entries are common functions with more true
# points or duplicates such as "and" ~ "id").
CLASS_NAMES_LEQ3 = (
    "0", "id", "neg", "nimp", "1", "plus",
    "lambda30", "lambda31", "or", "nand", "Gamma0", "Gamma1", "Gamma01",
    "delta0", "delta0_0", "delta0_1", "delta0_p", "delta0_0p", "lambda10", "lambda10_0",
    "delta1", "delta1_0", "delta1_1", "delta1_p", "delta1_1p", "lambda11", "lambda11_1",
    "lambda2", "lambda2_0", "lambda2_1", "A0", "A0p", "A1", "A1p",
)

# display symbols used in DOT labels
SYMBOLS = {
    "0": "0", "1": "1", "id": "id", "neg": "¬", "nimp": "↛", "plus": "+",
    "or": "∨", "nand": "↑", "and": "∧", "mu": "μ",
}


def named_fn(name: str) -> BoolFn:
    try:
        n, pts, _ = _NAMED_POINTS[name]
    except KeyError:
        raise KeyError(f"unknown function name {name!r}") from None
    return from_true_points(n, pts)


def named_functions() -> list[dict]:
    out = []
    for name, (n, pts, desc) in _NAMED_POINTS.items():
        out.append({
            "name": name,
            "arity": n,
            "table": str(named_fn(name)),
            "definition": desc or "characteristic function of {" + ", ".join(pts) + "}",
        })
    return out


def resolve_fn(text: str) -> BoolFn:
    """Accept either a registry name or the "n:hex" text format."""
    if text in _NAMED_POINTS:
        return named_fn(text)
    return BoolFn.parse(text)


# -- brute-force helpers shared with class predicates -------------------------

def subsets_upto(items: Sequence[int], k: int):
    for r in range(min(k, len(items)) + 1):
        yield from combinations(items, r)


# -- properties ----------------------------------------------------------------
#
# Scalar helpers on Python int tables.  Vectorized counterparts for whole
# arrays of tables live at the end of the module.

@lru_cache(maxsize=None)
def coord_masks(n: int) -> tuple[int, ...]:
    """mask[j] = rows whose bit j (coordinate a_{n-j}) is set."""
    return tuple(_proj_table(n - j, n) for j in range(n))


def reverse_rows(t, n: int):
    """Table of f^n: row a moves to its complement."""
    for j, mask in enumerate(coord_masks(n)):
        step = 1 << j
        t = ((t & mask) >> step) | ((t << step) & mask)
    return t


def monotone_violations(t, n: int, up: bool = True):
    """Rows a (with bit j clear) where f(a) > f(a + e_j), or-ed over j."""
    bad = t & 0
    for j, mask in enumerate(coord_masks(n)):
        step = 1 << j
        lo = t & ~mask
        hi = (t & mask) >> step
        bad = bad | (lo & ~hi if up else hi & ~lo)
    return bad


def _strict_up(t: int, n: int) -> int:
    step_up = 0
    for j, mask in enumerate(coord_masks(n)):
        step_up |= (t << (1 << j)) & mask
    return _up_closure(step_up, n, True)


def minimal_points(f: BoolFn) -> list[int]:
    """True points with no smaller true point below them."""
    t = f.table
    return BoolFn(f.arity, t & ~_strict_up(t, f.arity)).true_points()


def is_separating(f: BoolFn, k: int) -> bool:
    """U^k: every set of at most k true points has a common 1 coordinate.

    Replacing a point by a smaller true point only shrinks the meet, so it
    is enough to look at the minimal true points.
    """
    if f.f0:
        return False
    pts = minimal_points(f)
    for r in range(2, min(k, len(pts)) + 1):
        for c in combinations(pts, r):
            acc = c[0]
            for p in c[1:]:
                acc &= p
                if not acc:
                    return False
    return True


def _check_prop(prop: str, f: BoolFn) -> bool:
    n, t = f.arity, f.table
    if prop == "monotone":
        return not monotone_violations(t, n, True)
    if prop == "antitone":
        return not monotone_violations(t, n, False)
    if prop == "reflexive":
        return reverse_rows(t, n) == t
    if prop == "selfdual":
        return reverse_rows(t, n) == t ^ _full(n)
    if prop == "smin":
        return not (reverse_rows(t, n) & t)
    if prop == "smaj":
        return (reverse_rows(t, n) | t) == _full(n)
    kind, k = _split_k(prop)
    if kind == "U":
        return is_separating(f, k)
    if kind == "W":
        return is_separating(dual(f), k)
    if kind == "Wneg":
        return is_separating(inner_negation(f), k)
    raise KeyError(prop)


def _split_k(prop: str) -> tuple[str, int]:
    m = re.fullmatch(r"([A-Za-z]+?)(\d+)", prop)
    if not m:
        raise KeyError(prop)
    return m.group(1), int(m.group(2))


# -- named classes ---------------------------------------------------------------

OO, OI, IO, II = (0, 0), (0, 1), (1, 0), (1, 1)
ALL_PAIRS = frozenset({OO, OI, IO, II})


@dataclass(frozen=True)
class ClassSpec:
    """Membership = all props hold and (f(0), f(1)) in pairs, or f is a
    constant whose value is listed in consts."""

    props: tuple[str, ...] = ()
    pairs: frozenset = ALL_PAIRS
    consts: frozenset = frozenset()

    def contains(self, f: BoolFn) -> bool:
        if f.is_constant() and f.f0 in self.consts:
            return True
        if (f.f0, f.f1) not in self.pairs:
            return False
        return all(_check_prop(p, f) for p in self.props)


def _cs(props=(), pairs=ALL_PAIRS, consts=()):
    return ClassSpec(tuple(props), frozenset(pairs), frozenset(consts))


C01 = (0, 1)

_FIXED_CLASSES: dict[str, ClassSpec] = {
    "All": _cs(),
    "Empty": _cs(pairs=()),
    "Vak": _cs(pairs=(), consts=C01),
    "Vako": _cs(pairs=(), consts=(0,)),
    "Vaki": _cs(pairs=(), consts=(1,)),
    "OX": _cs(pairs=(OO, OI)),
    "XO": _cs(pairs=(OO, IO)),
    "IX": _cs(pairs=(IO, II)),
    "XI": _cs(pairs=(OI, II)),
    "OO": _cs(pairs=(OO,)),
    "II": _cs(pairs=(II,)),
    "OI": _cs(pairs=(OI,)),
    "IO": _cs(pairs=(IO,)),
    "Eq": _cs(pairs=(OO, II)),
    "Eiio": _cs(pairs=(OO, OI, II)),
    "Eioi": _cs(pairs=(OO, IO, II)),
    "Eiii": _cs(pairs=(OO, OI, IO)),
    "OXC": _cs(pairs=(OO, OI), consts=C01),
    "XOC": _cs(pairs=(OO, IO), consts=C01),
    "IXC": _cs(pairs=(IO, II), consts=C01),
    "XIC": _cs(pairs=(OI, II), consts=C01),
    "OOC": _cs(pairs=(OO,), consts=C01),
    "IIC": _cs(pairs=(II,), consts=C01),
    "OIC": _cs(pairs=(OI,), consts=C01),
    "IOC": _cs(pairs=(IO,), consts=C01),
    "OICO": _cs(pairs=(OI,), consts=(0,)),
    "IOCO": _cs(pairs=(IO,), consts=(0,)),
    "OICI": _cs(pairs=(OI,), consts=(1,)),
    "IOCI": _cs(pairs=(IO,), consts=(1,)),
    "M": _cs(["monotone"]),
    "Mneg": _cs(["antitone"]),
    "Mo": _cs(["monotone"], (OO, OI)),
    "Mi": _cs(["monotone"], (OI, II)),
    "Mc": _cs(["monotone"], (OI,)),
    "Mineg": _cs(["antitone"], (OO, IO)),
    "Moneg": _cs(["antitone"], (IO, II)),
    "Mcneg": _cs(["antitone"], (IO,)),
    "Refl": _cs(["reflexive"]),
    "ReflOO": _cs(["reflexive"], (OO,)),
    "ReflII": _cs(["reflexive"], (II,)),
    "ReflOOC": _cs(["reflexive"], (OO,), C01),
    "ReflIIC": _cs(["reflexive"], (II,), C01),
    "S": _cs(["selfdual"]),
    "Sc": _cs(["selfdual"], (OI,)),
    "SM": _cs(["selfdual", "monotone"]),
    "Smin": _cs(["smin"]),
    "Smaj": _cs(["smaj"]),
    "SminOX": _cs(["smin"], (OO, OI)),
    "SminXO": _cs(["smin"], (OO, IO)),
    "SminOO": _cs(["smin"], (OO,)),
    "SminOI": _cs(["smin"], (OI,)),
    "SminIO": _cs(["smin"], (IO,)),
    "SminOICO": _cs(["smin"], (OI,), (0,)),
    "SminIOCO": _cs(["smin"], (IO,), (0,)),
}


def _rank_classes(k: int) -> dict[str, ClassSpec]:
    U, W, Wn = f"U{k}", f"W{k}", f"Wneg{k}"
    return {
        "U": _cs([U]),
        "W": _cs([W]),
        "Wneg": _cs([Wn]),
        "TcU": _cs([U], (OI,)),
        "TcW": _cs([W], (OI,)),
        "MU": _cs(["monotone", U]),
        "MW": _cs(["monotone", W]),
        "McU": _cs(["monotone", U], (OI,)),
        "McW": _cs(["monotone", W], (OI,)),
        "MWneg": _cs(["antitone", Wn]),
        "McWneg": _cs(["antitone", Wn], (IO,)),
        "TcWneg": _cs([Wn], (IO,)),
        "TcUCO": _cs([U], (OI,), (0,)),
        "TcWnegCO": _cs([Wn], (IO,), (0,)),
        "UOO": _cs([U], (OO,)),
        "WnegOO": _cs([Wn], (OO,)),
        "UWneg": _cs([U, Wn]),
    }


RANK_CLASS_BASES = tuple(_rank_classes(2))

# The 26 fixed classes that appear alongside the K_k(Theta) families.
FIXED_CLONOID_CLASSES = (
    "Eiio", "Eioi", "Eq", "OXC", "XOC", "IXC", "XIC", "OOC", "IOC", "OIC",
    "IIC", "OICI", "IOCI", "IX", "XI", "II", "M", "Mi", "Mneg", "Moneg",
    "Refl", "ReflOOC", "ReflIIC", "ReflII", "Vak", "Vaki",
)


@lru_cache(maxsize=None)
def class_spec(name: str) -> ClassSpec:
    if name in _FIXED_CLASSES:
        return _FIXED_CLASSES[name]
    m = re.fullmatch(r"([A-Za-z]+?)(\d+)", name)
    if m and m.group(1) in RANK_CLASS_BASES and int(m.group(2)) >= 1:
        return _rank_classes(int(m.group(2)))[m.group(1)]
    raise KeyError(f"unknown class name {name!r}")


def class_member(name: str, f: BoolFn) -> bool:
    """Membership of f in the class registered under name.

    Rank-dependent classes carry their rank as a suffix, e.g. "U2", "McU3".
    """
    return class_spec(name).contains(f)


def class_names(k: int = 2) -> list[str]:
    return list(_FIXED_CLASSES) + [f"{b}{k}" for b in RANK_CLASS_BASES]


def named_classes(k: int = 2) -> list[dict]:
    out = []
    for name in class_names(k):
        spec = class_spec(name)
        out.append({
            "name": name,
            "properties": list(spec.props),
            "pairs": sorted("".join(map(str, p)) for p in spec.pairs),
            "constants": sorted(spec.consts),
        })
    return out


# -- vectorized predicates ----------------------------------------------------
#
# Same predicates over a numpy uint64 array of tables of one arity n <= 6.

BATCH_MAX_ARITY = 6


def all_tables(n: int) -> np.ndarray:
    if n > 4:
        raise CapacityError(f"all tables of arity {n} would be {1 << (1 << n)} functions")
    return np.arange(1 << (1 << n), dtype=np.uint64)


def _u64_masks(n: int) -> list[np.uint64]:
    return [np.uint64(m) for m in coord_masks(n)]


def batch_reverse_rows(t: np.ndarray, n: int) -> np.ndarray:
    for j, mask in enumerate(_u64_masks(n)):
        step = np.uint64(1 << j)
        t = ((t & mask) >> step) | ((t << step) & mask)
    return t


def batch_monotone(t: np.ndarray, n: int, up: bool = True) -> np.ndarray:
    bad = np.zeros_like(t)
    for j, mask in enumerate(_u64_masks(n)):
        step = np.uint64(1 << j)
        lo = t & ~mask
        hi = (t & mask) >> step
        bad |= (lo & ~hi) if up else (hi & ~lo)
    return bad == 0


@lru_cache(maxsize=None)
def _nonseparated_sets(n: int, k: int) -> tuple[int, ...]:
    """Row masks of the sets of at most k rows with no common 1 coordinate."""
    out = []
    for r in range(1, k + 1):
        for c in combinations(range(1 << n), r):
            acc = (1 << n) - 1
            for a in c:
                acc &= a
            if not acc:
                out.append(sum(1 << a for a in c))
    return tuple(out)


def batch_separating(t: np.ndarray, n: int, k: int) -> np.ndarray:
    ok = np.ones(t.shape, dtype=bool)
    for m in _nonseparated_sets(n, k):
        m = np.uint64(m)
        ok &= (t & m) != m
    return ok


def _batch_prop(prop: str, t: np.ndarray, n: int) -> np.ndarray:
    full = np.uint64(_full(n))
    if prop == "monotone":
        return batch_monotone(t, n, True)
    if prop == "antitone":
        return batch_monotone(t, n, False)
    rev = batch_reverse_rows(t, n)
    if prop == "reflexive":
        return rev == t
    if prop == "selfdual":
        return rev == (t ^ full)
    if prop == "smin":
        return (rev & t) == 0
    if prop == "smaj":
        return (rev | t) == full
    kind, k = _split_k(prop)
    if kind == "U":
        return batch_separating(t, n, k)
    if kind == "W":
        return batch_separating(rev ^ full, n, k)
    if kind == "Wneg":
        return batch_separating(rev, n, k)
    raise KeyError(prop)


def batch_class_member(name: str, tables: np.ndarray, n: int) -> np.ndarray:
    """class_member for every table in a uint64 array of arity-n tables."""
    if n > BATCH_MAX_ARITY:
        raise CapacityError(f"batch predicates support arity up to {BATCH_MAX_ARITY}")
    spec = class_spec(name)
    t = np.asarray(tables, dtype=np.uint64)
    full = np.uint64(_full(n))
    f0 = t & np.uint64(1)
    f1 = (t >> np.uint64((1 << n) - 1)) & np.uint64(1)
    ok = np.zeros(t.shape, dtype=bool)
    for a, b in spec.pairs:
        ok |= (f0 == a) & (f1 == b)
    for prop in spec.props:
        ok &= _batch_prop(prop, t, n)
    if 0 in spec.consts:
        ok |= t == 0
    if 1 in spec.consts:
        ok |= t == full
    return ok

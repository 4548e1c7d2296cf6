"""Clonoids stable under I_c on the right and McU^k on the left.

Every such clonoid is K_k(Theta) for an ideal Theta of the rank-k class
poset, an intersection of such a class with one of nine small classes, or one
of 26 fixed classes.  This module evaluates membership for those
descriptions, deduplicates them into the list of distinct clonoids, computes
cover relations, and checks stability under clones by bounded search.
"""

from __future__ import annotations

import hashlib
import logging
import re
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, product
from typing import Iterable

import numpy as np

from .bf_core import (
    FIXED_CLONOID_CLASSES, BoolFn, CapacityError, _full, _up_closure, all_tables,
    batch_class_member, class_member, class_names, closure_C, compose, constant,
    from_true_points, inner_negation, minor_apply, named_fn, projection, star,
    threshold_fn,
)
from .lattice import Ideal, all_ideals, closed_ideals, is_kC_closed
from .order import canonical_class, minmin_le
from .poset import ConsistencyError, Poset, enumerate_classes

log = logging.getLogger(__name__)

MEET_CLASSES = ("OICO", "OI", "IOCO", "IO", "Mo", "Mc", "Mineg", "Mcneg", "ReflOO")

# the closure whose closed ideals may be paired with each meet class
MEET_CLOSURE = {
    "OICO": "XI", "OI": "XI", "IOCO": "IX", "IO": "IX",
    "Mo": "M", "Mc": "M", "Mineg": "Mneg", "Mcneg": "Mneg", "ReflOO": "R",
}

# For Theta = everything, K(Theta) & R = K(Psi) & R with Psi lifted from this
# rank-1 generator (the smallest K-class containing R).
MEET_BASE = {"XI": "id", "M": "id", "IX": "neg", "Mneg": "neg", "R": "nimp"}

INNER_NEG_MEET = {
    "OICO": "IOCO", "OI": "IO", "Mo": "Mineg", "Mc": "Mcneg", "ReflOO": "ReflOO",
}
INNER_NEG_MEET.update({v: k for k, v in INNER_NEG_MEET.items()})

INNER_NEG_NAMED = {
    "Eiio": "Eioi", "Eq": "Eq", "OXC": "XOC", "IXC": "XIC", "OOC": "OOC",
    "OIC": "IOC", "IIC": "IIC", "OICI": "IOCI", "IX": "XI", "II": "II",
    "M": "Mneg", "Mi": "Moneg", "Refl": "Refl", "ReflOOC": "ReflOOC",
    "ReflIIC": "ReflIIC", "ReflII": "ReflII", "Vak": "Vak", "Vaki": "Vaki",
}
INNER_NEG_NAMED.update({v: k for k, v in INNER_NEG_NAMED.items()})

# Lower covers of the fixed classes and of the classes that only arise from
# degenerate ideals.  Names not in the fixed list are turned into descriptors
# by class_descriptor.
NAMED_COVERS = {
    "Empty": (),
    "Vako": ("Empty",),
    "Vaki": ("Empty",),
    "Vak": ("Vako", "Vaki"),
    "ReflOOC": ("ReflOO", "Vak"),
    "ReflII": ("Vaki",),
    "ReflIIC": ("ReflII", "Vak"),
    "Refl": ("ReflOOC", "ReflIIC"),
    "Mi": ("Mc", "Vaki"),
    "M": ("Mo", "Mi", "Vak"),
    "Moneg": ("Mcneg", "Vaki"),
    "Mneg": ("Moneg", "Mineg", "Vak"),
    "OICI": ("OI", "Mi"),
    "OIC": ("OICO", "OICI", "M"),
    "IOCI": ("IO", "Moneg"),
    "IOC": ("IOCO", "IOCI", "Mneg"),
    "OOC": ("OO", "ReflOOC"),
    "OXC": ("OX", "OOC", "OIC"),
    "XOC": ("XO", "OOC", "IOC"),
    "II": ("ReflII",),
    "IIC": ("ReflIIC", "II"),
    "IX": ("II", "IOCI"),
    "IXC": ("IIC", "IOC", "IX"),
    "XI": ("II", "OICI"),
    "XIC": ("IIC", "OIC", "XI"),
    "Eq": ("OOC", "IIC", "Refl"),
    "Eiio": ("OXC", "XIC", "Eq"),
    "Eioi": ("XOC", "IXC", "Eq"),
    "All": ("Eiio", "Eioi", "Eiii"),
}


class DescriptorError(ValueError):
    """A descriptor violates the side conditions of its variant."""


class DecompositionError(ValueError):
    """The McU^k decomposition does not apply to the given input."""


# -- ideals across ranks -----------------------------------------------------------

@lru_cache(maxsize=None)
def theta_at_rank(theta: Ideal, k: int) -> Ideal:
    """The same downset of functions, seen in the rank-k poset."""
    p = theta.poset
    if k == p.k:
        return theta
    q = enumerate_classes(k)
    tops = [p.elements[i] for i in theta.maxima]
    m = 0
    for j, e in enumerate(q.elements):
        if any(minmin_le(e, t) for t in tops):
            m |= 1 << j
    return Ideal(q, m)


def member_klik(f: BoolFn, theta: Ideal, k: int | None = None) -> bool:
    """f in K_k(Theta): every set of at most k true points of f gives a
    characteristic function in the downset of Theta.

    Only subsets of size min(k, #true points) are tested; smaller ones are
    minorants of those and an ideal contains them anyway.
    """
    k = theta.poset.k if k is None else k
    th = theta_at_rank(theta, k)
    return th.poset.required(f) & ~th.members == 0


def downset_functions(theta: Ideal, n: int) -> set[BoolFn]:
    """All n-ary functions below some member of Theta (brute force)."""
    if n > 3:
        raise CapacityError("downset_functions enumerates arity at most 3")
    tops = [theta.poset.elements[i] for i in theta.maxima]
    return {BoolFn(n, t) for t in range(1 << (1 << n))
            if any(minmin_le(BoolFn(n, t), g) for g in tops)}


def local_closure(X: Iterable[BoolFn], ell: int, n: int) -> set[BoolFn]:
    """All n-ary f whose restriction to any set of at most ell rows agrees
    with the restriction of some n-ary member of X."""
    if n > 4:
        raise CapacityError(f"local closure is exhaustive and limited to arity 4, got {n}")
    xs = np.array(sorted({g.table for g in X if g.arity == n}), dtype=np.uint64)
    universe = all_tables(n)
    if not len(xs):
        return set()
    ok = np.ones(len(universe), dtype=bool)
    rows = range(1 << n)
    for r in range(1, ell + 1):
        for S in combinations(rows, r):
            m = np.uint64(sum(1 << a for a in S))
            allowed = np.unique(xs & m)
            ok &= np.isin(universe & m, allowed)
    return {BoolFn(n, int(t)) for t in universe[ok]}


def normalize_theta(theta: Iterable[BoolFn], ell: int) -> set[BoolFn]:
    """Canonical classes of chi_T for the sets T of at most ell true points
    of members of Theta.  They generate the same K_ell class."""
    out = set()
    for g in theta:
        pts = g.true_points()
        for r in range(min(ell, len(pts)) + 1):
            for T in combinations(pts, r):
                out.add(canonical_class(from_true_points(g.arity, T), ell))
    return out


def ideal_of(functions: Iterable[BoolFn], k: int) -> Ideal:
    """Downset in the rank-k poset generated by functions with <= k true points."""
    p = enumerate_classes(k)
    return Ideal(p, p.downset_mask(p.class_index(f) for f in functions))


def lift_rank(theta: Ideal, ell: int, k: int) -> Ideal:
    """Psi in the rank-k poset with K_k(Psi) = K_ell(Theta): the classes all of
    whose ell-point subsets lie below Theta."""
    if theta.poset.k != ell:
        raise ValueError(f"ideal lives in rank {theta.poset.k}, not {ell}")
    if k < ell:
        raise ValueError("lift_rank goes from rank ell up to rank k >= ell")
    q = enumerate_classes(k)
    req = theta.poset.required
    m = 0
    for j, e in enumerate(q.elements):
        if req(e) & ~theta.members == 0:
            m |= 1 << j
    return Ideal(q, m)


# -- descriptors ---------------------------------------------------------------

@dataclass(frozen=True)
class ClonoidDescriptor:
    variant: str                 # "klik", "meet" or "named"
    k: int
    theta: Ideal | None = None
    meet: str | None = None
    named: str | None = None

    def __post_init__(self):
        if self.variant == "klik":
            if self.theta is None:
                raise DescriptorError("K_k(Theta) needs an ideal")
        elif self.variant == "meet":
            if self.theta is None or self.meet not in MEET_CLOSURE:
                raise DescriptorError(f"meet class must be one of {MEET_CLASSES}")
            if not self.theta.members:
                raise DescriptorError("meet descriptors need a nonempty ideal")
            if not is_kC_closed(self.theta, MEET_CLOSURE[self.meet]):
                raise DescriptorError(
                    f"ideal {self.theta.label()} is not ({self.k},{MEET_CLOSURE[self.meet]})-closed")
        elif self.variant == "named":
            if self.named not in FIXED_CLONOID_CLASSES:
                raise DescriptorError(f"{self.named!r} is not one of the fixed classes")
        else:
            raise DescriptorError(f"unknown variant {self.variant!r}")
        if self.theta is not None and self.theta.poset.k != self.k:
            raise DescriptorError("ideal rank differs from descriptor rank")

    def __str__(self) -> str:
        if self.variant == "named":
            return self.named
        s = f"K{self.k}{self.theta.label()}"
        return s if self.variant == "klik" else f"{s} & {self.meet}"

    def to_json(self) -> dict:
        d = {"variant": self.variant, "k": self.k}
        if self.theta is not None:
            d["theta"] = [str(self.theta.poset.elements[i]) for i in self.theta.maxima]
        if self.meet:
            d["meet"] = self.meet
        if self.named:
            d["named"] = self.named
        return d

    @classmethod
    def from_json(cls, d: dict) -> "ClonoidDescriptor":
        k = d["k"]
        theta = None
        if "theta" in d:
            theta = ideal_of([BoolFn.parse(s) for s in d["theta"]], k)
        return cls(d["variant"], k, theta, d.get("meet"), d.get("named"))


def Klik(theta: Ideal) -> ClonoidDescriptor:
    return ClonoidDescriptor("klik", theta.poset.k, theta)


def KlikMeet(theta: Ideal, meet: str) -> ClonoidDescriptor:
    return ClonoidDescriptor("meet", theta.poset.k, theta, meet)


def Named(name: str, k: int) -> ClonoidDescriptor:
    return ClonoidDescriptor("named", k, named=name)


def descriptor_member(d: ClonoidDescriptor, f: BoolFn) -> bool:
    if d.variant == "named":
        return class_member(d.named, f)
    if not member_klik(f, d.theta):
        return False
    return d.variant == "klik" or class_member(d.meet, f)


def full_ideal(k: int) -> Ideal:
    p = enumerate_classes(k)
    return Ideal(p, p.full)


def rank1_lift(name: str, k: int) -> Ideal:
    p1 = enumerate_classes(1)
    return lift_rank(Ideal(p1, p1.down[p1.index_by_name(name)]), 1, k)


def class_descriptor(name: str, k: int) -> ClonoidDescriptor:
    """A descriptor for a class that appears in the cover tables."""
    if name in FIXED_CLONOID_CLASSES:
        return Named(name, k)
    p = enumerate_classes(k)
    if name == "Empty":
        return Klik(Ideal(p, 0))
    if name == "Vako":
        return Klik(Ideal(p, p.down[p.bottom()]))
    if name == "All":
        return Klik(full_ideal(k))
    if name == "Eiii":
        return Klik(Ideal(p, p.full & ~p.up[p.index_by_name("1")]))
    if name in ("OX", "XO", "OO"):
        return Klik(rank1_lift({"OX": "id", "XO": "neg", "OO": "nimp"}[name], k))
    if name in MEET_CLOSURE:
        return KlikMeet(full_ideal(k), name)
    raise KeyError(f"no descriptor for class {name!r}")


def inner_negate_descriptor(d: ClonoidDescriptor) -> ClonoidDescriptor:
    if d.variant == "named":
        return Named(INNER_NEG_NAMED[d.named], d.k)
    p = d.theta.poset
    m = 0
    for i in d.theta.indices():
        m |= 1 << p.class_index(inner_negation(p.elements[i]))
    theta = Ideal(p, m)
    return Klik(theta) if d.variant == "klik" else KlikMeet(theta, INNER_NEG_MEET[d.meet])


# -- probes and fingerprints -----------------------------------------------------

def _bits_to_int(v: np.ndarray) -> int:
    return int.from_bytes(np.packbits(v.astype(bool), bitorder="little").tobytes(), "little")


def _mask_array(masks: list[int], width: int) -> np.ndarray:
    if width > 64:
        return np.array(masks, dtype=object)
    return np.array(masks, dtype=np.uint64)


def _klik_vector(req: np.ndarray, theta: int) -> np.ndarray:
    if req.dtype == object:
        return np.array([r & ~theta == 0 for r in req], dtype=bool)
    return (req & np.uint64(~theta & 0xFFFFFFFFFFFFFFFF)) == 0


class ProbeSet:
    """Membership probes: all functions of arity at most 3, the poset
    representatives for rank k and their five C-closures."""

    def __init__(self, k: int):
        self.k = k
        self.poset = enumerate_classes(k)
        seen: dict[tuple[int, int], BoolFn] = {}
        for n in (1, 2, 3):
            for t in range(1 << (1 << n)):
                seen.setdefault((n, t), BoolFn(n, t))
        for e in self.poset.elements:
            for f in [e] + [closure_C(e, C) for C in ("XI", "IX", "M", "Mneg", "R")]:
                seen.setdefault((f.arity, f.table), f)
        self.functions = list(seen.values())
        self.req = _mask_array([self.poset.required(f) for f in self.functions], len(self.poset))
        self._class_cache: dict[str, np.ndarray] = {}

    def __len__(self) -> int:
        return len(self.functions)

    def class_vector(self, name: str) -> np.ndarray:
        if name not in self._class_cache:
            self._class_cache[name] = np.array(
                [class_member(name, f) for f in self.functions], dtype=bool)
        return self._class_cache[name]

    def vector(self, d: ClonoidDescriptor) -> np.ndarray:
        if d.variant == "named":
            return self.class_vector(d.named)
        v = _klik_vector(self.req, d.theta.members)
        return v if d.variant == "klik" else v & self.class_vector(d.meet)

    def fingerprint(self, d: ClonoidDescriptor) -> int:
        return _bits_to_int(self.vector(d))


class Universe:
    """Every function of arity 1..max_arity, for exhaustive comparisons."""

    def __init__(self, k: int, max_arity: int = 4):
        self.k = k
        self.poset = p = enumerate_classes(k)
        if len(p) > 64:
            raise CapacityError("universe probes support posets of at most 64 classes")
        self.arities = list(range(1, max_arity + 1))
        self.tables = {n: all_tables(n) for n in self.arities}
        self.req = {n: required_batch(p, n) for n in self.arities}
        self._class_cache: dict[str, np.ndarray] = {}

    def class_vector(self, name: str) -> np.ndarray:
        if name not in self._class_cache:
            self._class_cache[name] = np.concatenate(
                [batch_class_member(name, self.tables[n], n) for n in self.arities])
        return self._class_cache[name]

    def vector(self, d: ClonoidDescriptor) -> np.ndarray:
        if d.variant == "named":
            return self.class_vector(d.named)
        v = np.concatenate([_klik_vector(self.req[n], d.theta.members) for n in self.arities])
        return v if d.variant == "klik" else v & self.class_vector(d.meet)

    def function(self, i: int) -> BoolFn:
        for n in self.arities:
            size = len(self.tables[n])
            if i < size:
                return BoolFn(n, i)
            i -= size
        raise IndexError(i)


def required_batch(p: Poset, n: int) -> np.ndarray:
    """Poset.required for every n-ary table at once (uint64 masks)."""
    if len(p) > 64:
        raise CapacityError("batch required masks need at most 64 classes")
    t = all_tables(n)
    cnt = np.bitwise_count(t)
    out = np.where(t == 0, np.uint64(1 << p.bottom()), np.uint64(0))
    for r in range(1, p.k + 1):
        for S in combinations(range(1 << n), r):
            m = np.uint64(sum(1 << a for a in S))
            bit = np.uint64(1 << p.index_of_points(list(S), n))
            hit = ((t & m) == m) & (cnt >= p.k) if r == p.k else t == m
            out |= np.where(hit, bit, np.uint64(0))
    return out


def fingerprint_hash(fp: int) -> str:
    return hashlib.sha256(fp.to_bytes((fp.bit_length() + 7) // 8 or 1, "little")).hexdigest()[:16]


# -- enumeration -------------------------------------------------------------------

@dataclass
class Clonoid:
    descriptor: ClonoidDescriptor
    aliases: list[ClonoidDescriptor]
    fingerprint: int
    names: list[str] = field(default_factory=list)

    @property
    def size(self) -> int:
        return self.fingerprint.bit_count()

    def label(self) -> str:
        return self.names[0] if self.names else str(self.descriptor)


@dataclass
class Enumeration:
    k: int
    clonoids: list[Clonoid]
    probes: ProbeSet
    descriptor_count: int
    diagnostics: list[str]

    def __len__(self) -> int:
        return len(self.clonoids)

    def find(self, d: ClonoidDescriptor) -> Clonoid | None:
        fp = self.probes.fingerprint(d)
        return self._by_fp.get(fp)

    def __post_init__(self):
        self._by_fp = {c.fingerprint: c for c in self.clonoids}

    def by_name(self, name: str) -> Clonoid:
        for c in self.clonoids:
            if name in c.names:
                return c
        raise KeyError(name)


def theorem_descriptors(k: int) -> list[ClonoidDescriptor]:
    """Items (a) to (g) of the enumeration theorem, with repetitions."""
    p = enumerate_classes(k)
    out = [Klik(t) for t in all_ideals(p)]
    for C, meets in (("XI", ("OICO", "OI")), ("IX", ("IOCO", "IO")), ("M", ("Mo", "Mc")),
                     ("Mneg", ("Mineg", "Mcneg")), ("R", ("ReflOO",))):
        for t in closed_ideals(p, C):
            if t.members:
                out.extend(KlikMeet(t, R) for R in meets)
    out.extend(Named(name, k) for name in FIXED_CLONOID_CLASSES)
    return out


@lru_cache(maxsize=None)
def enumerate_clonoids(k: int, second_pass: bool = True) -> Enumeration:
    if k not in (2, 3):
        raise ValueError(f"clonoid enumeration supports k in (2, 3), got {k}")
    probes = ProbeSet(k)
    descs = theorem_descriptors(k)
    groups: dict[int, list[ClonoidDescriptor]] = {}
    for d in descs:
        groups.setdefault(probes.fingerprint(d), []).append(d)
    diagnostics = []
    if second_pass:
        uni = Universe(k)
        for fp, ds in groups.items():
            if len(ds) < 2:
                continue
            ref = uni.vector(ds[0])
            for d in ds[1:]:
                diff = np.flatnonzero(uni.vector(d) != ref)
                if len(diff):
                    diagnostics.append(
                        f"fingerprint collision: {ds[0]} and {d} differ on {uni.function(int(diff[0]))}")
    names: dict[int, list[str]] = {}
    for name in class_names(k):
        try:
            fp = _named_fingerprint(probes, name)
        except KeyError:
            continue
        names.setdefault(fp, []).append(name)
    clonoids = [Clonoid(ds[0], ds[1:], fp, names.get(fp, [])) for fp, ds in groups.items()]
    clonoids.sort(key=lambda c: (c.size, c.fingerprint))
    for msg in diagnostics:
        log.warning(msg)
    return Enumeration(k, clonoids, probes, len(descs), diagnostics)


def _named_fingerprint(probes: ProbeSet, name: str) -> int:
    return _bits_to_int(probes.class_vector(name))


def fingerprint(d: ClonoidDescriptor) -> int:
    return _probe_set(d.k).fingerprint(d)


@lru_cache(maxsize=None)
def _probe_set(k: int) -> ProbeSet:
    return ProbeSet(k)


# -- lower covers ----------------------------------------------------------------

def _closed_lower_covers(theta: Ideal, C: str | None) -> list[Ideal]:
    p = theta.poset
    if C is None:
        return [Ideal(p, theta.members & ~(1 << i)) for i in theta.maxima]
    below = [t for t in closed_ideals(p, C) if t < theta]
    return [t for t in below if not any(t < u for u in below)]


def _meet_or_empty(psi: Ideal, R: str) -> ClonoidDescriptor:
    return KlikMeet(psi, R) if psi.members else Klik(psi)


def _is_everything(theta: Ideal) -> bool:
    p = theta.poset
    return p.index_by_name("1") in theta


def _symbolic_covers(d: ClonoidDescriptor) -> list[ClonoidDescriptor]:
    k = d.k
    if d.variant == "named":
        return [class_descriptor(n, k) for n in NAMED_COVERS[d.named]]
    theta = d.theta
    p = theta.poset
    vako = p.down[p.bottom()]
    if d.variant == "klik":
        if not theta.members:
            return []
        if theta.members == vako:
            return [Klik(Ideal(p, 0))]
        if _is_everything(theta):
            return [class_descriptor(n, k) for n in NAMED_COVERS["All"]]
        out = [Klik(psi) for psi in _closed_lower_covers(theta, None)]
        for C, R in (("XI", "OICO"), ("IX", "IOCO"), ("R", "ReflOO")):
            if is_kC_closed(theta, C):
                out.append(KlikMeet(theta, R))
        return out
    R, C = d.meet, MEET_CLOSURE[d.meet]
    if theta.members == vako:
        # K(Theta) is the constant 0 alone; the meet is that or nothing
        return [Klik(Ideal(p, 0))] if class_member(R, constant(0)) else []
    if _is_everything(theta):
        base = rank1_lift(MEET_BASE[C], k)
        if not is_kC_closed(base, C):
            raise ConsistencyError(f"lifted base ideal for {R} is not ({k},{C})-closed")
        return _symbolic_covers(KlikMeet(base, R))
    out = [_meet_or_empty(psi, R) for psi in _closed_lower_covers(theta, C)]
    extra = {
        "OICO": [("OI", None), ("Mo", "M")],
        "OI": [("Mc", "M")],
        "IOCO": [("IO", None), ("Mineg", "Mneg")],
        "IO": [("Mcneg", "Mneg")],
        "Mo": [("Mc", None)],
        "Mineg": [("Mcneg", None)],
    }.get(R, [])
    for R2, C2 in extra:
        if C2 is None or is_kC_closed(theta, C2):
            out.append(KlikMeet(theta, R2))
    return out


def lower_covers(d: ClonoidDescriptor) -> list[ClonoidDescriptor]:
    """Lower covers of the clonoid described by d.

    The case analysis yields candidate subclasses; candidates equal to d or
    contained in another candidate (which happens for the smallest ideals)
    are dropped by comparing fingerprints.
    """
    probes = _probe_set(d.k)
    own = probes.fingerprint(d)
    cand: dict[int, ClonoidDescriptor] = {}
    for c in _symbolic_covers(d):
        fp = probes.fingerprint(c)
        if fp != own and fp not in cand:
            cand[fp] = c
    fps = list(cand)
    keep = [fp for fp in fps if not any(fp != g and fp & ~g == 0 for g in fps)]
    return [cand[fp] for fp in keep]


# -- semibisectability ----------------------------------------------------------

def minors_of(G: Iterable[BoolFn], n: int) -> list[BoolFn]:
    """All n-ary minors of members of G, deduplicated, largest table first
    (so projections come out as x_1, x_2, ...)."""
    out = set()
    for g in G:
        for sigma in product(range(1, n + 1), repeat=g.arity):
            out.add(minor_apply(g, sigma, n).table)
    return [BoolFn(n, t) for t in sorted(out, reverse=True)]


def semibisectable(f: BoolFn, G: Iterable[BoolFn], k: int) -> bool:
    """(G, k)-semibisectability of f: (A) every at most k true points are
    all sent to 1 by one n-ary minor of G; (B) every true point is separated
    from every false point by one such minor."""
    if k is None or not isinstance(k, int) or k < 1:
        raise ValueError("semibisectability needs a finite rank k >= 1")
    if f.is_constant():
        raise ValueError("semibisectability is defined for nonconstant functions")
    Gn = [g.table for g in minors_of(G, f.arity)]
    pts = f.true_points()
    for r in range(1, min(k, len(pts)) + 1):
        for T in combinations(pts, r):
            m = sum(1 << a for a in T)
            if not any(t & m == m for t in Gn):
                return False
    for a in pts:
        for b in f.false_points():
            if not any((t >> a) & 1 and not (t >> b) & 1 for t in Gn):
                return False
    return True


def decompose_via_mcuk(f: BoolFn, G: Iterable[BoolFn], k: int,
                       max_inner: int = 16) -> tuple[BoolFn, list[BoolFn]]:
    """Write f = h(phi_1, ..., phi_N) with the phi_i the n-ary minors of G and
    h = chi of the up-closure of phi(f^{-1}(1)), which lies in McU^k."""
    G = list(G)
    if not semibisectable(f, G, k):
        raise DecompositionError(f"{f} is not ({k})-semibisectable over the given G")
    inner = minors_of(G, f.arity)
    N = len(inner)
    if N > max_inner:
        raise CapacityError(f"{N} inner functions exceed the cap of {max_inner}")

    def image(a: int) -> int:
        v = 0
        for phi in inner:
            v = (v << 1) | phi.at(a)
        return v

    T = {image(a) for a in f.true_points()}
    h = BoolFn(N, _up_closure(from_true_points(N, T).table, N, True))
    if compose(h, inner) != f:
        raise ConsistencyError(f"recomposition of {f} failed")
    if not class_member(f"McU{k}", h):
        raise ConsistencyError(f"outer function {h} is not in McU^{k}")
    return h, inner


# -- clones --------------------------------------------------------------------

def _fn(arity: int, *points: str) -> BoolFn:
    return from_true_points(arity, points)


X_AND_Y_IMP_Z = _fn(3, "100", "101", "111")
X_AND_Y_OR_Z = _fn(3, "101", "110", "111")
X_OR_Y_NIMP_Z = _fn(3, "010", "100", "101", "110", "111")
X_OR_Y_AND_Z = _fn(3, "011", "100", "101", "110", "111")
X_AND_Y_OR_NOT_Z = _fn(3, "100", "110", "111")


@dataclass(frozen=True)
class ClonePreset:
    name: str
    generators: tuple[BoolFn, ...]
    predicate: str | None        # registry class name; None = unknown

    def contains(self, f: BoolFn) -> bool:
        if self.predicate is None:
            raise ValueError(f"preset {self.name} has no membership predicate")
        if self.predicate == "Ic":
            return f.table in {projection(i, f.arity).table for i in range(1, f.arity + 1)}
        return class_member(self.predicate, f)

    def to_json(self) -> dict:
        return {"name": self.name, "generators": [str(g) for g in self.generators],
                "predicate": self.predicate}


_FIXED_PRESETS = {
    "All": ("and", "neg"),
    "OX": ("and", "plus"),
    "XI": ("or", "iff"),
    "OI": ("or", X_AND_Y_OR_NOT_Z),
    "M": ("and", "or", "0", "1"),
    "Mo": ("and", "or", "0"),
    "Mi": ("and", "or", "1"),
    "Mc": ("and", "or"),
    "S": ("mu", "neg"),
    "Sc": ("mu", "oplus3"),
    "SM": ("mu",),
    "Ic": (),
}

_RANK_PRESETS = {
    "U": "nimp", "TcU": X_AND_Y_IMP_Z, "MU": "0", "McU": X_AND_Y_OR_Z,
    "W": "imp", "TcW": X_OR_Y_NIMP_Z, "MW": "1", "McW": X_OR_Y_AND_Z,
}


def _resolve(g) -> BoolFn:
    return named_fn(g) if isinstance(g, str) else g


@lru_cache(maxsize=None)
def preset(name: str) -> ClonePreset:
    """Clone by name: All, OX, XI, OI, M, Mo, Mi, Mc, S, Sc, SM, Ic, or a rank
    family U, TcU, MU, McU, W, TcW, MW, McW followed by k >= 2."""
    if name in _FIXED_PRESETS:
        return ClonePreset(name, tuple(map(_resolve, _FIXED_PRESETS[name])), name)
    m = re.fullmatch(r"([A-Za-z]+?)(\d+)", name)
    if m and m.group(1) in _RANK_PRESETS and int(m.group(2)) >= 2:
        base, k = m.group(1), int(m.group(2))
        th = threshold_fn(k + 1, k if base[-1] == "U" else 2)
        return ClonePreset(name, (th, _resolve(_RANK_PRESETS[base])), name)
    raise KeyError(f"unknown clone preset {name!r}")


def custom_preset(generators: Iterable[BoolFn], name: str = "custom") -> ClonePreset:
    return ClonePreset(name, tuple(generators), None)


def preset_upper_covers(name: str) -> list[str]:
    """Covers of the preset in the lattice of clones."""
    fixed = {
        "All": [], "OX": ["All"], "XI": ["All"], "OI": ["OX", "XI"], "M": ["All"],
        "Mo": ["M", "OX"], "Mi": ["M", "XI"], "Mc": ["Mo", "Mi", "OI"],
        "S": ["All"], "Sc": ["S", "OI"], "SM": ["Sc", "McU2", "McW2"],
        "Ic": [],
    }
    if name in fixed:
        return fixed[name]
    m = re.fullmatch(r"([A-Za-z]+?)(\d+)", name)
    base, k = m.group(1), int(m.group(2))
    U = base.endswith("U")
    fam = "U" if U else "W"
    prev = (lambda b: f"{b}{k - 1}") if k > 2 else (lambda b: {
        "U": "OX", "W": "XI", "TcU": "OI", "TcW": "OI", "MU": "Mo", "MW": "Mi",
        "McU": "Mc", "McW": "Mc"}[b])
    same = {"U": [], "TcU": [fam], "MU": [fam], "McU": ["TcU", "MU"]}[base.replace("W", "U")]
    same = [s.replace("U", fam) if not U else s for s in same]
    return [prev(base)] + [f"{s}{k}" for s in same]


def _compose_all(g: BoolFn, arr: np.ndarray, full: int) -> np.ndarray:
    """g(f_1, ..., f_r) for every r-tuple from arr, as an r-dimensional array."""
    r = g.arity
    dt = arr.dtype
    fullv = dt.type(full)
    out = np.zeros((len(arr),) * r, dtype=dt)
    for t in g.true_points():
        acc = np.full((1,) * r, fullv, dtype=dt)
        for i in range(r):
            col = arr if (t >> (r - 1 - i)) & 1 else arr ^ fullv
            shape = [1] * r
            shape[i] = len(arr)
            acc = acc & col.reshape(shape)
        out |= acc
    return out


def _table_dtype(m: int):
    return {0: np.uint8, 1: np.uint8, 2: np.uint8, 3: np.uint8, 4: np.uint16}[m]


@lru_cache(maxsize=None)
def clone_level(generators: tuple[BoolFn, ...], m: int, budget: int = 50_000_000) -> np.ndarray:
    """Sorted tables of the m-ary members of the clone generated."""
    if m > 4:
        raise CapacityError(f"clone closure is limited to arity 4, got {m}")
    dt = _table_dtype(m)
    full = _full(m)
    cur = np.array(sorted(projection(i, m).table for i in range(1, m + 1)), dtype=dt)
    while True:
        parts = [cur]
        for g in generators:
            if len(cur) ** g.arity > budget:
                raise CapacityError(
                    f"closing under {g} at arity {m} needs {len(cur) ** g.arity} compositions")
            parts.append(_compose_all(g, cur, full).ravel())
        nxt = np.unique(np.concatenate(parts))
        if len(nxt) == len(cur):
            return cur
        cur = nxt


def clone_closure_bounded(gens: Iterable[BoolFn], max_arity: int) -> set[BoolFn]:
    """All members of arity 1..max_arity of the clone generated by gens."""
    gens = tuple(gens)
    return {BoolFn(m, int(t)) for m in range(1, max_arity + 1) for t in clone_level(gens, m)}


# -- stability -------------------------------------------------------------------

@dataclass
class Verdict:
    status: str                    # "pass", "fail" or "inconclusive"
    side: str
    preset: str
    checked: int = 0
    counterexample: dict | None = None
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_json(self) -> dict:
        d = {"verdict": self.status, "side": self.side, "preset": self.preset,
             "checked": self.checked}
        if self.counterexample is not None:
            d["counterexample"] = self.counterexample
        if self.note:
            d["note"] = self.note
        return d


class Membership:
    """A clonoid given by a class name, a descriptor or a predicate."""

    def __init__(self, K):
        self.K = K
        if isinstance(K, str):
            class_member(K, constant(0))  # validates the name
            self.scalar = lambda f: class_member(K, f)
        elif isinstance(K, ClonoidDescriptor):
            self.scalar = lambda f: descriptor_member(K, f)
        elif callable(K):
            self.scalar = K
        else:
            raise TypeError(f"cannot use {K!r} as a membership predicate")

    def __call__(self, f: BoolFn) -> bool:
        return self.scalar(f)

    @lru_cache(maxsize=None)
    def table(self, m: int) -> np.ndarray:
        """Membership of every m-ary function, indexed by table."""
        T = all_tables(m)
        K = self.K
        if isinstance(K, str):
            return batch_class_member(K, T, m)
        if isinstance(K, ClonoidDescriptor) and len(enumerate_classes(K.k)) <= 64:
            p = K.theta.poset if K.theta is not None else None
            if K.variant == "named":
                return batch_class_member(K.named, T, m)
            v = _klik_vector(required_batch(p, m), K.theta.members)
            return v if K.variant == "klik" else v & batch_class_member(K.meet, T, m)
        return np.array([self.scalar(BoolFn(m, int(t))) for t in T], dtype=bool)


@lru_cache(maxsize=None)
def _minor_index(m: int, sigma: tuple[int, ...], n: int) -> np.ndarray:
    """For an m-ary f and sigma: [m] -> [n], row of f read by each n-ary row."""
    idx = np.zeros(1 << n, dtype=np.uint64)
    for a in range(1 << n):
        j = 0
        for s in sigma:
            j = (j << 1) | ((a >> (n - s)) & 1)
        idx[a] = j
    return idx


def _apply_minor_batch(tables: np.ndarray, m: int, sigma: tuple[int, ...], n: int) -> np.ndarray:
    idx = _minor_index(m, sigma, n)
    bits = (tables[:, None].astype(np.uint64) >> idx[None, :]) & np.uint64(1)
    weights = np.left_shift(np.uint64(1), np.arange(1 << n, dtype=np.uint64))
    return (bits * weights[None, :]).sum(axis=1).astype(np.uint64)


def stability_check(K, side: str, clone: ClonePreset, arity_cap: int = 3,
                    budget: int = 20_000_000, seed: int = 0) -> Verdict:
    """Bounded check of K C <= K (side="right") or C K <= K (side="left").

    "pass" means no counterexample among members of K of arity up to the
    cap; it is not a proof.  Left checks larger than the budget are sampled
    and report "inconclusive" when the sample finds nothing.
    """
    if arity_cap > 4:
        raise CapacityError("stability checks are limited to arity 4")
    if side not in ("left", "right"):
        raise ValueError(f"side must be left or right, got {side!r}")
    mem = K if isinstance(K, Membership) else Membership(K)
    members = {m: np.flatnonzero(mem.table(m)).astype(np.uint64) for m in range(1, arity_cap + 1)}
    if side == "right":
        return _check_right(mem, clone, members, arity_cap)
    return _check_left(mem, clone, members, arity_cap, budget, seed)


def _check_right(mem, clone, members, cap) -> Verdict:
    v = Verdict("pass", "right", clone.name)
    for m in range(1, cap + 1):
        F = members[m]
        if not len(F):
            continue
        for n in range(1, cap + 1):
            ok = mem.table(n)
            for sigma in product(range(1, n + 1), repeat=m):
                res = _apply_minor_batch(F, m, sigma, n)
                v.checked += len(res)
                bad = np.flatnonzero(~ok[res.astype(np.int64)])
                if len(bad):
                    i = int(bad[0])
                    v.status = "fail"
                    v.counterexample = {"kind": "minor", "f": str(BoolFn(m, int(F[i]))),
                                        "sigma": list(sigma), "result": str(BoolFn(n, int(res[i])))}
                    return v
    for m in range(1, cap + 1):
        for t in members[m]:
            f = BoolFn(m, int(t))
            for g in clone.generators:
                h = star(f, g)
                v.checked += 1
                if not mem(h):
                    v.status = "fail"
                    v.counterexample = {"kind": "star", "f": str(f), "g": str(g), "result": str(h)}
                    return v
    return v


def _check_left(mem, clone, members, cap, budget, seed) -> Verdict:
    v = Verdict("pass", "left", clone.name)
    rng = np.random.default_rng(seed)
    sampled = False
    for m in range(1, cap + 1):
        F = members[m].astype(_table_dtype(m))
        ok = mem.table(m)
        full = _full(m)
        for g in clone.generators:
            r = g.arity
            if not len(F):
                continue
            if len(F) ** r <= budget:
                res = _compose_all(g, F, full).ravel()
                v.checked += len(res)
                bad = np.flatnonzero(~ok[res.astype(np.int64)])
                if len(bad):
                    idx = np.unravel_index(int(bad[0]), (len(F),) * r)
                    inner = [F[i] for i in idx]
                else:
                    continue
            else:
                sampled = True
                pick = rng.integers(0, len(F), size=(budget, r))
                res = np.zeros(budget, dtype=F.dtype)
                dt = F.dtype.type
                for t in g.true_points():
                    acc = np.full(budget, dt(full), dtype=F.dtype)
                    for i in range(r):
                        col = F[pick[:, i]]
                        acc &= col if (t >> (r - 1 - i)) & 1 else col ^ dt(full)
                    res |= acc
                v.checked += budget
                bad = np.flatnonzero(~ok[res.astype(np.int64)])
                if not len(bad):
                    continue
                inner = [F[i] for i in pick[int(bad[0])]]
            h = compose(g, [BoolFn(m, int(t)) for t in inner])
            v.status = "fail"
            v.counterexample = {"kind": "compose", "g": str(g),
                                "inner": [str(BoolFn(m, int(t))) for t in inner],
                                "result": str(h)}
            return v
    if sampled:
        v.status = "inconclusive"
        v.note = "some tuple spaces exceeded the budget and were sampled"
    return v


def theta_right_stability(theta: Ideal, clone: ClonePreset, k: int | None = None,
                          arity_cap: int = 3) -> Verdict:
    """Right stability of K_k(Theta) under the clone: every chi_T with
    |T| <= k below some theta(c_1, ..., c_a), c_i in the clone, must lie
    in the downset of Theta."""
    k = theta.poset.k if k is None else k
    th = theta_at_rank(theta, k)
    p = th.poset
    v = Verdict("pass", "theta-right", clone.name)
    tops = [p.elements[i] for i in th.maxima]
    for m in range(1, arity_cap + 1):
        cl = clone_level(clone.generators, m).astype(np.int64)
        for r in range(1, k + 1):
            for T in combinations(range(1 << m), r):
                # restrictions of the m-ary clone members to the rows in T
                R = set()
                for c in cl:
                    R.add(sum(((int(c) >> a) & 1) << i for i, a in enumerate(T)))
                e = p.index_of_points(list(T), m)
                if e in th:
                    continue
                for top in tops:
                    phi = _find_row_map(top, r, R)
                    v.checked += 1
                    if phi is not None:
                        v.status = "fail"
                        v.counterexample = {
                            "points": [format(a, f"0{m}b") for a in T], "theta": str(top),
                            "images": [format(b, f"0{top.arity}b") for b in phi],
                            "class": str(p.elements[e])}
                        return v
    return v


def _find_row_map(top: BoolFn, r: int, R: set[int]):
    """Images in top^{-1}(1) for r rows such that every coordinate, read
    across the rows, is a restriction of some clone member."""
    n = top.arity
    for phi in product(top.true_points(), repeat=r):
        if all(sum(((b >> (n - 1 - j)) & 1) << i for i, b in enumerate(phi)) in R
               for j in range(n)):
            return phi
    return None


# -- Table of stability boundaries at k = 2 ------------------------------------

# class name -> (largest clone C with K C <= K, largest clone C with C K <= K)
STABILITY_TABLE = {
    "All": ("All", "All"),
    "Eiio": ("OI", "M"), "Eioi": ("OI", "M"), "Eiii": ("OI", "U2"), "Eq": ("OI", "All"),
    "OXC": ("OX", "M"), "XOC": ("XI", "M"), "IXC": ("OX", "M"), "XIC": ("XI", "M"),
    "OX": ("OX", "OX"), "XO": ("XI", "OX"), "IX": ("OX", "XI"), "XI": ("XI", "XI"),
    "OOC": ("OI", "M"), "IIC": ("OI", "M"), "OO": ("OI", "OX"), "II": ("OI", "XI"),
    "OIC": ("OI", "M"), "IOC": ("OI", "M"),
    "OICO": ("OI", "Mo"), "IOCI": ("OI", "Mi"), "OICI": ("OI", "Mi"), "IOCO": ("OI", "Mo"),
    "OI": ("OI", "OI"), "IO": ("OI", "OI"),
    "Smin": ("S", "U2"), "SminOX": ("Sc", "U2"), "SminXO": ("Sc", "U2"),
    "SminOICO": ("Sc", "MU2"), "SminIOCO": ("Sc", "MU2"),
    "SminOI": ("Sc", "TcU2"), "SminIO": ("Sc", "TcU2"), "SminOO": ("Sc", "U2"),
    "M": ("M", "M"), "Mneg": ("M", "M"), "Mo": ("Mo", "Mo"), "Mineg": ("Mi", "Mo"),
    "Mi": ("Mi", "Mi"), "Moneg": ("Mo", "Mi"), "Mc": ("Mc", "Mc"), "Mcneg": ("Mc", "Mc"),
    "U2": ("U2", "U2"), "Wneg2": ("W2", "U2"),
    "TcUCO2": ("TcU2", "MU2"), "TcWnegCO2": ("TcW2", "MU2"),
    "TcU2": ("TcU2", "TcU2"), "TcWneg2": ("TcW2", "TcU2"),
    "MU2": ("MU2", "MU2"), "MWneg2": ("MW2", "MU2"),
    "McU2": ("McU2", "McU2"), "McWneg2": ("McW2", "McU2"),
    "UOO2": ("TcU2", "U2"), "WnegOO2": ("TcW2", "U2"), "UWneg2": ("SM", "U2"),
    "Refl": ("S", "All"), "ReflOOC": ("Sc", "M"), "ReflIIC": ("Sc", "M"),
    "ReflOO": ("Sc", "OX"), "ReflII": ("Sc", "XI"),
    "Vak": ("All", "All"), "Vako": ("All", "OX"), "Vaki": ("All", "XI"), "Empty": ("All", "All"),
}

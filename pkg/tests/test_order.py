import pytest
from hypothesis import given, settings, strategies as st

from minmin.bf_core import BoolFn, CapacityError, ArityError, named_fn, threshold_fn
from minmin.order import (
    canonical_class, canonical_key, core, minmin_equiv, minmin_le, minorant_le,
)

import oracles


@st.composite
def small_fns(draw, max_arity=3, max_points=3):
    n = draw(st.integers(1, max_arity))
    pts = draw(st.sets(st.integers(0, (1 << n) - 1), max_size=max_points))
    return BoolFn(n, sum(1 << p for p in pts))


@settings(max_examples=300)
@given(small_fns(), small_fns())
def test_minmin_le_matches_direct_search(f, g):
    assert minmin_le(f, g) == oracles.minmin_brute(f, g)


def test_minorant_needs_equal_arity():
    with pytest.raises(ArityError):
        minorant_le(named_fn("id"), named_fn("and"))


def test_basic_order_facts():
    zero, idf, neg, nimp = (named_fn(x) for x in ("0", "id", "neg", "nimp"))
    assert minmin_le(zero, nimp) and minmin_le(nimp, idf) and minmin_le(nimp, neg)
    assert not minmin_le(idf, neg) and not minmin_le(neg, idf)
    # and is equivalent to id: identify both arguments
    assert minmin_equiv(named_fn("and"), idf)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_disjunctions_form_a_chain(n):
    small, big = threshold_fn(n, 1), threshold_fn(n + 1, 1)
    assert minmin_le(small, big) and not minmin_le(big, small)


@settings(max_examples=200)
@given(small_fns(4, 3), small_fns(4, 3))
def test_canonical_key_is_complete_invariant(f, g):
    assert (canonical_key(f) == canonical_key(g)) == minmin_equiv(f, g)


@given(small_fns(4, 3))
def test_canonical_class_is_equivalent(f):
    assert minmin_equiv(canonical_class(f), f)


def test_core_needed_beyond_column_dedup():
    # two points carrying all four columns: equivalent to nimp, although
    # deduplicating columns alone leaves four distinct ones
    f = BoolFn(4, sum(1 << p for p in (0b0011, 0b0101)))
    assert minmin_equiv(f, named_fn("nimp"))
    assert canonical_key(f) == canonical_key(named_fn("nimp"))
    p, cols = core(2, frozenset({0, 1, 2, 3}))
    assert p == 1


def test_canonical_capacity():
    with pytest.raises(CapacityError):
        canonical_class(threshold_fn(3, 1), 3)

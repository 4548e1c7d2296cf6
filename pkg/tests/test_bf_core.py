import pytest
from hypothesis import given, strategies as st

from minmin.bf_core import (
    ArityError, BoolFn, CapacityError, CLASS_NAMES_LEQ3, all_tables, batch_class_member,
    class_member, class_names, closure_C, compose, constant, dual, from_true_points,
    inner_negation, is_separating, minor_apply, named_fn, negation, projection,
    resolve_fn, star, threshold_fn,
)

import oracles


@st.composite
def boolfns(draw, max_arity=4):
    n = draw(st.integers(1, max_arity))
    return BoolFn(n, draw(st.integers(0, (1 << (1 << n)) - 1)))


# -- representation ---------------------------------------------------------------

def test_row_order_is_big_endian():
    nimp = named_fn("nimp")
    assert nimp(1, 0) == 1 and nimp(0, 1) == 0
    assert str(nimp) == "2:4"
    assert str(named_fn("mu")) == "3:e8"


@pytest.mark.parametrize("name,text", [
    ("id", "1:2"), ("neg", "1:1"), ("and", "2:8"), ("or", "2:e"), ("plus", "2:6"), ("mu", "3:e8"),
])
def test_named_tables(name, text):
    assert str(named_fn(name)) == text


@given(boolfns(6))
def test_text_round_trip(f):
    assert BoolFn.parse(str(f)) == f


@pytest.mark.parametrize("bad", ["", "3", "0:0", "17:0", "2:1f", "x:1", "1:g"])
def test_parse_rejects_malformed(bad):
    with pytest.raises((ValueError, ArityError, CapacityError)):
        BoolFn.parse(bad)


def test_resolve_accepts_names_and_tables():
    assert resolve_fn("mu") == resolve_fn("3:e8")


@given(boolfns(4))
def test_evaluation_matches_oracle(f):
    for a in oracles.points(f.arity):
        assert f(*a) == oracles.value(f, a)


# -- structural operations -----------------------------------------------------------

@given(boolfns(3), st.data())
def test_minor_matches_oracle(f, data):
    n = data.draw(st.integers(1, 4))
    sigma = data.draw(st.lists(st.integers(1, n), min_size=f.arity, max_size=f.arity))
    assert minor_apply(f, sigma, n) == oracles.minor(f, sigma, n)


def test_minor_rejects_out_of_range():
    with pytest.raises(ArityError):
        minor_apply(named_fn("and"), [1, 3], 2)


@given(boolfns(3), st.data())
def test_compose_matches_oracle(g, data):
    m = data.draw(st.integers(1, 3))
    fs = [BoolFn(m, data.draw(st.integers(0, (1 << (1 << m)) - 1))) for _ in range(g.arity)]
    assert compose(g, fs) == oracles.compose_brute(g, fs)


@given(boolfns(3), boolfns(3))
def test_star_definition(f, g):
    h = star(f, g)
    m = g.arity
    assert h.arity == f.arity + m - 1
    for a in oracles.points(h.arity):
        inner = oracles.value(g, a[:m])
        assert h(*a) == oracles.value(f, (inner,) + a[m:])


@given(boolfns(4))
def test_negations_are_involutions(f):
    assert negation(negation(f)) == f
    assert inner_negation(inner_negation(f)) == f
    assert dual(dual(f)) == f
    for a in oracles.points(f.arity):
        assert inner_negation(f)(*a) == f(*[1 - x for x in a])


def test_threshold():
    assert threshold_fn(3, 2) == named_fn("mu")
    assert threshold_fn(2, 1) == named_fn("or")
    assert threshold_fn(2, 2) == named_fn("and")


def test_projection_and_constants():
    assert projection(1, 2) == BoolFn(2, 0b1100)
    assert constant(1, 2).table == 0b1111


# -- closures ------------------------------------------------------------------------

@given(boolfns(4))
def test_closures_are_least_majorants(f):
    """The closure is a majorant in the class, and every majorant in the
    class is above it (checked over all functions of the arity)."""
    preds = {
        "XI": lambda g: g.f1 == 1,
        "IX": lambda g: g.f0 == 1,
        "M": oracles.monotone,
        "Mneg": lambda g: oracles.monotone(inner_negation(g)),
        "R": lambda g: inner_negation(g) == g,
    }
    for C, pred in preds.items():
        c = closure_C(f, C)
        assert f.table & ~c.table == 0
        assert pred(c)
        if f.arity <= 2:
            for t in range(1 << f.size):
                g = BoolFn(f.arity, t)
                if f.table & ~t == 0 and pred(g):
                    assert c.table & ~t == 0


def test_closure_examples():
    assert str(closure_C(constant(0), "XI")) == "1:2"
    assert closure_C(named_fn("lambda30"), "M") == BoolFn.parse("3:ee")


# -- properties and classes -------------------------------------------------------------

@given(boolfns(4), st.integers(1, 4))
def test_separating_matches_definition(f, k):
    assert is_separating(f, k) == oracles.separating(f, k)


def test_mu_rank_boundary():
    mu = named_fn("mu")
    assert class_member("U2", mu) and not class_member("U3", mu)
    assert class_member("McU2", mu)


def test_named_class_examples():
    assert class_member("OX", constant(0)) and not class_member("OX", constant(1))
    assert class_member("Vaki", constant(1)) and not class_member("Vaki", constant(0))
    assert class_member("Refl", named_fn("plus"))
    assert class_member("S", named_fn("neg")) and not class_member("S", named_fn("and"))
    assert class_member("Wneg2", inner_negation(named_fn("mu")))


@pytest.mark.parametrize("k", [2, 3])
def test_batch_predicates_agree_with_scalar(k):
    for n in (1, 2, 3):
        T = all_tables(n)
        for name in class_names(k):
            v = batch_class_member(name, T, n)
            assert [bool(x) for x in v] == [class_member(name, BoolFn(n, int(t))) for t in T], name


def test_class_names_leq3_distinct_tables():
    tables = {str(named_fn(n)) for n in CLASS_NAMES_LEQ3}
    assert len(tables) == 34


def test_from_true_points_accepts_strings_and_tuples():
    assert from_true_points(2, ["10"]) == from_true_points(2, [(1, 0)]) == named_fn("nimp")

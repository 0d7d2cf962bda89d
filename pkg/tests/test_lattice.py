"""Lattice sites, site keys, and the 48-element symmetry group."""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sawenum import (
    Point,
    apply_op,
    canonicalize,
    compose,
    decode,
    encode,
    invert,
    octahedral_group,
)

COORD = st.integers(min_value=-6, max_value=6)
POINTS = st.builds(Point, COORD, COORD, COORD)


def brute_force_images(points):
    """Independent oracle: all distinct images of a point set under every
    signed axis permutation, built directly from itertools."""
    images = set()
    for perm in itertools.permutations(range(3)):
        for signs in itertools.product((1, -1), repeat=3):
            img = frozenset(
                Point(signs[0] * p[perm[0]], signs[1] * p[perm[1]], signs[2] * p[perm[2]])
                for p in points
            )
            images.add(img)
    return images


def test_group_has_48_elements_identity_first():
    group = octahedral_group()
    assert len(group) == 48
    assert len(set(group)) == 48
    assert group[0].perm == (0, 1, 2) and group[0].signs == (1, 1, 1)
    p = Point(5, -2, 7)
    assert apply_op(group[0], p) == p


def test_group_closure_and_inverses():
    group = octahedral_group()
    members = set(group)
    for g in group:
        assert compose(g, invert(g)) == group[0]
        for h in group:
            assert compose(g, h) in members


def test_group_associativity_sampled():
    group = octahedral_group()
    sample = group[::7]
    for g in sample:
        for h in sample:
            for k in sample:
                assert compose(compose(g, h), k) == compose(g, compose(h, k))


def test_group_images_match_brute_force():
    # applying all 48 elements to a fully asymmetric point gives 48 points
    p = Point(1, 2, 3)
    images = {apply_op(g, p) for g in octahedral_group()}
    assert len(images) == 48
    assert images == {next(iter(s)) for s in brute_force_images([p])}


def test_apply_examples():
    group = octahedral_group()
    swap_xy = next(g for g in group if g.perm == (1, 0, 2) and g.signs == (1, 1, 1))
    assert apply_op(swap_xy, Point(1, 2, 3)) == Point(2, 1, 3)
    for g in group:
        assert apply_op(g, Point(3, -1, 2)).norm_sq() == 14


@given(POINTS)
@settings(max_examples=60)
def test_norm_preserved_under_all_ops(p):
    for g in octahedral_group():
        assert apply_op(g, p).norm_sq() == p.norm_sq()


def test_encode_decode_bound1_exhaustive():
    keys = set()
    for x in (-1, 0, 1):
        for y in (-1, 0, 1):
            for z in (-1, 0, 1):
                k = encode(Point(x, y, z), 1)
                assert decode(k, 1) == Point(x, y, z)
                keys.add(k)
    assert keys == set(range(27))


@given(POINTS, st.integers(min_value=6, max_value=12))
def test_encode_decode_roundtrip(p, bound):
    assert decode(encode(p, bound), bound) == p


def test_key_order_is_point_lex_order():
    b = 3
    assert encode(Point(0, 0, 0), b) < encode(Point(0, 0, 1), b)
    pts = sorted(
        (Point(x, y, z) for x in range(-b, b + 1) for y in range(-b, b + 1)
         for z in range(-b, b + 1))
    )
    keys = [encode(p, b) for p in pts]
    assert keys == sorted(keys)


def test_encode_errors():
    with pytest.raises(ValueError):
        encode(Point(3, 0, 0), 2)
    with pytest.raises(ValueError):
        decode(27, 1)


def test_canonicalize_singleton_axis_unit():
    canon, op = canonicalize([Point(1, 0, 0)])
    # brute force: 6 distinct images of an axis unit vector
    assert len(brute_force_images([Point(1, 0, 0)])) == 6
    assert canon.orbit_size == 6
    assert [decode(k, 1) for k in canon.sites] == [Point(-1, 0, 0)]
    assert apply_op(op, Point(1, 0, 0)) == Point(-1, 0, 0)


def test_canonicalize_fully_asymmetric_point():
    canon, _ = canonicalize([Point(1, 2, 3)])
    assert len(brute_force_images([Point(1, 2, 3)])) == 48
    assert canon.orbit_size == 48


def test_canonicalize_orbit_invariance():
    pts = [Point(1, 0, 0), Point(1, 1, 0), Point(2, 1, 0)]
    ref, _ = canonicalize(pts, bound=4)
    for g in octahedral_group():
        moved = [apply_op(g, p) for p in pts]
        canon, _ = canonicalize(moved, bound=4)
        assert canon.sites == ref.sites
        assert canon.orbit_size == ref.orbit_size


def test_canonicalize_idempotent():
    pts = [Point(2, -1, 0), Point(1, -1, 0), Point(1, 0, 0)]
    canon, _ = canonicalize(pts, bound=3)
    again, _ = canonicalize([decode(k, 3) for k in canon.sites], bound=3)
    assert again.sites == canon.sites


def test_canonicalize_bound_independent_choice():
    pts = [Point(1, 0, 0), Point(1, 1, 0)]
    c3, op3 = canonicalize(pts, bound=3)
    c5, op5 = canonicalize(pts, bound=5)
    assert op3 == op5
    assert [decode(k, 3) for k in c3.sites] == [decode(k, 5) for k in c5.sites]
    assert c3.orbit_size == c5.orbit_size


@given(st.sets(POINTS, min_size=1, max_size=4))
@settings(max_examples=40, deadline=None)
def test_orbit_size_matches_brute_force(points):
    canon, _ = canonicalize(points)
    assert canon.orbit_size == len(brute_force_images(points))


def test_canonicalize_empty_rejected():
    with pytest.raises(ValueError):
        canonicalize([])


def test_chosen_op_is_first_minimum():
    # the all-plus identity-permutation ops come first in group order, so for
    # a set already in canonical position the chosen op must be the identity
    canon, op = canonicalize([Point(-1, 0, 0)])
    assert op == octahedral_group()[0]
    assert [decode(k, 1) for k in canon.sites] == [Point(-1, 0, 0)]

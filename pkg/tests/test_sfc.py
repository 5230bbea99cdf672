from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from critset.sfc import (
    CurveError,
    DyadicCube,
    DyadicInterval,
    corner_to_index,
    cube_preimage,
    curve_point,
    curve_points,
    dn_check,
    dn_constant,
    index_to_corner,
    interval_to_cube,
    max_level,
)


def test_level_one_order_2d():
    corners = index_to_corner(2, 1, np.arange(4)).tolist()
    assert corners == [[0, 0], [0, 1], [1, 1], [1, 0]]


def test_level_one_order_3d_is_gray_walk():
    corners = index_to_corner(3, 1, np.arange(8))
    steps = np.abs(np.diff(corners, axis=0)).sum(axis=1)
    assert corners[0].tolist() == [0, 0, 0] and np.all(steps == 1)
    assert {tuple(c) for c in corners.tolist()} == set(itertools.product((0, 1), repeat=3))


def test_one_dimension_is_identity():
    assert index_to_corner(1, 5, [0, 7, 31]).ravel().tolist() == [0, 7, 31]
    assert curve_point(1, 0.375, 10)[0] == pytest.approx(0.375)


@pytest.mark.parametrize("n,level", [(2, 1), (2, 3), (2, 4), (3, 1), (3, 2), (4, 2)])
def test_codec_is_bijective(n, level):
    idx = np.arange(1 << (n * level), dtype=np.uint64)
    corners = index_to_corner(n, level, idx)
    assert len({tuple(c) for c in corners.tolist()}) == idx.size
    assert np.array_equal(corner_to_index(n, level, corners), idx)


@pytest.mark.parametrize("n,level", [(2, 4), (3, 3)])
def test_consecutive_cubes_share_a_face(n, level):
    corners = index_to_corner(n, level, np.arange(1 << (n * level)))
    assert np.all(np.abs(np.diff(corners, axis=0)).sum(axis=1) == 1)


@pytest.mark.parametrize("n,level", [(2, 3), (3, 2)])
def test_children_nest_in_parent(n, level):
    # the 2^n children of cube h at the next level are indices h*2^n .. h*2^n + 2^n - 1
    parents = index_to_corner(n, level, np.arange(1 << (n * level)))
    kids = index_to_corner(n, level + 1, np.arange(1 << (n * (level + 1))))
    assert np.array_equal(kids >> 1, np.repeat(parents, 1 << n, axis=0))


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 4), st.data())
def test_interval_cube_round_trip(n, data):
    s = data.draw(st.integers(0, min(max_level(n), 10)))
    index = data.draw(st.integers(0, (1 << (n * s)) - 1))
    alpha = DyadicInterval(n * s, index)
    cube = interval_to_cube(n, alpha)
    assert cube.level == s
    assert cube_preimage(n, cube) == alpha


def test_interval_level_must_divide():
    with pytest.raises(CurveError):
        interval_to_cube(2, DyadicInterval(3, 0))


def test_level_overflow():
    with pytest.raises(CurveError):
        index_to_corner(2, max_level(2) + 1, [0])


def test_cube_contains_cube():
    big = DyadicCube(2, 1, (1, 0))
    assert big.contains_cube(DyadicCube(2, 3, (5, 2)))
    assert not big.contains_cube(DyadicCube(2, 3, (2, 2)))


def test_curve_endpoints_2d():
    assert curve_point(2, 0.0, 8).tolist() == [0.0, 0.0]
    assert curve_point(2, 1.0, 8).tolist() == pytest.approx([1.0, 0.0])


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 3), st.floats(0, 1))
def test_curve_point_lies_in_its_cube(n, t):
    depth = 6
    x = curve_point(n, t, depth)
    h = min(int(t * (1 << (n * depth))), (1 << (n * depth)) - 1)
    lo = index_to_corner(n, depth, [h])[0] * 2.0 ** -depth
    assert np.all(x >= lo - 1e-12) and np.all(x <= lo + 2.0 ** -depth + 1e-12)


def test_curve_is_continuous_at_cube_joins():
    n, depth = 2, 5
    count = 1 << (n * depth)
    t = np.arange(1, count) / count
    left = curve_points(n, t - 1e-13, depth)
    right = curve_points(n, t, depth)
    assert np.max(np.abs(left - right)) < 1e-9


def test_curve_rejects_bad_parameter():
    with pytest.raises(CurveError):
        curve_point(2, 1.5, 4)


@pytest.mark.parametrize("n,expected", [(1, 4.0), (2, 32.0), (3, 64 * 3 ** 1.5)])
def test_dn_constant(n, expected):
    assert dn_constant(n) == pytest.approx(expected)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_dn_check_within_constant(n):
    w = dn_check(n, 20_000, seed=1)
    assert 0 < w.modulus <= dn_constant(n)

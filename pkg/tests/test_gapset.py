from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from critset.gapset import (
    GapSet,
    GapSetError,
    InconclusiveError,
    LevelRule,
    PiecewiseLinear,
    cantor_gapset,
    converges,
    estimate_degree,
    gap_sum,
    holder_quotient,
    image_and_match,
    make_gapset,
)


@st.composite
def gap_sets(draw, max_gaps=12):
    """Random exact gap sets inside [0, 1] with strictly separated gaps."""
    count = draw(st.integers(0, max_gaps))
    cuts = sorted(draw(st.lists(st.floats(0.01, 0.99), min_size=2 * count, max_size=2 * count, unique=True)))
    gaps = [(cuts[2 * i], cuts[2 * i + 1]) for i in range(count)]
    gaps = [g for i, g in enumerate(gaps) if i == 0 or g[0] > gaps[i - 1][1]]
    return make_gapset(0.0, 1.0, gaps)


# ---------------------------------------------------------------- construction


def test_make_gapset_sorts_gaps():
    A = make_gapset(0, 1, [[0.6, 0.7], [0.1, 0.2]])
    assert A.gaps == [(0.1, 0.2), (0.6, 0.7)]


@pytest.mark.parametrize("gaps", [
    [[0.1, 0.3], [0.2, 0.4]],   # overlapping
    [[0.1, 0.3], [0.3, 0.4]],   # abutting
    [[0.0, 0.3]],               # touches the hull
    [[0.3, 0.2]],               # reversed
])
def test_make_gapset_rejects_bad_gaps(gaps):
    with pytest.raises(GapSetError):
        make_gapset(0, 1, gaps)


def test_make_gapset_rejects_tail_beyond_hull():
    with pytest.raises(GapSetError):
        make_gapset(0, 1, [[0.2, 0.8]], tail_bound=0.5)


def test_full_interval_has_full_measure():
    A = make_gapset(0, 2)
    assert A.measure() == 2 and not A.is_measure_zero()


def test_finite_set_is_measure_zero():
    A = make_gapset(0, 1, [[1e-9, 0.5], [0.5 + 1e-9, 1 - 1e-9]])
    assert A.n_gaps == 2
    assert A.measure() == pytest.approx(3e-9, abs=1e-15)


def test_contains_and_components():
    A = make_gapset(0, 1, [[0.2, 0.4]])
    assert A.contains(0.2) and A.contains(0.4) and not A.contains(0.3) and not A.contains(1.5)
    lo, hi = A.components()
    assert lo.tolist() == [0.0, 0.4] and hi.tolist() == [0.2, 1.0]


def test_json_round_trip():
    A = cantor_gapset(1 / 3, 4)
    B = GapSet.from_json(A.to_json())
    assert B.gaps == A.gaps and B.tail_bound == A.tail_bound
    assert B.level_rule == A.level_rule


def test_from_json_malformed():
    with pytest.raises(GapSetError):
        GapSet.from_json({"gaps": []})


# ---------------------------------------------------------------- Cantor sets


@pytest.mark.parametrize("depth", [1, 2, 5, 10])
def test_cantor_gap_count_and_tail(depth):
    A = cantor_gapset(1 / 3, depth)
    assert A.n_gaps == 2 ** depth - 1
    # the omitted gap length is what the remaining 2^depth intervals still hold
    assert A.tail_bound == pytest.approx((2 / 3) ** depth, rel=1e-12)
    assert A.measure() == pytest.approx(0.0, abs=1e-12)


def test_cantor_depth_one_gap():
    assert cantor_gapset(1 / 3, 1).gaps == [pytest.approx((1 / 3, 2 / 3))]


def test_cantor_gaps_sorted():
    A = cantor_gapset(0.5, 8)
    assert np.all(A.gap_lo < A.gap_hi) and np.all(A.gap_hi[:-1] < A.gap_lo[1:])


def test_gap_sum_depth20_t1():
    # sum of all middle-third gap lengths down to level 20 is 1 - (2/3)^20
    ds = gap_sum(cantor_gapset(1 / 3, 20), 1.0)
    assert ds.value == pytest.approx(1 - (2 / 3) ** 20, rel=1e-12)
    assert ds.total_estimate == pytest.approx(1.0, rel=1e-9)


def test_level_rule_geometric_continuation():
    rule = LevelRule((1, 2, 4), (1 / 3, 1 / 9, 1 / 27))
    terms = rule.level_terms(1.0, 6)
    assert terms == pytest.approx([(2 / 3) ** j / 2 for j in range(1, 7)])


@pytest.mark.parametrize("ratio,expected", [(1 / 3, math.log(3) / math.log(2)), (0.5, 2.0), (0.2, math.log(2.5) / math.log(2))])
def test_estimate_degree_cantor(ratio, expected):
    # sum 2^j (alpha keep^j)^{1/t} converges iff t < log(1/keep)/log 2
    assert estimate_degree(cantor_gapset(ratio, 16)) == pytest.approx(expected, abs=0.02)


def test_estimate_degree_finite_is_infinite():
    assert estimate_degree(make_gapset(0, 1, [[0.2, 0.5]])) == math.inf


def test_estimate_degree_without_rule_uses_fit():
    A = cantor_gapset(1 / 3, 14)
    bare = make_gapset(0, 1, A.gaps, tail_bound=A.tail_bound)
    assert estimate_degree(bare) == pytest.approx(math.log(3) / math.log(2), abs=0.05)


def test_estimate_degree_inconclusive_for_few_gaps():
    with pytest.raises(InconclusiveError):
        estimate_degree(make_gapset(0, 1, [[0.2, 0.3], [0.5, 0.6]], tail_bound=0.5))


def test_converges_on_both_sides_of_degree():
    A = cantor_gapset(1 / 3, 16)
    assert converges(A, 1.5) and not converges(A, 1.7)


@settings(max_examples=50, deadline=None)
@given(gap_sets(), st.floats(0.3, 4.0))
def test_gap_sum_matches_brute_force(A, t):
    brute = math.fsum(length ** (1 / t) for length in (b - a for a, b in A.gaps))
    ds = gap_sum(A, t)
    assert ds.value == pytest.approx(brute, rel=1e-12, abs=1e-15)
    assert ds.tail_estimate == 0.0


@settings(max_examples=50, deadline=None)
@given(gap_sets(), st.floats(0.3, 2.0), st.floats(0.01, 2.0))
def test_gap_sum_monotone_in_exponent(A, t, dt):
    # lengths are below 1, so larger exponents give larger terms
    assert gap_sum(A, t + dt).value >= gap_sum(A, t).value - 1e-15


# ---------------------------------------------------------------- image and matching


def test_image_of_identity_is_same_set():
    A = make_gapset(0, 1, [[0.2, 0.3], [0.5, 0.7]])
    B, gamma = image_and_match(PiecewiseLinear([0, 1], [0, 1]), A)
    assert B.gaps == [pytest.approx(g) for g in A.gaps]
    assert gamma == {0: 0, 1: 1}


def test_image_of_constant_collapses():
    A = make_gapset(0, 1, [[0.2, 0.3]])
    B, gamma = image_and_match(PiecewiseLinear([0, 1], [0.5, 0.5]), A)
    assert B.n_gaps == 0 and B.diameter == 0 and gamma == {}


def test_image_outside_domain_raises():
    with pytest.raises(GapSetError):
        image_and_match(PiecewiseLinear([0.5, 1], [0, 1]), make_gapset(0, 1, [[0.6, 0.7]]))


@settings(max_examples=60, deadline=None)
@given(gap_sets(max_gaps=8), st.lists(st.floats(-1, 1), min_size=2, max_size=8))
def test_match_is_injective_and_contained(A, ys):
    xs = np.linspace(0, 1, len(ys))
    f = PiecewiseLinear(xs, ys)
    B, gamma = image_and_match(f, A)
    assert len(set(gamma.values())) == len(gamma) == B.n_gaps
    for bi, ai in gamma.items():
        u, v = B.gaps[bi]
        x, x2 = A.gaps[ai]
        fx, fx2 = float(f(x)), float(f(x2))
        assert min(fx, fx2) <= u + 1e-12 and max(fx, fx2) >= v - 1e-12


def test_holder_quotient_linear():
    pts = [(x, 3 * x) for x in np.linspace(0, 1, 11)]
    w = holder_quotient(pts, 1.0)
    assert w.modulus == pytest.approx(3.0)


def test_holder_quotient_square_root():
    # |sqrt(b) - sqrt(a)|^2 <= |b - a|, with equality at a = 0
    pts = [(x, math.sqrt(x)) for x in np.linspace(0, 1, 101)]
    assert holder_quotient(pts, 2.0).modulus == pytest.approx(1.0)


def test_holder_quotient_rejects_non_function():
    with pytest.raises(ValueError):
        holder_quotient([(0.0, 1.0), (0.0, 2.0)], 1.0)


def test_reflection_swaps_gap_endpoints():
    A = make_gapset(0, 1, [[0.4, 0.6]])
    f = PiecewiseLinear([0, 1], [1, 0])
    B, gamma = image_and_match(f, A)
    assert B.gaps == [pytest.approx((0.4, 0.6))] and gamma == {0: 0}
    assert (float(f(0.4)), float(f(0.6))) == pytest.approx((0.6, 0.4))


def test_holder_quotient_constant_is_zero():
    assert holder_quotient([(x, 2.0) for x in np.linspace(0, 1, 5)], 1.5).modulus == 0


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-1, 1), min_size=2, max_size=6), st.floats(1, 2), st.floats(1, 2))
def test_holder_composition(ys, k, p):
    # g in D^k with K_g and f in D^p with K_f give g o f in D^{kp} with K_g^p K_f
    xs = np.linspace(0, 1, 41)
    f = PiecewiseLinear(np.linspace(0, 1, len(ys)), ys)
    fx = f(xs)
    g = np.sin
    K_f = holder_quotient(list(zip(xs, fx)), p).modulus
    K_g = holder_quotient(list(zip(fx, g(fx))), k).modulus if len(set(fx.tolist())) == fx.size else None
    if K_g is None:
        return
    K_gf = holder_quotient(list(zip(xs, g(fx))), k * p).modulus
    assert K_gf <= K_g ** p * K_f * (1 + 1e-9) + 1e-12


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-1, 1), min_size=4, max_size=30), st.floats(0.5, 3), st.integers(0, 2 ** 16))
def test_holder_subsample_never_exceeds_full(ys, k, seed):
    pts = list(zip(np.linspace(0, 1, len(ys)), ys))
    rng = np.random.default_rng(seed)
    sub = [pts[i] for i in sorted(rng.choice(len(pts), size=max(2, len(pts) // 2), replace=False))]
    assert holder_quotient(sub, k).modulus <= holder_quotient(pts, k).modulus

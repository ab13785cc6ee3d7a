from itertools import combinations
from math import comb

import pytest

from wps_beilinson.beilinson import (
    ResolutionBundle,
    build_B,
    build_koszul,
    build_Mm,
    build_mu,
    build_R,
    closed_form_differential,
    verify_augmentation,
)
from wps_beilinson.complexes import check_d_squared, is_chain_map
from wps_beilinson.errors import RangeError, ShapeError
from wps_beilinson.graded_core import BiEntry, Polynomial, WeightVector

from conftest import ACCEPTANCE_WEIGHTS, SMALL_WEIGHTS, bundle_for


def test_koszul_ranks_are_binomials():
    for weights in [(1, 1), (1, 2, 3), (1, 1, 2, 2, 3)]:
        K = build_koszul(WeightVector(weights))
        N = len(weights)
        assert K.degrees() == range(-N, 1)
        assert [K.rank(-s) for s in range(N + 1)] == [comb(N, s) for s in range(N + 1)]


def test_koszul_signs():
    K = build_koszul(WeightVector((1, 1, 1)))
    col = K.index_of(-2, (0, (0, 1)))
    to_1 = K.index_of(-1, (0, (1,)))
    to_0 = K.index_of(-1, (0, (0,)))
    assert K.d(-2)[(to_1, col)] == Polynomial.variable(3, 0)
    assert K.d(-2)[(to_0, col)] == Polynomial.variable(3, 1, -1)


def test_B_terms():
    w = WeightVector((1, 1, 2))
    B = build_B(w, -2)
    labels = sorted(t.label[1] for ts in B.terms.values() for t in ts)
    # independent enumeration of subsets with weight <= 2
    expected = sorted(I for s in range(4) for I in combinations(range(3), s) if sum(w.weights[i] for i in I) <= 2)
    assert labels == expected == sorted([(), (0,), (1,), (2,), (0, 1)])
    B0 = build_B(w, 0)
    assert [t.twist for t in B0[0]] == [(0,)] and B0.degrees() == range(0, 1)
    for bad in (1, -4):
        with pytest.raises(RangeError):
            build_B(w, bad)


def test_B_d_squared_for_all_l():
    w = WeightVector((1, 1, 2, 2, 3))
    for l in range(1 - w.total, 1):
        assert check_d_squared(build_B(w, l)).passed


def test_mu_for_11():
    w = WeightVector((1, 1))
    R0 = build_R(w, 0)
    mu = build_mu(w, -1, R0)
    assert [t.label for t in mu.source[0]] == [(-1, (0,)), (-1, (1,))]
    assert mu[0] == {(0, 0): BiEntry.x_left(2, 0, -1), (0, 1): BiEntry.x_left(2, 1, -1)}
    with pytest.raises(RangeError):
        build_mu(w, 0, R0)
    with pytest.raises(ShapeError):
        build_mu(w, -1, build_B(w, 0))


@pytest.mark.parametrize("weights", SMALL_WEIGHTS)
def test_mu_is_chain_map_with_sparse_support(weights):
    bundle = bundle_for(weights)
    w = bundle.weights
    for k in range(1 - w.total, 0):
        mu = bundle.mu(k)
        assert is_chain_map(mu).passed
        for j, mat in mu.maps.items():
            for (r, c) in mat:
                l, rest = mu.target[j][r].label
                (_, I) = mu.source[j][c].label
                (i,) = set(I) - set(rest)
                assert l == k + w.weights[i]


def test_R_endpoints_and_ranges():
    w = WeightVector((1, 1, 2))
    R0 = build_R(w, 0)
    assert [t.twist for t in R0[0]] == [(0, 0)] and not R0.diffs
    C0 = closed_form_differential(w, 0)
    assert C0 == R0
    for bad in (1, -4):
        with pytest.raises(RangeError):
            build_R(w, bad)
        with pytest.raises(RangeError):
            closed_form_differential(w, bad)


def count_terms(w, j):
    return sum(
        1
        for l in range(1 - w.total, 1)
        for I in combinations(range(w.nvars), -j)
        if sum(w.weights[i] for i in I) <= -l
    )


def test_term_counts_11223():
    bundle = bundle_for((1, 1, 2, 2, 3))
    R = bundle.resolution
    w = bundle.weights
    counts = tuple(R.rank(j) for j in range(0, -5, -1))
    assert counts == (9, 36, 54, 36, 9)
    assert counts == tuple(count_terms(w, j) for j in range(0, -5, -1))
    assert counts == tuple(sum(w.total - w.weight_of(I) for I in w.subsets(-j)) for j in range(0, -5, -1))


@pytest.mark.parametrize("weights", ACCEPTANCE_WEIGHTS)
def test_recursion_matches_closed_form(weights):
    bundle = bundle_for(weights)
    w = bundle.weights
    for k in range(1 - w.total, 1):
        assert bundle.R(k).same_labeled_data(closed_form_differential(w, k))
    assert bundle.resolution.rank(0) == w.total
    twists = sorted(t.twist for t in bundle.resolution[0])
    assert twists == [(l, -l) for l in range(1 - w.total, 1)]


def test_closed_form_d_squared_on_P4():
    w = WeightVector((1, 1, 1, 1, 1))
    assert check_d_squared(closed_form_differential(w, -4)).passed


@pytest.mark.parametrize("weights", [(1, 1, 1), (1, 1, 2, 2, 3)])
def test_augmentation(weights):
    w = WeightVector(weights)
    report = verify_augmentation(w, bundle_for(weights).resolution)
    assert report.passed
    assert report.details["checked_summands"] == bundle_for(weights).resolution.rank(-1)


def test_augmentation_catches_second_clause_sign():
    w = WeightVector((1, 1, 1))
    C = closed_form_differential(w, 1 - w.total)
    # an x_i (x) 1 entry out of some O(l, -l - w_i) in degree -1
    key = next(k for k, v in sorted(C.d(-1).items()) if any(any(BiEntry.split(m)[0]) for m in v.terms))
    assert not verify_augmentation(w, C.with_entry(-1, *key, C.d(-1)[key] * -1)).passed


def test_bundle_memoizes():
    bundle = ResolutionBundle(WeightVector((1, 1, 2)))
    assert bundle.R(-3) is bundle.resolution
    assert bundle.mu(-2) is bundle.mu(-2)
    assert bundle.augmentation_labels() == [t.label for t in bundle.resolution[0]]


def test_Mm_for_111():
    w = WeightVector((1, 1, 1))
    pair = build_Mm(w, 1)
    B = pair.eps.source
    assert [t.twist for t in B[0]] == [(1,)]
    assert sorted(t.twist for t in B[-1]) == [(0,)] * 3
    assert is_chain_map(pair.eps).passed
    # M^0 = O(m), M^j = pushforward^{j+1}
    assert [t.twist for t in pair.M[0]] == [(1,)]
    for j in range(min(pair.M.terms), 0):
        assert pair.M[j] == pair.pushforward[j + 1]
    assert pair.eps[0] == {(0, 0): Polynomial.one(3)}


@pytest.mark.parametrize("weights", [(1, 1, 1), (1, 1, 2)])
def test_eps_chain_map_all_m(weights):
    w = WeightVector(weights)
    for m in range(1, w.total):
        assert is_chain_map(build_Mm(w, m, bundle_for(weights)).eps).passed


def test_eps_vacuous_clause():
    w = WeightVector((2, 3))
    pair = build_Mm(w, 1)
    assert set(pair.eps.maps) == {0}
    assert is_chain_map(pair.eps).passed


def test_Mm_range():
    with pytest.raises(RangeError):
        build_Mm(WeightVector((1, 1)), 2)

import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wps_beilinson.errors import DegreeError, FieldError
from wps_beilinson.graded_core import (
    BiEntry,
    FieldConfig,
    Polynomial,
    WeightVector,
    coh_P_line_bundle,
    dim_graded_piece,
    hilbert_coefficients,
    koszul_sign,
    monomial_basis,
    mult_matrix,
    n_below,
)

weights_st = st.lists(st.integers(1, 4), min_size=2, max_size=4).map(lambda ws: WeightVector(tuple(ws)))


def brute_monomials(w, a):
    """Every exponent vector with weighted degree a, found by exhaustive search."""
    if a < 0:
        return []
    ranges = [range(a // wi + 1) for wi in w.weights]
    return [e for e in itertools.product(*ranges) if sum(x * y for x, y in zip(e, w.weights)) == a]


def test_weight_vector_basics():
    w = WeightVector.parse("1, 1,2")
    assert w.weights == (1, 1, 2)
    assert (w.n, w.nvars, w.total) == (2, 3, 4)
    assert w.weight_of((0, 2)) == 3
    assert w.subsets(2) == [(0, 1), (0, 2), (1, 2)]
    with pytest.raises(ValueError):
        WeightVector((1,))
    with pytest.raises(ValueError):
        WeightVector((1, 0))


def test_field_config():
    assert FieldConfig.parse("q").is_rational
    assert FieldConfig.parse("fp:101").prime == 101
    with pytest.raises(FieldError):
        FieldConfig.parse("fp:100")
    with pytest.raises(FieldError):
        FieldConfig.parse("reals")
    with pytest.raises(FieldError):
        FieldConfig(5).check_for(WeightVector((1, 1, 2, 2)))
    FieldConfig(7).check_for(WeightVector((1, 1, 2, 2)))


def test_koszul_sign_counts_smaller_indices():
    assert n_below((0, 2, 3), 3) == 2
    assert koszul_sign((0, 1), 1) == -1
    assert koszul_sign((0, 1), 0) == 1


@pytest.mark.parametrize(
    "weights,a,expected",
    [((1, 1, 1, 1, 1), 1, 5), ((1, 1, 2), 2, 4), ((1, 2), 2, 2), ((1, 1, 2), -3, 0), ((3, 5), 0, 1)],
)
def test_dim_graded_piece(weights, a, expected):
    w = WeightVector(weights)
    assert dim_graded_piece(w, a) == expected
    assert len(brute_monomials(w, a)) == expected


def test_monomial_basis_lex():
    assert monomial_basis(WeightVector((1, 1)), 0) == [(0, 0)]
    assert monomial_basis(WeightVector((1, 1)), 2) == [(2, 0), (1, 1), (0, 2)]
    assert monomial_basis(WeightVector((1, 2)), 2) == [(2, 0), (0, 1)]
    assert monomial_basis(WeightVector((1, 2)), -1) == []


@pytest.mark.parametrize("weights", [(1, 1), (1, 1, 2), (1, 2, 3), (2, 3, 5)])
def test_basis_matches_dimension_and_brute_force(weights):
    w = WeightVector(weights)
    for a in range(0, 3 * w.total + 1):
        basis = monomial_basis(w, a)
        assert len(basis) == dim_graded_piece(w, a)
        assert basis == sorted(brute_monomials(w, a), reverse=True)


@settings(max_examples=30, deadline=None)
@given(weights_st)
def test_hilbert_series_identity(w):
    # prod (1 - t^{w_i}) * sum dim S_a t^a == 1 up to degree 4w
    upto = 4 * w.total
    series = hilbert_coefficients(w, upto)
    for wi in w.weights:
        series = [series[a] - (series[a - wi] if a >= wi else 0) for a in range(upto + 1)]
    assert series == [1] + [0] * upto


def test_mult_matrix_examples():
    w11 = WeightVector((1, 1))
    x0 = Polynomial.variable(2, 0)
    assert mult_matrix(w11, x0, 0) == [[1], [0]]
    assert mult_matrix(w11, Polynomial.one(2), 3) == [[int(r == c) for c in range(4)] for r in range(4)]
    # S_1 = <x0>, S_3 = <x0^3, x0 x1>; x1 * x0 = x0 x1
    w12 = WeightVector((1, 2))
    assert mult_matrix(w12, Polynomial.variable(2, 1), 1) == [[0], [1]]


def test_mult_matrix_rejects_inhomogeneous():
    w = WeightVector((1, 2))
    f = Polynomial.variable(2, 0) + Polynomial.variable(2, 1)
    with pytest.raises(DegreeError):
        mult_matrix(w, f, 1)


def _random_poly(draw, w, d):
    basis = monomial_basis(w, d)
    coeffs = draw(st.lists(st.integers(-3, 3), min_size=len(basis), max_size=len(basis)))
    return Polynomial(dict(zip(basis, coeffs)))


@st.composite
def two_forms(draw):
    w = draw(weights_st)
    d1, d2 = draw(st.integers(0, 4)), draw(st.integers(0, 4))
    f, g = _random_poly(draw, w, d1), _random_poly(draw, w, d2)
    a = draw(st.integers(0, 4))
    return w, f, g, a, d1, d2


@settings(max_examples=40, deadline=None)
@given(two_forms())
def test_mult_matrix_composition(data):
    w, f, g, a, d1, d2 = data
    if not f or not g:
        return
    Mg = mult_matrix(w, g, a)
    Mf = mult_matrix(w, f, a + d2)
    Mfg = mult_matrix(w, f * g, a) if f * g else None
    prod = [[sum(Mf[r][k] * Mg[k][c] for k in range(len(Mg))) for c in range(len(Mg[0]) if Mg else 0)]
            for r in range(len(Mf))]
    if Mfg is not None:
        assert Mfg == prod


@pytest.mark.parametrize(
    "weights,m,expected",
    [((1, 1, 1, 1, 1), 0, (1, 0, 0, 0, 0)), ((1, 1, 1, 1, 1), -5, (0, 0, 0, 0, 1))],
)
def test_coh_line_bundle(weights, m, expected):
    assert coh_P_line_bundle(WeightVector(weights), m) == expected


@pytest.mark.parametrize("weights", [(1, 1), (1, 1, 2), (1, 2, 3), (1, 1, 2, 2, 3)])
def test_coh_vanishing_window_and_serre_symmetry(weights):
    w = WeightVector(weights)
    for m in range(1 - w.total, 0):
        assert not any(coh_P_line_bundle(w, m))
    for m in range(-3 * w.total, 3 * w.total + 1):
        h = coh_P_line_bundle(w, m)
        assert h[0] == coh_P_line_bundle(w, -m - w.total)[w.n]
        assert not (h[0] and h[w.n])
        assert all(v == 0 for v in h[1:w.n])


def test_polynomial_arithmetic_and_json():
    x0, x1 = Polynomial.variable(2, 0), Polynomial.variable(2, 1)
    f = x0 * x0 - x1 * Fraction(1, 2)
    assert f - f == Polynomial()
    assert not (f - f)
    assert Polynomial.from_json(f.to_json()) == f
    assert f.to_json()[0]["coefficient"] == "1"
    with pytest.raises(DegreeError):
        f.degree((1, 1))
    assert f.degree((1, 2)) == 2


def test_bientry_collapse_and_json():
    e = BiEntry.x_left(2, 0) - BiEntry.x_right(2, 0)
    assert not e.collapse()
    assert BiEntry.from_json(e.to_json()) == e
    assert BiEntry.x_left(2, 1).swapped() == BiEntry.x_right(2, 1)
    with pytest.raises(DegreeError):
        e.bidegree((1, 1))

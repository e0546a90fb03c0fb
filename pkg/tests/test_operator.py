"""Operator construction: drifts from measures, Gamma, graded matrices."""

import random
from fractions import Fraction

import pytest

from polydiff.boundary import det_divisibility_check
from polydiff.catalog import get_model
from polydiff.operator import (
    CoMetric,
    DiffusionOperator,
    GradedOperatorMatrix,
    InadmissibleMeasureError,
    MeasureSpec,
    drift_from_measure,
    gamma,
    product_operator,
)
from polydiff.poly import MonomialBasis, Polynomial, parse_poly


def test_jacobi_drift_formula():
    model = get_model("jacobi1d", {"a": "3/2", "b": "2"})
    assert model.operator.drift[0] == parse_poly("1/2 - 7/2*x", 1)  # (b-a) - (a+b)x


def test_nodal_inverse_sqrt_det_rejected():
    model = get_model("nodal_cubic")
    quotient = det_divisibility_check(model.cometric, model.boundary).quotient
    measure = MeasureSpec(
        2,
        (
            (model.boundary.factors[0], Fraction(-1, 2)),
            (quotient, Fraction(-1, 2)),
        ),
    )
    with pytest.raises(InadmissibleMeasureError):
        drift_from_measure(model.cometric, measure)


def test_arctan_measure_parts_refused_in_drift():
    model = get_model("disk", {"p": "0"})
    x, y = Polynomial.variable(2, 0), Polynomial.variable(2, 1)
    measure = MeasureSpec(2, (), None, ((y, x, 0.5),))
    with pytest.raises(InadmissibleMeasureError):
        drift_from_measure(model.cometric, measure)


def test_gaussian_plane_drift():
    model = get_model("gaussian_plane", {"A0": "2", "B0": "1/2", "C0": "1"})
    assert model.operator.drift[0] == parse_poly("-3*x - 1/2*y", 2)
    assert model.operator.drift[1] == parse_poly("-2*y - 1/2*x", 2)


def test_apply_kills_constants():
    for name in ("hermite1d", "deltoid", "triangle_cover_3d"):
        op = get_model(name).operator
        assert op.apply(Polynomial.constant(op.dim, 417)).is_zero


def test_ou_drift_is_minus_x():
    op = get_model("hermite1d").operator
    assert op.apply(Polynomial.variable(1, 0)) == parse_poly("-x", 1)


def test_deltoid_drift_at_default():
    op = get_model("deltoid").operator  # p = -1/2: -2(5+6p) = -4
    assert op.apply(Polynomial.variable(2, 0)) == parse_poly("-4*x", 2)


def test_gamma_of_constant_vanishes():
    model = get_model("square")
    f = parse_poly("x^2*y - y", 2)
    assert gamma(model.cometric, f, Polynomial.constant(2, 3)).is_zero


def test_gamma_disk_coordinates():
    model = get_model("disk", {"a": "0", "b": "0", "c": "1", "p": "0"})
    x = Polynomial.variable(2, 0)
    assert gamma(model.cometric, x, x) == parse_poly("1 - x^2", 2)


def test_gamma_matches_defining_identity():
    # Gamma(f, h) = (L(fh) - f L(h) - h L(f)) / 2 exactly
    model = get_model("square")
    op = model.operator
    rng = random.Random(41)
    basis = MonomialBasis(2, 3)
    for _ in range(6):
        f = Polynomial(
            2, {e: Fraction(rng.randint(-4, 4), 2) for e in basis.exponents if rng.random() < 0.5}
        )
        h = Polynomial(
            2, {e: Fraction(rng.randint(-4, 4), 3) for e in basis.exponents if rng.random() < 0.5}
        )
        lhs = gamma(model.cometric, f, h) * 2
        rhs = op.apply(f * h) - f * op.apply(h) - h * op.apply(f)
        assert lhs == rhs


def test_chain_rule_exact():
    model = get_model("disk")
    op = model.operator
    f = parse_poly("x*y - 1/2*x", 2)
    phi2, phi1 = Fraction(3, 2), Fraction(-2)
    phi_of_f = f * f * phi2 + f * phi1
    lhs = op.apply(phi_of_f)
    rhs = gamma(model.cometric, f, f) * (2 * phi2) + op.apply(f) * (f * 2 * phi2 + phi1)
    assert lhs == rhs


def test_graded_matrix_ou():
    op = get_model("hermite1d").operator
    graded = GradedOperatorMatrix(op, 2)
    entries = graded.entries
    # basis {1, x, x^2}: L(x^2) = 2 - 2 x^2
    assert [entries[i, i] for i in range(3)] == [0, -1, -2]
    assert entries[0, 2] == 2
    assert graded.strictly_lower_block_entries() == []


def test_graded_matrix_square_is_tensor_data():
    left = get_model("jacobi1d", {"a": "1", "b": "1"})
    square = get_model("square", {"a": "0", "b": "0", "c": "0", "d": "0"})
    g1 = GradedOperatorMatrix(left.operator, 2)
    g2 = GradedOperatorMatrix(square.operator, 2)
    # degree-2 block of the square contains the 1D eigenvalues as sums
    from polydiff.spectra import graded_eigenvalues

    s1 = graded_eigenvalues(left.operator, 2)
    s2 = graded_eigenvalues(square.operator, 2)
    assert s2.multiset(2) == sorted(
        [s1.multiset(2)[0], s1.multiset(1)[0] * 2, s1.multiset(2)[0]],
        key=float,
    )


def test_graded_matrix_rejects_degree_raising():
    x = Polynomial.variable(1, 0)
    with pytest.raises(ValueError):
        # drift of degree 2 is rejected at construction
        DiffusionOperator(CoMetric([[Polynomial.constant(1, 1)]]), (x * x,))


def test_block_triangular_at_degree_12():
    for name in ("deltoid", "triangle_cover_3d"):
        op = get_model(name).operator
        graded = GradedOperatorMatrix(op, 12)
        assert graded.strictly_lower_block_entries() == []


def test_product_operator_block_structure():
    left = get_model("jacobi1d", {"a": "1", "b": "1"}).operator
    right = get_model("hermite1d").operator
    product = product_operator(left, right)
    assert product.dim == 2
    assert product.cometric[0, 0] == parse_poly("1-x^2", 2)
    assert product.cometric[1, 1] == parse_poly("1", 2)
    assert product.cometric[0, 1].is_zero
    assert product.drift == (parse_poly("-2*x", 2), parse_poly("-y", 2))


def test_product_operator_eigenvalue_sums():
    from polydiff.spectra import graded_eigenvalues

    left = get_model("jacobi1d", {"a": "3/2", "b": "2"}).operator
    right = get_model("jacobi1d", {"a": "1", "b": "1"}).operator
    product = product_operator(left, right)
    s_left = graded_eigenvalues(left, 5)
    s_right = graded_eigenvalues(right, 5)
    s_prod = graded_eigenvalues(product, 5)
    for n in range(6):
        expected = sorted(
            (s_left.multiset(k)[0] + s_right.multiset(n - k)[0] for k in range(n + 1)),
            key=float,
        )
        assert s_prod.multiset(n) == expected


def test_drift_degree_bound_all_catalog_models():
    from polydiff.catalog import model_names
    from polydiff.poly import NEG_INF

    for name in model_names():
        model = get_model(name)
        for b in model.operator.drift:
            assert b.total_degree in (NEG_INF, 0, 1)
        for i in range(model.dim):
            for j in range(model.dim):
                entry = model.cometric[i, j]
                assert entry.total_degree in (NEG_INF,) or entry.total_degree <= 2

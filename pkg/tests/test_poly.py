"""Exact polynomial arithmetic: worked examples first, then random laws."""

import random
from fractions import Fraction

import pytest

from polydiff.poly import (
    MonomialBasis,
    NEG_INF,
    Polynomial,
    PolyParseError,
    exact_divide,
    format_poly,
    parse_poly,
    poly_divmod,
)

X2 = Polynomial.variable(2, 0)
Y2 = Polynomial.variable(2, 1)

DELTOID_PRINTED = parse_poly("(x^2+y^2)^2 + 18*(x^2+y^2) - 8*x^3 + 24*x*y^2 - 27", 2)


def test_mul_difference_of_squares():
    assert (X2 + Y2) * (X2 - Y2) == X2**2 - Y2**2


def test_add_zero_is_identity():
    p = parse_poly("3*x^2*y - 7/2*y + 1", 2)
    assert p + Polynomial.zero(2) == p


def test_square_boundary_product_expansion():
    # direct expansion oracle
    product = parse_poly("(1-x)*(1+x)*(1-y)*(1+y)", 2)
    assert product == parse_poly("1 - x^2 - y^2 + x^2*y^2", 2)


def test_derivative_power_rule():
    assert parse_poly("1-x^2-y^2", 2).derivative(0) == parse_poly("-2*x", 2)
    assert Polynomial.constant(2, 5).derivative(1).is_zero


def test_derivative_deltoid_term_by_term():
    expected = parse_poly("4*x*(x^2+y^2) + 36*x - 24*x^2 + 24*y^2", 2)
    assert DELTOID_PRINTED.derivative(0) == expected


def test_eval_deltoid_vertex_on_curve():
    assert DELTOID_PRINTED((3, 0)) == 0


def test_eval_at_origin_gives_constant_term():
    p = parse_poly("7/3 - x + 5*x*y^2", 2)
    assert p((0, 0)) == Fraction(7, 3)


def test_eval_unit_circle_point():
    assert parse_poly("1-x^2-y^2", 2)((1, 0)) == 0


def test_compose_shift():
    p = X2**2
    shifted = p.compose([X2 + 1, Y2])
    assert shifted == parse_poly("x^2 + 2*x + 1", 2)


def test_compose_identity():
    p = parse_poly("x^2*y - y^3 + 4", 2)
    assert p.compose([X2, Y2]) == p


def test_compose_coaxial_change_of_coordinates():
    # the substitution X -> 2X, Y -> Y + 3X^2 carries the a=0 boundary factors
    # onto the a=3 family factors (rational square-root case)
    lower_a0 = parse_poly("1 + y - x^2", 2)
    upper_a0 = parse_poly("1 - y", 2)
    change = [2 * X2, Y2 + 3 * X2**2]
    assert lower_a0.compose(change) == parse_poly("1 + y - x^2", 2)
    assert upper_a0.compose(change) == parse_poly("1 - 3*x^2 - y", 2)


def _random_poly(rng, dim, degree):
    terms = {}
    basis = MonomialBasis(dim, degree)
    for exponent in basis.exponents:
        if rng.random() < 0.4:
            terms[exponent] = Fraction(rng.randint(-8, 8), rng.randint(1, 5))
    return Polynomial(dim, terms)


def test_ring_axioms_random():
    rng = random.Random(20240817)
    for _ in range(25):
        dim = rng.randint(1, 3)
        p = _random_poly(rng, dim, 4)
        q = _random_poly(rng, dim, 3)
        r = _random_poly(rng, dim, 3)
        assert (p + q) + r == p + (q + r)
        assert p * (q + r) == p * q + p * r
        assert (p * q) * r == p * (q * r)
        assert p * q == q * p


def test_derivative_and_eval_are_linear():
    rng = random.Random(99)
    for _ in range(10):
        p = _random_poly(rng, 2, 5)
        q = _random_poly(rng, 2, 5)
        c = Fraction(rng.randint(-5, 5), rng.randint(1, 4))
        assert (p + q).derivative(0) == p.derivative(0) + q.derivative(0)
        assert (p * c).derivative(1) == p.derivative(1) * c
        point = (Fraction(rng.randint(-3, 3), 2), Fraction(rng.randint(-3, 3), 3))
        assert (p + q)(point) == p(point) + q(point)
        assert (p * c)(point) == p(point) * c


def test_total_degree_multiplicative():
    rng = random.Random(7)
    for _ in range(20):
        p = _random_poly(rng, 2, 4)
        q = _random_poly(rng, 2, 4)
        if p.is_zero or q.is_zero:
            continue
        assert (p * q).total_degree == p.total_degree + q.total_degree
    assert Polynomial.zero(2).total_degree == NEG_INF


def test_monomial_basis_counts():
    from math import comb

    for d in (1, 2, 3):
        for n in range(13):
            assert len(MonomialBasis(d, n)) == comb(n + d, d)


def test_monomial_basis_graded_lex_order():
    basis = MonomialBasis(2, 2)
    assert basis.exponents == [(0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (2, 0)]


def test_exact_division_roundtrip():
    rng = random.Random(3)
    for _ in range(15):
        p = _random_poly(rng, 2, 3)
        q = _random_poly(rng, 2, 2)
        if q.is_zero:
            continue
        quotient = exact_divide(p * q, q)
        assert quotient == p
    quotient, remainder = poly_divmod(parse_poly("x^2+y", 2), parse_poly("x+1", 2))
    assert quotient * parse_poly("x+1", 2) + remainder == parse_poly("x^2+y", 2)
    assert exact_divide(parse_poly("x^2+y", 2), parse_poly("x+1", 2)) is None


def test_parse_format_roundtrip():
    texts = [
        "1 - x^2 - y^2",
        "x^2*y - 7/2*y + 1/3",
        "2x^2y - y",          # '*' optional
        "-x + y^1",           # '^1' optional in output
        " 4*x^2  -27 * x^4 + 16*y ",
    ]
    for text in texts:
        p = parse_poly(text, 2)
        assert parse_poly(format_poly(p), 2) == p


def test_parse_rejects_garbage():
    with pytest.raises(PolyParseError):
        parse_poly("x + $", 2)
    with pytest.raises(PolyParseError):
        parse_poly("z", 2)
    with pytest.raises(PolyParseError):
        parse_poly("x^(2)", 2)


def test_parse_many_variables():
    p = parse_poly("x1*x4 - 2*x2^3", 4)
    assert p.dim == 4
    assert p((1, 1, 1, 1)) == -1

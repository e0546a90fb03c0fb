"""Admissibility system assembly, kernels, ellipticity, divisibility."""

from fractions import Fraction

import pytest

from polydiff.boundary import (
    BoundarySpec,
    build_admissibility_system,
    check_ellipticity,
    det_divisibility_check,
    interior_grid,
    solve_admissibility,
)
from polydiff.catalog import get_model
from polydiff.operator import DegenerateMetricError
from polydiff.poly import Polynomial, parse_poly


def spec2(*factor_texts, witness=("0", "0")):
    return BoundarySpec(
        2,
        tuple(parse_poly(t, 2) for t in factor_texts),
        tuple(Fraction(w) for w in witness),
    )


def test_unknown_count_single_quadratic_factor():
    # three quadratic cometric entries (6 coefficients each) plus two affine
    # multipliers (3 coefficients each)
    matrix, layout = build_admissibility_system(spec2("1-x^2-y^2"))
    assert layout.n_unknowns == 3 * 6 + 2 * 3 == 24
    assert matrix.cols == 24


def test_jacobi_boundary_recovers_interval_metric():
    spec = BoundarySpec(
        1, (parse_poly("1-x", 1), parse_poly("1+x", 1)), (Fraction(0),)
    )
    solution = solve_admissibility(spec)
    assert solution.dimension == 1
    g = solution.g_basis[0][0, 0]
    target = parse_poly("1-x^2", 1)
    # proportional to 1 - x^2
    ratio = g.coefficient((0,)) / target.coefficient((0,))
    assert g == target * ratio


def test_triangle_dimension_three():
    model = get_model("triangle")
    assert solve_admissibility(model.boundary).dimension == 3


def test_deltoid_unique_and_proportional_to_catalog():
    model = get_model("deltoid")
    solution = solve_admissibility(model.boundary)
    assert solution.dimension == 1
    g = solution.g_basis[0]
    catalog = model.cometric
    ratio = None
    for i in range(2):
        for j in range(2):
            if not catalog[i, j].is_zero:
                exponent, coeff = catalog[i, j].leading_term()
                ratio = g[i, j].coefficient(exponent) / coeff
                break
        if ratio is not None:
            break
    assert ratio != 0
    for i in range(2):
        for j in range(2):
            assert g[i, j] == catalog[i, j] * ratio


def test_quartic_boundary_has_no_solution():
    solution = solve_admissibility(spec2("1-x^4-y^4"))
    assert solution.dimension == 0


def test_solution_satisfies_first_order_identity_exactly():
    model = get_model("parabola_two_tangents")
    solution = solve_admissibility(model.boundary)
    for idx, g in enumerate(solution.g_basis):
        for k, factor in enumerate(model.boundary.factors):
            grad = factor.gradient()
            for i in range(2):
                lhs = Polynomial.zero(2)
                for j in range(2):
                    lhs = lhs + g[i, j] * grad[j]
                assert lhs == solution.s_for[idx][k][i] * factor


def test_affine_covariance_of_solution_dimension():
    base = get_model("triangle").boundary
    # rational invertible affine map (x, y) -> (x + 2y + 1/3, -y + 1/2)
    x, y = Polynomial.variable(2, 0), Polynomial.variable(2, 1)
    fwd = [x + 2 * y + Fraction(1, 3), -y + Fraction(1, 2)]
    inv = [x + 2 * y - Fraction(4, 3), -y + Fraction(1, 2)]
    factors = tuple(f.compose(inv) for f in base.factors)
    witness = tuple(p(base.witness) for p in fwd)
    transformed = BoundarySpec(2, factors, witness)
    assert (
        solve_admissibility(transformed).dimension
        == solve_admissibility(base).dimension
    )


def test_summed_identity_matches_product():
    model = get_model("triangle")
    solution = solve_admissibility(model.boundary)
    g = solution.g_basis[0]
    product = model.boundary.product()
    grad = product.gradient()
    total = [Polynomial.zero(2), Polynomial.zero(2)]
    for k in range(len(model.boundary.factors)):
        for i in range(2):
            total[i] = total[i] + solution.s_for[0][k][i]
    for i in range(2):
        lhs = Polynomial.zero(2)
        for j in range(2):
            lhs = lhs + g[i, j] * grad[j]
        assert lhs == total[i] * product


def test_ellipticity_circle_catalog_metric():
    model = get_model("disk", {"a": "0", "b": "0", "c": "1", "p": "0"})
    grid = model.interior_points(per_axis=5)
    assert len(grid) >= 20
    assert check_ellipticity(model.cometric, grid).elliptic


def test_ellipticity_fails_below_range():
    disk = get_model("disk")
    # a = -2 violates the ellipticity range, so bypass the catalog guard and
    # build the cometric directly
    a = Fraction(-2)
    one = Polynomial.constant(2, 1)
    x, y = Polynomial.variable(2, 0), Polynomial.variable(2, 1)
    radial = one - x * x - y * y
    from polydiff.operator import CoMetric

    g = CoMetric(
        [
            [radial * a + (one - x * x), -(x * y)],
            [-(x * y), radial * a + (one - y * y)],
        ]
    )
    report = check_ellipticity(g, disk.interior_points(per_axis=5))
    assert not report.elliptic
    assert report.first_failure is not None


def test_zero_cometric_fails_everywhere():
    from polydiff.operator import CoMetric

    zero = Polynomial.zero(2)
    g = CoMetric([[zero, zero], [zero, zero]])
    report = check_ellipticity(g, [(Fraction(0), Fraction(0))])
    assert not report.elliptic


def test_det_divisibility_square():
    model = get_model("square")
    report = det_divisibility_check(model.cometric, model.boundary)
    assert report.divides and report.quotient_degree == 0


def test_det_divisibility_nodal_quotient_degree_one():
    model = get_model("nodal_cubic")
    report = det_divisibility_check(model.cometric, model.boundary)
    assert report.divides and report.quotient_degree == 1
    # the quotient is the extra determinant factor 4(4 - 3x)
    assert report.quotient == parse_poly("16 - 12*x", 2)


def test_det_divisibility_deltoid_full_degree():
    model = get_model("deltoid")
    report = det_divisibility_check(model.cometric, model.boundary)
    assert report.divides and report.quotient_degree == 0


def test_det_divisibility_degenerate_metric():
    from polydiff.operator import CoMetric

    x = Polynomial.variable(2, 0)
    zero = Polynomial.zero(2)
    g = CoMetric([[x, zero], [zero, zero]])
    with pytest.raises(DegenerateMetricError):
        det_divisibility_check(g, get_model("nodal_cubic").boundary)


def test_boundary_spec_validation():
    with pytest.raises(ValueError):
        spec2("x^2+y^2-1")  # negative at the witness
    with pytest.raises(ValueError):
        spec2("1-x^2", "1-y^2", "1-x-y", witness=("0", "0"))  # degree 5 > 2d
    with pytest.raises(ValueError):
        BoundarySpec(2, (Polynomial.constant(2, 2),), (Fraction(0), Fraction(0)))


def test_interior_grid_clipped():
    spec = spec2("1-x^2-y^2")
    grid = interior_grid(spec, [(-1, 1), (-1, 1)], per_axis=10)
    assert 0 < len(grid) < 100
    for point in grid:
        assert spec.factors[0](point) > 0

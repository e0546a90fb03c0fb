"""Diffusion operators built from a polynomial cometric and a measure.

An operator is L(f) = sum_ij g^ij d2f/dxi dxj + sum_i b^i df/dxi with
quadratic cometric entries and affine drift.  The drift is never free data
here: it is always derived from the measure density via

    b^i = sum_j d_j g^ij + sum_j g^ij d_j log(rho)

which stays polynomial exactly when the measure is admissible for the
cometric.  Everything in this module is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .linalg import RationalMatrix, poly_matrix_det
from .poly import NEG_INF, MonomialBasis, Polynomial, exact_divide

Rational = int | Fraction


class InadmissibleMeasureError(ValueError):
    """The measure does not make the drift affine for this cometric."""


class DegreeViolationError(ValueError):
    """Operator application left the graded filtration (internal inconsistency)."""


class DegenerateMetricError(ValueError):
    """det(g) vanishes identically."""


class CoMetric:
    """Symmetric d x d matrix of polynomials of total degree <= 2."""

    __slots__ = ("dim", "entries")

    def __init__(self, entries: Sequence[Sequence[Polynomial]]):
        dim = len(entries)
        grid = tuple(tuple(row) for row in entries)
        if any(len(row) != dim for row in grid):
            raise ValueError("cometric must be square")
        for i in range(dim):
            for j in range(dim):
                p = grid[i][j]
                if p.dim != dim:
                    raise ValueError("entry dimension mismatch")
                if p.total_degree not in (NEG_INF,) and p.total_degree > 2:
                    raise ValueError(f"cometric entry ({i},{j}) has degree > 2")
                if grid[i][j] != grid[j][i]:
                    raise ValueError("cometric must be exactly symmetric")
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "entries", grid)

    def __setattr__(self, name, value):
        raise AttributeError("CoMetric is immutable")

    def __getitem__(self, key: tuple[int, int]) -> Polynomial:
        return self.entries[key[0]][key[1]]

    def __eq__(self, other) -> bool:
        return isinstance(other, CoMetric) and self.entries == other.entries

    @classmethod
    def from_upper(cls, dim: int, upper: Sequence[Polynomial]) -> CoMetric:
        """Build from the i <= j entries listed row by row."""
        grid = [[None] * dim for _ in range(dim)]
        it = iter(upper)
        for i in range(dim):
            for j in range(i, dim):
                p = next(it)
                grid[i][j] = p
                grid[j][i] = p
        return cls(grid)

    def det(self) -> Polynomial:
        return poly_matrix_det(self.entries)

    def value_at(self, point: Sequence[Rational]) -> list[list[Fraction]]:
        return [[p(point) for p in row] for row in self.entries]

    def scale(self, c: Rational) -> CoMetric:
        return CoMetric([[p * c for p in row] for row in self.entries])

    def add(self, other: CoMetric) -> CoMetric:
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")
        return CoMetric(
            [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.entries, other.entries)]
        )


@dataclass(frozen=True)
class MeasureSpec:
    """Density data: product of factor powers times exp of a polynomial.

    arctan terms (numerator, denominator, coefficient) are evaluation-only;
    they never take part in exact drift construction.
    """

    dim: int
    factor_exponents: tuple[tuple[Polynomial, Fraction], ...] = ()
    exp_poly: Polynomial | None = None
    arctan_terms: tuple[tuple[Polynomial, Polynomial, float], ...] = ()

    def density_float(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        out = np.ones(points.shape[0])
        for factor, exponent in self.factor_exponents:
            if exponent == 0:
                continue
            values = factor.eval_float(points)
            out *= np.power(np.abs(values), float(exponent))
        if self.exp_poly is not None:
            out *= np.exp(self.exp_poly.eval_float(points))
        for numer, denom, coeff in self.arctan_terms:
            out *= np.exp(coeff * np.arctan2(numer.eval_float(points), denom.eval_float(points)))
        return out


@dataclass(frozen=True)
class DiffusionOperator:
    cometric: CoMetric
    drift: tuple[Polynomial, ...]
    measure: MeasureSpec | None = None

    def __post_init__(self):
        d = self.cometric.dim
        if len(self.drift) != d:
            raise ValueError("drift length mismatch")
        for b in self.drift:
            if b.dim != d:
                raise ValueError("drift entry dimension mismatch")
            if b.total_degree not in (NEG_INF,) and b.total_degree > 1:
                raise ValueError("drift entries must have degree <= 1")

    @property
    def dim(self) -> int:
        return self.cometric.dim

    def apply(self, f: Polynomial) -> Polynomial:
        """Exact L(f); preserves total degree."""
        if f.dim != self.dim:
            raise ValueError("dimension mismatch")
        partials = f.gradient()
        result = Polynomial.zero(self.dim)
        for i in range(self.dim):
            row_second = partials[i].gradient()
            for j in range(self.dim):
                result = result + self.cometric[i, j] * row_second[j]
            result = result + self.drift[i] * partials[i]
        return result


def gamma(g: CoMetric, f: Polynomial, h: Polynomial) -> Polynomial:
    """Carre du champ: sum_ij g^ij d_i f d_j h, exact and symmetric in (f, h)."""
    if f.dim != g.dim or h.dim != g.dim:
        raise ValueError("dimension mismatch")
    df = f.gradient()
    dh = h.gradient()
    result = Polynomial.zero(g.dim)
    for i in range(g.dim):
        for j in range(g.dim):
            result = result + g[i, j] * df[i] * dh[j]
    return result


def boundary_first_order(g: CoMetric, factor: Polynomial) -> list[Polynomial] | None:
    """The affine S^i with sum_j g^ij d_j(factor) = S^i * factor, or None.

    Existence of these polynomials for every boundary factor is exactly the
    admissibility condition on the cometric.
    """
    if factor.dim != g.dim:
        raise ValueError("dimension mismatch")
    if factor.is_zero:
        raise ValueError("zero boundary factor")
    grad = factor.gradient()
    out: list[Polynomial] = []
    for i in range(g.dim):
        numerator = Polynomial.zero(g.dim)
        for j in range(g.dim):
            numerator = numerator + g[i, j] * grad[j]
        quotient = exact_divide(numerator, factor)
        if quotient is None:
            return None
        if quotient.total_degree not in (NEG_INF,) and quotient.total_degree > 1:
            return None
        out.append(quotient)
    return out


def drift_from_measure(g: CoMetric, measure: MeasureSpec) -> tuple[Polynomial, ...]:
    """Derive the affine drift from the measure density.

    b^i = sum_j d_j g^ij  +  sum_k a_k S_k^i  +  sum_j g^ij d_j Q
    where a_k are the factor exponents and Q the polynomial exponent part.
    Raises InadmissibleMeasureError when a factor does not satisfy the
    boundary equation for g or when some b^i ends up with degree > 1.
    """
    if measure.dim != g.dim:
        raise ValueError("dimension mismatch")
    if measure.arctan_terms:
        raise InadmissibleMeasureError(
            "arctan measure parts are evaluation-only; their log-gradient is "
            "rational, not polynomial"
        )
    d = g.dim
    drift = [Polynomial.zero(d) for _ in range(d)]
    for i in range(d):
        for j in range(d):
            drift[i] = drift[i] + g[i, j].derivative(j)
    for factor, exponent in measure.factor_exponents:
        if exponent == 0:
            continue
        s = boundary_first_order(g, factor)
        if s is None:
            raise InadmissibleMeasureError(
                f"measure factor {factor} does not satisfy the boundary "
                f"equation for this cometric"
            )
        for i in range(d):
            drift[i] = drift[i] + s[i] * exponent
    if measure.exp_poly is not None:
        grad_q = measure.exp_poly.gradient()
        for i in range(d):
            extra = Polynomial.zero(d)
            for j in range(d):
                extra = extra + g[i, j] * grad_q[j]
            if extra.total_degree not in (NEG_INF,) and extra.total_degree > 1:
                raise InadmissibleMeasureError(
                    f"exponential measure part gives drift of degree "
                    f"{extra.total_degree} on axis {i}"
                )
            drift[i] = drift[i] + extra
    for i, b in enumerate(drift):
        if b.total_degree not in (NEG_INF,) and b.total_degree > 1:
            raise InadmissibleMeasureError(f"drift degree {b.total_degree} > 1 on axis {i}")
    return tuple(drift)


def operator_from_measure(g: CoMetric, measure: MeasureSpec) -> DiffusionOperator:
    return DiffusionOperator(g, drift_from_measure(g, measure), measure)


def _embed(p: Polynomial, total: int, offset: int) -> Polynomial:
    terms = {}
    for exponent, coeff in p.terms.items():
        padded = (0,) * offset + exponent + (0,) * (total - offset - p.dim)
        terms[padded] = coeff
    return Polynomial(total, terms)


def product_operator(op1: DiffusionOperator, op2: DiffusionOperator) -> DiffusionOperator:
    """Independent product: block-diagonal cometric, concatenated drifts."""
    d1, d2 = op1.dim, op2.dim
    total = d1 + d2
    zero = Polynomial.zero(total)
    entries = [[zero] * total for _ in range(total)]
    for i in range(d1):
        for j in range(d1):
            entries[i][j] = _embed(op1.cometric[i, j], total, 0)
    for i in range(d2):
        for j in range(d2):
            entries[d1 + i][d1 + j] = _embed(op2.cometric[i, j], total, d1)
    drift = tuple(_embed(b, total, 0) for b in op1.drift) + tuple(
        _embed(b, total, d1) for b in op2.drift
    )
    measure = None
    if op1.measure is not None and op2.measure is not None:
        factors = tuple(
            (_embed(f, total, 0), a) for f, a in op1.measure.factor_exponents
        ) + tuple((_embed(f, total, d1), a) for f, a in op2.measure.factor_exponents)
        exp_parts = [
            _embed(m.exp_poly, total, off)
            for m, off in ((op1.measure, 0), (op2.measure, d1))
            if m.exp_poly is not None
        ]
        exp_poly = None
        for part in exp_parts:
            exp_poly = part if exp_poly is None else exp_poly + part
        measure = MeasureSpec(total, factors, exp_poly)
    return DiffusionOperator(CoMetric(entries), drift, measure)


class GradedOperatorMatrix:
    """Exact matrix of L on a graded monomial basis.

    Column k holds the coordinates of L(m_k); the matrix is verified
    block-upper-triangular in the degree grading at construction.
    """

    def __init__(self, op: DiffusionOperator, max_degree: int):
        if max_degree < 0:
            raise ValueError("max_degree must be >= 0")
        self.operator = op
        self.basis = MonomialBasis(op.dim, max_degree)
        size = len(self.basis)
        columns: list[list[Fraction]] = []
        for exponent in self.basis.exponents:
            image = op.apply(Polynomial.monomial(op.dim, exponent))
            if image.total_degree not in (NEG_INF,) and image.total_degree > sum(exponent):
                raise DegreeViolationError(
                    f"L raised the degree of monomial {exponent}: operator "
                    f"was built outside the admissible framework"
                )
            columns.append(self.basis.coordinates(image))
        self.entries = RationalMatrix(
            [[columns[k][r] for k in range(size)] for r in range(size)]
        )

    @property
    def max_degree(self) -> int:
        return self.basis.max_degree

    def diagonal_block(self, degree: int) -> list[list[Fraction]]:
        """Action on degree-n monomials modulo lower degree."""
        block = self.basis.degree_slices[degree]
        idx = range(block.start, block.stop)
        return [[self.entries[r, c] for c in idx] for r in idx]

    def strictly_lower_block_entries(self) -> list[tuple[int, int, Fraction]]:
        """Entries below the degree-diagonal blocks; empty iff graded."""
        out = []
        for c, col_exp in enumerate(self.basis.exponents):
            col_degree = sum(col_exp)
            for r, row_exp in enumerate(self.basis.exponents):
                if sum(row_exp) > col_degree and self.entries[r, c]:
                    out.append((r, c, self.entries[r, c]))
        return out

    def to_float(self) -> np.ndarray:
        return self.entries.to_float()

    def apply_coordinates(self, coords: Sequence[Fraction]) -> list[Fraction]:
        return self.entries.matvec(list(coords))

"""Boundary admissibility: the linear system tying a cometric to a factored
boundary.

For each irreducible boundary factor F the condition is

    sum_j g^ij d_j F  =  S^i F          (S^i affine, one per axis)

Unknowns are the coefficients of the d(d+1)/2 quadratic cometric entries plus
the coefficients of every S^i; each residual coefficient contributes one
linear equation.  Everything here is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iter_product
from typing import Sequence

from .linalg import RationalMatrix
from .operator import CoMetric, DegenerateMetricError
from .poly import NEG_INF, MonomialBasis, Polynomial, exact_divide

Rational = int | Fraction


@dataclass(frozen=True)
class BoundarySpec:
    """Factored boundary with an interior witness point.

    Factors must be square-free, pre-factored, and sign-normalized to be
    strictly positive at the witness; the library never factors polynomials.
    """

    dim: int
    factors: tuple[Polynomial, ...]
    witness: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        object.__setattr__(self, "witness", tuple(Fraction(w) for w in self.witness))
        if len(self.witness) != self.dim:
            raise ValueError("witness length must match dimension")
        total = 0
        for f in self.factors:
            if f.dim != self.dim:
                raise ValueError("factor dimension mismatch")
            degree = f.total_degree
            if degree in (NEG_INF, 0):
                raise ValueError("boundary factors must have degree >= 1")
            total += degree
            if f(self.witness) <= 0:
                raise ValueError(
                    f"factor {f} is not positive at the interior witness {self.witness}"
                )
        if total > 2 * self.dim:
            raise ValueError(
                f"boundary degree {total} exceeds 2*d = {2 * self.dim}; no solution can exist"
            )

    def product(self) -> Polynomial:
        result = Polynomial.constant(self.dim, 1)
        for f in self.factors:
            result = result * f
        return result


@dataclass
class SystemLayout:
    """Unknown ordering of the admissibility system.

    Cometric coefficients come first: entries (i, j) with i <= j in row-major
    order, each expanded over the quadratic monomial basis in graded-lex
    order.  Then, for each factor and axis, the affine S coefficients.
    """

    dim: int
    g_basis: MonomialBasis
    s_basis: MonomialBasis
    entry_index: list[tuple[int, int]]
    n_g: int
    n_factors: int

    def g_slot(self, entry: int, monomial: int) -> int:
        return entry * len(self.g_basis) + monomial

    def s_slot(self, factor: int, axis: int, monomial: int) -> int:
        return self.n_g + (factor * self.dim + axis) * len(self.s_basis) + monomial

    @property
    def n_unknowns(self) -> int:
        return self.n_g + self.n_factors * self.dim * len(self.s_basis)


def _make_layout(spec: BoundarySpec) -> SystemLayout:
    d = spec.dim
    entry_index = [(i, j) for i in range(d) for j in range(i, d)]
    g_basis = MonomialBasis(d, 2)
    s_basis = MonomialBasis(d, 1)
    return SystemLayout(
        dim=d,
        g_basis=g_basis,
        s_basis=s_basis,
        entry_index=entry_index,
        n_g=len(entry_index) * len(g_basis),
        n_factors=len(spec.factors),
    )


def build_admissibility_system(spec: BoundarySpec) -> tuple[RationalMatrix, SystemLayout]:
    """Assemble the exact linear system whose kernel is the admissible set.

    One row per monomial coefficient of each residual polynomial
    sum_j g^ij d_j F_k - S_k^i F_k, for every factor k and axis i.
    """
    layout = _make_layout(spec)
    d = spec.dim
    rows: list[list[Fraction]] = []
    for k, factor in enumerate(spec.factors):
        grad = factor.gradient()
        residual_basis = MonomialBasis(d, int(factor.total_degree) + 1)
        for i in range(d):
            # coefficient of each residual monomial as a linear form in unknowns
            row_of: dict[tuple[int, ...], list[Fraction]] = {
                e: [Fraction(0)] * layout.n_unknowns for e in residual_basis.exponents
            }
            for entry, (a, b) in enumerate(layout.entry_index):
                # g^{ab} contributes to axis i via d_j F with j = the other index
                for m_idx, m_exp in enumerate(layout.g_basis.exponents):
                    slot = layout.g_slot(entry, m_idx)
                    contributions: list[Polynomial] = []
                    if a == i:
                        contributions.append(Polynomial.monomial(d, m_exp) * grad[b])
                    if b == i and b != a:
                        contributions.append(Polynomial.monomial(d, m_exp) * grad[a])
                    for contrib in contributions:
                        for e, c in contrib.terms.items():
                            row_of[e][slot] += c
            for m_idx, m_exp in enumerate(layout.s_basis.exponents):
                slot = layout.s_slot(k, i, m_idx)
                contrib = Polynomial.monomial(d, m_exp) * factor
                for e, c in contrib.terms.items():
                    row_of[e][slot] -= c
            for e in residual_basis.exponents:
                rows.append(row_of[e])
    return RationalMatrix(rows), layout


@dataclass
class AdmissibilitySolution:
    """Kernel of the admissibility system, projected onto the cometric part.

    g_basis[b] carries its exact boundary first-order data in s_for[b][k][i];
    the pair satisfies sum_j g^ij d_j F_k - S_k^i F_k = 0 identically.
    """

    spec: BoundarySpec
    g_basis: list[CoMetric]
    s_for: list[list[list[Polynomial]]]

    @property
    def dimension(self) -> int:
        return len(self.g_basis)

    def combination(self, weights: Sequence[Rational]) -> CoMetric:
        if len(weights) != len(self.g_basis):
            raise ValueError("weight length mismatch")
        d = self.spec.dim
        zero = Polynomial.zero(d)
        entries = [[zero] * d for _ in range(d)]
        for w, g in zip(weights, self.g_basis):
            if w == 0:
                continue
            for i in range(d):
                for j in range(d):
                    entries[i][j] = entries[i][j] + g[i, j] * w
        return CoMetric(entries)


def solve_admissibility(spec: BoundarySpec) -> AdmissibilitySolution:
    """Exact kernel basis; deterministic via the RREF pivot convention."""
    matrix, layout = build_admissibility_system(spec)
    kernel = matrix.nullspace()
    d = spec.dim
    g_basis: list[CoMetric] = []
    s_for: list[list[list[Polynomial]]] = []
    for vector in kernel:
        grid = [[None] * d for _ in range(d)]
        for entry, (a, b) in enumerate(layout.entry_index):
            terms = {}
            for m_idx, m_exp in enumerate(layout.g_basis.exponents):
                coeff = vector[layout.g_slot(entry, m_idx)]
                if coeff:
                    terms[m_exp] = coeff
            p = Polynomial(d, terms)
            grid[a][b] = p
            grid[b][a] = p
        g_basis.append(CoMetric(grid))
        per_factor: list[list[Polynomial]] = []
        for k in range(len(spec.factors)):
            per_axis = []
            for i in range(d):
                terms = {}
                for m_idx, m_exp in enumerate(layout.s_basis.exponents):
                    coeff = vector[layout.s_slot(k, i, m_idx)]
                    if coeff:
                        terms[m_exp] = coeff
                per_axis.append(Polynomial(d, terms))
            per_factor.append(per_axis)
        s_for.append(per_factor)
    return AdmissibilitySolution(spec, g_basis, s_for)


@dataclass
class EllipticityReport:
    elliptic: bool
    first_failure: tuple[Fraction, ...] | None
    checked: int


def check_ellipticity(g: CoMetric, samples: Sequence[Sequence[Rational]]) -> EllipticityReport:
    """Exact leading-principal-minor test at every sample point."""
    samples = list(samples)
    if not samples:
        raise ValueError("need at least one sample point")
    for point in samples:
        values = g.value_at(point)
        for k in range(1, g.dim + 1):
            minor = _det_fraction([row[:k] for row in values[:k]])
            if minor <= 0:
                return EllipticityReport(False, tuple(Fraction(v) for v in point), len(samples))
    return EllipticityReport(True, None, len(samples))


def _det_fraction(mat: list[list[Fraction]]) -> Fraction:
    n = len(mat)
    if n == 1:
        return mat[0][0]
    if n == 2:
        return mat[0][0] * mat[1][1] - mat[0][1] * mat[1][0]
    total = Fraction(0)
    for j in range(n):
        minor = [[row[k] for k in range(n) if k != j] for row in mat[1:]]
        term = mat[0][j] * _det_fraction(minor)
        total += -term if j % 2 else term
    return total


@dataclass
class DivisibilityReport:
    divides: bool
    quotient_degree: int | None
    quotient: Polynomial | None


def det_divisibility_check(g: CoMetric, spec: BoundarySpec) -> DivisibilityReport:
    """Does the boundary product divide det(g)?  Exact division."""
    determinant = g.det()
    if determinant.is_zero:
        raise DegenerateMetricError("det(g) is identically zero")
    remainder = determinant
    for factor in spec.factors:
        quotient = exact_divide(remainder, factor)
        if quotient is None:
            return DivisibilityReport(False, None, None)
        remainder = quotient
    return DivisibilityReport(True, int(remainder.total_degree), remainder)


def interior_grid(
    spec: BoundarySpec,
    box: Sequence[tuple[Rational, Rational]],
    per_axis: int = 10,
) -> list[tuple[Fraction, ...]]:
    """Rational grid over the box, clipped to {all factors > 0}.

    Grid nodes sit strictly inside the box at fractions (2k+1)/(2n) of each
    side, so boundary-of-box artifacts never enter.
    """
    if len(box) != spec.dim:
        raise ValueError("box must give one interval per axis")
    axes = []
    for lo, hi in box:
        lo, hi = Fraction(lo), Fraction(hi)
        width = hi - lo
        axes.append([lo + width * Fraction(2 * k + 1, 2 * per_axis) for k in range(per_axis)])
    points = []
    for combo in iter_product(*axes):
        if all(f(combo) > 0 for f in spec.factors):
            points.append(tuple(combo))
    return points

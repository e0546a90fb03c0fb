"""Exact rational dense linear algebra and floating symmetric eigensolvers.

The ratio of work here is deliberate: nullspaces/ranks/solves that feed the
boundary admissibility system are exact (fraction-free Bareiss elimination on
integers, then reduced row echelon form), while spectral work on Gram and
energy-form matrices is floating point via LAPACK.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg

Rational = int | Fraction


class GramMatrixError(ValueError):
    """B is not positive definite: ill-formed Gram matrix (quadrature too
    coarse or measure not integrable)."""


class RationalMatrix:
    """Dense matrix of Fractions, row-major."""

    def __init__(self, rows: Iterable[Iterable[Rational]]):
        data = [[Fraction(v) for v in row] for row in rows]
        if not data:
            raise ValueError("matrix needs at least one row")
        width = len(data[0])
        if any(len(row) != width for row in data):
            raise ValueError("ragged rows")
        self.data = data
        self.rows = len(data)
        self.cols = width

    @classmethod
    def zeros(cls, rows: int, cols: int) -> RationalMatrix:
        return cls([[Fraction(0)] * cols for _ in range(rows)])

    @classmethod
    def identity(cls, n: int) -> RationalMatrix:
        return cls([[Fraction(int(i == j)) for j in range(n)] for i in range(n)])

    def __getitem__(self, key: tuple[int, int]) -> Fraction:
        return self.data[key[0]][key[1]]

    def __eq__(self, other) -> bool:
        return isinstance(other, RationalMatrix) and self.data == other.data

    def row(self, i: int) -> list[Fraction]:
        return list(self.data[i])

    def column(self, j: int) -> list[Fraction]:
        return [row[j] for row in self.data]

    def matvec(self, vector: Sequence[Rational]) -> list[Fraction]:
        if len(vector) != self.cols:
            raise ValueError("vector length mismatch")
        vec = [Fraction(v) for v in vector]
        return [sum((a * b for a, b in zip(row, vec)), Fraction(0)) for row in self.data]

    def to_float(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.data])

    def _integer_rows(self) -> list[list[int]]:
        out = []
        for row in self.data:
            scale = lcm(*(v.denominator for v in row)) if row else 1
            out.append([int(v * scale) for v in row])
        return out

    def rref(self) -> tuple[list[list[Fraction]], list[int]]:
        """Reduced row echelon form and pivot columns, deterministic.

        Pivot columns are chosen left to right; within a column the first
        not-yet-used row with a nonzero entry wins.  Forward elimination is
        fraction-free (Bareiss) on an integer-scaled copy to bound swell.
        """
        m = self._integer_rows()
        rows, cols = self.rows, self.cols
        pivots: list[int] = []
        prev = 1
        r = 0
        for c in range(cols):
            pivot_row = None
            for i in range(r, rows):
                if m[i][c] != 0:
                    pivot_row = i
                    break
            if pivot_row is None:
                continue
            if pivot_row != r:
                m[r], m[pivot_row] = m[pivot_row], m[r]
            for i in range(r + 1, rows):
                if all(v == 0 for v in m[i]):
                    continue
                head = m[i][c]
                lead = m[r][c]
                for j in range(cols):
                    q, rem = divmod(m[i][j] * lead - head * m[r][j], prev)
                    assert rem == 0, "fraction-free step left a remainder"
                    m[i][j] = q
            prev = m[r][c]
            pivots.append(c)
            r += 1
            if r == rows:
                break
        # back-substitution with exact rationals to reach RREF
        reduced = [[Fraction(v) for v in row] for row in m]
        for k in range(len(pivots) - 1, -1, -1):
            c = pivots[k]
            lead = reduced[k][c]
            reduced[k] = [v / lead for v in reduced[k]]
            for i in range(k):
                factor = reduced[i][c]
                if factor:
                    reduced[i] = [a - factor * b for a, b in zip(reduced[i], reduced[k])]
        return reduced, pivots

    def rank(self) -> int:
        return len(self.rref()[1])

    def nullspace(self) -> list[list[Fraction]]:
        """Exact kernel basis; count = cols - rank.

        Basis vectors follow the free-column convention: each has 1 at one
        free column and the solved pivot values elsewhere, emitted in order
        of increasing free column index.
        """
        reduced, pivots = self.rref()
        pivot_set = set(pivots)
        free = [c for c in range(self.cols) if c not in pivot_set]
        basis = []
        for f in free:
            vector = [Fraction(0)] * self.cols
            vector[f] = Fraction(1)
            for k, c in enumerate(pivots):
                vector[c] = -reduced[k][f]
            basis.append(vector)
        return basis

    def solve(self, rhs: Sequence[Rational]) -> list[Fraction] | None:
        """One exact solution of A x = rhs, or None if inconsistent."""
        if len(rhs) != self.rows:
            raise ValueError("rhs length mismatch")
        augmented = RationalMatrix(
            [row + [Fraction(v)] for row, v in zip(self.data, rhs)]
        )
        reduced, pivots = augmented.rref()
        if self.cols in pivots:
            return None
        solution = [Fraction(0)] * self.cols
        for k, c in enumerate(pivots):
            solution[c] = reduced[k][self.cols]
        return solution


def poly_matrix_det(entries: Sequence[Sequence]):
    """Determinant by cofactor expansion; entries support + and * (used for
    Polynomial matrices of size <= 4)."""
    n = len(entries)
    if any(len(row) != n for row in entries):
        raise ValueError("square matrix required")
    if n == 1:
        return entries[0][0]
    if n == 2:
        return entries[0][0] * entries[1][1] - entries[0][1] * entries[1][0]
    total = None
    for j in range(n):
        minor = [[row[k] for k in range(n) if k != j] for row in entries[1:]]
        term = entries[0][j] * poly_matrix_det(minor)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    return total


# ----------------------------------------------------------------------
# floating-point symmetric eigenproblems


@dataclass
class SymmetricEigenResult:
    eigenvalues: np.ndarray          # ascending
    eigenvectors: np.ndarray         # columns, B-orthonormal
    residual_norm: float             # max_i ||A v_i - lambda_i B v_i|| / ||A||


def _check_symmetric(mat: np.ndarray, name: str, tol: float = 1e-12) -> None:
    scale = max(np.abs(mat).max(), 1.0)
    if np.abs(mat - mat.T).max() > tol * scale:
        raise ValueError(f"{name} is not symmetric within {tol} relative")


def generalized_sym_eig(a: np.ndarray, b: np.ndarray) -> SymmetricEigenResult:
    """Solve A v = lambda B v for symmetric A and SPD B.

    Eigenvalues come back ascending with B-orthonormal eigenvector columns.
    A non-positive-definite B raises GramMatrixError.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    _check_symmetric(a, "A")
    _check_symmetric(b, "B")
    try:
        np.linalg.cholesky(b)
    except np.linalg.LinAlgError as exc:
        raise GramMatrixError(
            "Gram matrix is not positive definite; quadrature too coarse "
            "or measure not integrable"
        ) from exc
    values, vectors = scipy.linalg.eigh(a, b)
    scale = max(np.abs(a).max(), 1.0)
    residual = 0.0
    for i in range(len(values)):
        r = a @ vectors[:, i] - values[i] * (b @ vectors[:, i])
        residual = max(residual, float(np.linalg.norm(r)) / scale)
    return SymmetricEigenResult(values, vectors, residual)


def sym_eig(a: np.ndarray) -> SymmetricEigenResult:
    a = np.asarray(a, dtype=float)
    _check_symmetric(a, "A")
    values, vectors = scipy.linalg.eigh(a)
    scale = max(np.abs(a).max(), 1.0)
    residual = 0.0
    for i in range(len(values)):
        r = a @ vectors[:, i] - values[i] * vectors[:, i]
        residual = max(residual, float(np.linalg.norm(r)) / scale)
    return SymmetricEigenResult(values, vectors, residual)


def cluster_eigenvalues(values: Sequence[float], tau: float = 1e-7) -> list[list[int]]:
    """Group indices of ascending eigenvalues into multiplicity clusters.

    Two neighbours belong together when their gap is below tau*(1+|value|);
    this is the declared multiplicity-detection rule used across the package.
    """
    clusters: list[list[int]] = []
    for i, v in enumerate(values):
        if clusters and abs(v - values[clusters[-1][-1]]) <= tau * (1.0 + abs(v)):
            clusters[-1].append(i)
        else:
            clusters.append([i])
    return clusters

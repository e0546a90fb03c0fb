"""Quadrature against model measures.

Mapped Gauss rules cover the square (tensor Gauss-Jacobi, also used for 1D
intervals), the disk (angular equispaced x radial Gauss-Jacobi in r^2) and
the triangle (Duffy map with both classical weights absorbed), so polynomial
integrands of bounded degree are exact to roundoff.  Everything else uses
seeded Monte Carlo rejection in a bounding box; candidate j draws its
coordinates from fixed counter positions, so the accepted set depends only on
(seed, sample_count, boundary).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy.special import roots_jacobi

from .poly import MonomialBasis, Polynomial
from .rng import DEFAULT_SEED, uniform_block

MC_CHUNK = 1 << 16

GAUSS_KINDS = ("tensor-gauss-square", "polar-gauss-disk", "duffy-gauss-triangle")


class SamplerConfigError(ValueError):
    pass


@dataclass(frozen=True)
class DomainSampler:
    """Descriptor for one integration rule.

    node_count is per axis for the Gauss kinds; sample_count is the number of
    Monte Carlo proposals (accepted points are the subset inside the domain).
    """

    kind: str
    node_count: int = 32
    sample_count: int = 100_000
    seed: int = DEFAULT_SEED

    def with_seed(self, seed: int) -> DomainSampler:
        return replace(self, seed=seed)


@dataclass
class WeightedPoints:
    """Sample points with weights; density_applied says whether the measure
    density is already absorbed into the weights (Gauss kinds) or must be
    multiplied in at integration time (Monte Carlo)."""

    points: np.ndarray
    weights: np.ndarray
    density_applied: bool
    proposals: int | None = None

    @property
    def accepted(self) -> int:
        return self.points.shape[0]


@dataclass
class IntegralEstimate:
    value: float
    error_estimate: float


def _jacobi_rule_01(n: int, alpha: float, beta: float) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights for int_0^1 f(u) (1-u)^alpha u^beta du."""
    nodes, weights = roots_jacobi(n, alpha, beta)
    u = (nodes + 1.0) / 2.0
    w = weights * 0.5 ** (alpha + beta + 1.0)
    return u, w


def _match_factor(factor: Polynomial, target: Polynomial) -> bool:
    return factor == target


def _axis_exponents_square(model, axis: int) -> tuple[float, float]:
    """Exponents on (1 - x_axis) and (1 + x_axis) in the model measure."""
    d = model.dim
    one = Polynomial.constant(d, 1)
    var = Polynomial.variable(d, axis)
    alpha = beta = Fraction(0)
    for factor, exponent in model.measure.factor_exponents:
        if _match_factor(factor, one - var):
            alpha = exponent
        elif _match_factor(factor, one + var):
            beta = exponent
    return float(alpha), float(beta)


def _square_rule(model, n: int) -> WeightedPoints:
    d = model.dim
    axes = []
    for axis in range(d):
        alpha, beta = _axis_exponents_square(model, axis)
        nodes, weights = roots_jacobi(n, alpha, beta)
        axes.append((nodes, weights))
    if d == 1:
        pts = axes[0][0].reshape(-1, 1)
        w = axes[0][1]
    else:
        grids = np.meshgrid(*[a[0] for a in axes], indexing="ij")
        pts = np.column_stack([g.ravel() for g in grids])
        wgrids = np.meshgrid(*[a[1] for a in axes], indexing="ij")
        w = np.ones(pts.shape[0])
        for g in wgrids:
            w = w * g.ravel()
    return WeightedPoints(pts, w, density_applied=True)


def _disk_rule(model, n: int) -> WeightedPoints:
    d = model.dim
    if d != 2:
        raise SamplerConfigError("polar rule needs a 2D model")
    one = Polynomial.constant(2, 1)
    rsq = Polynomial.variable(2, 0) ** 2 + Polynomial.variable(2, 1) ** 2
    p = Fraction(0)
    for factor, exponent in model.measure.factor_exponents:
        if _match_factor(factor, one - rsq):
            p = exponent
        elif exponent != 0:
            raise SamplerConfigError("disk rule only absorbs the radial factor")
    n_theta = 4 * n + 4
    u, wu = _jacobi_rule_01(n, float(p), 0.0)
    theta = 2.0 * np.pi * np.arange(n_theta) / n_theta
    r = np.sqrt(u)
    pts = np.empty((n * n_theta, 2))
    w = np.empty(n * n_theta)
    k = 0
    for j in range(n):
        pts[k : k + n_theta, 0] = r[j] * np.cos(theta)
        pts[k : k + n_theta, 1] = r[j] * np.sin(theta)
        # dx dy = (1/2) du dtheta after u = r^2
        w[k : k + n_theta] = 0.5 * wu[j] * (2.0 * np.pi / n_theta)
        k += n_theta
    return WeightedPoints(pts, w, density_applied=True)


def _triangle_rule(model, n: int) -> WeightedPoints:
    d = model.dim
    if d != 2:
        raise SamplerConfigError("Duffy rule needs a 2D model")
    x, y = Polynomial.variable(2, 0), Polynomial.variable(2, 1)
    one = Polynomial.constant(2, 1)
    p = q = r = Fraction(0)
    for factor, exponent in model.measure.factor_exponents:
        if _match_factor(factor, x):
            p = exponent
        elif _match_factor(factor, y):
            q = exponent
        elif _match_factor(factor, one - x - y):
            r = exponent
        elif exponent != 0:
            raise SamplerConfigError("triangle rule only absorbs the simplex factors")
    # X = u, Y = v(1-u):  X^p Y^q (1-X-Y)^r dXdY
    #   = u^p (1-u)^(q+r+1) du * v^q (1-v)^r dv
    u, wu = _jacobi_rule_01(n, float(q + r + 1), float(p))
    v, wv = _jacobi_rule_01(n, float(r), float(q))
    uu, vv = np.meshgrid(u, v, indexing="ij")
    ww = np.outer(wu, wv)
    pts = np.column_stack([uu.ravel(), (vv * (1.0 - uu)).ravel()])
    return WeightedPoints(pts, ww.ravel(), density_applied=True)


def _box_floats(box: Sequence[tuple[Fraction, Fraction]]) -> tuple[np.ndarray, np.ndarray]:
    lo = np.array([float(b[0]) for b in box])
    hi = np.array([float(b[1]) for b in box])
    return lo, hi


def check_box_encloses(model, box: Sequence[tuple[Fraction, Fraction]], per_face: int = 257) -> None:
    """Reject a bounding box whose faces meet the domain interior.

    Each face is sampled on a deterministic grid; a face point where every
    boundary factor exceeds a small positive tolerance means the domain
    leaks outside the box.
    """
    d = model.dim
    lo, hi = _box_floats(box)
    factors = [f for f in model.boundary.factors]
    if not factors:
        raise SamplerConfigError("Monte Carlo rejection needs boundary factors")
    tol = 1e-9
    lines = [np.linspace(lo[i], hi[i], per_face) for i in range(d)]
    for axis in range(d):
        for side_value in (lo[axis], hi[axis]):
            others = [lines[i] for i in range(d) if i != axis]
            if others:
                grids = np.meshgrid(*others, indexing="ij")
                face = np.empty((grids[0].size, d))
                k = 0
                for i in range(d):
                    if i == axis:
                        face[:, i] = side_value
                    else:
                        face[:, i] = grids[k].ravel()
                        k += 1
            else:
                face = np.array([[side_value]])
            inside = np.ones(face.shape[0], dtype=bool)
            for f in factors:
                inside &= f.eval_float(face) > tol
            if inside.any():
                raise SamplerConfigError(
                    f"bounding box face x{axis + 1}={side_value} meets the domain interior"
                )


def _mc_rejection(model, sampler: DomainSampler) -> WeightedPoints:
    box = model.box
    check_box_encloses(model, box)
    d = model.dim
    lo, hi = _box_floats(box)
    span = hi - lo
    volume = float(np.prod(span))
    factors = list(model.boundary.factors)
    accepted = []
    n = sampler.sample_count
    for start in range(0, n, MC_CHUNK):
        count = min(MC_CHUNK, n - start)
        u = uniform_block(sampler.seed, d * start, d * count).reshape(count, d)
        pts = lo + span * u
        mask = np.ones(count, dtype=bool)
        for f in factors:
            mask &= f.eval_float(pts) > 0.0
        if mask.any():
            accepted.append(pts[mask])
    points = np.vstack(accepted) if accepted else np.empty((0, d))
    weights = np.full(points.shape[0], volume / n)
    return WeightedPoints(points, weights, density_applied=False, proposals=n)


# ----------------------------------------------------------------------
# covering-space Monte Carlo
#
# At the Laplace-type default parameters, each exotic bounded model is the
# image of a sphere or flat-plane Laplace operator through explicit
# functions, and the model measure is exactly the pushforward of the uniform
# measure on the cover.  Sampling the cover and mapping down therefore draws
# from the singular measure itself with bounded integrands, which is what
# makes 1/sqrt(N) error budgets attainable; plain uniform rejection has
# infinite variance against the boundary-singular densities.
#
# Cover weights target the probability-normalized measure (each point has
# weight 1/N), unlike the Gauss/rejection kinds which integrate the
# unnormalized density.


@dataclass(frozen=True)
class CoverSampler:
    model: str
    required_params: tuple[tuple[str, str], ...]
    generate: Callable[[int, int], np.ndarray]  # (seed, count) -> (count, 2)


def _sphere_map_cover(name, params, ambient_dim, fx, fy):
    from .rng import sphere_points

    def generate(seed: int, count: int) -> np.ndarray:
        pts = sphere_points(seed, count, ambient_dim)
        return np.column_stack([fx(pts), fy(pts)])

    return CoverSampler(name, params, generate)


def _build_covers() -> dict[str, CoverSampler]:
    covers = [
        _sphere_map_cover(
            "coaxial_parabolas",
            (("a", "1"), ("p", "0"), ("q", "0")),
            3,
            lambda x: x[:, 2],
            lambda x: 2.0 * x[:, 0] * x[:, 1],
        ),
        _sphere_map_cover(
            "parabola_tangent_secant",
            (("p", "-1/2"), ("q", "-1/2"), ("r", "-1/2")),
            3,
            lambda x: x[:, 0] ** 2 + x[:, 1] ** 2,
            lambda x: 4.0 * x[:, 0] ** 2 * x[:, 1] ** 2,
        ),
        _sphere_map_cover(
            "nodal_cubic",
            (("p", "-1/2"),),
            4,
            lambda x: x[:, 0] ** 2 + x[:, 1] ** 2,
            lambda x: (x[:, 0] ** 2 - x[:, 1] ** 2) * x[:, 2]
            + 2.0 * x[:, 0] * x[:, 1] * x[:, 3],
        ),
        _sphere_map_cover(
            "cuspidal_cubic_secant",
            (("p1", "-1/2"), ("p2", "-1/2")),
            3,
            lambda x: x[:, 0] ** 2 + x[:, 1] ** 2,
            lambda x: x[:, 0] ** 3 - 3.0 * x[:, 0] * x[:, 1] ** 2,
        ),
        _sphere_map_cover(
            "cuspidal_cubic_tangent",
            (("p", "-1/2"), ("q", "-1/2")),
            3,
            lambda x: 1.5 * (x**4).sum(axis=1) - 0.5,
            lambda x: 0.5
            * (3.0 * x[:, 0] ** 2 - 1.0)
            * (3.0 * x[:, 1] ** 2 - 1.0)
            * (3.0 * x[:, 2] ** 2 - 1.0),
        ),
    ]

    def swallowtail_generate(seed: int, count: int) -> np.ndarray:
        from .rng import normal_block

        gauss = np.empty((count, 4))
        for axis in range(4):
            gauss[:, axis] = normal_block(seed + 0x51A * (axis + 1), 0, count)
        gauss -= gauss.mean(axis=1, keepdims=True)  # project onto sum = 0
        norms = np.linalg.norm(gauss, axis=1)
        norms[norms == 0] = 1.0
        x = gauss / norms[:, None]
        big_x = (
            2.0
            * np.sqrt(2.0)
            * (x[:, 0] + x[:, 1])
            * (x[:, 1] + x[:, 2])
            * (x[:, 2] + x[:, 0])
        )
        big_y = -4.0 * x[:, 0] * x[:, 1] * x[:, 2] * (x[:, 0] + x[:, 1] + x[:, 2])
        return np.column_stack([big_x, big_y])

    covers.append(CoverSampler("swallowtail", (("p", "-1/2"),), swallowtail_generate))

    def two_tangents_generate(seed: int, count: int) -> np.ndarray:
        u = uniform_block(seed, 0, 2 * count).reshape(count, 2) * np.pi
        cu, cv = np.cos(u[:, 0]), np.cos(u[:, 1])
        return np.column_stack([(cu + cv) / 2.0, cu * cv])

    covers.append(
        CoverSampler(
            "parabola_two_tangents",
            (("p1", "-1/2"), ("p2", "-1/2"), ("p3", "-1/2")),
            two_tangents_generate,
        )
    )

    def deltoid_generate(seed: int, count: int) -> np.ndarray:
        # fundamental triangle of the reflection lattice: (0,0), (2pi/3, 0),
        # (pi/3, pi/sqrt(3)); the trig map is injective on it
        u = uniform_block(seed, 0, 2 * count).reshape(count, 2)
        flip = u.sum(axis=1) > 1.0
        u[flip] = 1.0 - u[flip]
        va = np.array([2.0 * np.pi / 3.0, 0.0])
        vb = np.array([np.pi / 3.0, np.pi / np.sqrt(3.0)])
        z = u[:, [0]] * va + u[:, [1]] * vb
        s3 = np.sqrt(3.0)
        phases = [
            2.0 * z[:, 0],
            -z[:, 0] + s3 * z[:, 1],
            -z[:, 0] - s3 * z[:, 1],
        ]
        big_x = sum(np.cos(p) for p in phases)
        big_y = sum(np.sin(p) for p in phases)
        return np.column_stack([big_x, big_y])

    covers.append(CoverSampler("deltoid", (("p", "-1/2"),), deltoid_generate))
    return {c.model: c for c in covers}


COVER_SAMPLERS = _build_covers()


def cover_applies(model) -> bool:
    cover = COVER_SAMPLERS.get(model.name)
    if cover is None:
        return False
    from .poly import parse_rational

    return all(model.params[k] == parse_rational(v) for k, v in cover.required_params)


def _cover_mc(model, sampler: DomainSampler) -> WeightedPoints:
    cover = COVER_SAMPLERS.get(model.name)
    if cover is None or not cover_applies(model):
        raise SamplerConfigError(
            f"no covering sampler for {model.name} at these parameters; "
            f"use mc-rejection"
        )
    n = sampler.sample_count
    # the underlying streams are counter-based, so point i is a pure function
    # of (seed, i): one-shot generation equals any chunked evaluation
    points = cover.generate(sampler.seed, n)
    # cover images land in the closed domain; drop the roundoff-level
    # boundary grazers so every emitted point has all factors > 0
    mask = np.ones(points.shape[0], dtype=bool)
    for f in model.boundary.factors:
        mask &= f.eval_float(points) > 0.0
    points = points[mask]
    weights = np.full(points.shape[0], 1.0 / n)
    return WeightedPoints(points, weights, density_applied=True, proposals=n)


def sample_domain(model, sampler: DomainSampler) -> WeightedPoints:
    """Weighted point set for the model's domain under the given rule."""
    if sampler.kind == "tensor-gauss-square":
        return _square_rule(model, sampler.node_count)
    if sampler.kind == "polar-gauss-disk":
        return _disk_rule(model, sampler.node_count)
    if sampler.kind == "duffy-gauss-triangle":
        return _triangle_rule(model, sampler.node_count)
    if sampler.kind == "mc-rejection":
        return _mc_rejection(model, sampler)
    if sampler.kind == "cover-mc":
        return _cover_mc(model, sampler)
    raise SamplerConfigError(f"unknown sampler kind {sampler.kind!r}")


def _effective_weights(model, sample: WeightedPoints) -> np.ndarray:
    if sample.density_applied:
        weights = sample.weights.copy()
        if model.measure.exp_poly is not None:
            weights *= np.exp(model.measure.exp_poly.eval_float(sample.points))
        return weights
    return sample.weights * model.measure.density_float(sample.points)


def _evaluate(f, points: np.ndarray) -> np.ndarray:
    if isinstance(f, Polynomial):
        return f.eval_float(points)
    return np.asarray(f(points), dtype=float)


def integrate(
    f: Polynomial | Callable[[np.ndarray], np.ndarray],
    model,
    sampler: DomainSampler,
) -> IntegralEstimate:
    """Estimate of integral of f against the model measure."""
    model.require_finite_mass()
    sample = sample_domain(model, sampler)
    weights = _effective_weights(model, sample)
    values = _evaluate(f, sample.points) if sample.accepted else np.empty(0)
    total = float(np.dot(weights, values)) if sample.accepted else 0.0
    if sampler.kind == "mc-rejection":
        n = sample.proposals or 1
        # per-proposal contributions, rejected proposals contributing zero
        contributions = weights * values * n
        mean = total
        second = float(np.dot(contributions, contributions)) / n
        variance = max(second - mean * mean, 0.0)
        error = float(np.sqrt(variance / n))
        return IntegralEstimate(total, error)
    coarse = replace(sampler, node_count=max(2, sampler.node_count // 2))
    coarse_sample = sample_domain(model, coarse)
    coarse_weights = _effective_weights(model, coarse_sample)
    coarse_total = float(np.dot(coarse_weights, _evaluate(f, coarse_sample.points)))
    return IntegralEstimate(total, abs(total - coarse_total))


class Moments:
    """Measure moments of all monomials up to a degree, from one sample pass.

    Every Gram / energy-form / operator-moment entry below is a finite sum of
    these moments, so matrices built from the same Moments object are exactly
    consistent with each other (and exactly symmetric where they should be).
    """

    def __init__(self, model, max_degree: int, sampler: DomainSampler):
        model.require_finite_mass()
        self.model = model
        self.sampler = sampler
        self.basis = MonomialBasis(model.dim, max_degree)
        sample = sample_domain(model, sampler)
        weights = _effective_weights(model, sample)
        values = np.zeros(len(self.basis))
        chunk = 16384
        for start in range(0, sample.accepted, chunk):
            block = slice(start, min(start + chunk, sample.accepted))
            values += weights[block] @ self.basis.eval_float(sample.points[block])
        self.values = values
        self.by_exponent = {e: values[i] for i, e in enumerate(self.basis.exponents)}
        # retained so downstream code can integrate non-polynomial quantities
        # (e.g. products of normalized eigenfunctions) against the same rule
        self.points = sample.points
        self.weights = weights

    def pointwise_form(self, value_matrix: np.ndarray, factor: np.ndarray | None = None) -> np.ndarray:
        """Gram-style form sum_i w_i f(x_i) v_a(x_i) v_b(x_i) for the columns
        of value_matrix (pointwise route: no coefficient-space cancellation)."""
        w = self.weights if factor is None else self.weights * factor
        return value_matrix.T @ (w[:, None] * value_matrix)

    def monomial(self, exponent) -> float:
        return self.by_exponent[tuple(exponent)]

    def integral(self, p: Polynomial) -> float:
        return sum(float(c) * self.by_exponent[e] for e, c in p.terms.items())


def gram_matrix(model, degree: int, sampler: DomainSampler, moments: Moments | None = None) -> np.ndarray:
    """B[k, l] ~ integral of m_k m_l against the measure, exactly symmetric."""
    basis = MonomialBasis(model.dim, degree)
    mom = moments if moments is not None else Moments(model, 2 * degree, sampler)
    size = len(basis)
    b = np.empty((size, size))
    for k, ek in enumerate(basis.exponents):
        for l in range(k, size):
            el = basis.exponents[l]
            value = mom.monomial(tuple(a + b_ for a, b_ in zip(ek, el)))
            b[k, l] = value
            b[l, k] = value
    return b


def operator_moment_matrix(
    model, degree: int, sampler: DomainSampler, operator=None, moments: Moments | None = None
) -> np.ndarray:
    """M[k, l] ~ integral of m_k L(m_l) against the measure.

    `operator` defaults to the model operator but anything with an
    ``apply(Polynomial) -> Polynomial`` method is accepted, so deliberately
    broken operators can be probed by the negative controls.
    """
    op = operator if operator is not None else model.operator
    basis = MonomialBasis(model.dim, degree)
    images = [op.apply(Polynomial.monomial(model.dim, e)) for e in basis.exponents]
    image_degree = max(
        [degree] + [int(p.total_degree) for p in images if not p.is_zero]
    )
    mom = moments if moments is not None else Moments(model, degree + image_degree, sampler)
    size = len(basis)
    m = np.zeros((size, size))
    for l, image in enumerate(images):
        for exponent, value in image.terms.items():
            for k, ek in enumerate(basis.exponents):
                m[k, l] += float(value) * mom.monomial(
                    tuple(a + b_ for a, b_ in zip(exponent, ek))
                )
    return m


def gamma_form_matrix(
    model, degree: int, sampler: DomainSampler, moments: Moments | None = None
) -> np.ndarray:
    """A[k, l] ~ integral of Gamma(m_k, m_l) against the measure (symmetric)."""
    from .operator import gamma  # local to avoid cycles at import time

    basis = MonomialBasis(model.dim, degree)
    mom = moments if moments is not None else Moments(model, 2 * degree, sampler)
    size = len(basis)
    a = np.empty((size, size))
    for k in range(size):
        mk = Polynomial.monomial(model.dim, basis.exponents[k])
        for l in range(k, size):
            ml = Polynomial.monomial(model.dim, basis.exponents[l])
            value = mom.integral(gamma(model.cometric, mk, ml))
            a[k, l] = value
            a[l, k] = value
    return a


def symmetry_defect(
    model, degree: int, sampler: DomainSampler, operator=None, moments: Moments | None = None
) -> float:
    """Max over basis pairs of |<P, L Q> - <Q, L P>|, relative.

    The basis pairs are measure-normalized monomials (unit Gram diagonal,
    estimated from the same sample pass) and the result is divided by
    max(largest |<P, L Q>|, 1), so the defect is a scale-free relative
    asymmetry.  A small value certifies numerical self-adjointness of the
    operator on polynomials up to the given degree.
    """
    if moments is None:
        basis = MonomialBasis(model.dim, degree)
        images = [
            (operator if operator is not None else model.operator).apply(
                Polynomial.monomial(model.dim, e)
            )
            for e in basis.exponents
        ]
        image_degree = max(
            [degree] + [int(p.total_degree) for p in images if not p.is_zero]
        )
        moments = Moments(model, max(2 * degree, degree + image_degree), sampler)
    m = operator_moment_matrix(model, degree, sampler, operator=operator, moments=moments)
    b = gram_matrix(model, degree, sampler, moments=moments)
    norms = np.sqrt(np.diag(b))
    m = m / np.outer(norms, norms)
    return float(np.abs(m - m.T).max() / max(np.abs(m).max(), 1.0))


def export_samples_csv(path, sample: WeightedPoints, density: np.ndarray | None = None) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        dim = sample.points.shape[1] if sample.accepted else 0
        header = [f"x{i + 1}" for i in range(dim)] + ["weight", "density"]
        writer.writerow(header)
        dens = density if density is not None else np.ones(sample.accepted)
        for row, w, rho in zip(sample.points, sample.weights, dens):
            writer.writerow([repr(float(v)) for v in row] + [repr(float(w)), repr(float(rho))])


def export_matrix_csv(path, matrix: np.ndarray) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        for row in np.asarray(matrix):
            writer.writerow([repr(float(v)) for v in row])

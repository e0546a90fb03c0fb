"""Executable reconciliation of every tabulated catalog claim.

Each Claim binds one machine-checkable statement (an exact polynomial
identity, an exact eigenvalue table, a numeric tolerance, or a negative
control that must fail) to a runner.  The registry is the package's coverage
ledger: every catalog model contributes at least one claim, and the claim id
list is pinned by a checked-in manifest.

Claims flagged as reconciliations compare a tabulated formula that is known
to be garbled in the source tables; for those the derived quantity gates the
claim and the comparison outcome is informational.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import boundary as boundary_mod
from .boundary import BoundarySpec, check_ellipticity, det_divisibility_check, solve_admissibility
from .catalog import Model, get_model, model_names
from .geometry import PULLBACKS, curvature_constancy, verify_pullback
from .linalg import RationalMatrix
from .operator import (
    CoMetric,
    DiffusionOperator,
    GradedOperatorMatrix,
    InadmissibleMeasureError,
    MeasureSpec,
    boundary_first_order,
    drift_from_measure,
    gamma,
    product_operator,
)
from .poly import MonomialBasis, Polynomial, parse_poly, parse_rational
from .quadrature import Moments, symmetry_defect
from .rng import DEFAULT_SEED, stream_uniform
from .spectra import compare_closed_form, eigenbasis, graded_eigenvalues, pencil_cross_check

GAUSS_MODELS = {"jacobi1d", "square", "disk", "triangle"}
MC_DEFECT_TOL = 1e-2
GAUSS_DEFECT_TOL = 1e-8
MC_GRAM_TOL = 5e-2
GAUSS_GRAM_TOL = 1e-6
RESIDUAL_TOL = 1e-7
CURVATURE_TOL = 1e-6
PULLBACK_TOL = 1e-6
TRIANGULARITY_DEGREE = 12


@dataclass
class ClaimResult:
    id: str
    model: str
    kind: str
    status: str  # "pass" | "fail" | "skip"
    detail: dict
    note: str | None = None

    def to_jsonable(self) -> dict:
        out = {
            "id": self.id,
            "model": self.model,
            "kind": self.kind,
            "status": self.status,
            "detail": self.detail,
        }
        if self.note:
            out["note"] = self.note
        return out


@dataclass
class Claim:
    id: str
    model: str
    kind: str
    anchor: str
    run: Callable[["RunContext"], tuple[bool, dict]]
    note: str | None = None

    def execute(self, ctx: RunContext) -> ClaimResult:
        try:
            ok, detail = self.run(ctx)
        except Exception as exc:  # a crash is a failed claim, not a crashed run
            return ClaimResult(
                self.id, self.model, self.kind, "fail",
                {"error": f"{type(exc).__name__}: {exc}"}, self.note,
            )
        return ClaimResult(
            self.id, self.model, self.kind, "pass" if ok else "fail", detail, self.note
        )


class RunContext:
    """Shared caches so one verify run samples each model once."""

    def __init__(self, seed: int = DEFAULT_SEED):
        self.seed = seed
        self._models: dict = {}
        self._moments: dict = {}
        self._graded: dict = {}

    def model(self, name: str, params: dict | None = None) -> Model:
        key = (name, tuple(sorted((params or {}).items())))
        if key not in self._models:
            self._models[key] = get_model(name, params)
        return self._models[key]

    def moments(self, model: Model, degree: int) -> Moments:
        key = (model.name, tuple(sorted(model.params.items())))
        cached = self._moments.get(key)
        if cached is None or cached.basis.max_degree < degree:
            cached = Moments(model, degree, model.sampler(seed=self.seed))
            self._moments[key] = cached
        return cached

    def graded(self, model: Model, degree: int) -> GradedOperatorMatrix:
        key = (model.name, tuple(sorted(model.params.items())), degree)
        if key not in self._graded:
            self._graded[key] = GradedOperatorMatrix(model.operator, degree)
        return self._graded[key]


# ----------------------------------------------------------------------
# claim runners


def _boundary_residual(name: str):
    def run(ctx: RunContext):
        model = ctx.model(name)
        g = model.cometric
        detail = {"factors": len(model.boundary.factors), "first_order": []}
        for factor in model.boundary.factors:
            s = boundary_first_order(g, factor)
            if s is None:
                return False, {"factor": str(factor), "error": "no affine multiplier"}
            grad = factor.gradient()
            for i in range(g.dim):
                lhs = Polynomial.zero(g.dim)
                for j in range(g.dim):
                    lhs = lhs + g[i, j] * grad[j]
                if lhs - s[i] * factor != Polynomial.zero(g.dim):
                    return False, {"factor": str(factor), "axis": i, "error": "nonzero residual"}
            detail["first_order"].append([str(p) for p in s])
        return True, detail

    return run


def _det_divisibility(name: str):
    def run(ctx: RunContext):
        model = ctx.model(name)
        report = det_divisibility_check(model.cometric, model.boundary)
        detail = {"divides": report.divides, "quotient_degree": report.quotient_degree}
        return report.divides, detail

    return run


def _ellipticity(name: str):
    def run(ctx: RunContext):
        model = ctx.model(name)
        per_axis = 10 if model.dim <= 2 else 5
        points = model.interior_points(per_axis=per_axis)
        if not points:
            return False, {"error": "no interior grid points"}
        report = check_ellipticity(model.cometric, points)
        detail = {"checked": report.checked, "elliptic": report.elliptic}
        if report.first_failure is not None:
            detail["first_failure"] = [str(v) for v in report.first_failure]
        return report.elliptic, detail

    return run


def _drift_degree(name: str):
    def run(ctx: RunContext):
        model = ctx.model(name)
        drift = model.operator.drift
        degrees = [int(b.total_degree) if not b.is_zero else 0 for b in drift]
        return all(d <= 1 for d in degrees), {
            "drift": [str(b) for b in drift],
            "degrees": degrees,
        }

    return run


def _drift_claim(name: str):
    def run(ctx: RunContext):
        model = ctx.model(name)
        derived = model.operator.drift
        claimed = model.claimed_drift()
        matches = [c == d for c, d in zip(claimed, derived)]
        detail = {
            "derived": [str(b) for b in derived],
            "tabulated": [str(c) for c in claimed],
            "matches": matches,
        }
        if model.claim_is_reconciliation("drift"):
            # gated on the derived drift being well-formed; the comparison is
            # informational for garbled tabulations
            detail["reconciliation"] = True
            return True, detail
        return all(matches), detail

    return run


def _spectrum_claim(name: str):
    def run(ctx: RunContext):
        model = ctx.model(name)
        degree = 12 if model.dim == 1 else 8
        comparisons = compare_closed_form(model, degree)
        ok = all(c.match and c.exact for c in comparisons)
        return ok, {
            "max_degree": degree,
            "all_exact": all(c.exact for c in comparisons),
            "mismatched_degrees": [c.degree for c in comparisons if not c.match],
        }

    return run


def _graded_triangularity(name: str):
    def run(ctx: RunContext):
        model = ctx.model(name)
        graded = ctx.graded(model, TRIANGULARITY_DEGREE)
        bad = graded.strictly_lower_block_entries()
        return not bad, {"max_degree": TRIANGULARITY_DEGREE, "violations": len(bad)}

    return run


def _curvature_claim(name: str, params: dict | None = None, claim_id_params: str = ""):
    def run(ctx: RunContext):
        model = ctx.model(name, params)
        kind, value = model.claimed_curvature()
        report = curvature_constancy(model)
        detail = {
            "verdict": "constant" if report.constant else "non-constant",
            "mean": report.mean,
            "max_deviation": report.max_deviation,
            "spread": report.spread,
            "points": int(len(report.values)),
        }
        if kind == "constant":
            detail["tabulated"] = str(value)
            ok = report.constant and abs(report.mean - float(value)) <= CURVATURE_TOL * (
                1.0 + abs(float(value))
            )
            return ok, detail
        return (not report.constant) and report.spread > 1e-3, detail

    return run


def _pullback_claim(name: str):
    def run(ctx: RunContext):
        model = ctx.model(name)
        spec = PULLBACKS[model.pullback_name()]
        report = verify_pullback(spec, sample_count=1000, seed=ctx.seed)
        detail = {
            "map": spec.name,
            "scale": report.scale,
            "max_gamma_residual": report.max_gamma_residual,
            "max_L_residual": report.max_l_residual,
        }
        return report.max_residual < PULLBACK_TOL, detail

    return run


def _symmetry_defect_claim(name: str):
    def run(ctx: RunContext):
        model = ctx.model(name)
        gauss = name in GAUSS_MODELS
        degree = 6 if gauss else 3
        tol = GAUSS_DEFECT_TOL if gauss else MC_DEFECT_TOL
        moments = ctx.moments(model, 2 * 6 + 1)
        defect = symmetry_defect(model, degree, model.sampler(seed=ctx.seed), moments=moments)
        return defect < tol, {"degree": degree, "defect": defect, "tolerance": tol}

    return run


def _eigenbasis_claim(name: str):
    def run(ctx: RunContext):
        model = ctx.model(name)
        gauss = name in GAUSS_MODELS
        moments = ctx.moments(model, 2 * 6 + 1)
        eb = eigenbasis(model, 6, model.sampler(seed=ctx.seed), moments=moments)
        gram_dev = eb.gram_deviation()
        residual = max(eb.residuals())
        gram_tol = GAUSS_GRAM_TOL if gauss else MC_GRAM_TOL
        cross = pencil_cross_check(eb)
        cross_tol = 1e-6 if gauss else 2e-2
        prefix = len(eb.pencil_eigenvalues) if gauss else (3 * len(eb.pencil_eigenvalues)) // 4
        pencil_sorted = np.sort(-eb.pencil_eigenvalues)[::-1][:prefix]
        graded_sorted = np.sort(np.array(eb.graded_values))[::-1][:prefix]
        prefix_gap = float(
            (np.abs(pencil_sorted - graded_sorted) / (1.0 + np.abs(graded_sorted))).max()
        )
        ok = gram_dev < gram_tol and residual < RESIDUAL_TOL and prefix_gap < cross_tol
        return ok, {
            "gram_deviation": gram_dev,
            "gram_tolerance": gram_tol,
            "max_residual": residual,
            "pencil_cross_check": cross,
            "pencil_prefix_gap": prefix_gap,
            "pencil_prefix": prefix,
        }

    return run


# ----------------------------------------------------------------------
# global claims


def _unique_metric_dimensions(ctx: RunContext):
    expected = {
        "deltoid": 1,
        "nodal_cubic": 1,
        "swallowtail": 1,
        "parabola_two_tangents": 1,
        "cuspidal_cubic_secant": 1,
        "cuspidal_cubic_tangent": 1,
        "parabola_tangent_secant": 1,
        "triangle": 3,
    }
    detail = {}
    ok = True
    for name, dim in expected.items():
        model = ctx.model(name)
        start = time.perf_counter()
        solution = solve_admissibility(model.boundary)
        elapsed = time.perf_counter() - start
        # wall-clock values stay out of the report so it is byte-reproducible
        detail[name] = {
            "dimension": solution.dimension,
            "under_one_second": elapsed < 1.0,
        }
        ok = ok and solution.dimension == dim and elapsed < 1.0
    return ok, detail


def _square_disk_regression(ctx: RunContext):
    # raw kernel dimensions established by this solver and frozen
    frozen = {"square": 2, "disk": 4}
    detail = {}
    ok = True
    for name, dim in frozen.items():
        solution = solve_admissibility(ctx.model(name).boundary)
        detail[name] = solution.dimension
        ok = ok and solution.dimension == dim
    return ok, detail


def _coaxial_extra_family(ctx: RunContext):
    spec = BoundarySpec(
        2,
        (parse_poly("1+y-x^2", 2), parse_poly("1-y", 2)),
        (Fraction(0), Fraction(0)),
    )
    solution = solve_admissibility(spec)
    return solution.dimension >= 2, {"dimension": solution.dimension}


def _catalog_metric_in_span(ctx: RunContext):
    names = [
        "jacobi1d", "square", "disk", "triangle", "coaxial_parabolas",
        "parabola_tangent_secant", "parabola_two_tangents", "nodal_cubic",
        "cuspidal_cubic_secant", "cuspidal_cubic_tangent", "swallowtail",
        "deltoid", "triangle_cover_3d", "nodal_cubic_cover_3d",
    ]
    detail = {}
    ok = True
    for name in names:
        model = ctx.model(name)
        solution = solve_admissibility(model.boundary)
        d = model.dim
        quad = MonomialBasis(d, 2)
        entries = [(i, j) for i in range(d) for j in range(i, d)]

        def stacked(g: CoMetric) -> list[Fraction]:
            out = []
            for i, j in entries:
                out.extend(quad.coordinates(g[i, j]))
            return out

        columns = [stacked(g) for g in solution.g_basis]
        target = stacked(model.cometric)
        matrix = RationalMatrix([[col[r] for col in columns] for r in range(len(target))])
        weights = matrix.solve(target)
        member = weights is not None and solution.combination(weights) == model.cometric
        detail[name] = {"dimension": solution.dimension, "in_span": bool(member)}
        ok = ok and member
    return ok, detail


def _sum_identity(ctx: RunContext):
    # summing the per-factor first-order data reproduces the identity for the
    # full boundary product
    detail = {}
    ok = True
    for name in ["triangle", "square", "parabola_two_tangents", "cuspidal_cubic_secant"]:
        model = ctx.model(name)
        g = model.cometric
        product = model.boundary.product()
        total = [Polynomial.zero(model.dim) for _ in range(model.dim)]
        for factor in model.boundary.factors:
            s = boundary_first_order(g, factor)
            for i in range(model.dim):
                total[i] = total[i] + s[i]
        grad = product.gradient()
        good = True
        for i in range(model.dim):
            lhs = Polynomial.zero(model.dim)
            for j in range(model.dim):
                lhs = lhs + g[i, j] * grad[j]
            good = good and lhs == total[i] * product
        detail[name] = good
        ok = ok and good
    return ok, detail


def _quartic_boundary_negative(ctx: RunContext):
    spec = BoundarySpec(2, (parse_poly("1-x^4-y^4", 2),), (Fraction(0), Fraction(0)))
    solution = solve_admissibility(spec)
    detail = {"dimension": solution.dimension}
    if solution.dimension == 0:
        detail["elliptic_direction_found"] = False
        return True, detail
    # exhaustive direction search over the basis sphere: float screen on a
    # clipped grid, exact confirmation of any survivor
    grid = boundary_mod.interior_grid(spec, [(-1, 1), (-1, 1)], per_axis=8)
    float_points = np.array([[float(c) for c in p] for p in grid])
    dim = solution.dimension
    basis_vals = []
    for g in solution.g_basis:
        basis_vals.append(
            [
                [g[i, j].eval_float(float_points) for j in range(2)]
                for i in range(2)
            ]
        )
    found = False
    for k in range(10_000):
        direction = np.array(
            [stream_uniform(ctx.seed, dim * k + t) * 2.0 - 1.0 for t in range(dim)]
        )
        norm = np.linalg.norm(direction)
        if norm == 0:
            continue
        direction /= norm
        g11 = sum(direction[b] * basis_vals[b][0][0] for b in range(dim))
        g12 = sum(direction[b] * basis_vals[b][0][1] for b in range(dim))
        g22 = sum(direction[b] * basis_vals[b][1][1] for b in range(dim))
        if (g11 > 0).all() and (g11 * g22 - g12 * g12 > 0).all():
            # float screen passed; confirm exactly before declaring ellipticity
            weights = [Fraction(float(direction[b])) for b in range(dim)]
            combo = solution.combination(weights)
            if check_ellipticity(combo, grid).elliptic:
                found = True
                break
    detail["elliptic_direction_found"] = found
    detail["directions_checked"] = 10_000
    return not found, detail


def _nodal_inverse_sqrt_det(ctx: RunContext):
    model = ctx.model("nodal_cubic")
    report = det_divisibility_check(model.cometric, model.boundary)
    factors = list(model.boundary.factors) + [report.quotient]
    measure = MeasureSpec(
        2, tuple((f, Fraction(-1, 2)) for f in factors), None
    )
    try:
        drift_from_measure(model.cometric, measure)
    except InadmissibleMeasureError as exc:
        return True, {"rejected": True, "reason": str(exc)}
    return False, {"rejected": False}


def _perturbed_drift_negative(ctx: RunContext):
    model = ctx.model("square")

    class Perturbed:
        def __init__(self, op: DiffusionOperator):
            self.op = op
            self.extra = Polynomial.monomial(op.dim, (2, 0))

        def apply(self, f: Polynomial) -> Polynomial:
            return self.op.apply(f) + self.extra * f.derivative(0)

    defect = symmetry_defect(
        model, 3, model.sampler(seed=ctx.seed), operator=Perturbed(model.operator)
    )
    return defect > 0.1, {"defect": defect}


def _corrupted_spectrum_negative(ctx: RunContext):
    model = ctx.model("deltoid")
    claimed = model.claimed_spectrum()
    spectrum = graded_eigenvalues(model.operator, 6)
    mismatched = []
    for n in range(1, 7):
        expected = sorted(v + 1 for v in claimed.eigenvalues_at_degree(n))
        computed = spectrum.multiset(n)
        if expected != computed:
            mismatched.append(n)
    return mismatched == list(range(1, 7)), {"mismatched_degrees": mismatched}


def _gaussian_decomposition(ctx: RunContext):
    triples = [("1", "0", "1"), ("2", "1/2", "1"), ("3/2", "-1/3", "2")]
    detail = {}
    ok = True
    for a0, b0, c0 in triples:
        model = ctx.model("gaussian_plane", {"A0": a0, "B0": b0, "C0": c0})
        av, bv, cv = (parse_rational(v) for v in (a0, b0, c0))
        x, y = Polynomial.variable(2, 0), Polynomial.variable(2, 1)
        one = Polynomial.constant(2, 1)
        ou = DiffusionOperator(
            CoMetric([[one * av, one * bv], [one * bv, one * cv]]),
            (x * -av - y * bv, y * -cv - x * bv),
        )
        rot = DiffusionOperator(
            CoMetric([[y * y, -(x * y)], [-(x * y), x * x]]),
            (-x, -y),
        )
        same_metric = all(
            model.cometric[i, j] == ou.cometric[i, j] + rot.cometric[i, j]
            for i in range(2)
            for j in range(2)
        )
        same_drift = all(
            model.operator.drift[i] == ou.drift[i] + rot.drift[i] for i in range(2)
        )
        key = f"A0={a0},B0={b0},C0={c0}"
        detail[key] = {"metric": same_metric, "drift": same_drift}
        ok = ok and same_metric and same_drift
    return ok, detail


def _product_structure(ctx: RunContext):
    left = ctx.model("jacobi1d", {"a": "3/2", "b": "2"})
    right = ctx.model("jacobi1d", {"a": "1", "b": "1"})
    product = product_operator(left.operator, right.operator)
    square = ctx.model(
        "square", {"a": "1/2", "b": "1", "c": "0", "d": "0"}
    )  # exponents a-1, b-1 of the two 1D factors
    same_metric = all(
        product.cometric[i, j] == square.cometric[i, j] for i in range(2) for j in range(2)
    )
    same_drift = all(product.drift[i] == square.operator.drift[i] for i in range(2))

    spectrum = graded_eigenvalues(product, 6)
    s_left = graded_eigenvalues(left.operator, 6)
    s_right = graded_eigenvalues(right.operator, 6)
    sums_ok = True
    for n in range(7):
        expected = sorted(
            s_left.multiset(k)[0] + s_right.multiset(n - k)[0] for k in range(n + 1)
        )
        sums_ok = sums_ok and expected == spectrum.multiset(n)

    ou = product_operator(ctx.model("hermite1d").operator, ctx.model("hermite1d").operator)
    ou_ok = ou.drift == (
        -Polynomial.variable(2, 0),
        -Polynomial.variable(2, 1),
    )
    detail = {
        "jacobi_product_is_square_model": same_metric and same_drift,
        "eigenvalue_sums_exact": sums_ok,
        "ou_product_drift": ou_ok,
    }
    return same_metric and same_drift and sums_ok and ou_ok, detail


def _cover_family_residuals(ctx: RunContext):
    detail = {}
    ok = True
    for a_val in ["1", "-3", "7/2"]:
        model = ctx.model("nodal_cubic_cover_3d", {"A": a_val})
        good = True
        g = model.cometric
        for factor in model.boundary.factors:
            s = boundary_first_order(g, factor)
            good = good and s is not None
        detail[f"A={a_val}"] = good
        ok = ok and good
    return ok, detail


def _deltoid_spectrum_family(ctx: RunContext):
    detail = {}
    ok = True
    for p in ["0", "1/2"]:
        model = ctx.model("deltoid", {"p": p})
        comparisons = compare_closed_form(model, 8)
        good = all(c.match and c.exact for c in comparisons)
        detail[f"p={p}"] = good
        ok = ok and good
    return ok, detail


def _coaxial_curvature_family(ctx: RunContext):
    detail = {}
    ok = True
    for a in ["0", "3"]:
        model = ctx.model("coaxial_parabolas", {"a": a})
        report = curvature_constancy(model)
        expected = 1.0 + float(parse_rational(a))
        good = report.constant and abs(report.mean - expected) <= CURVATURE_TOL * (1 + expected)
        detail[f"a={a}"] = {"mean": report.mean, "constant": report.constant}
        ok = ok and good
    return ok, detail


def _disk_curvature_nonconstant(ctx: RunContext):
    model = ctx.model("disk", {"a": "1", "b": "1"})
    report = curvature_constancy(model)
    return (not report.constant) and report.spread > 1e-3, {
        "spread": report.spread,
        "constant": report.constant,
    }


def _diffusion_chain_rule(ctx: RunContext):
    # second-order chain rule at polynomial level on the square model
    model = ctx.model("square")
    op = model.operator
    g = model.cometric
    seed_state = [1]

    def rnd_poly(degree: int) -> Polynomial:
        terms = {}
        basis = MonomialBasis(2, degree)
        for e in basis.exponents:
            value = stream_uniform(ctx.seed, seed_state[0]) * 4 - 2
            seed_state[0] += 1
            terms[e] = Fraction(round(value * 8), 8)
        return Polynomial(2, terms)

    ok = True
    for _ in range(4):
        f = rnd_poly(2)
        phi_coeffs = [
            Fraction(round((stream_uniform(ctx.seed, seed_state[0] + k) * 4 - 2) * 8), 8)
            for k in range(4)
        ]
        seed_state[0] += 4
        phi_of_f = sum((c * f**k for k, c in enumerate(phi_coeffs)), Polynomial.zero(2))
        phi_p = sum(
            (c * k * f ** (k - 1) for k, c in enumerate(phi_coeffs) if k >= 1),
            Polynomial.zero(2),
        )
        phi_pp = sum(
            (c * k * (k - 1) * f ** (k - 2) for k, c in enumerate(phi_coeffs) if k >= 2),
            Polynomial.zero(2),
        )
        lhs = op.apply(phi_of_f)
        rhs = phi_pp * gamma(g, f, f) + phi_p * op.apply(f)
        ok = ok and lhs == rhs
    return ok, {"trials": 4}


# ----------------------------------------------------------------------
# registry


def build_claims() -> list[Claim]:
    claims: list[Claim] = []

    def add(claim_id, model, kind, anchor, runner, note=None):
        claims.append(Claim(claim_id, model, kind, anchor, runner, note))

    for name in model_names():
        model = get_model(name)
        if model.boundary.factors:
            add(f"{name}.boundary-residual", name, "exact-polynomial-identity",
                f"catalog:{name}/boundary", _boundary_residual(name))
            add(f"{name}.det-divisibility", name, "exact-polynomial-identity",
                f"catalog:{name}/determinant", _det_divisibility(name))
            add(f"{name}.ellipticity", name, "exact-polynomial-identity",
                f"catalog:{name}/cometric", _ellipticity(name))
        add(f"{name}.drift-degree", name, "exact-polynomial-identity",
            f"catalog:{name}/measure", _drift_degree(name))
        if model.has_claim("drift") and model.claim_applies("drift"):
            kind = "exact-polynomial-identity"
            add(f"{name}.drift-tabulated", name, kind,
                f"catalog:{name}/drift", _drift_claim(name),
                note=model.claim_note("drift"))
        if model.has_claim("eigenvalue") and model.claim_applies("eigenvalue"):
            add(f"{name}.spectrum-closed-form", name, "exact-eigenvalue",
                f"catalog:{name}/eigenvalues", _spectrum_claim(name),
                note=model.claim_note("eigenvalue"))
        add(f"{name}.graded-triangularity", name, "exact-polynomial-identity",
            f"catalog:{name}/grading", _graded_triangularity(name))
        if model.has_claim("curvature") and model.claim_applies("curvature"):
            add(f"{name}.curvature", name, "numeric-tolerance",
                f"catalog:{name}/curvature", _curvature_claim(name))
        if model.has_claim("pullback") and model.claim_applies("pullback"):
            add(f"{name}.pullback", name, "numeric-tolerance",
                f"catalog:{name}/pullback", _pullback_claim(name))
        if model.has_sampler:
            add(f"{name}.symmetry-defect", name, "numeric-tolerance",
                f"catalog:{name}/self-adjointness", _symmetry_defect_claim(name))
            add(f"{name}.eigenbasis-quality", name, "numeric-tolerance",
                f"catalog:{name}/eigenbasis", _eigenbasis_claim(name))

    add("admissibility.unique-metrics", "global", "exact-polynomial-identity",
        "catalog:admissibility/dimensions", _unique_metric_dimensions)
    add("admissibility.square-disk-regression", "global", "exact-polynomial-identity",
        "catalog:admissibility/frozen-dimensions", _square_disk_regression)
    add("admissibility.coaxial-extra-family", "global", "exact-polynomial-identity",
        "catalog:coaxial_parabolas/extra-family", _coaxial_extra_family)
    add("admissibility.catalog-metric-in-span", "global", "exact-polynomial-identity",
        "catalog:admissibility/span", _catalog_metric_in_span)
    add("boundary.sum-identity", "global", "exact-polynomial-identity",
        "catalog:boundary/sum-identity", _sum_identity)
    add("operator.chain-rule", "global", "exact-polynomial-identity",
        "catalog:operator/chain-rule", _diffusion_chain_rule)
    add("gaussian_plane.decomposition", "gaussian_plane", "exact-polynomial-identity",
        "catalog:gaussian_plane/decomposition", _gaussian_decomposition)
    add("product.structure", "global", "exact-eigenvalue",
        "catalog:product/structure", _product_structure)
    add("nodal_cubic_cover_3d.family-residuals", "nodal_cubic_cover_3d",
        "exact-polynomial-identity", "catalog:nodal_cubic_cover_3d/family",
        _cover_family_residuals)
    add("deltoid.spectrum-family", "deltoid", "exact-eigenvalue",
        "catalog:deltoid/eigenvalue-family", _deltoid_spectrum_family)
    add("coaxial_parabolas.curvature-family", "coaxial_parabolas", "numeric-tolerance",
        "catalog:coaxial_parabolas/curvature-family", _coaxial_curvature_family)
    add("disk.curvature-nonconstant", "disk", "numeric-tolerance",
        "catalog:disk/curvature-nonconstant", _disk_curvature_nonconstant)
    add("negative.quartic-boundary", "global", "negative-control",
        "catalog:negative/quartic-boundary", _quartic_boundary_negative)
    add("negative.nodal-inverse-sqrt-det", "nodal_cubic", "negative-control",
        "catalog:nodal_cubic/inverse-sqrt-det", _nodal_inverse_sqrt_det)
    add("negative.perturbed-drift", "square", "negative-control",
        "catalog:negative/perturbed-drift", _perturbed_drift_negative)
    add("negative.corrupted-spectrum", "deltoid", "negative-control",
        "catalog:negative/corrupted-spectrum", _corrupted_spectrum_negative)
    return claims


@dataclass
class ClaimReport:
    seed: int
    results: list[ClaimResult] = field(default_factory=list)

    @property
    def passed(self) -> int:
        return sum(1 for r in self.results if r.status == "pass")

    @property
    def failed(self) -> int:
        return sum(1 for r in self.results if r.status == "fail")

    @property
    def skipped(self) -> int:
        return sum(1 for r in self.results if r.status == "skip")

    def to_jsonable(self) -> dict:
        return {
            "seed": self.seed,
            "summary": {
                "passed": self.passed,
                "failed": self.failed,
                "skipped": self.skipped,
            },
            "claims": [r.to_jsonable() for r in self.results],
        }


def run_claims(model_filter: str = "all", seed: int = DEFAULT_SEED) -> ClaimReport:
    """Execute the registry, optionally restricted to one model's claims.

    Ordering is the registry order, so reports are deterministic for a fixed
    seed.  Claims whose model does not match the filter are reported as
    skipped (with the reason) rather than dropped, keeping coverage visible.
    """
    ctx = RunContext(seed=seed)
    report = ClaimReport(seed=seed)
    for claim in build_claims():
        if model_filter != "all" and claim.model not in (model_filter, "global"):
            report.results.append(
                ClaimResult(
                    claim.id, claim.model, claim.kind, "skip",
                    {"reason": f"filtered to model {model_filter}"},
                )
            )
            continue
        report.results.append(claim.execute(ctx))
    return report


def claim_ids() -> list[str]:
    return [c.id for c in build_claims()]

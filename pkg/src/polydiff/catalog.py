"""The model catalog: named domains with their cometric and measure families.

Models are data, not code: ``data/models.json`` holds polynomial templates
(strings over x, y, z plus the model's parameter names), exact rational
parameter ranges and the tabulated closed-form claims.  Instantiating a model
substitutes rational parameter values, builds the boundary/cometric/measure
triple, and derives the drift from the measure, which is itself a first
consistency check.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from math import comb
from typing import Mapping, Sequence

from .boundary import BoundarySpec, interior_grid
from .operator import CoMetric, DiffusionOperator, MeasureSpec, operator_from_measure
from .poly import Polynomial, parse_poly, parse_rational, variable_names
from .quadrature import DomainSampler
from .rng import DEFAULT_SEED

Rational = int | Fraction


class CatalogError(KeyError):
    pass


class ParameterError(ValueError):
    pass


class NonIntegrableMeasureError(ValueError):
    pass


class ClaimNotApplicableError(ValueError):
    """A tabulated claim exists but not at these parameter values."""


@dataclass(frozen=True)
class ParamSpec:
    name: str
    default: Fraction
    gt: Fraction | None = None
    ge: Fraction | None = None
    lt: Fraction | None = None
    le: Fraction | None = None

    def check(self, value: Fraction) -> None:
        if self.gt is not None and not value > self.gt:
            raise ParameterError(f"{self.name} = {value} must be > {self.gt}")
        if self.ge is not None and not value >= self.ge:
            raise ParameterError(f"{self.name} = {value} must be >= {self.ge}")
        if self.lt is not None and not value < self.lt:
            raise ParameterError(f"{self.name} = {value} must be < {self.lt}")
        if self.le is not None and not value <= self.le:
            raise ParameterError(f"{self.name} = {value} must be <= {self.le}")


class Template:
    """Polynomial template over the model variables plus its parameters."""

    def __init__(self, text: str, dim: int, param_names: Sequence[str]):
        self.dim = dim
        self.param_names = list(param_names)
        names = variable_names(dim) + self.param_names
        self.poly = parse_poly(text, names=names)

    def instantiate(self, values: Mapping[str, Fraction]) -> Polynomial:
        assignments = {
            self.dim + i: values[name] for i, name in enumerate(self.param_names)
        }
        return self.poly.partial_evaluate(assignments)


def _scalar_template(text: str, param_names: Sequence[str]):
    """Expression in the parameters only, evaluating to a Fraction."""
    poly = parse_poly(text, names=list(param_names))

    def evaluate(values: Mapping[str, Fraction]) -> Fraction:
        return poly([values[name] for name in param_names])

    return evaluate


@dataclass
class ClaimedSpectrum:
    """Closed-form eigenvalues, indexed per the model's tabulated scheme."""

    scheme: str
    indices: list[str]
    formula: Polynomial  # over index variables, parameters already substituted
    dim: int
    note: str | None = None

    def eigenvalue(self, *index: int) -> Fraction:
        if len(index) != len(self.indices):
            raise ValueError(f"scheme {self.scheme} expects indices {self.indices}")
        return self.formula([Fraction(i) for i in index])

    def eigenvalues_at_degree(self, degree: int) -> list[Fraction]:
        """Full multiset for the degree block; size = dim of the degree space."""
        block_size = comb(degree + self.dim - 1, degree)
        if self.scheme == "degree":
            values = [self.eigenvalue(degree)]
        elif self.scheme == "degree-scalar":
            values = [self.eigenvalue(degree)] * block_size
        elif self.scheme in ("complex-pair", "bidegree"):
            values = [self.eigenvalue(k, degree - k) for k in range(degree + 1)]
        else:
            raise ValueError(f"unknown spectrum scheme {self.scheme!r}")
        if len(values) != block_size:
            raise ValueError("spectrum scheme does not fill the degree space")
        return sorted(values)


class Model:
    """One instantiated catalog entry."""

    def __init__(self, descriptor: ModelDescriptor, params: dict[str, Fraction]):
        self.descriptor = descriptor
        self.name = descriptor.name
        self.dim = descriptor.dim
        self.params = params
        self.compact = descriptor.compact
        values = params
        factors = tuple(t.instantiate(values) for t in descriptor.factor_templates)
        witness = tuple(descriptor.witness)
        self.boundary = BoundarySpec(self.dim, factors, witness)
        entries = [
            [t.instantiate(values) for t in row] for row in descriptor.cometric_templates
        ]
        self.cometric = CoMetric(entries)
        factor_exponents = tuple(
            (t.instantiate(values), exponent_eval(values))
            for t, exponent_eval in descriptor.measure_templates
        )
        exp_poly = (
            descriptor.exp_poly_template.instantiate(values)
            if descriptor.exp_poly_template is not None
            else None
        )
        self.measure = MeasureSpec(self.dim, factor_exponents, exp_poly)
        self.box = descriptor.box_for(values)
        self._operator: DiffusionOperator | None = None

    @property
    def operator(self) -> DiffusionOperator:
        if self._operator is None:
            self._operator = operator_from_measure(self.cometric, self.measure)
        return self._operator

    def sampler(self, seed: int | None = None, **overrides) -> DomainSampler:
        spec = self.descriptor.sampler_spec
        if spec is None:
            raise CatalogError(f"model {self.name} has no default quadrature rule")
        kwargs = dict(spec)
        kwargs.update(overrides)
        kwargs.setdefault("seed", DEFAULT_SEED)
        if seed is not None:
            kwargs["seed"] = seed
        if kwargs.get("kind") == "cover-mc":
            from .quadrature import cover_applies

            if not cover_applies(self):
                # covering-space sampling only exists at the tabulated
                # parameter point; generic instances fall back to rejection
                kwargs["kind"] = "mc-rejection"
        return DomainSampler(**kwargs)

    @property
    def has_sampler(self) -> bool:
        return self.descriptor.sampler_spec is not None

    def require_finite_mass(self) -> None:
        for factor, exponent in self.measure.factor_exponents:
            if exponent <= -1:
                raise NonIntegrableMeasureError(
                    f"factor exponent {exponent} <= -1 gives infinite mass"
                )
        if not self.compact and self.measure.exp_poly is None:
            raise NonIntegrableMeasureError(
                "non-compact domain with purely polynomial density has infinite mass"
            )

    def interior_points(
        self, per_axis: int = 10, margin: Fraction = Fraction(0)
    ) -> list[tuple[Fraction, ...]]:
        """Rational interior grid; margin > 0 keeps factors above
        margin * (their witness value), staying away from the boundary."""
        points = interior_grid(self.boundary, self.box, per_axis)
        if margin:
            thresholds = [f(self.boundary.witness) * margin for f in self.boundary.factors]
            points = [
                pt
                for pt in points
                if all(f(pt) > t for f, t in zip(self.boundary.factors, thresholds))
            ]
        return points

    # ------------------------------------------------------------------
    # tabulated claims

    def _claim(self, key: str) -> dict:
        claims = self.descriptor.claims
        if key not in claims:
            raise CatalogError(f"model {self.name} has no tabulated {key} claim")
        return claims[key]

    def _requires_ok(self, claim: dict) -> bool:
        requires = claim.get("requires", {})
        return all(self.params[name] == parse_rational(v) for name, v in requires.items())

    def _require(self, claim: dict, key: str) -> None:
        if not self._requires_ok(claim):
            raise ClaimNotApplicableError(
                f"{self.name} {key} claim is tabulated only at {claim.get('requires')}"
            )

    def has_claim(self, key: str) -> bool:
        return key in self.descriptor.claims

    def claim_applies(self, key: str) -> bool:
        return self.has_claim(key) and self._requires_ok(self._claim(key))

    def claim_note(self, key: str) -> str | None:
        return self._claim(key).get("note")

    def claim_is_reconciliation(self, key: str) -> bool:
        return bool(self._claim(key).get("reconciliation", False))

    def claimed_drift(self) -> tuple[Polynomial, ...]:
        claim = self._claim("drift")
        self._require(claim, "drift")
        names = variable_names(self.dim) + self.descriptor.param_names
        polys = []
        for text in claim["formulas"]:
            template = Template(text, self.dim, self.descriptor.param_names)
            polys.append(template.instantiate(self.params))
        return tuple(polys)

    def claimed_spectrum(self) -> ClaimedSpectrum:
        claim = self._claim("eigenvalue")
        self._require(claim, "eigenvalue")
        indices = list(claim["indices"])
        names = indices + self.descriptor.param_names
        poly = parse_poly(claim["formula"], names=names)
        assignments = {
            len(indices) + i: self.params[name]
            for i, name in enumerate(self.descriptor.param_names)
        }
        formula = poly.partial_evaluate(assignments)
        return ClaimedSpectrum(claim["scheme"], indices, formula, self.dim, claim.get("note"))

    def claimed_curvature(self) -> tuple[str, Fraction | None]:
        claim = self._claim("curvature")
        self._require(claim, "curvature")
        if claim["kind"] == "constant":
            value = _scalar_template(claim["value"], self.descriptor.param_names)(self.params)
            return "constant", value
        return "non-constant", None

    def pullback_name(self) -> str:
        claim = self._claim("pullback")
        self._require(claim, "pullback")
        return claim["name"]

    def __repr__(self) -> str:
        params = ", ".join(f"{k}={v}" for k, v in self.params.items())
        return f"Model({self.name}, {params})" if params else f"Model({self.name})"


class ModelDescriptor:
    """Parsed but not yet instantiated catalog entry."""

    def __init__(self, raw: dict):
        self.raw = raw
        self.name: str = raw["name"]
        self.dim: int = raw["dim"]
        self.compact: bool = raw["compact"]
        self.param_specs = [
            ParamSpec(
                name=p["name"],
                default=parse_rational(p["default"]),
                gt=parse_rational(p["gt"]) if "gt" in p else None,
                ge=parse_rational(p["ge"]) if "ge" in p else None,
                lt=parse_rational(p["lt"]) if "lt" in p else None,
                le=parse_rational(p["le"]) if "le" in p else None,
            )
            for p in raw.get("params", [])
        ]
        self.param_names = [p.name for p in self.param_specs]
        self.factor_templates = [
            Template(text, self.dim, self.param_names) for text in raw["factors"]
        ]
        self.witness = [parse_rational(text) for text in raw["witness"]]
        self.cometric_templates = [
            [Template(text, self.dim, self.param_names) for text in row]
            for row in raw["cometric"]
        ]
        measure = raw["measure"]
        self.measure_templates = [
            (
                Template(factor_text, self.dim, self.param_names),
                _scalar_template(exponent_text, self.param_names),
            )
            for factor_text, exponent_text in measure["factor_exponents"]
        ]
        self.exp_poly_template = (
            Template(measure["exp_poly"], self.dim, self.param_names)
            if measure.get("exp_poly")
            else None
        )
        self.constraints = [
            (_scalar_template(c["expr"], self.param_names), c)
            for c in raw.get("constraints", [])
        ]
        self.box_raw = [(parse_rational(lo), parse_rational(hi)) for lo, hi in raw["box"]]
        self.box_rule = raw.get("box_rule")
        self.sampler_spec = None
        if raw.get("sampler"):
            spec = dict(raw["sampler"])
            self.sampler_spec = spec
        self.claims: dict = raw.get("claims", {})

    @property
    def boundary_degree(self) -> int:
        values = {p.name: p.default for p in self.param_specs}
        return sum(int(t.instantiate(values).total_degree) for t in self.factor_templates)

    def box_for(self, values: Mapping[str, Fraction]) -> list[tuple[Fraction, Fraction]]:
        if self.box_rule == "coaxial":
            a = values["a"]
            xb = max(Fraction(3, 2), 2 / (1 + a))
            yb = max(Fraction(1), (1 - a) / (1 + a))
            return [(-xb, xb), (Fraction(-1), yb)]
        return list(self.box_raw)

    def resolve_params(self, overrides: Mapping[str, Rational | str]) -> dict[str, Fraction]:
        values: dict[str, Fraction] = {}
        unknown = set(overrides) - set(self.param_names)
        if unknown:
            raise ParameterError(
                f"unknown parameter(s) {sorted(unknown)} for model {self.name}; "
                f"valid: {self.param_names}"
            )
        for spec in self.param_specs:
            if spec.name in overrides:
                v = overrides[spec.name]
                value = parse_rational(v) if isinstance(v, str) else Fraction(v)
            else:
                value = spec.default
            spec.check(value)
            values[spec.name] = value
        for evaluate, c in self.constraints:
            result = evaluate(values)
            if "gt" in c and not result > parse_rational(c["gt"]):
                raise ParameterError(f"constraint {c['expr']} > {c['gt']} violated ({result})")
            if "ge" in c and not result >= parse_rational(c["ge"]):
                raise ParameterError(f"constraint {c['expr']} >= {c['ge']} violated ({result})")
        return values

    def instantiate(self, overrides: Mapping[str, Rational | str] | None = None) -> Model:
        return Model(self, self.resolve_params(overrides or {}))


@lru_cache(maxsize=1)
def _registry() -> dict[str, ModelDescriptor]:
    raw = json.loads(
        resources.files("polydiff").joinpath("data/models.json").read_text()
    )
    out: dict[str, ModelDescriptor] = {}
    for entry in raw["models"]:
        descriptor = ModelDescriptor(entry)
        out[descriptor.name] = descriptor
    return out


def model_names() -> list[str]:
    return list(_registry().keys())


def get_descriptor(name: str) -> ModelDescriptor:
    registry = _registry()
    if name not in registry:
        raise CatalogError(f"unknown model {name!r}; see `models list`")
    return registry[name]


def get_model(name: str, params: Mapping[str, Rational | str] | None = None) -> Model:
    return get_descriptor(name).instantiate(params)


@dataclass(frozen=True)
class ModelInfo:
    name: str
    dim: int
    param_names: tuple[str, ...]
    boundary_degree: int
    compact: bool


def list_models() -> list[ModelInfo]:
    """Deterministic metadata table over the whole registry."""
    out = []
    for descriptor in _registry().values():
        out.append(
            ModelInfo(
                name=descriptor.name,
                dim=descriptor.dim,
                param_names=tuple(descriptor.param_names),
                boundary_degree=descriptor.boundary_degree,
                compact=descriptor.compact,
            )
        )
    return out

"""Named constants of the six models and the reference table.

Printed decimals live in config/reference_constants.json as strings. Closed
forms are evaluated here from the special functions; integral-defined
quantities go through quadrature with an escalating evaluation budget.
"""
import json
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

from tenacity import Retrying, before_sleep_log, retry_if_exception, stop_after_attempt

from triangles.errors import ConvergenceError, DomainError, UnknownConstantError
from triangles.models import (
    ANGLE_REGION, M1, M2, M4, M5, M6, OBTUSE_REGIONS,
    Functional, ModelId, Variable, angle_density, side_density, side_region,
    sides_from_coordinates, singular_points, univariate_density,
)
from triangles.quadrature import BOTH, LOWER, UPPER, IntegrationSpec, QuadratureResult, integrate_1d, integrate_2d
from triangles.specfun import ellip_e_comp, ellip_k_comp, gamma_fn, hyp3f2

logger = logging.getLogger(__name__)

REFERENCE_PATH = Path(__file__).resolve().parent.parent / "config" / "reference_constants.json"

PATHS = ("closed_form", "quadrature", "series", "monte_carlo")
EC_PATHS = ("defining_integral", "k_alternate", "f32_series", "gamma_closed")
INVERSE_C_PATHS = ("arctan_integral", "by_parts")

CONSTANT_SPEC = IntegrationSpec(absolute_tolerance=1e-12, relative_tolerance=1e-12)
MOMENT_SPEC = IntegrationSpec(absolute_tolerance=1e-10, relative_tolerance=1e-10)

SQRT2 = math.sqrt(2.0)
SQRT3 = math.sqrt(3.0)
PI = math.pi
LN2 = math.log(2.0)


def _gamma_closed_ec():
    g5, g7 = gamma_fn(5.0 / 8.0), gamma_fn(7.0 / 8.0)
    product = (g5 * g7) ** 2
    return (PI ** 4 + 8.0 * product * product) / (2.0 * PI ** 3 * product)


CLOSED_FORMS = {
    "m1.E_a": lambda: 1.0 / 3.0,
    "m1.E_a2": lambda: 1.0 / 8.0,
    "m1.E_ab": lambda: 5.0 / 48.0,
    "m1.E_alpha": lambda: PI / 3.0,
    "m1.E_alpha2": lambda: 8.0 / 3.0 - PI ** 2 / 9.0,
    "m1.E_alphabeta": lambda: -4.0 / 3.0 + 2.0 * PI ** 2 / 9.0,
    "m1.obtuse": lambda: 9.0 - 12.0 * LN2,
    "m1.acceptance": lambda: 0.25,
    "m2.E_a": lambda: 32.0 * math.sqrt(6.0) / (45.0 * PI),
    "m2.E_a2": lambda: 1.0 / 3.0,
    "m2.E_ab": lambda: (9.0 + SQRT3 * PI) / (9.0 * SQRT3 * PI),
    "m2.E_alpha": lambda: PI / 3.0,
    "m2.E_alpha2": lambda: (PI - SQRT3) * PI / 3.0,
    "m2.E_alphabeta": lambda: SQRT3 * PI / 6.0,
    "m2.obtuse": lambda: 1.0 - 3.0 * SQRT3 / (4.0 * PI),
    "m2.acceptance": lambda: SQRT3 * PI / 9.0,
    "m3.E_a": lambda: 0.5,
    "m3.E_a2": lambda: 1.0 / 3.0,
    "m3.E_c": lambda: PI / 4.0,
    "m3.E_c2": lambda: 2.0 / 3.0,
    "m3.E_ac": lambda: PI / 8.0,
    "m3.E_alpha": lambda: PI / 4.0,
    "m3.obtuse": lambda: 1.5 - 2.0 / PI,
    "m4.E_a": lambda: 2.0 / 3.0,
    "m4.E_a2": lambda: 0.5,
    "m4.E_c": lambda: 2.0 * SQRT2 / 3.0,
    "m4.E_c2": lambda: 1.0,
    "m4.E_alpha": lambda: PI / 4.0,
    "m4.E_alpha2": lambda: 5.0 * PI ** 2 / 48.0 + LN2 ** 2 / 4.0,
    "m4.E_alphabeta": lambda: PI ** 2 / 16.0 - LN2 ** 2 / 4.0,
    "m4.obtuse": lambda: 1.5 - 1.0 / SQRT2,
    "m5.E_a": lambda: 2.0 / PI,
    "m5.E_a2": lambda: 0.5,
    "m5.E_c": _gamma_closed_ec,
    "m5.E_c2": lambda: 1.0,
    "m5.E_alpha": lambda: PI / 4.0,
    "m5.obtuse": lambda: 1.0 - 2.0 / PI ** 2 * math.log(1.0 + SQRT2) ** 2,
}


@dataclass(frozen=True)
class ConstantRecord:
    key: str
    model: ModelId
    reference_value: str
    closed_form: str
    paths: tuple
    citation: str

    @property
    def name(self):
        return self.key.split(".", 1)[1]

    @property
    def reference_float(self):
        return None if self.reference_value is None else float(self.reference_value)

    @property
    def decimal_tolerance(self):
        """One unit in the last printed place, times ten (one guard digit)."""
        if self.reference_value is None:
            return None
        decimals = len(self.reference_value.split(".", 1)[1]) if "." in self.reference_value else 0
        return 10.0 ** -(decimals - 1)

    def expected(self):
        if "closed_form" in self.paths:
            return closed_constant(self.key)
        return self.reference_float

    def to_dict(self):
        return {
            "key": self.key,
            "model": self.model.value if self.model else None,
            "reference_value": self.reference_value,
            "closed_form": self.closed_form,
            "paths": list(self.paths),
            "citation": self.citation,
        }


@lru_cache(maxsize=None)
def _load_table():
    logger.debug(f"Loading reference constants from {REFERENCE_PATH}")
    with open(REFERENCE_PATH, "r") as f:
        raw = json.load(f)
    records = []
    for entry in raw:
        paths = tuple(entry["paths"])
        if not paths or not set(paths) <= set(PATHS):
            raise DomainError(f"record {entry['key']} has invalid paths {paths}")
        records.append(ConstantRecord(
            key=entry["key"],
            model=ModelId.parse(entry["model"]) if entry.get("model") else None,
            reference_value=entry.get("reference_value"),
            closed_form=entry.get("closed_form"),
            paths=paths,
            citation=entry["citation"],
        ))
    return tuple(records)


def reference_table():
    return list(_load_table())


def lookup(key):
    for record in _load_table():
        if record.key == key:
            return record
    raise UnknownConstantError(f"no reference constant named {key!r}")


def export_table_json():
    return json.dumps([record.to_dict() for record in _load_table()], indent=2)


def closed_constant(key):
    record = lookup(key)
    if "closed_form" not in record.paths or key not in CLOSED_FORMS:
        raise UnknownConstantError(f"{key} has no closed form")
    return CLOSED_FORMS[key]()


# -- strict quadrature -------------------------------------------------------

def _budget_bound(error):
    # only a QUADPACK run that used up its subinterval limit gains from a bigger budget
    return isinstance(error, ConvergenceError) and getattr(error, "budget_bound", False)


def _strict(label, compute, spec=CONSTANT_SPEC):
    """Run compute(spec) until it converges, quadrupling the budget while the budget is what ran out."""
    retrying = Retrying(
        stop=stop_after_attempt(3),
        retry=retry_if_exception(_budget_bound),
        before_sleep=before_sleep_log(logger, logging.WARNING),
        reraise=True,
    )
    for attempt in retrying:
        with attempt:
            current = spec.escalated(4 ** (attempt.retry_state.attempt_number - 1))
            result = compute(current)
            if not result.converged:
                error = ConvergenceError(
                    f"{label}: quadrature error {result.error_estimate:.3e} after {result.evaluations} evaluations"
                )
                error.budget_bound = result.budget_exhausted
                raise error
    logger.debug(f"{label} = {result.value!r} (error {result.error_estimate:.2e}, {result.evaluations} evaluations)")
    return result.value


def _elliptic_modulus_parts(t):
    """For w = t sqrt(2 - t^2): (1 + w, complementary modulus of sqrt(2w/(1 + w)))."""
    w = t * math.sqrt(max(0.0, 2.0 - t * t))
    return 1.0 + w, min(1.0, abs((1.0 - t) * (1.0 + t)) / (1.0 + w))


def _ec_defining(spec):
    def integrand(t):
        return t * t * ellip_k_comp(min(1.0, abs((1.0 - t) * (1.0 + t))))
    result = integrate_1d(integrand, 0.0, SQRT2, spec.with_singular(points=(1.0,)))
    return _scaled(result, 4.0 / PI ** 2)


def _ec_k_alternate(spec):
    # s = sin(theta): sqrt(1 - s**2) = cos(theta) cancels, sqrt(1 -+ cos) = sqrt(2) sin, cos of theta/2
    def integrand(theta):
        half = 0.5 * theta
        return SQRT2 * math.sin(theta) * (math.sin(half) + math.cos(half)) * ellip_k_comp(math.cos(theta))
    result = integrate_1d(integrand, 0.0, PI / 2.0, spec.with_singular(UPPER))
    return _scaled(result, 2.0 / PI ** 2)


def _scaled(result, factor):
    return QuadratureResult(result.value * factor, result.error_estimate * abs(factor),
                            result.evaluations, result.converged, result.budget_exhausted)


def ec_m5(path="defining_integral"):
    """Mean of side c under the quarter-circle model along one evaluation path."""
    if path == "defining_integral":
        return _strict("E(c) defining integral", _ec_defining)
    if path == "k_alternate":
        return _strict("E(c) K(s) representation", _ec_k_alternate)
    if path == "f32_series":
        return 4.0 * SQRT2 / (3.0 * PI) * hyp3f2(1.0)
    if path == "gamma_closed":
        return _gamma_closed_ec()
    raise DomainError(f"unknown E(c) path {path!r}; expected one of {EC_PATHS}")


def eac_integral(model):
    """E(ac) for the (a, c) models M4 and M5 from their one-dimensional elliptic representations."""
    model = ModelId.parse(model)
    if model is M4:
        def integrand(t):
            one_plus, kc = _elliptic_modulus_parts(t)
            return t * t * math.sqrt(one_plus) * ellip_e_comp(kc)
        factor = SQRT2 / PI
    elif model is M5:
        def integrand(t):
            one_plus, kc = _elliptic_modulus_parts(t)
            return t * t / math.sqrt(one_plus) * ellip_k_comp(kc)
        factor = 2.0 * SQRT2 / PI ** 2
    else:
        raise DomainError(f"E(ac) integral is defined for m4 and m5, not {model.value}")

    def compute(spec):
        result = integrate_1d(integrand, 0.0, SQRT2, spec.with_singular(points=(1.0,)))
        return _scaled(result, factor)
    return _strict(f"{model.label} E(ac) integral", compute)


@lru_cache(maxsize=None)
def inverse_c_m6(path="arctan_integral"):
    """1/C for the eighth-sphere model from one of its real integral representations."""
    if path == "arctan_integral":
        def compute(spec):
            result = integrate_1d(lambda x: math.atan(x * math.sqrt(1.0 + x * x)) / (1.0 + x * x), 0.0, 1.0, spec)
            return _scaled(result, 2.0)
        return _strict("1/C arctan integral", compute)
    if path == "by_parts":
        def compute(spec):
            def integrand(x):
                x2 = x * x
                return math.atan(x) * (1.0 + 2.0 * x2) / (math.sqrt(1.0 + x2) * (1.0 + x2 + x2 * x2))
            return integrate_1d(integrand, 0.0, 1.0, spec)
        remainder = _strict("1/C integrated by parts", compute)
        return PI / 2.0 * math.atan(SQRT2) - 2.0 * remainder
    raise DomainError(f"unknown 1/C path {path!r}; expected one of {INVERSE_C_PATHS}")


@lru_cache(maxsize=None)
def c_normalizer_m6():
    value = 1.0 / inverse_c_m6("arctan_integral")
    logger.debug(f"C = {value!r}")
    return value


def _delta_radicand(phi):
    s, c = math.sin(phi), math.cos(phi)
    return math.sqrt(max(0.0, 2.0 * s * s - c * c)), s, c


@lru_cache(maxsize=None)
def delta_m6():
    lam = math.acos(math.sqrt(2.0 / 3.0))

    def lower_part(phi):
        root, s, c = _delta_radicand(phi)
        return PI / 4.0 - 2.0 * math.atan((s - root) / (c + s))

    def upper_part(phi):
        root, s, c = _delta_radicand(phi)
        return PI / 4.0 - 2.0 * math.atan((root - s) / (c + s))

    first = _strict("Delta on (lambda, pi/4)",
                    lambda spec: integrate_1d(lower_part, lam, PI / 4.0, spec.with_singular(LOWER)))
    second = _strict("Delta on (pi/4, pi/2)",
                     lambda spec: integrate_1d(upper_part, PI / 4.0, PI / 2.0, spec))
    return 8.0 / PI ** 2 * (first + second)


@lru_cache(maxsize=None)
def obtuse_m6():
    """Obtuse probability of an eighth-sphere triangle, given that one forms."""
    def integrand(phi):
        return PI / 4.0 - math.acos(min(1.0, 1.0 / (SQRT2 * math.sin(phi))))

    integral = _strict("M6 acute window integral",
                       lambda spec: integrate_1d(integrand, PI / 4.0, PI / 2.0, spec.with_singular(LOWER)))
    return 1.0 - 8.0 / (delta_m6() * PI ** 2) * integral


# -- quadrature paths for the table -----------------------------------------

_ONE_D = {
    Functional.A: (Variable.SIDE_A, lambda x: x),
    Functional.A2: (Variable.SIDE_A, lambda x: x * x),
    Functional.C: (Variable.SIDE_C, lambda x: x),
    Functional.C2: (Variable.SIDE_C, lambda x: x * x),
    Functional.ALPHA: (Variable.ANGLE_ALPHA, lambda x: x),
    Functional.ALPHA2: (Variable.ANGLE_ALPHA, lambda x: x * x),
}

_UPPER_BOUNDS = {
    (M1, Variable.SIDE_A): 0.5,
    (M2, Variable.SIDE_A): math.sqrt(2.0 / 3.0),
    (M6, Variable.SIDE_A): math.sqrt(2.0 / 3.0),
    (M4, Variable.SIDE_C): SQRT2,
    (M5, Variable.SIDE_C): SQRT2,
}


def quadrature_moment(model, functional, spec=MOMENT_SPEC):
    """Expectation of a moment functional by quadrature of the model's densities.

    Single-variable functionals integrate the univariate density where a
    formula exists; products and the eighth-sphere angle moments integrate
    the bivariate density.
    """
    model = ModelId.parse(model)
    functional = Functional.parse(functional)
    one_d = _ONE_D.get(functional)
    if one_d and not (model is M6 and one_d[0] is Variable.ANGLE_ALPHA):
        variable, weight = one_d
        upper = PI if variable.is_angle else _UPPER_BOUNDS.get((model, variable), 1.0)
        points = singular_points(model, variable)
        return integrate_1d(lambda x: weight(x) * univariate_density(model, variable, x), 0.0, upper,
                            spec.with_singular(*BOTH, points=points))

    if functional in (Functional.ALPHA, Functional.ALPHA2, Functional.ALPHABETA):
        def integrand(alpha, beta):
            return functional.evaluate(0.0, 0.0, 0.0, alpha, beta) * angle_density(model, alpha, beta)
        return integrate_2d(integrand, ANGLE_REGION, spec)

    def integrand(x, y):
        a, b, c = sides_from_coordinates(model, x, y)
        return functional.evaluate(a, b, c, 0.0, 0.0) * side_density(model, x, y)
    return integrate_2d(integrand, side_region(model), spec)


def quadrature_obtuse(model, spec=MOMENT_SPEC):
    """Angle-density mass of {alpha > pi/2} + {beta > pi/2} + {alpha + beta < pi/2}."""
    model = ModelId.parse(model)
    parts = [integrate_2d(lambda x, y: angle_density(model, x, y), region, spec) for region in OBTUSE_REGIONS]
    return QuadratureResult(
        value=math.fsum(p.value for p in parts),
        error_estimate=math.fsum(p.error_estimate for p in parts),
        evaluations=sum(p.evaluations for p in parts),
        converged=all(p.converged for p in parts),
        budget_exhausted=any(p.budget_exhausted for p in parts),
    )


def quadrature_acceptance(model, spec=MOMENT_SPEC):
    """Acceptance probability from the latent-space area of the side support."""
    model = ModelId.parse(model)
    if model is M1:
        # Two orderings of the break points map onto each side pair.
        return _scaled(integrate_2d(lambda x, y: 1.0, side_region(M1), spec), 2.0)
    if model is M2:
        # Squared pieces have density 2 on the latent simplex; dp1 dp2 = 4ab da db.
        return _scaled(integrate_2d(lambda x, y: x * y, side_region(M2), spec), 8.0)
    if model is M6:
        return QuadratureResult(delta_m6(), 0.0, 1, True)
    return QuadratureResult(1.0, 0.0, 1, True)


def quadrature_value(key, spec=MOMENT_SPEC):
    """Value of a table record along its quadrature path."""
    record = lookup(key)
    if "quadrature" not in record.paths:
        raise UnknownConstantError(f"{key} has no quadrature path")
    model, name = record.model, record.name
    if name == "inv_C":
        return inverse_c_m6("arctan_integral")
    if name == "acceptance":
        return delta_m6() if model is M6 else _strict(key, lambda s: quadrature_acceptance(model, s), spec)
    if name == "obtuse":
        return obtuse_m6() if model is M6 else _strict(key, lambda s: quadrature_obtuse(model, s), spec)
    functional = Functional.parse(name[2:])
    if functional is Functional.AC and model in (M4, M5):
        return eac_integral(model)
    if model is M5 and functional is Functional.C:
        return ec_m5("defining_integral")
    result = quadrature_moment(model, functional, spec)
    if not result.converged:
        logger.warning(f"{key}: quadrature error estimate {result.error_estimate:.3e} above tolerance")
    return result.value


def normalization(model, kind, spec=MOMENT_SPEC):
    model = ModelId.parse(model)
    if kind == "side":
        return integrate_2d(lambda x, y: side_density(model, x, y), side_region(model), spec)
    if kind == "angle":
        return integrate_2d(lambda x, y: angle_density(model, x, y), ANGLE_REGION, spec)
    raise DomainError(f"unknown density kind {kind!r}")

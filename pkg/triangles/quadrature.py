"""Adaptive 1D and iterated 2D quadrature on top of QUADPACK.

Endpoints flagged as singular are removed with the substitution
x = e +/- w*s**2 before the adaptive Gauss-Kronrod rule sees them: an
inverse square-root wall becomes a bounded integrand and a logarithmic one
becomes s*log(s). Interior split points are treated as singular on both
sides.
"""
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable

from scipy import integrate

from triangles.errors import DomainError, IntegrandError

logger = logging.getLogger(__name__)

LOWER = "lower"
UPPER = "upper"
BOTH = frozenset({LOWER, UPPER})

# QUADPACK subinterval limit per piece: one per thousand evaluations of budget.
_BUDGET_PER_SUBINTERVAL = 1000
_MIN_RELATIVE = 1e-13


@dataclass(frozen=True)
class IntegrationSpec:
    absolute_tolerance: float = 1e-10
    relative_tolerance: float = 1e-10
    max_evaluations: int = 10_000_000
    singular_endpoints: frozenset = frozenset()
    points: tuple = ()

    def __post_init__(self):
        if not (self.absolute_tolerance > 0 and self.relative_tolerance > 0):
            raise DomainError("integration tolerances must be positive")
        if self.max_evaluations < 100:
            raise DomainError(f"max_evaluations must be at least 100, got {self.max_evaluations}")
        ends = frozenset(self.singular_endpoints)
        if not ends <= BOTH:
            raise DomainError(f"singular_endpoints must be a subset of {sorted(BOTH)}, got {sorted(ends)}")
        object.__setattr__(self, "singular_endpoints", ends)
        object.__setattr__(self, "points", tuple(float(p) for p in self.points))

    def with_singular(self, *ends, points=()):
        return replace(self, singular_endpoints=frozenset(ends), points=tuple(points))

    def tightened(self, factor):
        return replace(
            self,
            absolute_tolerance=self.absolute_tolerance * factor,
            relative_tolerance=self.relative_tolerance * factor,
        )

    def escalated(self, factor):
        return replace(self, max_evaluations=int(self.max_evaluations * factor))


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error_estimate: float
    evaluations: int
    converged: bool
    budget_exhausted: bool = False


def _checked(f):
    def wrapped(x):
        value = f(x)
        if not math.isfinite(value):
            raise IntegrandError(x, value)
        return value
    return wrapped


def _pieces(lower, upper, spec):
    """Split [lower, upper] at the interior points; yield (a, b, lower_singular, upper_singular)."""
    inner = sorted({p for p in spec.points if lower < p < upper})
    knots = [lower, *inner, upper]
    for i, (a, b) in enumerate(zip(knots, knots[1:])):
        a_singular = i > 0 or LOWER in spec.singular_endpoints
        b_singular = i < len(knots) - 2 or UPPER in spec.singular_endpoints
        if a_singular and b_singular:
            middle = a + (b - a) / 2.0
            yield a, middle, True, False
            yield middle, b, False, True
        else:
            yield a, b, a_singular, b_singular


def _substituted(f, a, b, a_singular, b_singular):
    width = b - a
    if a_singular:
        def g(s):
            x = a + width * s * s
            if x <= a:
                return 0.0
            return 2.0 * width * s * f(x)
        return g, 0.0, 1.0
    if b_singular:
        def g(s):
            x = b - width * s * s
            if x >= b:
                return 0.0
            return 2.0 * width * s * f(x)
        return g, 0.0, 1.0
    return f, a, b


def integrate_1d(f: Callable[[float], float], lower, upper, spec: IntegrationSpec = None) -> QuadratureResult:
    """Integrate f over [lower, upper]."""
    spec = spec or IntegrationSpec()
    lower, upper = float(lower), float(upper)
    if not (math.isfinite(lower) and math.isfinite(upper)) or not lower < upper:
        raise DomainError(f"integration limits must be finite with lower < upper, got ({lower}, {upper})")

    pieces = list(_pieces(lower, upper, spec))
    limit = max(50, spec.max_evaluations // _BUDGET_PER_SUBINTERVAL)
    epsabs = spec.absolute_tolerance / len(pieces)
    epsrel = max(spec.relative_tolerance, _MIN_RELATIVE)
    checked = _checked(f)

    values, errors, magnitudes = [], [], []
    evaluations = 0
    all_ok = True
    exhausted = False
    for a, b, a_singular, b_singular in pieces:
        g, s0, s1 = _substituted(checked, a, b, a_singular, b_singular)
        out = integrate.quad(g, s0, s1, epsabs=epsabs, epsrel=epsrel, limit=limit, full_output=1)
        value, error, info = out[0], out[1], out[2]
        evaluations += int(info["neval"])
        if len(out) > 3 and int(info["last"]) >= limit:
            exhausted = True
        if len(out) > 3 and error > max(epsabs, epsrel * abs(value)):
            all_ok = False
            logger.debug(f"QUADPACK on [{a}, {b}]: {out[3]} (value {value}, error {error:.3e})")
        values.append(value)
        errors.append(error)
        magnitudes.append(abs(value))

    value = math.fsum(values)
    error = math.fsum(errors)
    tolerance = max(spec.absolute_tolerance, spec.relative_tolerance * math.fsum(magnitudes))
    converged = all_ok and error <= tolerance
    if not converged:
        logger.debug(f"integrate_1d on [{lower}, {upper}] not converged: error {error:.3e} > {tolerance:.3e}")
    return QuadratureResult(value, error, evaluations, converged, exhausted and not converged)


@dataclass(frozen=True)
class Region:
    """Region {x_lower < x < x_upper, y_lower(x) < y < y_upper(x)} with exact inner limits."""

    x_lower: float
    x_upper: float
    y_lower: Callable[[float], float]
    y_upper: Callable[[float], float]
    x_points: tuple = ()
    x_singular: frozenset = frozenset()
    y_singular: frozenset = frozenset()
    name: str = field(default="region", compare=False)

    @classmethod
    def rectangle(cls, x_lower, x_upper, y_lower, y_upper, **kwargs):
        return cls(x_lower, x_upper, lambda x: y_lower, lambda x: y_upper, **kwargs)

    def y_bounds(self, x):
        return self.y_lower(x), self.y_upper(x)

    def inside(self, x, y):
        if not self.x_lower < x < self.x_upper:
            return False
        lo, hi = self.y_bounds(x)
        return lo < y < hi

    @property
    def bounding_box(self):
        """(x_lower, x_upper, y_min, y_max), with the y-range sampled on a fine grid."""
        steps = 512
        lows, highs = [], []
        for i in range(1, steps):
            x = self.x_lower + (self.x_upper - self.x_lower) * i / steps
            lo, hi = self.y_bounds(x)
            lows.append(lo)
            highs.append(hi)
        return self.x_lower, self.x_upper, min(lows), max(highs)


def integrate_2d(f: Callable[[float, float], float], region: Region, spec: IntegrationSpec = None) -> QuadratureResult:
    """Iterated integral of f(x, y) over region, inner variable y."""
    spec = spec or IntegrationSpec()
    inner_spec = replace(spec.tightened(0.1), singular_endpoints=region.y_singular, points=())
    outer_spec = replace(spec, singular_endpoints=region.x_singular, points=region.x_points)
    tally = {"evaluations": 0, "failures": 0, "exhausted": False, "worst_error": 0.0, "worst_relative": 0.0}

    def inner(x):
        lo, hi = region.y_bounds(x)
        if not hi > lo:
            return 0.0
        result = integrate_1d(lambda y: f(x, y), lo, hi, inner_spec)
        tally["evaluations"] += result.evaluations
        tally["worst_error"] = max(tally["worst_error"], result.error_estimate)
        if result.value != 0.0:
            tally["worst_relative"] = max(tally["worst_relative"], result.error_estimate / abs(result.value))
        if not result.converged:
            tally["failures"] += 1
            tally["exhausted"] = tally["exhausted"] or result.budget_exhausted
        return result.value

    outer = integrate_1d(inner, region.x_lower, region.x_upper, outer_spec)
    # inner errors add at most worst absolute error times the x-width, or worst relative error times the value
    inner_error = min(tally["worst_error"] * (region.x_upper - region.x_lower),
                      tally["worst_relative"] * abs(outer.value))
    error = outer.error_estimate + inner_error
    tolerance = max(spec.absolute_tolerance, spec.relative_tolerance * abs(outer.value))
    converged = error <= tolerance
    if tally["failures"]:
        logger.debug(f"integrate_2d over {region.name}: {tally['failures']} inner integrals missed the inner "
                     f"tolerance (combined error {error:.3e}, tolerance {tolerance:.3e})")
    if not converged:
        logger.warning(f"integrate_2d over {region.name} not converged: error {error:.3e} > {tolerance:.3e}")
    return QuadratureResult(
        value=outer.value,
        error_estimate=error,
        evaluations=outer.evaluations + tally["evaluations"],
        converged=converged,
        budget_exhausted=not converged and (outer.budget_exhausted or tally["exhausted"]),
    )

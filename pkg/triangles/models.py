"""The six constrained random-triangle models.

Density coordinates: M1, M2 and M6 use the side pair (a, b); M3, M4 and M5
use (a, c). Angle densities are always over (alpha, beta) on the simplex
alpha, beta > 0, alpha + beta < pi. Sides stay in each model's own unit, so
M3-M5 triangles do not have perimeter one.
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from triangles.errors import DomainError, SamplingError
from triangles.quadrature import BOTH, UPPER, IntegrationSpec, Region, integrate_1d
from triangles.specfun import ellip_f_incomplete, ellip_k_comp

logger = logging.getLogger(__name__)

MAX_REJECTION_TRIALS = 10_000

SQRT2 = math.sqrt(2.0)
SQRT3 = math.sqrt(3.0)
SQRT_HALF = math.sqrt(0.5)
SQRT_TWO_THIRDS = math.sqrt(2.0 / 3.0)


class ModelId(str, Enum):
    M1_PERIMETER = "m1"
    M2_QUADRATIC_STICK = "m2"
    M3_TWO_PIECE = "m3"
    M4_QUADRATIC_TWO_PIECE = "m4"
    M5_QUARTER_CIRCLE = "m5"
    M6_EIGHTH_SPHERE = "m6"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        text = str(value).strip()
        for model in cls:
            if text.lower() == model.value or text.upper() == model.name:
                return model
        raise DomainError(f"unknown model {value!r}; expected one of {[m.value for m in cls]}")

    @property
    def label(self):
        return self.value.upper()


M1, M2, M3, M4, M5, M6 = ModelId

# Models whose densities are written over (a, b); the rest use (a, c).
AB_MODELS = frozenset({M1, M2, M6})
UNIFORM_GAMMA_MODELS = frozenset({M3, M4, M5})


class Variable(str, Enum):
    SIDE_A = "side_a"
    SIDE_B = "side_b"
    SIDE_C = "side_c"
    ANGLE_ALPHA = "angle_alpha"
    ANGLE_BETA = "angle_beta"
    ANGLE_GAMMA = "angle_gamma"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        text = str(value).strip().lower()
        aliases = {"a": "side_a", "b": "side_b", "c": "side_c",
                   "alpha": "angle_alpha", "beta": "angle_beta", "gamma": "angle_gamma"}
        text = aliases.get(text, text)
        try:
            return cls(text)
        except ValueError:
            raise DomainError(f"unknown variable {value!r}") from None

    @property
    def is_angle(self):
        return self.value.startswith("angle")


class Functional(str, Enum):
    A = "a"
    A2 = "a2"
    AB = "ab"
    C = "c"
    C2 = "c2"
    AC = "ac"
    ALPHA = "alpha"
    ALPHA2 = "alpha2"
    ALPHABETA = "alphabeta"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        text = str(value).strip().lower().replace("²", "2").replace("α", "alpha").replace("β", "beta")
        try:
            return cls(text)
        except ValueError:
            raise DomainError(f"unknown functional {value!r}") from None

    def evaluate(self, a, b, c, alpha, beta):
        return {
            Functional.A: lambda: a,
            Functional.A2: lambda: a * a,
            Functional.AB: lambda: a * b,
            Functional.C: lambda: c,
            Functional.C2: lambda: c * c,
            Functional.AC: lambda: a * c,
            Functional.ALPHA: lambda: alpha,
            Functional.ALPHA2: lambda: alpha * alpha,
            Functional.ALPHABETA: lambda: alpha * beta,
        }[self]()


_ANGLE_FUNCTIONALS = (Functional.ALPHA, Functional.ALPHA2, Functional.ALPHABETA)
MODEL_FUNCTIONALS = {
    model: ((Functional.A, Functional.A2, Functional.AB) if model in AB_MODELS
            else (Functional.A, Functional.A2, Functional.C, Functional.C2, Functional.AC)) + _ANGLE_FUNCTIONALS
    for model in ModelId
}


@dataclass(frozen=True)
class TriangleSample:
    a: float
    b: float
    c: float
    alpha: float
    beta: float
    gamma: float


@dataclass(frozen=True)
class LatentDraw:
    model: ModelId
    u1: float
    u2: float

    def __post_init__(self):
        if not (0.0 < self.u1 < 1.0 and 0.0 < self.u2 < 1.0):
            raise DomainError(f"latent uniforms must lie in (0, 1), got ({self.u1}, {self.u2})")


@dataclass(frozen=True)
class TriangleBatch:
    """Column arrays of accepted triangles."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray

    def __len__(self):
        return len(self.a)

    def column(self, variable):
        return getattr(self, Variable.parse(variable).value.split("_", 1)[1])

    def functional(self, functional):
        return Functional.parse(functional).evaluate(self.a, self.b, self.c, self.alpha, self.beta)

    def obtuse(self):
        return np.maximum(np.maximum(self.alpha, self.beta), self.gamma) > math.pi / 2

    def samples(self):
        for row in zip(self.a, self.b, self.c, self.alpha, self.beta, self.gamma):
            yield TriangleSample(*(float(v) for v in row))

    @classmethod
    def concatenate(cls, batches):
        batches = list(batches)
        if not batches:
            empty = np.empty(0)
            return cls(empty, empty, empty, empty, empty, empty)
        return cls(*(np.concatenate([getattr(b, name) for b in batches])
                     for name in ("a", "b", "c", "alpha", "beta", "gamma")))


# -- sides and angles --------------------------------------------------------

def angles_from_sides_batch(a, b, c):
    """Angles opposite a, b, c from the half-angle tangent formula on sorted sides.

    Returns (alpha, beta, gamma, valid); valid is False where the strict
    triangle inequality fails.
    """
    sides = np.stack([np.asarray(a, float), np.asarray(b, float), np.asarray(c, float)], axis=-1)
    order = np.argsort(-sides, axis=-1, kind="stable")
    x, y, z = np.moveaxis(np.take_along_axis(sides, order, axis=-1), -1, 0)

    sx = (z - (x - y)) / 2.0
    sy = (z + (x - y)) / 2.0
    sz = (x + (y - z)) / 2.0
    s = (x + (y + z)) / 2.0
    valid = (z > 0.0) & (sx > 0.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        sx_safe = np.where(valid, sx, 1.0)
        angle_x = 2.0 * np.arctan2(np.sqrt(sy * sz), np.sqrt(s * sx_safe))
        angle_y = 2.0 * np.arctan2(np.sqrt(sx_safe * sz), np.sqrt(s * sy))
        angle_z = 2.0 * np.arctan2(np.sqrt(sx_safe * sy), np.sqrt(s * sz))

    angles = np.empty_like(sides)
    np.put_along_axis(angles, order, np.stack([angle_x, angle_y, angle_z], axis=-1), axis=-1)
    return angles[..., 0], angles[..., 1], angles[..., 2], valid


def angles_from_sides(a, b, c):
    """Angles (alpha, beta, gamma) opposite sides a, b, c."""
    values = [float(v) for v in (a, b, c)]
    if not all(math.isfinite(v) and v > 0.0 for v in values):
        raise DomainError(f"sides must be positive and finite, got {tuple(values)}")
    alpha, beta, gamma, valid = angles_from_sides_batch(*(np.array([v]) for v in values))
    if not valid[0]:
        raise DomainError(f"sides {tuple(values)} violate the strict triangle inequality")
    return float(alpha[0]), float(beta[0]), float(gamma[0])


def _third_side(a, b, gamma):
    # c**2 = (a - b)**2 + 4ab sin(gamma/2)**2 avoids the cancellation in a**2 + b**2 - 2ab cos(gamma).
    half = np.sin(gamma / 2.0)
    return np.sqrt((a - b) ** 2 + 4.0 * a * b * half * half)


def _latent_sides(model, u1, u2):
    u1 = np.asarray(u1, float)
    u2 = np.asarray(u2, float)
    if model in (M1, M2):
        lo, hi = np.minimum(u1, u2), np.maximum(u1, u2)
        pieces = (lo, hi - lo, 1.0 - hi)
        if model is M1:
            return pieces
        return tuple(np.sqrt(p) for p in pieces)
    if model is M6:
        phi = math.pi / 2 * u1
        psi = math.pi / 2 * u2
        return np.sin(phi) * np.cos(psi), np.sin(phi) * np.sin(psi), np.cos(phi)

    gamma = math.pi * u2
    if model is M3:
        a, b = u1, 1.0 - u1
    elif model is M4:
        a, b = np.sqrt(u1), np.sqrt(1.0 - u1)
    else:
        theta = math.pi / 2 * u1
        a, b = np.cos(theta), np.sin(theta)
    return a, b, _third_side(a, b, gamma)


def realize_batch(model, u1, u2):
    """Turn latent uniforms into triangles.

    Returns (batch, accepted) where batch holds the accepted triangles in draw
    order and accepted is the boolean mask over the draws.
    """
    model = ModelId.parse(model)
    a, b, c = _latent_sides(model, u1, u2)
    alpha, beta, gamma, accepted = angles_from_sides_batch(a, b, c)
    if model is M1:
        accepted &= (np.maximum(np.maximum(a, b), c) < 0.5)
    batch = TriangleBatch(a[accepted], b[accepted], c[accepted],
                          alpha[accepted], beta[accepted], gamma[accepted])
    return batch, accepted


def realize(model, latent):
    """Triangle for one latent draw, or None when the draw is rejected."""
    model = ModelId.parse(model)
    if latent.model is not model:
        raise DomainError(f"latent draw belongs to {latent.model.value}, not {model.value}")
    batch, accepted = realize_batch(model, np.array([latent.u1]), np.array([latent.u2]))
    if not accepted[0]:
        return None
    return next(batch.samples())


def sample(model, rng):
    """First accepted triangle drawn with rng (a numpy Generator)."""
    model = ModelId.parse(model)
    for _ in range(MAX_REJECTION_TRIALS):
        u1, u2 = rng.random(), rng.random()
        if u1 == 0.0 or u2 == 0.0:
            continue
        triangle = realize(model, LatentDraw(model, u1, u2))
        if triangle is not None:
            return triangle
    raise SamplingError(f"{model.label}: no triangle accepted in {MAX_REJECTION_TRIALS} trials")


def _check_simplex(alpha, beta):
    alpha, beta = float(alpha), float(beta)
    if not (math.isfinite(alpha) and math.isfinite(beta) and alpha > 0.0 and beta > 0.0
            and alpha + beta < math.pi):
        raise DomainError(f"angles ({alpha}, {beta}) lie outside the simplex")
    return alpha, beta


def sides_from_angles(model, alpha, beta):
    """The triangle with angles alpha, beta lying on the model's constraint surface."""
    model = ModelId.parse(model)
    alpha, beta = _check_simplex(alpha, beta)
    sa, sb, sab = math.sin(alpha), math.sin(beta), math.sin(alpha + beta)
    if model is M1:
        scale = sa + sb + sab
    elif model in (M2, M6):
        scale = math.sqrt(sa * sa + sb * sb + sab * sab)
    elif model is M3:
        scale = sa + sb
    else:
        scale = math.hypot(sa, sb)
    return sa / scale, sb / scale, sab / scale


def sides_from_coordinates(model, x, y):
    """(a, b, c) behind the density coordinates (x, y) of a model."""
    model = ModelId.parse(model)
    if model is M1:
        return x, y, 1.0 - x - y
    if model in (M2, M6):
        return x, y, math.sqrt(max(0.0, 1.0 - x * x - y * y))
    if model is M3:
        return x, 1.0 - x, y
    return x, _circle_leg(x), y


def _circle_leg(x):
    # b on the unit circle a**2 + b**2 = 1
    return math.sqrt(max(0.0, (1.0 - x) * (1.0 + x)))


def is_obtuse(sample):
    return max(sample.alpha, sample.beta, sample.gamma) > math.pi / 2


# -- supports and regions ----------------------------------------------------

def side_support(model, x, y):
    """True iff (x, y) lies strictly inside the model's side support."""
    model = ModelId.parse(model)
    if not (math.isfinite(x) and math.isfinite(y)):
        return False
    if model is M1:
        return 0.0 < x < 0.5 and 0.0 < y < 0.5 and x + y > 0.5
    if model in (M2, M6):
        if not (x > 0.0 and y > 0.0 and x * x + y * y < 1.0):
            return False
        c = math.sqrt(1.0 - x * x - y * y)
        return abs(x - y) < c < x + y
    if model is M3:
        return 0.0 < x < 1.0 and abs(2.0 * x - 1.0) < y < 1.0
    if not 0.0 < x < 1.0:
        return False
    b = _circle_leg(x)
    return abs(x - b) < y < x + b


def _quadratic_stick_radius(x):
    return math.sqrt(max(0.0, 2.0 - 3.0 * x * x))


def side_region(model):
    """Exact integration region of the side density in the model's coordinates."""
    model = ModelId.parse(model)
    name = f"{model.label} side support"
    if model is M1:
        return Region(0.0, 0.5, lambda x: 0.5 - x, lambda x: 0.5, name=name)
    if model in (M2, M6):
        return Region(
            0.0, SQRT_TWO_THIRDS,
            lambda x: abs(x - _quadratic_stick_radius(x)) / 2.0,
            lambda x: (x + _quadratic_stick_radius(x)) / 2.0,
            x_points=(SQRT_HALF,),
            y_singular=BOTH if model is M6 else frozenset(),
            name=name,
        )
    if model is M3:
        return Region(0.0, 1.0, lambda x: abs(2.0 * x - 1.0), lambda x: 1.0,
                      x_points=(0.5,), y_singular=BOTH, name=name)
    return Region(
        0.0, 1.0,
        lambda x: abs(x - _circle_leg(x)),
        lambda x: x + _circle_leg(x),
        x_points=(SQRT_HALF,),
        x_singular=frozenset({UPPER}) if model is M5 else frozenset(),
        y_singular=BOTH,
        name=name,
    )


ANGLE_REGION = Region(0.0, math.pi, lambda x: 0.0, lambda x: math.pi - x,
                      x_singular=BOTH, y_singular=BOTH, name="angle simplex")

OBTUSE_REGIONS = (
    Region(math.pi / 2, math.pi, lambda x: 0.0, lambda x: math.pi - x,
           x_singular=BOTH, y_singular=BOTH, name="alpha obtuse"),
    Region(0.0, math.pi / 2, lambda x: math.pi / 2, lambda x: math.pi - x,
           x_singular=BOTH, y_singular=BOTH, name="beta obtuse"),
    Region(0.0, math.pi / 2, lambda x: 0.0, lambda x: math.pi / 2 - x,
           x_singular=BOTH, y_singular=BOTH, name="gamma obtuse"),
)


def side_c_bounds(model, c):
    """Range of side a for a fixed side c in the (a, c) models."""
    model = ModelId.parse(model)
    if model is M3:
        return (1.0 - c) / 2.0, (1.0 + c) / 2.0
    if model in (M4, M5):
        q = abs((1.0 - c) * (1.0 + c))
        w = math.sqrt(max(0.0, (1.0 - q) * (1.0 + q)))
        return q / math.sqrt(2.0 * (1.0 + w)), math.sqrt((1.0 + w) / 2.0)
    raise DomainError(f"{model.label} densities are not written over side c")


def variable_support(model, variable):
    """Analytic range of a side or angle variable."""
    model = ModelId.parse(model)
    variable = Variable.parse(variable)
    if variable.is_angle:
        return 0.0, math.pi
    if model is M1:
        return 0.0, 0.5
    if model in (M2, M6):
        return 0.0, SQRT_TWO_THIRDS
    if variable is Variable.SIDE_C and model in (M4, M5):
        return 0.0, SQRT2
    return 0.0, 1.0


def singular_points(model, variable):
    """Interior abscissae where a univariate density is singular or kinked."""
    model = ModelId.parse(model)
    variable = Variable.parse(variable)
    if model is M5 and variable is Variable.SIDE_C:
        return (1.0,)
    if model in (M2, M6) and variable in (Variable.SIDE_A, Variable.SIDE_B):
        return (SQRT_HALF,)
    return ()


# -- bivariate densities -----------------------------------------------------

def _c_normalizer():
    from triangles import constants
    return constants.c_normalizer_m6()


def _wall(lo, hi, y):
    # (y - lo)(y + lo) form of y**2 - lo**2 for the walls of the inner support.
    return (y - lo) * (y + lo), (hi - y) * (hi + y)


def side_density(model, x, y):
    """Bivariate side density at (x, y); zero outside the support."""
    model = ModelId.parse(model)
    if not side_support(model, x, y):
        return 0.0
    if model is M1:
        return 8.0
    if model is M2:
        return 24.0 * SQRT3 / math.pi * x * y
    if model is M6:
        return _c_normalizer() / (math.hypot(x, y) * math.sqrt((1.0 - x * x) - y * y))
    if model is M3:
        lower, _ = _wall(abs(2.0 * x - 1.0), 1.0, y)
        return 2.0 / math.pi * y / (math.sqrt((1.0 - y) * (1.0 + y)) * math.sqrt(lower))
    b = _circle_leg(x)
    lower, upper = _wall(abs(x - b), x + b, y)
    radicand = lower * upper
    if radicand <= 0.0 or b <= 0.0:
        return 0.0
    if model is M4:
        return 4.0 / math.pi * x * y / math.sqrt(radicand)
    return 4.0 / math.pi ** 2 * y / (b * math.sqrt(radicand))


def _in_simplex(x, y):
    return math.isfinite(x) and math.isfinite(y) and x > 0.0 and y > 0.0 and x + y < math.pi


def angle_density(model, x, y):
    """Bivariate density of (alpha, beta) = (x, y); zero off the simplex."""
    model = ModelId.parse(model)
    if not _in_simplex(x, y):
        return 0.0
    sx, sy, sxy = math.sin(x), math.sin(y), math.sin(x + y)
    if model is M1:
        return 8.0 * sx * sy * sxy / (sx + sy + sxy) ** 3
    if model is M2:
        squares = sx * sx + sy * sy + sxy * sxy
        return 24.0 * SQRT3 / math.pi * (sx * sy * sxy) ** 2 / squares ** 3
    if model is M3:
        return sxy / (math.pi * (sx + sy) ** 2)
    if model is M4:
        return 2.0 / math.pi * sx * sy * sxy / (sx * sx + sy * sy) ** 2
    if model is M5:
        return 2.0 / math.pi ** 2 * sxy / (sx * sx + sy * sy)
    pair = sx * sx + sy * sy
    return _c_normalizer() * sx * sy * sxy / ((pair + sxy * sxy) * math.sqrt(pair))


# -- univariate densities ----------------------------------------------------

def _signed_omega(a):
    root = math.sqrt(max(0.0, 2.0 - 3.0 * a * a))
    top = a + root
    ratio = top / (math.sqrt((1.0 - a) * (1.0 + a)) * math.sqrt(4.0 * a * a + top * top))
    return math.asin(max(-1.0, min(1.0, ratio)))


def omega(a):
    """Amplitude omega(a) of the incomplete integrals in the eighth-sphere side density."""
    a = float(a)
    if not (math.isfinite(a) and 0.0 < a < SQRT_TWO_THIRDS):
        raise DomainError(f"omega needs 0 < a < sqrt(2/3), got {a!r}")
    return _signed_omega(a)


def _m1_angle(alpha):
    half_cos = math.sin((math.pi - alpha) / 2.0)
    half_sin = math.sin(alpha / 2.0)
    if half_cos < 0.5:
        # Exact expansion in cos(alpha/2); the closed form cancels near alpha = pi.
        c2 = half_cos * half_cos
        terms = []
        power = half_cos
        n = 2
        while True:
            term = (n - 1) / (n * (n + 1)) * power
            terms.append(term)
            if term < 1e-18 * terms[0]:
                break
            n += 1
            power *= c2
        return 2.0 * half_sin * math.fsum(terms)
    cos_a, sin_a = math.cos(alpha), math.sin(alpha)
    one_plus = 2.0 * half_cos * half_cos
    return (-8.0 * (3.0 - cos_a) * sin_a / one_plus ** 3 * math.log(half_sin)
            - 8.0 * sin_a / one_plus ** 2)


def _m2_angle(alpha):
    cos_a, sin_a = math.cos(alpha), math.sin(alpha)
    base = 4.0 - cos_a * cos_a
    return (6.0 * SQRT3 / math.pi * (2.0 + cos_a * cos_a) * sin_a / base ** 2.5
            * (math.pi / 2 + math.asin(cos_a / 2.0))
            + 9.0 * SQRT3 / math.pi * cos_a * sin_a / base ** 2)


def _m3_angle(alpha):
    cos_a = math.cos(alpha)
    if abs(cos_a) < 0.25:
        # Exact expansion (1/pi) sum cos**n/(n + 2) around the removable 0/0 at alpha = pi/2.
        terms = []
        power = 1.0
        n = 0
        while True:
            term = power / (n + 2)
            terms.append(term)
            if abs(term) < 1e-18:
                break
            n += 1
            power *= cos_a
        return math.fsum(terms) / math.pi
    log_term = 2.0 * math.log(math.sin(alpha / 2.0)) + math.log(2.0)
    return -(log_term / (cos_a * cos_a) + 1.0 / cos_a) / math.pi


def _m4_angle(alpha):
    cos_a = math.cos(alpha)
    base = 2.0 - cos_a * cos_a
    return (cos_a / base ** 1.5 * (math.pi / 2 + math.asin(cos_a / SQRT2)) + 1.0 / base) / math.pi


def _m5_angle(alpha):
    cos_a = math.cos(alpha)
    root = math.sqrt(2.0 - cos_a * cos_a)
    one_minus = 2.0 * math.sin(alpha / 2.0) ** 2
    log_ratio = 2.0 * math.log((2.0 - cos_a + root) / (SQRT2 * one_minus))
    return 1.0 / (2.0 * math.pi) + cos_a / root * log_ratio / math.pi ** 2


def _m6_side(a):
    kc = a
    k = math.sqrt((1.0 - a) * (1.0 + a))
    upper = _signed_omega(a)
    lower = abs(_signed_omega(-a))
    return _c_normalizer() * (ellip_f_incomplete(upper, k, kc=kc) - ellip_f_incomplete(lower, k, kc=kc))


def _marginal_spec():
    return IntegrationSpec(absolute_tolerance=1e-12, relative_tolerance=1e-12, singular_endpoints=BOTH)


def _m6_angle(alpha):
    result = integrate_1d(lambda beta: angle_density(M6, alpha, beta), 0.0, math.pi - alpha, _marginal_spec())
    return result.value


def _formula(model, variable):
    side_a = {
        M1: lambda a: 8.0 * a,
        M2: lambda a: 12.0 * SQRT3 / math.pi * a * a * math.sqrt(2.0 - 3.0 * a * a),
        M3: lambda a: 1.0,
        M4: lambda a: 2.0 * a,
        M5: lambda a: 2.0 / (math.pi * math.sqrt((1.0 - a) * (1.0 + a))),
        M6: _m6_side,
    }
    side_c = {
        M3: lambda c: c / math.sqrt((1.0 - c) * (1.0 + c)),
        M4: lambda c: c,
        M5: lambda c: math.inf if c == 1.0 else 4.0 * c / math.pi ** 2 * ellip_k_comp(min(1.0, abs((1.0 - c) * (1.0 + c)))),
    }
    angle = {M1: _m1_angle, M2: _m2_angle, M3: _m3_angle, M4: _m4_angle, M5: _m5_angle, M6: _m6_angle}

    if variable in (Variable.SIDE_A, Variable.SIDE_B):
        return side_a[model]
    if variable in (Variable.ANGLE_ALPHA, Variable.ANGLE_BETA):
        return angle[model]
    if variable is Variable.SIDE_C and model in side_c:
        return side_c[model]
    if variable is Variable.ANGLE_GAMMA:
        if model in UNIFORM_GAMMA_MODELS:
            return lambda g: 1.0 / math.pi
        if model in (M1, M2):
            return angle[model]
    raise DomainError(f"no univariate density for {variable.value} under {model.label}")


def supports_variable(model, variable):
    try:
        _formula(ModelId.parse(model), Variable.parse(variable))
    except DomainError:
        return False
    return True


def univariate_density(model, variable, x):
    """Univariate density of a side or angle at x; zero outside the open support."""
    model = ModelId.parse(model)
    variable = Variable.parse(variable)
    formula = _formula(model, variable)
    lo, hi = variable_support(model, variable)
    x = float(x)
    if not (math.isfinite(x) and lo < x < hi):
        return 0.0
    return formula(x)


def marginal_density(model, variable, x, spec=None):
    """Univariate density obtained by integrating the bivariate density over the other coordinate."""
    model = ModelId.parse(model)
    variable = Variable.parse(variable)
    spec = spec or _marginal_spec()
    if variable is Variable.SIDE_A:
        region = side_region(model)
        if not region.x_lower < x < region.x_upper:
            return 0.0
        lo, hi = region.y_bounds(x)
        return integrate_1d(lambda y: side_density(model, x, y), lo, hi,
                            spec.with_singular(*region.y_singular)).value
    if variable is Variable.SIDE_C:
        lo, hi = side_c_bounds(model, x)
        return integrate_1d(lambda a: side_density(model, a, x), lo, hi, spec.with_singular(*BOTH)).value
    if variable is Variable.ANGLE_ALPHA:
        if not 0.0 < x < math.pi:
            return 0.0
        return integrate_1d(lambda beta: angle_density(model, x, beta), 0.0, math.pi - x,
                            spec.with_singular(*BOTH)).value
    raise DomainError(f"marginal of {variable.value} is not defined through the bivariate density")


def acceptance_probability(model):
    """Probability that one latent draw yields a triangle."""
    model = ModelId.parse(model)
    if model is M1:
        return 0.25
    if model is M2:
        return SQRT3 * math.pi / 9.0
    if model is M6:
        from triangles import constants
        return constants.delta_m6()
    return 1.0

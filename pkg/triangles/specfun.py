"""Special functions used by the triangle densities and constants.

Elliptic integrals go through Carlson's symmetric forms R_F and R_D, which
gives complete and incomplete integrals from the same duplication loop.
The modulus convention is k (not the parameter m = k**2) everywhere.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from triangles.errors import ConvergenceError, DomainError

logger = logging.getLogger(__name__)

CARLSON_TOLERANCE = 1e-16
CARLSON_MAX_ITERATIONS = 100

AGM_TOLERANCE = 1e-15
AGM_MAX_ITERATIONS = 64

HYP3F2_TERM_BUDGET = 1_000_000
HYP3F2_TOLERANCE = 1e-12

# Lanczos approximation (g = 6.0246800407767296, 13 terms), scaled by exp(-g).
LANCZOS_G = 6.024680040776729583740234375
LANCZOS_NUM = np.array([
    0.006061842346248906525783753964555936883222,
    0.5098416655656676188125178644804694509993,
    19.51992788247617482847860966235652136208,
    449.9445569063168119446858607650988409623,
    6955.999602515376140356310115515198987526,
    75999.29304014542649875303443598909137092,
    601859.6171681098786670226533699352302507,
    3481712.15498064590882071018964774556468,
    14605578.08768506808414169982791359218571,
    43338889.32467613834773723740590533316085,
    86363131.28813859145546927288977868422342,
    103794043.1163445451906271053616070238554,
    56906521.91347156388090791033559122686859,
])
LANCZOS_DEN = np.array([
    1.0, 66.0, 1925.0, 32670.0, 357423.0, 2637558.0, 13339535.0,
    45995730.0, 105258076.0, 150917976.0, 120543840.0, 39916800.0, 0.0,
])


def _finite(name, value):
    value = float(value)
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")
    return value


def carlson_rf(x, y, z):
    """Carlson's symmetric integral R_F(x, y, z); at most one argument may be zero."""
    x, y, z = (_finite(n, v) for n, v in (("x", x), ("y", y), ("z", z)))
    if min(x, y, z) < 0.0 or sum(v == 0.0 for v in (x, y, z)) > 1:
        raise DomainError(f"carlson_rf needs non-negative arguments with at most one zero, got {(x, y, z)}")

    a0 = (x + y + z) / 3.0
    q = (3.0 * CARLSON_TOLERANCE) ** (-1.0 / 6.0) * max(abs(a0 - x), abs(a0 - y), abs(a0 - z))
    a, xm, ym, zm = a0, x, y, z
    scale = 1.0
    for _ in range(CARLSON_MAX_ITERATIONS):
        if scale * q < abs(a):
            break
        sx, sy, sz = math.sqrt(xm), math.sqrt(ym), math.sqrt(zm)
        lam = sx * sy + sx * sz + sy * sz
        xm, ym, zm, a = (xm + lam) / 4.0, (ym + lam) / 4.0, (zm + lam) / 4.0, (a + lam) / 4.0
        scale /= 4.0
    else:
        raise ConvergenceError(f"carlson_rf did not converge for {(x, y, z)}")

    big_x = (a0 - x) * scale / a
    big_y = (a0 - y) * scale / a
    big_z = -(big_x + big_y)
    e2 = big_x * big_y - big_z * big_z
    e3 = big_x * big_y * big_z
    return (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0) / math.sqrt(a)


def carlson_rd(x, y, z):
    """Carlson's degenerate integral R_D(x, y, z) = R_J(x, y, z, z)."""
    x, y, z = (_finite(n, v) for n, v in (("x", x), ("y", y), ("z", z)))
    if min(x, y) < 0.0 or z <= 0.0 or (x == 0.0 and y == 0.0):
        raise DomainError(f"carlson_rd needs x, y >= 0 (not both zero) and z > 0, got {(x, y, z)}")

    a0 = (x + y + 3.0 * z) / 5.0
    q = (CARLSON_TOLERANCE / 4.0) ** (-1.0 / 6.0) * max(abs(a0 - x), abs(a0 - y), abs(a0 - z))
    a, xm, ym, zm = a0, x, y, z
    scale = 1.0
    total = 0.0
    for _ in range(CARLSON_MAX_ITERATIONS):
        if scale * q < abs(a):
            break
        sx, sy, sz = math.sqrt(xm), math.sqrt(ym), math.sqrt(zm)
        lam = sx * sy + sx * sz + sy * sz
        total += scale / (sz * (zm + lam))
        xm, ym, zm, a = (xm + lam) / 4.0, (ym + lam) / 4.0, (zm + lam) / 4.0, (a + lam) / 4.0
        scale /= 4.0
    else:
        raise ConvergenceError(f"carlson_rd did not converge for {(x, y, z)}")

    big_x = (a0 - x) * scale / a
    big_y = (a0 - y) * scale / a
    big_z = -(big_x + big_y) / 3.0
    xy = big_x * big_y
    zz = big_z * big_z
    e2 = xy - 6.0 * zz
    e3 = (3.0 * xy - 8.0 * zz) * big_z
    e4 = 3.0 * (xy - zz) * zz
    e5 = xy * zz * big_z
    series = (1.0 - 3.0 * e2 / 14.0 + e3 / 6.0 + 9.0 * e2 * e2 / 88.0
              - 3.0 * e4 / 22.0 - 9.0 * e2 * e3 / 52.0 + 3.0 * e5 / 26.0)
    return scale * a ** -1.5 * series + 3.0 * total


def _check_modulus(k, allow_one):
    k = _finite("k", k)
    if k < 0.0 or k > 1.0 or (k == 1.0 and not allow_one):
        upper = "1]" if allow_one else "1)"
        raise DomainError(f"modulus k must lie in [0, {upper}, got {k!r}")
    return k


def _check_complementary(kc):
    kc = _finite("kc", kc)
    if kc <= 0.0 or kc > 1.0:
        raise DomainError(f"complementary modulus kc must lie in (0, 1], got {kc!r}")
    return kc


def ellip_k(k):
    """Complete elliptic integral of the first kind K(k)."""
    k = _check_modulus(k, allow_one=False)
    return carlson_rf(0.0, (1.0 - k) * (1.0 + k), 1.0)


def ellip_k_comp(kc):
    kc = _check_complementary(kc)
    return carlson_rf(0.0, kc * kc, 1.0)


def ellip_e(k):
    """Complete elliptic integral of the second kind E(k); E(1) = 1."""
    k = _check_modulus(k, allow_one=True)
    if k == 1.0:
        return 1.0
    kc2 = (1.0 - k) * (1.0 + k)
    return carlson_rf(0.0, kc2, 1.0) - k * k / 3.0 * carlson_rd(0.0, kc2, 1.0)


def ellip_e_comp(kc):
    kc = _finite("kc", kc)
    if kc < 0.0 or kc > 1.0:
        raise DomainError(f"complementary modulus kc must lie in [0, 1], got {kc!r}")
    if kc == 0.0:
        return 1.0
    kc2 = kc * kc
    return carlson_rf(0.0, kc2, 1.0) - (1.0 - kc) * (1.0 + kc) / 3.0 * carlson_rd(0.0, kc2, 1.0)


def ellip_f_incomplete(omega, k, kc=None):
    """Incomplete elliptic integral of the first kind F(omega, k).

    k = 1 is accepted while omega < pi/2, where the integral still converges.
    Passing the complementary modulus kc keeps 1 - k**2 sin(omega)**2 exact
    when k is close to one.
    """
    omega = _finite("omega", omega)
    k = _check_modulus(k, allow_one=True)
    if omega < 0.0 or omega > math.pi / 2:
        raise DomainError(f"amplitude must lie in [0, pi/2], got {omega!r}")
    if k == 1.0 and omega == math.pi / 2:
        raise DomainError("F(pi/2, 1) diverges")
    if omega == 0.0:
        return 0.0
    s, c = math.sin(omega), math.cos(omega)
    kc2 = (1.0 - k) * (1.0 + k) if kc is None else float(kc) ** 2
    delta2 = c * c + kc2 * s * s
    return s * carlson_rf(c * c, delta2, 1.0)


def ellip_k_agm(k):
    k = _check_modulus(k, allow_one=False)
    a, b = 1.0, math.sqrt((1.0 - k) * (1.0 + k))
    for _ in range(AGM_MAX_ITERATIONS):
        if abs(a - b) <= AGM_TOLERANCE * a:
            break
        a, b = (a + b) / 2.0, math.sqrt(a * b)
    return math.pi / (a + b)


def ellip_e_agm(k):
    k = _check_modulus(k, allow_one=True)
    if k == 1.0:
        return 1.0
    a, b = 1.0, math.sqrt((1.0 - k) * (1.0 + k))
    correction = [0.5 * k * k]
    weight = 0.5
    for _ in range(AGM_MAX_ITERATIONS):
        if abs(a - b) <= AGM_TOLERANCE * a:
            break
        c = (a - b) / 2.0
        a, b = (a + b) / 2.0, math.sqrt(a * b)
        weight *= 2.0
        correction.append(weight * c * c)
    return math.pi / (a + b) * (1.0 - math.fsum(correction))


def _dilog_series(x):
    terms = []
    power = x
    k = 1
    while True:
        term = power / (k * k)
        terms.append(term)
        if abs(term) < 1e-18 * abs(terms[0]):
            break
        k += 1
        power *= x
    return math.fsum(terms)


def dilog(x):
    """Real dilogarithm Li2(x) for x <= 1."""
    x = _finite("x", x)
    if x > 1.0:
        raise DomainError(f"dilog is real only for x <= 1, got {x!r}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return math.pi ** 2 / 6.0
    if x < -1.0:
        log_neg = math.log(-x)
        return -math.pi ** 2 / 6.0 - 0.5 * log_neg * log_neg - dilog(1.0 / x)
    if x < -0.5:
        log_one_minus = math.log1p(-x)
        return -_dilog_series(x / (x - 1.0)) - 0.5 * log_one_minus * log_one_minus
    if x <= 0.5:
        return _dilog_series(x)
    return math.pi ** 2 / 6.0 - math.log(x) * math.log1p(-x) - _dilog_series(1.0 - x)


def gamma_fn(x):
    """Gamma function for positive real arguments."""
    x = _finite("x", x)
    if x <= 0.0:
        raise DomainError(f"gamma_fn needs x > 0, got {x!r}")
    if x < 1.0:
        return gamma_fn(x + 1.0) / x
    lanczos_sum = np.polyval(LANCZOS_NUM, x) / np.polyval(LANCZOS_DEN, x)
    zgh = x + LANCZOS_G - 0.5
    half_power = zgh ** ((x - 0.5) / 2.0)
    return float(lanczos_sum * half_power / math.exp(x - 0.5) * half_power)


@dataclass(frozen=True)
class SeriesResult:
    value: float
    tail_bound: float
    terms: int
    converged: bool


def _hyp3f2_ratios(start, stop, x):
    n = np.arange(start, stop, dtype=float)
    return x * (n + 0.5) ** 2 * (n + 1.5) / ((n + 1.25) * (n + 1.75) * (n + 1.0))


def hyp3f2_series(x, tolerance=HYP3F2_TOLERANCE, budget=HYP3F2_TERM_BUDGET):
    """Sum 3F2(1/2, 1/2, 3/2; 5/4, 7/4; x) written in Gamma-ratio form.

    The leading factor 3/(4 sqrt(2 pi)) Gamma(1/2)^2 Gamma(3/2)/(Gamma(5/4) Gamma(7/4))
    makes the n = 0 term exactly one. Below x = 1 the tail after term n is
    bounded by t_n x/(1 - x); at x = 1 terms decay like n**-1.5 and the
    partial sums at doubling lengths are Richardson-extrapolated in powers
    N**-(j - 1/2).
    """
    x = _finite("x", x)
    if x < 0.0 or x > 1.0:
        raise DomainError(f"hyp3f2_series needs x in [0, 1], got {x!r}")

    first = (3.0 / (4.0 * math.sqrt(2.0 * math.pi)) * gamma_fn(0.5) ** 2 * gamma_fn(1.5)
             / (gamma_fn(1.25) * gamma_fn(1.75)))
    if x == 0.0:
        return SeriesResult(first, 0.0, 1, True)
    if x < 1.0:
        return _hyp3f2_below_one(x, first, tolerance, budget)
    return _hyp3f2_at_one(first, tolerance, budget)


def _hyp3f2_below_one(x, first, tolerance, budget):
    terms = [first]
    last = first
    block = 256
    n = 0
    while n < budget:
        stop = min(n + block, budget)
        block_terms = last * np.cumprod(_hyp3f2_ratios(n, stop, x))
        for term in block_terms:
            n += 1
            terms.append(float(term))
            tail = term * x / (1.0 - x)
            if tail <= tolerance:
                return SeriesResult(math.fsum(terms), float(tail), n + 1, True)
        last = float(block_terms[-1])
        block *= 2
    tail = last * x / (1.0 - x)
    logger.warning(f"3F2 series at x={x} stopped at the {budget}-term budget (tail bound {tail:.3e})")
    return SeriesResult(math.fsum(terms), float(tail), budget, False)


def _hyp3f2_at_one(first, tolerance, budget, max_order=8):
    partial = [first]
    last = first
    n = 0
    length = 64
    table = []
    previous = None
    while length <= budget:
        block_terms = last * np.cumprod(_hyp3f2_ratios(n, length - 1, 1.0))
        partial.append(math.fsum(block_terms))
        last = float(block_terms[-1])
        n = length - 1

        row = [math.fsum(partial)]
        for j in range(1, min(len(table), max_order) + 1):
            factor = 2.0 ** (j - 0.5) - 1.0
            row.append(row[j - 1] + (row[j - 1] - table[-1][j - 1]) / factor)
        table.append(row)
        estimate = row[-1]
        if previous is not None and len(row) > 2:
            change = abs(estimate - previous)
            if change < tolerance:
                return SeriesResult(estimate, change, length, True)
        previous = estimate
        length *= 2

    change = abs(table[-1][-1] - table[-2][-1]) if len(table) > 1 else math.inf
    logger.warning(f"3F2 series at x=1 stopped at the {budget}-term budget (last change {change:.3e})")
    return SeriesResult(table[-1][-1], change, length // 2, False)


def hyp3f2(x, tolerance=HYP3F2_TOLERANCE, budget=HYP3F2_TERM_BUDGET):
    """Value of hyp3f2_series, raising ConvergenceError when the tail bound is not met."""
    result = hyp3f2_series(x, tolerance=tolerance, budget=budget)
    if not result.converged:
        raise ConvergenceError(
            f"3F2 series at x={x} did not reach tolerance {tolerance} within {result.terms} terms"
        )
    return result.value

import math

import pytest

from triangles.errors import DomainError, IntegrandError
from triangles.quadrature import (
    BOTH, LOWER, UPPER, IntegrationSpec, Region, integrate_1d, integrate_2d,
)


def test_smooth_integral():
    result = integrate_1d(math.sin, 0.0, math.pi)
    assert result.converged
    assert result.value == pytest.approx(2.0, abs=1e-12)
    assert result.evaluations > 0


def test_inverse_square_root_at_lower_end():
    result = integrate_1d(lambda x: 1.0 / math.sqrt(x), 0.0, 1.0, IntegrationSpec().with_singular(LOWER))
    assert result.converged
    assert result.value == pytest.approx(2.0, abs=1e-12)


def test_walls_at_both_ends():
    spec = IntegrationSpec().with_singular(*BOTH)
    result = integrate_1d(lambda x: 1.0 / math.sqrt((1.0 - x) * (1.0 + x)), -1.0, 1.0, spec)
    assert result.converged
    assert result.value == pytest.approx(math.pi, abs=1e-10)


def test_logarithmic_endpoint():
    result = integrate_1d(math.log, 0.0, 1.0, IntegrationSpec().with_singular(LOWER))
    assert result.value == pytest.approx(-1.0, abs=1e-10)


def test_interior_singular_point():
    spec = IntegrationSpec().with_singular(points=(0.0,))
    result = integrate_1d(lambda x: 1.0 / math.sqrt(abs(x)), -1.0, 1.0, spec)
    assert result.converged
    assert result.value == pytest.approx(4.0, abs=1e-10)


def test_upper_flag_only():
    result = integrate_1d(lambda x: 1.0 / math.sqrt(1.0 - x), 0.0, 1.0, IntegrationSpec().with_singular(UPPER))
    assert result.value == pytest.approx(2.0, abs=1e-10)


def test_non_finite_integrand_raises():
    with pytest.raises(IntegrandError) as excinfo:
        integrate_1d(lambda x: math.nan, 0.0, 1.0)
    assert isinstance(excinfo.value, DomainError)


@pytest.mark.parametrize("lower,upper", [(1.0, 1.0), (2.0, 1.0), (0.0, math.inf)])
def test_bad_limits(lower, upper):
    with pytest.raises(DomainError):
        integrate_1d(lambda x: x, lower, upper)


def test_spec_validation():
    with pytest.raises(DomainError):
        IntegrationSpec(absolute_tolerance=0.0)
    with pytest.raises(DomainError):
        IntegrationSpec(max_evaluations=10)
    with pytest.raises(DomainError):
        IntegrationSpec(singular_endpoints={"middle"})


def test_spec_helpers():
    spec = IntegrationSpec().with_singular(LOWER, points=[0.5])
    assert spec.singular_endpoints == frozenset({LOWER})
    assert spec.points == (0.5,)
    assert spec.tightened(0.1).absolute_tolerance == pytest.approx(1e-11)
    assert spec.escalated(4).max_evaluations == 40_000_000


def test_rectangle_region():
    region = Region.rectangle(0.0, 1.0, 0.0, 2.0)
    result = integrate_2d(lambda x, y: x * y, region)
    assert result.converged
    assert result.value == pytest.approx(1.0, abs=1e-12)
    assert region.inside(0.5, 1.0)
    assert not region.inside(0.5, 2.5)


def test_quarter_disc_area():
    region = Region(0.0, 1.0, lambda x: 0.0, lambda x: math.sqrt((1.0 - x) * (1.0 + x)),
                    x_singular=frozenset({UPPER}), name="quarter disc")
    result = integrate_2d(lambda x, y: 1.0, region)
    assert result.value == pytest.approx(math.pi / 4, abs=1e-10)


def test_inner_wall_singularity():
    # integral of 1/sqrt(1 - x**2 - y**2) over the quarter disc is pi/2
    region = Region(0.0, 1.0, lambda x: 0.0, lambda x: math.sqrt((1.0 - x) * (1.0 + x)),
                    x_singular=frozenset({UPPER}), y_singular=frozenset({UPPER}))

    def f(x, y):
        radicand = (1.0 - x * x) - y * y
        return 1.0 / math.sqrt(radicand) if radicand > 0.0 else 0.0

    result = integrate_2d(f, region)
    assert result.value == pytest.approx(math.pi / 2, abs=1e-8)


def test_bounding_box():
    region = Region(0.0, 2.0, lambda x: -x, lambda x: x)
    x_lo, x_hi, y_lo, y_hi = region.bounding_box
    assert (x_lo, x_hi) == (0.0, 2.0)
    assert y_lo == pytest.approx(-2.0, abs=0.01)
    assert y_hi == pytest.approx(2.0, abs=0.01)


def test_linearity_and_repeatability():
    spec = IntegrationSpec().with_singular(LOWER)

    def f(x):
        return math.log(x) * math.cos(x)

    def g(x):
        return math.exp(-x) / math.sqrt(x)

    combined = integrate_1d(lambda x: f(x) + 2.0 * g(x), 0.0, 2.0, spec)
    separate = integrate_1d(f, 0.0, 2.0, spec).value + 2.0 * integrate_1d(g, 0.0, 2.0, spec).value
    assert combined.value == pytest.approx(separate, abs=1e-11)
    again = integrate_1d(lambda x: f(x) + 2.0 * g(x), 0.0, 2.0, spec)
    assert again == combined


def test_inner_warnings_do_not_fail_an_accurate_double_integral():
    # |x - y| has a kink inside every inner interval
    region = Region.rectangle(0.0, 1.0, 0.0, 1.0)
    result = integrate_2d(lambda x, y: abs(x - y), region)
    assert result.converged
    assert result.value == pytest.approx(1.0 / 3.0, abs=1e-10)
    assert result.error_estimate <= 1e-10


def test_budget_exhaustion_is_reported():
    wiggle = lambda x: math.sin(200.0 * x)
    starved = integrate_1d(wiggle, 0.0, 100.0, IntegrationSpec(max_evaluations=50_000))
    assert not starved.converged
    assert starved.budget_exhausted
    assert not integrate_1d(math.sin, 0.0, math.pi).budget_exhausted

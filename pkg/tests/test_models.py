import math

import numpy as np
import pytest

from triangles.errors import DomainError
from triangles.models import (
    M1, M2, M3, M4, M5, M6, MODEL_FUNCTIONALS, Functional, LatentDraw, ModelId, TriangleBatch, Variable,
    acceptance_probability, angle_density, angles_from_sides, is_obtuse, marginal_density, omega, realize,
    realize_batch, sample, side_density, side_support, sides_from_angles, sides_from_coordinates,
    supports_variable, univariate_density, variable_support,
)


def constraint(model, a, b, c):
    """Residual of the constraint surface each model samples from."""
    if model is M1:
        return a + b + c - 1.0
    if model in (M2, M6):
        return a * a + b * b + c * c - 1.0
    if model is M3:
        return a + b - 1.0
    return a * a + b * b - 1.0


@pytest.fixture
def batches():
    rng = np.random.Generator(np.random.PCG64(20240611))
    out = {}
    for model in ModelId:
        u1 = rng.random(4000)
        u2 = rng.random(4000)
        out[model] = realize_batch(model, u1, u2)[0]
    return out


def test_model_parsing():
    assert ModelId.parse("M3") is M3
    assert ModelId.parse(" m6 ") is M6
    assert ModelId.parse(M2) is M2
    assert M4.label == "M4"
    with pytest.raises(DomainError):
        ModelId.parse("m9")


def test_variable_and_functional_parsing():
    assert Variable.parse("alpha") is Variable.ANGLE_ALPHA
    assert Variable.parse("c") is Variable.SIDE_C
    assert Variable.ANGLE_GAMMA.is_angle and not Variable.SIDE_B.is_angle
    assert Functional.parse("α²") is Functional.ALPHA2
    assert Functional.parse("alphabeta") is Functional.ALPHABETA
    with pytest.raises(DomainError):
        Variable.parse("delta")
    with pytest.raises(DomainError):
        Functional.parse("abc")


def test_latent_draw_rejects_closed_endpoints():
    with pytest.raises(DomainError):
        LatentDraw(M1, 0.0, 0.5)
    with pytest.raises(DomainError):
        LatentDraw(M1, 0.5, 1.0)


@pytest.mark.parametrize("model,u1,u2", [
    (M1, 0.3, 0.6), (M2, 0.3, 0.6), (M3, 0.3, 0.4), (M4, 0.3, 0.4), (M5, 0.3, 0.4), (M6, 0.5, 0.5),
])
def test_realize_lands_on_the_constraint(model, u1, u2):
    triangle = realize(model, LatentDraw(model, u1, u2))
    assert triangle is not None
    assert constraint(model, triangle.a, triangle.b, triangle.c) == pytest.approx(0.0, abs=1e-12)
    assert triangle.alpha + triangle.beta + triangle.gamma == pytest.approx(math.pi, abs=1e-12)


def test_realize_rejects_non_triangles():
    assert realize(M1, LatentDraw(M1, 0.1, 0.2)) is None
    # phi near pi/2 and psi near 0 put almost all the mass in side a
    assert realize(M6, LatentDraw(M6, 0.99, 0.01)) is None
    with pytest.raises(DomainError):
        realize(M2, LatentDraw(M1, 0.3, 0.6))


def test_batches_satisfy_invariants(batches):
    for model, batch in batches.items():
        assert len(batch) > 0
        residual = constraint(model, batch.a, batch.b, batch.c)
        assert np.max(np.abs(residual)) < 1e-12
        assert np.max(np.abs(batch.alpha + batch.beta + batch.gamma - math.pi)) < 1e-12
        assert np.all(batch.a < batch.b + batch.c)
        assert np.all(batch.b < batch.a + batch.c)
        assert np.all(batch.c < batch.a + batch.b)
        # law of sines
        ratio_a = batch.a / np.sin(batch.alpha)
        ratio_b = batch.b / np.sin(batch.beta)
        ratio_c = batch.c / np.sin(batch.gamma)
        assert np.max(np.abs(ratio_a / ratio_b - 1.0)) < 1e-9
        assert np.max(np.abs(ratio_a / ratio_c - 1.0)) < 1e-9


def test_sides_round_trip(batches):
    for model, batch in batches.items():
        for triangle in list(batch.samples())[:500]:
            a, b, c = sides_from_angles(model, triangle.alpha, triangle.beta)
            assert abs(a - triangle.a) < 1e-12
            assert abs(b - triangle.b) < 1e-12
            assert abs(c - triangle.c) < 1e-12


def test_acceptance_of_one_for_gamma_models():
    rng = np.random.Generator(np.random.PCG64(3))
    for model in (M3, M4, M5):
        _, accepted = realize_batch(model, rng.random(1000), rng.random(1000))
        assert accepted.all()


def test_angles_from_sides():
    alpha, beta, gamma = angles_from_sides(3.0, 4.0, 5.0)
    assert gamma == pytest.approx(math.pi / 2, abs=1e-15)
    assert alpha == pytest.approx(math.atan2(3.0, 4.0), abs=1e-15)
    # needle: the tiny angle keeps full relative accuracy
    alpha, _, _ = angles_from_sides(1e-9, 1.0, 1.0)
    assert alpha == pytest.approx(1e-9, rel=1e-12)
    with pytest.raises(DomainError):
        angles_from_sides(1.0, 1.0, 3.0)
    with pytest.raises(DomainError):
        angles_from_sides(1.0, 1.0, 2.0)
    with pytest.raises(DomainError):
        angles_from_sides(-1.0, 1.0, 1.0)


def test_sides_from_angles_domain():
    with pytest.raises(DomainError):
        sides_from_angles(M1, 2.0, 2.0)
    with pytest.raises(DomainError):
        sides_from_angles(M1, 0.0, 1.0)
    a, b, c = sides_from_angles(M1, math.pi / 3, math.pi / 3)
    assert (a, b, c) == pytest.approx((1 / 3, 1 / 3, 1 / 3), abs=1e-15)


def test_sample_draws_one_triangle():
    rng = np.random.Generator(np.random.PCG64(11))
    for model in ModelId:
        triangle = sample(model, rng)
        assert constraint(model, triangle.a, triangle.b, triangle.c) == pytest.approx(0.0, abs=1e-12)


def test_is_obtuse():
    rng = np.random.Generator(np.random.PCG64(5))
    triangle = sample(M3, rng)
    assert is_obtuse(triangle) == (max(triangle.alpha, triangle.beta, triangle.gamma) > math.pi / 2)


def test_batch_helpers(batches):
    batch = batches[M3]
    np.testing.assert_array_equal(batch.functional("ac"), batch.a * batch.c)
    np.testing.assert_array_equal(batch.column("gamma"), batch.gamma)
    merged = TriangleBatch.concatenate([batch, batch])
    assert len(merged) == 2 * len(batch)
    assert len(TriangleBatch.concatenate([])) == 0
    assert set(MODEL_FUNCTIONALS[M1]) == {Functional.A, Functional.A2, Functional.AB, Functional.ALPHA,
                                          Functional.ALPHA2, Functional.ALPHABETA}


def test_side_supports():
    assert side_support(M1, 0.3, 0.3)
    assert not side_support(M1, 0.1, 0.1)
    assert side_density(M1, 0.1, 0.1) == 0.0
    assert side_density(M1, 0.3, 0.3) == 8.0
    assert side_support(M3, 0.5, 0.5)
    assert not side_support(M3, 0.9, 0.5)
    assert sides_from_coordinates(M4, 0.6, 0.5) == pytest.approx((0.6, 0.8, 0.5))
    assert variable_support(M2, "a") == pytest.approx((0.0, math.sqrt(2.0 / 3.0)))
    assert variable_support(M5, "c") == pytest.approx((0.0, math.sqrt(2.0)))


def test_univariate_values():
    # the perimeter model's angle density at a right angle is 12 ln 2 - 8
    assert univariate_density(M1, "alpha", math.pi / 2) == pytest.approx(12 * math.log(2.0) - 8.0, rel=1e-13)
    assert univariate_density(M3, "alpha", math.pi / 2) == pytest.approx(1.0 / (2.0 * math.pi), rel=1e-14)
    assert univariate_density(M1, "a", 0.3) == pytest.approx(2.4)
    assert univariate_density(M4, "c", 0.7) == pytest.approx(0.7)
    assert univariate_density(M5, "gamma", 1.0) == pytest.approx(1.0 / math.pi)
    assert univariate_density(M1, "a", 0.6) == 0.0
    assert univariate_density(M5, "c", 1.0) == math.inf


@pytest.mark.parametrize("model,boundary", [
    (M1, 2.0 * math.pi / 3.0),      # series/closed-form switch at cos(alpha/2) = 1/2
    (M3, math.acos(0.25)),
    (M3, math.acos(-0.25)),
])
def test_angle_density_continuous_across_branch_switch(model, boundary):
    left = univariate_density(model, "alpha", boundary - 1e-9)
    right = univariate_density(model, "alpha", boundary + 1e-9)
    assert left == pytest.approx(right, rel=1e-7)


def test_unsupported_variables():
    assert not supports_variable(M1, "c")
    assert supports_variable(M5, "c")
    with pytest.raises(DomainError):
        univariate_density(M6, "c", 0.5)


@pytest.mark.parametrize("model,variable,x", [
    (M1, "a", 0.3), (M2, "a", 0.5), (M3, "c", 0.4), (M4, "a", 0.35), (M5, "c", 0.8),
    (M1, "alpha", 1.2), (M4, "alpha", 2.0), (M5, "alpha", 0.7), (M6, "a", 0.4),
])
def test_marginal_matches_formula(model, variable, x):
    assert marginal_density(model, variable, x) == pytest.approx(univariate_density(model, variable, x),
                                                                 rel=1e-8, abs=1e-10)


def test_omega_domain():
    assert 0.0 < omega(0.5) <= math.pi / 2
    with pytest.raises(DomainError):
        omega(0.9)


def test_acceptance_probability():
    assert acceptance_probability(M1) == 0.25
    assert acceptance_probability(M2) == pytest.approx(math.sqrt(3.0) * math.pi / 9.0)
    assert acceptance_probability(M4) == 1.0
    assert acceptance_probability(M6) == pytest.approx(0.2815898507, abs=1e-8)


@pytest.mark.parametrize("model", [M4, M5])
def test_side_density_defined_up_to_the_walls(model):
    for i in range(1, 4000):
        x = i / 4000
        b = math.sqrt((1.0 - x) * (1.0 + x))
        for y in (math.nextafter(abs(x - b), math.inf), math.nextafter(x + b, 0.0)):
            value = side_density(model, x, y)
            if side_support(model, x, y):
                assert math.isfinite(value) and value > 0.0, (x, y)
            else:
                assert value == 0.0, (x, y)


@pytest.mark.parametrize("model", list(ModelId))
def test_side_density_positive_exactly_on_support(model):
    rng = np.random.Generator(np.random.PCG64(77))
    for x, y in zip(rng.uniform(0.0, 1.0, 4000), rng.uniform(0.0, 1.5, 4000)):
        x, y = float(x), float(y)
        assert (side_density(model, x, y) > 0.0) == side_support(model, x, y), (x, y)


@pytest.mark.parametrize("model", [M1, M2, M6])
def test_exchangeable_models_have_symmetric_densities(model):
    rng = np.random.Generator(np.random.PCG64(78))
    for x, y in zip(rng.uniform(0.0, 1.0, 200), rng.uniform(0.0, 1.0, 200)):
        x, y = float(x), float(y)
        assert side_density(model, x, y) == pytest.approx(side_density(model, y, x), rel=1e-10)
        alpha, beta = math.pi * x / 2.0, math.pi * y / 2.0
        assert angle_density(model, alpha, beta) == pytest.approx(angle_density(model, beta, alpha), rel=1e-12)


def test_worked_density_values():
    third = math.pi / 3
    assert angle_density(M1, third, third) == pytest.approx(8.0 / 27.0, rel=1e-14)
    assert angle_density(M3, third, third) == pytest.approx(math.sqrt(3.0) / (6.0 * math.pi), rel=1e-14)
    assert side_density(M3, 0.5, 0.5) == pytest.approx(0.7351, abs=1e-4)
    assert univariate_density(M2, "a", 1.0 / math.sqrt(3.0)) == pytest.approx(4.0 * math.sqrt(3.0) / math.pi,
                                                                              rel=1e-13)


def test_realize_broken_stick():
    triangle = realize(M1, LatentDraw(M1, 0.3, 0.7))
    assert (triangle.a, triangle.b, triangle.c) == pytest.approx((0.3, 0.4, 0.3), abs=1e-15)

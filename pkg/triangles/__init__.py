"""Constrained random-triangle models: samplers, densities, special functions,
quadrature, Monte Carlo estimation and the reference constant table."""

from triangles.errors import (
    ChiSquareError,
    ConvergenceError,
    DomainError,
    IntegrandError,
    SamplingError,
    TriangleError,
    UnknownConstantError,
)
from triangles.models import ModelId

__all__ = [
    "ChiSquareError",
    "ConvergenceError",
    "DomainError",
    "IntegrandError",
    "ModelId",
    "SamplingError",
    "TriangleError",
    "UnknownConstantError",
]

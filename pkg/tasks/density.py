import logging

import numpy as np
import pandas as pd

from tasks import write_table
from triangles.errors import DomainError
from triangles.models import (
    ANGLE_REGION, Variable, angle_density, side_density, side_region,
    supports_variable, univariate_density, variable_support,
)

KINDS = ("side", "angle")


def resolve_variable(model, kind, variable):
    # The Variable for a (model, kind, selector) combination, or None for the bivariate grid.
    if kind not in KINDS:
        raise DomainError(f"--kind must be one of {KINDS}, got {kind!r}")
    if variable is None:
        return None
    variable = Variable.parse(variable)
    if variable.is_angle != (kind == "angle"):
        raise DomainError(f"{variable.value} is not a {kind} variable")
    if not supports_variable(model, variable):
        raise DomainError(f"{model.label} has no univariate density for {variable.value}")
    return variable


def curve_frame(model, variable, grid_points):
    lo, hi = variable_support(model, variable)
    xs = np.linspace(lo, hi, grid_points)
    return pd.DataFrame({"x": xs, "density": [univariate_density(model, variable, x) for x in xs]})


def grid_frame(model, kind, grid_points):
    """Bivariate density on a grid_points x grid_points lattice over the support's bounding box."""
    if kind == "side":
        region = side_region(model)
        density = side_density
    else:
        region = ANGLE_REGION
        density = angle_density
    x_lo, x_hi, y_lo, y_hi = region.bounding_box
    xs = np.linspace(x_lo, x_hi, grid_points)
    ys = np.linspace(y_lo, y_hi, grid_points)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    values = [density(model, x, y) for x, y in zip(gx.ravel(), gy.ravel())]
    return pd.DataFrame({"x": gx.ravel(), "y": gy.ravel(), "density": values})


def cmd_density(config, kind, variable=None):
    variable = resolve_variable(config.model, kind, variable)
    try:
        if variable is None:
            logging.info(f"Evaluating the {kind} density of {config.model.label} on a {config.grid_points}^2 grid")
            frame = grid_frame(config.model, kind, config.grid_points)
        else:
            logging.info(f"Evaluating the {variable.value} density of {config.model.label} at {config.grid_points} points")
            frame = curve_frame(config.model, variable, config.grid_points)
        write_table(frame, config)
    except Exception as e:
        logging.error(f"Error in density: {str(e)}")
        raise
    return 0

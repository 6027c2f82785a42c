import logging

import pandas as pd

from tasks import write_table
from triangles.constants import closed_constant, quadrature_value, reference_table
from triangles.errors import DomainError
from triangles.models import Functional
from triangles.montecarlo import estimate_acceptance, estimate_moments, estimate_obtuse
from triangles.quadrature import IntegrationSpec

METHODS = ("closed", "quadrature", "mc")
_PATH_FOR_METHOD = {"closed": "closed_form", "quadrature": "quadrature", "mc": "monte_carlo"}


def model_records(model, method):
    path = _PATH_FOR_METHOD[method]
    return [record for record in reference_table() if record.model is model and path in record.paths]


def _mc_rows(config, records):
    kwargs = dict(seed=config.seed, chunk_size=config.chunk_size, threads=config.threads)
    moment_records = [r for r in records if r.name.startswith("E_")]
    estimates = estimate_moments(config.model, [Functional.parse(r.name[2:]) for r in moment_records],
                                 config.n, **kwargs) if moment_records else {}
    rows = []
    for record in records:
        if record.name == "obtuse":
            estimate = estimate_obtuse(config.model, config.n, **kwargs)
        elif record.name == "acceptance":
            estimate = estimate_acceptance(config.model, config.n, **kwargs)
        else:
            estimate = estimates[Functional.parse(record.name[2:])]
        rows.append({"key": record.key, "value": estimate.value, "std_error": estimate.std_error,
                     "reference": record.expected()})
    return rows


def moments_frame(config, method):
    if method not in METHODS:
        raise DomainError(f"--method must be one of {METHODS}, got {method!r}")
    records = model_records(config.model, method)
    if method == "mc":
        return pd.DataFrame(_mc_rows(config, records), columns=["key", "value", "std_error", "reference"])

    rows = []
    if method == "closed":
        for record in records:
            rows.append({"key": record.key, "value": closed_constant(record.key), "closed_form": record.closed_form,
                         "reference": record.reference_float})
        return pd.DataFrame(rows, columns=["key", "value", "closed_form", "reference"])

    spec = IntegrationSpec(absolute_tolerance=config.tolerance, relative_tolerance=config.tolerance)
    for record in records:
        logging.info(f"Integrating {record.key}")
        rows.append({"key": record.key, "value": quadrature_value(record.key, spec), "reference": record.expected()})
    return pd.DataFrame(rows, columns=["key", "value", "reference"])


def cmd_moments(config, method):
    logging.info(f"Computing {config.model.label} moments by {method}")
    try:
        write_table(moments_frame(config, method), config)
    except Exception as e:
        logging.error(f"Error in moments: {str(e)}")
        raise
    return 0

"""Verification suites: every check compares a computed value with an expected one.

A check passes when |computed - expected| <= tolerance. Checks whose
expected value is a lower bound (chi-square p-values) carry tolerance None
and pass when computed > expected.
"""
import itertools
import json
import logging
import math

from tasks import REPORT_SCHEMA, emit, generate_report, json_default
from triangles.constants import (
    EC_PATHS, INVERSE_C_PATHS, closed_constant, ec_m5, inverse_c_m6, lookup,
    normalization, quadrature_moment, quadrature_value, reference_table,
)
from triangles.errors import DomainError
from triangles.models import (
    M2, M4, M5, MODEL_FUNCTIONALS, Functional, ModelId, Variable,
    sides_from_angles, supports_variable, univariate_density, marginal_density, variable_support,
)
from triangles.montecarlo import (
    chi_square_fit, chi_square_two_sample, estimate_acceptance, estimate_moment, estimate_moments,
    estimate_obtuse, gaussian_angle_histogram, histogram_variable, sample_triangles, splitmix64,
)
from triangles.quadrature import IntegrationSpec

SUITES = ("constants", "normalization", "roundtrip", "marginal", "mc", "gaussian")

QUADRATURE_TOLERANCE = 1e-7
OBTUSE_TOLERANCE = 1e-6
NORMALIZATION_TOLERANCE = 1e-6
ROUNDTRIP_TOLERANCE = 1e-12
MARGINAL_TOLERANCE = 1e-8
MARGINAL_POINTS = 20
EC_SPREAD = 1e-9
SIGMAS = 4.0
MIN_P_VALUE = 1e-3
GAUSSIAN_BINS = 50

# Quadrature tolerances tighter than the table default.
_QUADRATURE_OVERRIDES = {"m6.obtuse": 1e-7, "m6.acceptance": 1e-8, "m6.inv_C": 1e-9}


def check(key, expected, computed, tolerance):
    passed = (computed is not None and math.isfinite(computed)
              and abs(computed - expected) <= tolerance)
    if not passed:
        logging.warning(f"Check {key} failed: computed {computed!r}, expected {expected!r} +/- {tolerance:.1e}")
    return {"key": key, "expected": expected, "computed": computed, "tolerance": tolerance, "pass": bool(passed)}


def lower_bound_check(key, bound, computed):
    passed = computed is not None and computed > bound
    if not passed:
        logging.warning(f"Check {key} failed: {computed!r} is not above {bound!r}")
    return {"key": key, "expected": bound, "computed": computed, "tolerance": None, "pass": bool(passed)}


def guarded(key, expected, tolerance, compute):
    """check() around compute(); any error becomes a failed check."""
    try:
        return check(key, expected, compute(), tolerance)
    except Exception as e:
        logging.error(f"Error computing {key}: {str(e)}")
        return check(key, expected, None, tolerance)


def _quadrature_tolerance(record):
    if record.key in _QUADRATURE_OVERRIDES:
        return _QUADRATURE_OVERRIDES[record.key]
    return OBTUSE_TOLERANCE if record.name == "obtuse" else QUADRATURE_TOLERANCE


def _quadrature_spec(config):
    return IntegrationSpec(absolute_tolerance=config.tolerance, relative_tolerance=config.tolerance)


def constants_suite(config):
    spec = _quadrature_spec(config)
    checks = []
    for record in reference_table():
        if "closed_form" in record.paths and record.reference_value is not None:
            checks.append(guarded(f"{record.key}.closed_vs_printed", record.reference_float,
                                  record.decimal_tolerance, lambda: closed_constant(record.key)))
        if "quadrature" in record.paths:
            checks.append(guarded(f"{record.key}.quadrature", record.expected(), _quadrature_tolerance(record),
                                  lambda: quadrature_value(record.key, spec)))

    # E(ac) also through the bivariate density.
    for model in (M4, M5):
        record = lookup(f"{model.value}.E_ac")
        checks.append(guarded(f"{record.key}.bivariate", record.expected(), QUADRATURE_TOLERANCE,
                              lambda: quadrature_moment(model, Functional.AC, spec).value))

    record = lookup("m5.E_c")
    values = {}
    for path in EC_PATHS:
        checks.append(guarded(f"m5.E_c.{path}", record.reference_float, record.decimal_tolerance,
                              lambda: values.setdefault(path, ec_m5(path))))
    for first, second in itertools.combinations(sorted(values), 2):
        checks.append(check(f"m5.E_c.{first}_vs_{second}", values[first], values[second], EC_SPREAD))

    record = lookup("m6.inv_C")
    for path in INVERSE_C_PATHS:
        checks.append(guarded(f"m6.inv_C.{path}", record.reference_float, _QUADRATURE_OVERRIDES[record.key],
                              lambda: inverse_c_m6(path)))
    return checks


def normalization_suite(config):
    spec = _quadrature_spec(config)
    return [
        guarded(f"{model.value}.{kind}_density_mass", 1.0, NORMALIZATION_TOLERANCE,
                lambda: normalization(model, kind, spec).value)
        for model in ModelId for kind in ("side", "angle")
    ]


def roundtrip_suite(config):
    checks = []
    for model in ModelId:
        batch = sample_triangles(model, config.n, seed=config.seed,
                                 chunk_size=config.chunk_size, threads=config.threads)
        residual = 0.0
        for triangle in batch.samples():
            a, b, c = sides_from_angles(model, triangle.alpha, triangle.beta)
            residual = max(residual, abs(a - triangle.a), abs(b - triangle.b), abs(c - triangle.c))
        logging.info(f"{model.label}: max side reconstruction residual {residual:.3e} over {len(batch)} samples")
        checks.append(check(f"{model.value}.roundtrip_residual", 0.0, residual, ROUNDTRIP_TOLERANCE))
    return checks


def marginal_suite(config):
    checks = []
    for model in ModelId:
        for variable in (Variable.SIDE_A, Variable.SIDE_C, Variable.ANGLE_ALPHA):
            if not supports_variable(model, variable):
                continue
            lo, hi = variable_support(model, variable)
            for i in range(MARGINAL_POINTS):
                x = lo + (hi - lo) * (i + 0.5) / MARGINAL_POINTS
                expected = univariate_density(model, variable, x)
                checks.append(guarded(f"{model.value}.{variable.value}@{x:.6f}", expected,
                                      MARGINAL_TOLERANCE * max(1.0, abs(expected)),
                                      lambda: marginal_density(model, variable, x)))
    return checks


def _mc_tolerance(record, estimate):
    # A printed decimal contributes its rounding when it is the only reference.
    floor = 0.0 if "closed_form" in record.paths else record.decimal_tolerance
    return SIGMAS * estimate.std_error + floor


def mc_suite(config):
    kwargs = dict(seed=config.seed, chunk_size=config.chunk_size, threads=config.threads)
    checks = []
    for model in ModelId:
        estimates = estimate_moments(model, MODEL_FUNCTIONALS[model], config.n, **kwargs)
        for functional, estimate in estimates.items():
            record = lookup(f"{model.value}.E_{functional.value}")
            checks.append(check(f"{record.key}.mc", record.expected(), estimate.value,
                                _mc_tolerance(record, estimate)))
        record = lookup(f"{model.value}.obtuse")
        estimate = estimate_obtuse(model, config.n, **kwargs)
        checks.append(check(f"{record.key}.mc", record.expected(), estimate.value, _mc_tolerance(record, estimate)))
        try:
            record = lookup(f"{model.value}.acceptance")
        except KeyError:
            continue
        estimate = estimate_acceptance(model, config.n, **kwargs)
        checks.append(check(f"{record.key}.mc", record.expected(), estimate.value, _mc_tolerance(record, estimate)))

    # Thread count must not change a bit of the result.
    single = estimate_moment(M2, Functional.AB, config.n, seed=config.seed, chunk_size=config.chunk_size, threads=1)
    pooled = estimate_moment(M2, Functional.AB, config.n, seed=config.seed, chunk_size=config.chunk_size,
                             threads=max(2, config.threads or 4))
    checks.append(check("m2.E_ab.thread_independence", single.value, pooled.value, 0.0))
    return checks


def gaussian_suite(config):
    kwargs = dict(chunk_size=config.chunk_size, threads=config.threads)
    oracle_seed = splitmix64(config.seed)
    stick = histogram_variable(M2, Variable.ANGLE_ALPHA, GAUSSIAN_BINS, config.n, seed=config.seed, **kwargs)
    oracle = gaussian_angle_histogram(GAUSSIAN_BINS, config.n, seed=oracle_seed, **kwargs)
    checks = []
    _, p_value = chi_square_two_sample(stick, oracle)
    checks.append(lower_bound_check("m2.alpha_vs_gaussian_oracle.p_value", MIN_P_VALUE, p_value))
    _, p_value = chi_square_fit(oracle, lambda x: univariate_density(M2, Variable.ANGLE_ALPHA, x))
    checks.append(lower_bound_check("gaussian_oracle_vs_m2_density.p_value", MIN_P_VALUE, p_value))
    return checks


_SUITE_RUNNERS = {
    "constants": constants_suite,
    "normalization": normalization_suite,
    "roundtrip": roundtrip_suite,
    "marginal": marginal_suite,
    "mc": mc_suite,
    "gaussian": gaussian_suite,
}


def run_suite(config, suite):
    if suite != "all" and suite not in _SUITE_RUNNERS:
        raise DomainError(f"unknown suite {suite!r}; expected one of {SUITES + ('all',)}")
    names = SUITES if suite == "all" else (suite,)
    checks = []
    for name in names:
        logging.info(f"Running the {name} suite")
        try:
            checks.extend(_SUITE_RUNNERS[name](config))
        except DomainError:
            raise
        except Exception as e:
            logging.error(f"Error in the {name} suite: {str(e)}")
            checks.append(check(f"{name}.completed", 1.0, None, 0.0))
    return {"schema": REPORT_SCHEMA, "suite": suite, "seed": config.seed, "n": config.n, "checks": checks}


def cmd_verify(config, suite, report_dir=None):
    """Run a verification suite; exit code 0 iff every check passes."""
    try:
        report = run_suite(config, suite)
        emit(json.dumps(report, indent=2, default=json_default) + "\n", config.out)
        if report_dir:
            generate_report(report, report_dir, suite=suite)
    except DomainError:
        raise
    except Exception as e:
        logging.error(f"Error in verify: {str(e)}")
        raise
    failed = [c["key"] for c in report["checks"] if not c["pass"]]
    logging.info(f"{len(report['checks']) - len(failed)} of {len(report['checks'])} checks passed")
    return 1 if failed else 0
